"""Operator p-norms, norming vectors, and operators that never attain.

Three computational paths: closed form for diagonal blocks, a symmetric
eigendecomposition for p = 2, and the alternating power iteration for any
other exponent (nonnegative data). Attainment is decided by the direct-sum
law against the structured tail.
"""

import numpy as np

from poscon import (
    CoordVector,
    IdentityTail,
    OperatorModel,
    adjoint,
    diagonal_non_attainer,
    corner,
    norming_from_image,
    norming_vector,
    operator_norm,
    power_norm_history,
    verify_norming,
)

print("== three methods, one norm ==")
diag = operator_norm(OperatorModel(2.0, np.diag([0.5, 0.9])))
print(f"diagonal    : value {diag.value}  via {diag.method}")
flat = OperatorModel(2.0, 0.5 * np.ones((2, 2)))
eig = operator_norm(flat)
print(f"p = 2       : value {eig.value:.15f}  via {eig.method}")
p3 = operator_norm(OperatorModel(3.0, 0.5 * np.ones((2, 2))))
print(f"p = 3       : value {p3.value:.15f}  via {p3.method} ({p3.iterations} iterations)")

print()
print("== the power iteration is monotone from below ==")
rng = np.random.default_rng(0)
history = power_norm_history(rng.random((4, 4)), 1.5)
print("estimates:", [f"{v:.12f}" for v in history[:5]], "...")

print()
print("== norming vectors and their residuals ==")
cert = norming_vector(flat)
print("u =", cert.u.entries)
print("residual |T*Tu - value^2 u| =", cert.residual_eigen)
report = verify_norming(flat, cert.u)
print("verify accepts:", report.accepted)

print()
print("== the image trick: Tu norms the adjoint ==")
B = OperatorModel(2.0, [[0.0, 1.0], [0.0, 0.0]])
v = norming_from_image(B, CoordVector([0.0, 1.0]))
print("B e_1 normalizes to", v.entries, "- norming for the transpose:",
      verify_norming(adjoint(B), v).accepted)

print()
print("== operators that never attain their norm ==")
D = diagonal_non_attainer(0.5, 0.9)
res = operator_norm(D)
print("diagonal entries ->", corner(D, 5).diagonal())
print(f"norm {res.value}, attained flag: {res.attained}")
for K in (5, 20, 80):
    trunc = operator_norm(OperatorModel(2.0, corner(D, K))).value
    print(f"  corner {K:3d}: norm {trunc:.12f} (approaches 1 from below)")

print()
print("== identity tails attain from the tail ==")
I = OperatorModel(2.0, [[0.5]], IdentityTail())
res = operator_norm(I)
print(f"value {res.value}, flag {res.attained}, norming basis index {res.tail_index}")
