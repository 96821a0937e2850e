"""The operator constructions: extensions, finite representatives, dense
embeddings, and the counterexample sequences.
"""

import numpy as np

from poscon import (
    OperatorModel,
    apply,
    density_embed,
    extend_with_full_norming,
    locate_norming_representative,
    operator_norm,
    seq_non_attaining,
    seq_zero_row,
    support,
)
from poscon.norms import matrix_norm
from poscon.topologies import adj_gap, sot_gap
from poscon.typicality import probe_class_m, probe_class_m_prime

print("== norm-one extension with a fully supported norming vector ==")
A = OperatorModel(2.0, [[0.5]])
B, cert = extend_with_full_norming(A, 0.1)
print("extended block:")
print(B.block.round(6))
print("norm:", cert.norm_value)
print("support of u :", sorted(support(cert.u).indices))
print("support of Bu:", sorted(support(apply(B, cert.u)).indices))
diff = B.block[:, :1].copy()
diff[:1, :] -= A.block
print("column-restriction distance to A:", matrix_norm(diff, 2.0), "< 0.1")

print()
print("== near-norm-one inputs keep the whole operator close ==")
A99 = OperatorModel(2.0, [[0.99]])
B99, cert99 = extend_with_full_norming(A99, 0.1)
full = B99.block.copy()
full[:1, :1] -= A99.block
print("||B - A|| =", matrix_norm(full, 2.0), "< 0.1 (strengthened bound)")

print()
print("== finite representatives inside an SOT*-constraint set ==")
center = OperatorModel(2.0, 0.9 * np.eye(3))
M, Brep, crep = locate_norming_representative(center, rows=2, eps_c=0.3, n0=4)
print(f"found M = {M} >= 4, norm {crep.norm_value:.12f}")
print("sot gap :", sot_gap(Brep, center, 2), "< 0.3")
print("adj gap :", adj_gap(Brep, center, 2), "< 0.3")

print()
print("== dense embedding with covering norming families ==")
T = density_embed(OperatorModel(2.0, [[0.5]]), 0.1)
print("tail:", T.tail.kind, "| norm:", operator_norm(T).value)
print("adjoint-side family found:", probe_class_m(T) is not None)
print("forward-side family found:", probe_class_m_prime(T) is not None)

print()
print("== zero-row sequence: isometric cross entries, still contractions ==")
shift_like = OperatorModel(2.0, [[0.0, 0.0], [1.0, 0.0]])  # row 0 vanishes
seq = seq_zero_row(shift_like, 0)
for n in (0, 3, 7):
    print(f"  n = {n}: norm {operator_norm(seq(n)).value:.12f}")

print()
print("== non-attaining approximants of the identity ==")
A2 = OperatorModel(2.0, np.eye(2))
seq2 = seq_non_attaining(A2, lambda n: 1.0 / (n + 2.0), 0.5, 0.9)
for N in (0, 4, 9):
    TN = seq2(N)
    res = operator_norm(TN)
    print(f"  N = {N}: norm {res.value}, {res.attained}, "
          f"adjoint gap to A at rows <= 1: {adj_gap(TN, A2, 1):.4f}")
