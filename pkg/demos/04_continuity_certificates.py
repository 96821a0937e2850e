"""Continuity certificates and the adversarial falsifier.

A certificate (m, delta) -> (r, eps) promises: every positive contraction
whose corner through index m stays delta-close to the center has all
adjoint columns through index r within eps. The falsifier hammers the
promise with random sampling plus hill climbing.
"""

import numpy as np

from poscon import (
    CoordVector,
    OperatorModel,
    class_m_certificate,
    delta_for_corner,
    density_embed,
    diameter_certificate,
    extend_with_full_norming,
    falsify,
    norming_from_image,
)
from poscon.certificates import sample_in_neighborhood
from poscon.topologies import canonical_metric
from poscon.typicality import probe_class_m

print("== the flat 2x2 block, worked by hand ==")
B = OperatorModel(2.0, 0.5 * np.ones((2, 2)))
u = CoordVector([2**-0.5, 2**-0.5])
for eps in (0.2, 0.1):
    cert = delta_for_corner(B, u, eps)
    print(f"eps = {eps}: K = {cert.provenance['parameters']['K']}, "
          f"delta = {cert.neighborhood.radius} (= min(1/4, eps^2/8))")

print()
print("== stress-testing the certificate ==")
cert = delta_for_corner(B, u, 0.2)
report = falsify(cert, trials=2000, climb_steps=200, seed=11)
print(f"largest adjoint gap found: {report.max_gap:.6f} < eps = {report.epsilon}")
print("violated:", report.violated)

print()
print("== the guarantee is about the ball radius: inflate it and it breaks ==")
from poscon.certificates import ContinuityCertificate, WotNeighborhood

tight = delta_for_corner(B, u, 0.01)
inflated = ContinuityCertificate(
    neighborhood=WotNeighborhood(B, tight.neighborhood.corner_size,
                                 80 * tight.neighborhood.radius),
    rows=tight.rows,
    epsilon=tight.epsilon,
    epsilon_sq=tight.epsilon_sq,
)
bad = falsify(inflated, trials=2000, climb_steps=200, seed=11)
print(f"with an 80x radius the search reaches {bad.max_gap:.4f} "
      f"(eps was {bad.epsilon}); violated: {bad.violated}")

print()
print("== covering-family certificates ==")
T = density_embed(OperatorModel(2.0, [[0.5]]), 0.1)
family = probe_class_m(T)
fam_cert = class_m_certificate(T, family, 0.3, 3)
print(f"corner size m = {fam_cert.neighborhood.corner_size}, "
      f"delta = {fam_cert.neighborhood.radius:.3e}")
print("sound under attack:", not falsify(fam_cert, trials=500, climb_steps=50, seed=3).violated)

print()
print("== diameter certificates for the adjoint-row metric ==")
A = OperatorModel(2.0, 0.6 * np.eye(3))
Bx, cx = extend_with_full_norming(A, 0.05)
u_adj = norming_from_image(Bx, cx.u)
W = diameter_certificate(Bx, u_adj, 1.0)
print(f"ball: corner {W.corner_size}, radius {W.radius:.3e}")
samples = sample_in_neighborhood(W, 20, seed=0)
worst = max(
    canonical_metric(S, T2, W.corner_size).upper
    for S, T2 in zip(samples[::2], samples[1::2])
)
print(f"worst sampled pair distance (upper bound): {worst:.3e} < 1.0")
