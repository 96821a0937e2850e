"""Monte-Carlo campaigns over random positive contractions.

Frequencies are sampler-relative observations, never category claims; the
sampler is part of the report for exactly that reason.
"""

import numpy as np

from poscon import (
    OperatorModel,
    probe_eigen_persistence,
    probe_irreducible,
    probe_not_coisometry,
    run_campaign,
    sample_positive_contraction,
)
from poscon.typicality import SamplerSpec

print("== one draw, fully deterministic in the seed ==")
spec = SamplerSpec(dim=6, seed=42)
T = sample_positive_contraction(spec)
print("block (rounded):")
print(T.block.round(3))
print("same seed, same operator:", T == sample_positive_contraction(spec))

print()
print("== probes on a dense draw ==")
print("not a co-isometry:", probe_not_coisometry(T))
print("irreducible      :", probe_irreducible(T))

print()
print("== a small campaign ==")
report = run_campaign(SamplerSpec(dim=30, seed=7), 500, ("not_coisometry", "irreducible"))
print("fractions:", report.fractions)
print("sampler  :", report.spec.provenance())
print(f"wall time: {report.wall_time:.2f} s")
print("first CSV rows:")
for line in report.to_csv().splitlines()[:3]:
    print(" ", line[:96])

print()
print("== sparse draws break irreducibility ==")
sparse = run_campaign(
    SamplerSpec(dim=15, distribution="sparse", density=0.08, seed=5),
    500,
    ("irreducible",),
)
print("irreducible fraction at density 0.08:", sparse.fractions["irreducible"])

print()
print("== eigenvalue persistence (heuristic diagnostic only) ==")
rng = np.random.default_rng(1)
T2 = OperatorModel(2.0, rng.random((8, 8)) / 8.0)
trace = probe_eigen_persistence(T2, [3, 5, 7])
print("corner sizes:", trace.indices)
print(f"max matched drift: {trace.max_drift:.4f} (heuristic = {trace.heuristic})")
