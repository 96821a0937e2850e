import math

import numpy as np
import pytest

from poscon.core import (
    GeometricTail,
    IdentityTail,
    ModelError,
    OperatorModel,
    ZeroTail,
)
from poscon.constructions import seq_norm_deficit
from poscon.topologies import (
    adj_gap,
    canonical_metric,
    converge_report,
    gap_profile,
    sot_gap,
    wot_gap,
)


def contraction(rng, dim, p=2.0, tail=None):
    blk = rng.random((dim, dim))
    top = np.linalg.svd(blk, compute_uv=False)[0]
    blk = blk / max(top / 0.95, 1.0)
    return OperatorModel(p, blk, tail)


# --- gaps -----------------------------------------------------------------------


def test_gaps_vanish_on_equal_inputs():
    rng = np.random.default_rng(0)
    T = contraction(rng, 4, tail=GeometricTail(0.5, 0.8))
    assert wot_gap(T, T, 6) == 0.0
    assert sot_gap(T, T, 6) == 0.0
    assert adj_gap(T, T, 6) == 0.0


def test_wot_gap_single_entry():
    blk = np.full((2, 2), 0.25)
    blk2 = blk.copy()
    blk2[0, 1] += 0.05
    S = OperatorModel(2.0, blk)
    T = OperatorModel(2.0, blk2)
    assert wot_gap(S, T, 1) == pytest.approx(0.05, abs=1e-15)
    assert wot_gap(S, T, 5) == pytest.approx(0.05, abs=1e-15)


def test_wot_gap_zero_vs_identity_tail():
    Z = OperatorModel(2.0, [[0.0]])
    I = OperatorModel(2.0, [[1.0]], IdentityTail())
    assert wot_gap(Z, I, 3) == 1.0


def test_gap_requires_same_p():
    S = OperatorModel(2.0, [[0.1]])
    T = OperatorModel(3.0, [[0.1]])
    for fn in (lambda: wot_gap(S, T, 1), lambda: sot_gap(S, T, 1), lambda: adj_gap(S, T, 1)):
        with pytest.raises(ModelError):
            fn()


def test_adj_gap_row_difference():
    base = np.full((3, 3), 0.2)
    other = base.copy()
    other[0, :] += np.array([0.06, 0.0, 0.08])  # row 0 moved by an l2-0.1 vector
    S = OperatorModel(2.0, base)
    T = OperatorModel(2.0, other)
    assert adj_gap(S, T, 0) == pytest.approx(0.1, abs=1e-15)


def test_adj_gap_cross_entry():
    # adding 0.2 <e_5, .> e_0 inside the block moves row 0 by 0.2 at column 5
    base = np.zeros((6, 6))
    other = base.copy()
    other[0, 5] = 0.2
    assert adj_gap(OperatorModel(2.0, base), OperatorModel(2.0, other), 0) == 0.2


def test_gap_profiles_monotone_in_bound():
    rng = np.random.default_rng(7)
    S = contraction(rng, 5)
    T = contraction(rng, 5)
    for topology in ("WOT", "SOT", "SOT_adj", "SOTSTAR"):
        values = [gap_profile(S, T, topology, b).value for b in range(6)]
        assert all(x <= y + 1e-15 for x, y in zip(values, values[1:]))


def test_gaps_pseudometric_on_random_triples():
    rng = np.random.default_rng(12)
    for _ in range(30):
        S, T, R = (contraction(rng, 4) for _ in range(3))
        for fn in (wot_gap, sot_gap, adj_gap):
            assert fn(S, T, 3) == fn(T, S, 3)
            assert fn(S, T, 3) <= fn(S, R, 3) + fn(R, T, 3) + 1e-12


def test_wot_bounded_by_adjoint_columns():
    rng = np.random.default_rng(13)
    for _ in range(20):
        S = contraction(rng, 5)
        T = contraction(rng, 5)
        m = 4
        assert wot_gap(S, T, m) <= adj_gap(S, T, m) + 1e-15


# --- canonical metric -------------------------------------------------------------


def test_metric_equal_inputs_shared_tail():
    rng = np.random.default_rng(3)
    T = contraction(rng, 4)
    box = canonical_metric(T, T, 5)
    assert box.lower == 0.0
    assert box.upper == 0.0


def test_metric_generic_versus_shared():
    rng = np.random.default_rng(4)
    blk = contraction(rng, 4).block
    S = OperatorModel(2.0, blk, ZeroTail())
    T = OperatorModel(2.0, blk, GeometricTail(0.5, 0.5))
    box = canonical_metric(S, T, 2)
    assert box.upper - box.lower == pytest.approx(2.0 ** (1 - 2), abs=1e-15)


def test_metric_zero_vs_full_identity():
    Z = OperatorModel(2.0, [[0.0]])
    I = OperatorModel(2.0, [[1.0]], IdentityTail())
    for K in (3, 6, 10):
        box = canonical_metric(Z, I, K)
        assert box.lower == pytest.approx(2.0 - 2.0 ** (-K), rel=1e-14)
        assert box.lower <= 2.0 <= box.upper


def test_metric_single_row_difference():
    base = np.zeros((3, 3))
    other = base.copy()
    other[0, 1] = 0.1
    S = OperatorModel(2.0, base)
    T = OperatorModel(2.0, other)
    box = canonical_metric(S, T, 4)
    assert box.lower == pytest.approx(0.1, abs=1e-15)
    assert box.upper == pytest.approx(0.1, abs=1e-15)


def test_metric_requires_contractions():
    big = OperatorModel(2.0, [[2.0]])
    ok = OperatorModel(2.0, [[0.5]])
    with pytest.raises(ModelError):
        canonical_metric(big, ok, 2)


def test_metric_intervals_nested_and_converging():
    rng = np.random.default_rng(6)
    S = contraction(rng, 4)
    T = contraction(rng, 4, tail=IdentityTail())
    prev = None
    for cutoff in range(1, 12):
        box = canonical_metric(S, T, cutoff)
        assert box.upper - box.lower <= 2.0 ** (2 - cutoff) + 1e-15
        if prev is not None:
            assert box.lower >= prev.lower - 1e-15
            assert box.upper <= prev.upper + 1e-15
        prev = box


def test_metric_upper_triangle_inequality():
    rng = np.random.default_rng(8)
    tails = [ZeroTail(), IdentityTail(), GeometricTail(0.5, 0.7)]
    for _ in range(60):
        ts = [tails[rng.integers(0, 3)] for _ in range(3)]
        S, T, R = (contraction(rng, 3, tail=t) for t in ts)
        cutoff = int(rng.integers(0, 6))
        ab = canonical_metric(S, T, cutoff).upper
        ac = canonical_metric(S, R, cutoff).upper
        cb = canonical_metric(R, T, cutoff).upper
        assert ab <= ac + cb + 1e-12


# --- convergence reports ------------------------------------------------------------


def test_converge_constant_sequence():
    rng = np.random.default_rng(10)
    T = contraction(rng, 3)
    report = converge_report(lambda n: T, T, steps=8, m=2, r=2)
    assert all(v == 0.0 for v in report.wot + report.sot + report.adj)
    assert report.summaries["wot"].below_tol_at == 0


def test_converge_scaled_sequence():
    rng = np.random.default_rng(11)
    T = contraction(rng, 3)
    seq = lambda n: OperatorModel(T.p, (1.0 - 1.0 / (n + 2)) * T.block)
    report = converge_report(seq, T, steps=40, m=2, r=2)
    assert report.wot[-1] < report.wot[0]
    assert report.adj[-1] < report.adj[0]
    # 1/n column-scaling rate
    assert report.sot[10] == pytest.approx(sot_gap(seq(10), T, 2), abs=1e-15)


def test_converge_norm_deficit_signature():
    T = OperatorModel(2.0, 0.5 * np.eye(4))
    seq = seq_norm_deficit(T, 0.4)
    report = converge_report(seq, T, steps=24, m=3, r=0)
    assert report.wot[-1] == 0.0
    floor = report.summaries["adj"].floor
    assert floor >= 0.4 - 1e-12
    assert report.summaries["wot"].below_tol_at is not None


def test_converge_report_csv_and_nan_for_other_p():
    T = OperatorModel(1.5, 0.5 * np.eye(2))
    report = converge_report(lambda n: T, T, steps=3, m=1, r=1)
    text = report.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "step,wot,sot,adj,metric_lo,metric_hi"
    assert len(lines) == 4
    assert "nan" in lines[1]
    assert math.isnan(report.metric_lo[0])


def test_converge_rejects_non_contractions():
    T = OperatorModel(2.0, [[0.5]])
    big = OperatorModel(2.0, [[1.5]])
    with pytest.raises(ModelError):
        converge_report(lambda n: big, T, steps=2, m=1, r=1)


def test_converge_accepts_list_sequences():
    T = OperatorModel(2.0, [[0.5]])
    report = converge_report([T, T, T], T, steps=3, m=1, r=1)
    assert report.wot == (0.0, 0.0, 0.0)
