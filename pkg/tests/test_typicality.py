import numpy as np
import pytest

from oracles import bool_power_irreducible
from poscon.core import (
    GeometricTail,
    IdentityTail,
    ModelError,
    OperatorModel,
)
from poscon.constructions import density_embed, diagonal_non_attainer
from poscon.norms import operator_norm
from poscon.typicality import (
    CAMPAIGN_CSV_HEADER,
    EigenPersistenceTrace,
    SamplerSpec,
    probe_attainment,
    probe_class_m,
    probe_class_m_prime,
    probe_eigen_persistence,
    probe_irreducible,
    probe_not_coisometry,
    run_campaign,
    sample_positive_contraction,
)


# --- samplers -----------------------------------------------------------------


def test_sampler_deterministic():
    spec = SamplerSpec(dim=6, seed=12345)
    a = sample_positive_contraction(spec)
    b = sample_positive_contraction(spec)
    assert a == b


def test_sampler_leq1_is_contraction():
    for dist, density in (("uniform01", None), ("exponential", None), ("sparse", 0.3)):
        spec = SamplerSpec(dim=8, distribution=dist, density=density, seed=5)
        T = sample_positive_contraction(spec)
        assert np.all(T.block >= 0)
        assert operator_norm(T).value <= 1.0 + 1e-12


def test_sampler_near1_norm():
    spec = SamplerSpec(dim=6, norm_target="near1", eta=1e-3, seed=2)
    T = sample_positive_contraction(spec)
    assert operator_norm(T).value == pytest.approx(1.0 - 1e-3, abs=1e-9)


def test_sampler_sparse_density():
    from dataclasses import replace

    spec = SamplerSpec(dim=15, distribution="sparse", density=0.1, seed=33)
    counts = []
    for i in range(40):
        T = sample_positive_contraction(replace(spec, seed=i))
        counts.append(np.count_nonzero(T.block))
    # binomial expectation 22.5 nonzeros; soft two-sided check
    assert 14 <= np.mean(counts) <= 31


def test_sampler_validation():
    with pytest.raises(ModelError):
        SamplerSpec(dim=0)
    with pytest.raises(ModelError):
        SamplerSpec(dim=2, distribution="sparse", density=0.0)
    with pytest.raises(ModelError):
        SamplerSpec(dim=2, norm_target="near1", eta=None)
    with pytest.raises(ModelError):
        SamplerSpec(dim=2, distribution="cauchy")


# --- probes -------------------------------------------------------------------


def test_not_coisometry_examples():
    assert probe_not_coisometry(OperatorModel(2.0, [[0.5, 0.0], [0.5, 0.0]]))
    assert not probe_not_coisometry(OperatorModel(2.0, np.diag([0.5, 0.5])))
    rng = np.random.default_rng(0)
    T = OperatorModel(2.0, rng.random((5, 5)) * 0.1)
    assert probe_not_coisometry(T)


def test_not_coisometry_monotone_under_entrywise_increase():
    rng = np.random.default_rng(1)
    for _ in range(50):
        blk = rng.random((4, 4)) * (rng.random((4, 4)) < 0.3)
        bigger = blk + rng.random((4, 4)) * 0.1
        small_flag = probe_not_coisometry(OperatorModel(2.0, blk))
        big_flag = probe_not_coisometry(OperatorModel(2.0, bigger))
        assert big_flag or not small_flag


def test_irreducible_examples():
    cyc = np.zeros((3, 3))
    cyc[1, 0] = cyc[2, 1] = cyc[0, 2] = 0.3
    assert probe_irreducible(OperatorModel(2.0, cyc))
    upper = np.triu(np.ones((3, 3)), 1)
    assert not probe_irreducible(OperatorModel(2.0, upper))
    assert probe_irreducible(OperatorModel(2.0, np.ones((4, 4))))
    assert probe_irreducible(OperatorModel(2.0, [[0.5]]))


def test_irreducible_refuses_structured_tails():
    for tail in (IdentityTail(), GeometricTail(0.5, 0.9)):
        with pytest.raises(ModelError, match="undefined at finite scale"):
            probe_irreducible(OperatorModel(2.0, [[0.5]], tail))


def test_irreducible_matches_boolean_power_oracle():
    rng = np.random.default_rng(7)
    agree = 0
    for _ in range(400):
        blk = rng.random((15, 15)) * (rng.random((15, 15)) < 0.08)
        T = OperatorModel(2.0, blk)
        assert probe_irreducible(T) == bool_power_irreducible(blk)
        agree += 1
    assert agree == 400


def test_attainment_probe():
    assert probe_attainment(diagonal_non_attainer(0.5, 0.9)) == "not-attained"
    assert probe_attainment(OperatorModel(2.0, [[0.5]])) == "attained"
    assert probe_attainment(OperatorModel(2.0, [[0.5]], IdentityTail())) == "tail-attained"


def test_class_probes():
    T = density_embed(OperatorModel(2.0, [[0.5]]), 0.1)
    assert probe_class_m(T) is not None
    assert probe_class_m_prime(T) is not None
    # geometric tails never carry covering families
    assert probe_class_m(diagonal_non_attainer(0.5, 0.9)) is None
    # identity model succeeds on both sides
    I = OperatorModel(2.0, [[1.0]], IdentityTail())
    assert probe_class_m(I) is not None
    assert probe_class_m_prime(I) is not None
    # norm below one fails
    assert probe_class_m(OperatorModel(2.0, [[0.5]])) is None


def test_eigen_persistence_diagnostics():
    D = OperatorModel(2.0, np.diag([0.5, 0.4, 0.3]))
    trace = probe_eigen_persistence(D, [2, 4, 6])
    assert isinstance(trace, EigenPersistenceTrace)
    assert trace.heuristic
    assert trace.max_drift == 0.0
    I = OperatorModel(2.0, [[1.0]], IdentityTail())
    trace2 = probe_eigen_persistence(I, [0, 3, 5])
    assert trace2.max_drift == 0.0
    rng = np.random.default_rng(3)
    T = OperatorModel(2.0, rng.random((6, 6)) / 6.0)
    trace3 = probe_eigen_persistence(T, [2, 4, 5])
    assert trace3.max_drift >= 0.0
    with pytest.raises(ModelError):
        probe_eigen_persistence(OperatorModel(1.5, [[0.5]]), [1, 2])


# --- campaigns -----------------------------------------------------------------


def test_campaign_single_row():
    spec = SamplerSpec(dim=4, seed=9)
    report = run_campaign(spec, 1, ("not_coisometry",))
    assert report.count == 1
    lines = report.to_csv().strip().split("\n")
    assert lines[0] == CAMPAIGN_CSV_HEADER
    assert len(lines) == 2


def test_campaign_deterministic_bytes():
    spec = SamplerSpec(dim=8, seed=31, distribution="sparse", density=0.4)
    a = run_campaign(spec, 40)
    b = run_campaign(spec, 40)
    assert a.to_csv() == b.to_csv()
    assert a.fractions == b.fractions


def test_campaign_counts_sum_to_size():
    spec = SamplerSpec(dim=5, seed=77)
    report = run_campaign(spec, 25)
    for name, bucket in report.counts.items():
        assert bucket["true"] + bucket["false"] + bucket["error"] == 25
        assert 0.0 <= report.fractions[name] <= 1.0


def test_campaign_dense_probes_high_fractions():
    spec = SamplerSpec(dim=12, seed=3)
    report = run_campaign(spec, 150, ("not_coisometry", "irreducible"))
    assert report.fractions["not_coisometry"] >= 0.99
    assert report.fractions["irreducible"] >= 0.99


def test_campaign_rejects_bad_probe():
    with pytest.raises(ModelError):
        run_campaign(SamplerSpec(dim=3), 2, ("unknown",))
