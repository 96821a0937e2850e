import numpy as np
import pytest

from poscon.core import (
    CoordVector,
    IdentityTail,
    ModelError,
    OperatorModel,
    ZeroTail,
    apply,
    corner,
    is_positive,
    support,
)
from poscon.constructions import (
    density_embed,
    diagonal_non_attainer,
    extend_with_full_norming,
    locate_norming_representative,
    seq_non_attaining,
    seq_norm_deficit,
    seq_zero_row,
)
from poscon.norms import matrix_norm, operator_norm, verify_norming
from poscon.topologies import adj_gap, sot_gap, wot_gap
from poscon.typicality import probe_class_m, probe_class_m_prime


def random_contraction_block(rng, dim, target):
    blk = rng.random((dim, dim))
    top = np.linalg.svd(blk, compute_uv=False)[0]
    return blk * (target / top)


def check_extension(A, eps, B, cert):
    d = A.block_dim
    assert B.block_dim == 2 * d
    assert isinstance(B.tail, ZeroTail)
    assert is_positive(B)
    # (i) norm one
    assert abs(operator_norm(B).value - 1.0) <= 1e-9
    # (ii) full supports, recomputed independently of the certificate
    assert support(cert.u).indices == frozenset(range(2 * d))
    Bu = apply(B, cert.u)
    assert support(Bu).indices == frozenset(range(2 * d))
    assert verify_norming(B, cert.u).accepted
    # (iii) column restriction bound
    diff = B.block[:, :d].copy()
    diff[:d, :] -= A.block
    assert matrix_norm(diff, 2.0) < eps


# --- extension ---------------------------------------------------------------------


def test_extend_small_block():
    A = OperatorModel(2.0, [[0.5]])
    B, cert = extend_with_full_norming(A, 0.1)
    check_extension(A, 0.1, B, cert)


def test_extend_keeps_norm_one_center_close():
    A = OperatorModel(2.0, 0.5 * np.ones((2, 2)))  # norm exactly 1
    eps = 0.2
    B, cert = extend_with_full_norming(A, eps)
    check_extension(A, eps, B, cert)
    # strengthened bound: ||B - A|| < eps since ||A|| >= 1 - eps/4
    full = B.block.copy()
    full[:2, :2] -= A.block
    assert matrix_norm(full, 2.0) < eps


def test_extend_random_blocks():
    rng = np.random.default_rng(5)
    for _ in range(40):
        d = int(rng.integers(1, 8))
        target = rng.uniform(0.0, 0.95)
        blk = random_contraction_block(rng, d, target) if target > 0 else np.zeros((d, d))
        A = OperatorModel(2.0, blk)
        B, cert = extend_with_full_norming(A, 0.05)
        check_extension(A, 0.05, B, cert)


def test_extend_other_exponents():
    rng = np.random.default_rng(6)
    for p in (1.5, 3.0):
        blk = rng.random((3, 3))
        blk /= operator_norm(OperatorModel(p, blk)).value / 0.8
        A = OperatorModel(p, blk)
        B, cert = extend_with_full_norming(A, 0.1)
        assert abs(operator_norm(B).value - 1.0) <= 1e-9
        assert support(cert.u).indices == frozenset(range(6))


def test_extend_rejects_bad_inputs():
    A = OperatorModel(2.0, [[0.5]])
    with pytest.raises(ModelError):
        extend_with_full_norming(A, 0.0)
    with pytest.raises(ModelError):
        extend_with_full_norming(A, 1.0)
    with pytest.raises(ModelError):
        extend_with_full_norming(OperatorModel(2.0, [[0.5]], IdentityTail()), 0.1)
    with pytest.raises(ModelError):
        extend_with_full_norming(OperatorModel(2.0, [[1.5]]), 0.1)


# --- finite representative ------------------------------------------------------------


def test_locate_inside_constraint_set():
    center = OperatorModel(2.0, 0.9 * np.eye(3))
    M, B, cert = locate_norming_representative(center, rows=2, eps_c=0.3, n0=0)
    assert M >= 0
    assert B.block_dim == M + 1
    assert abs(cert.norm_value - 1.0) <= 1e-9
    assert sot_gap(B, center, 2) < 0.3
    assert adj_gap(B, center, 2) < 0.3
    Bu = apply(B, cert.u)
    assert support(Bu).indices == frozenset(range(M + 1))


def test_locate_norm_one_center():
    center = OperatorModel(2.0, 0.5 * np.ones((2, 2)))
    M, B, cert = locate_norming_representative(center, rows=1, eps_c=0.4, n0=3)
    assert M >= 3
    assert sot_gap(B, center, 1) < 0.4


def test_locate_rejects_nonpositive_radius():
    center = OperatorModel(2.0, [[0.5]])
    with pytest.raises(ModelError):
        locate_norming_representative(center, rows=0, eps_c=0.0, n0=0)


# --- density embedding ------------------------------------------------------------


def test_density_embed_small():
    A = OperatorModel(2.0, [[0.5]])
    T = density_embed(A, 0.1)
    assert isinstance(T.tail, IdentityTail)
    assert operator_norm(T).value == pytest.approx(1.0, abs=1e-9)
    assert sot_gap(T, A, 0) < 0.1
    assert probe_class_m(T) is not None
    assert probe_class_m_prime(T) is not None


def test_density_embed_zero_block():
    T = density_embed(OperatorModel(2.0, [[0.0]]), 0.2)
    assert operator_norm(T).value == pytest.approx(1.0, abs=1e-9)


def test_density_embed_requires_strict_contraction():
    A = OperatorModel(2.0, 0.5 * np.ones((2, 2)))  # norm 1
    with pytest.raises(ModelError):
        density_embed(A, 0.1)


# --- counterexample sequences ------------------------------------------------------


def test_seq_norm_deficit_signature():
    T = OperatorModel(2.0, 0.5 * np.eye(4))
    seq = seq_norm_deficit(T, 0.4)
    for n in range(4, 12):
        Tn = seq(n)
        assert is_positive(Tn)
        assert operator_norm(Tn).value <= 1.0 + 1e-12
        assert wot_gap(Tn, T, 3) <= 1e-12
        assert adj_gap(Tn, T, 0) >= 0.4 - 1e-12


def test_seq_norm_deficit_lower_bound_with_column_tail():
    rng = np.random.default_rng(3)
    blk = rng.random((5, 5))
    blk *= 0.5 / np.linalg.svd(blk, compute_uv=False)[0]
    T = OperatorModel(2.0, blk)
    delta = 0.3
    seq = seq_norm_deficit(T, delta)
    for n in range(1, 8):
        Tn = seq(n)
        # row-0 correction term: the part of row 0 beyond column n is lost
        lost = np.linalg.norm(blk[0, n + 1 :]) if n + 1 < 5 else 0.0
        assert adj_gap(Tn, T, 0) >= delta - lost - 1e-12


def test_seq_norm_deficit_zero_delta():
    T = OperatorModel(2.0, 0.5 * np.eye(3))
    seq = seq_norm_deficit(T, 0.0)
    Tn = seq(10)
    assert wot_gap(Tn, T, 2) == 0.0
    assert adj_gap(Tn, T, 2) == 0.0


def test_seq_norm_deficit_rank_one():
    T = OperatorModel(2.0, [[0.0]])
    seq = seq_norm_deficit(T, 0.9)
    Tn = seq(5)
    assert operator_norm(Tn).value == pytest.approx(0.9, abs=1e-12)
    assert wot_gap(Tn, T, 4) == 0.0
    assert adj_gap(Tn, T, 0) == pytest.approx(0.9, abs=1e-15)


def test_seq_norm_deficit_rejects_norm_overflow():
    T = OperatorModel(2.0, 0.8 * np.eye(2))
    with pytest.raises(ModelError):
        seq_norm_deficit(T, 0.3)


def test_seq_zero_row_contraction():
    T = OperatorModel(2.0, [[0.0]])
    seq = seq_zero_row(T, 0)
    Tn = seq(4)
    assert operator_norm(Tn).value == pytest.approx(1.0, abs=1e-12)
    # isometric on e_{n+1}
    img = apply(Tn, CoordVector([0] * 5 + [1]))
    assert img == CoordVector([1.0])


def test_seq_zero_row_shift_like():
    T = OperatorModel(2.0, [[0.0, 0.0], [1.0, 0.0]])  # row 0 vanishes
    seq = seq_zero_row(T, 0)
    for n in range(6):
        assert operator_norm(seq(n)).value <= 1.0 + 1e-12


def test_seq_zero_row_random_admissible():
    rng = np.random.default_rng(17)
    for _ in range(30):
        d = int(rng.integers(2, 6))
        blk = rng.random((d, d))
        blk *= rng.uniform(0.2, 1.0) / np.linalg.svd(blk, compute_uv=False)[0]
        l = int(rng.integers(0, d))
        blk[l, :] = 0.0
        T = OperatorModel(2.0, blk)
        seq = seq_zero_row(T, l)
        for n in (0, 3, 7):
            assert operator_norm(seq(n)).value <= 1.0 + 1e-12


def test_seq_zero_row_rejects_nonzero_row():
    T = OperatorModel(2.0, [[0.5]])
    with pytest.raises(ModelError):
        seq_zero_row(T, 0)


def test_seq_non_attaining():
    A = OperatorModel(2.0, np.eye(2))
    seq = seq_non_attaining(A, lambda n: 1.0 / (n + 2.0), 0.5, 0.9)
    for N in range(6):
        TN = seq(N)
        res = operator_norm(TN)
        assert res.value == 1.0
        assert res.attained == "not-attained"
    # fixed-row convergence: adj gaps shrink like the shrink factors
    gaps = [adj_gap(seq(N), A, 1) for N in range(2, 12)]
    assert all(x >= y - 1e-12 for x, y in zip(gaps, gaps[1:]))
    assert gaps[-1] <= 1.0 / 12 + 1e-9


def test_seq_non_attaining_zero_block():
    A = OperatorModel(2.0, [[0.0]])
    TN = seq_non_attaining(A, lambda n: 0.5 / (n + 1.0), 0.5, 0.9)(3)
    res = operator_norm(TN)
    assert res.value == 1.0
    assert res.attained == "not-attained"


# --- diagonal non-attainer ------------------------------------------------------------


def test_diagonal_non_attainer_flags():
    D = diagonal_non_attainer(0.5, 0.9)
    res = operator_norm(D)
    assert res.value == 1.0
    assert res.attained == "not-attained"


def test_diagonal_non_attainer_corner_norms():
    c, r = 0.5, 0.9
    D = diagonal_non_attainer(c, r)
    prev = 0.0
    for K in range(0, 30, 3):
        value = operator_norm(OperatorModel(2.0, corner(D, K))).value
        assert value == pytest.approx(1.0 - c * r**K, rel=1e-12)
        assert value > prev
        prev = value


def test_diagonal_non_attainer_boundary_c():
    D = diagonal_non_attainer(1.0, 0.5)
    assert D.block[0, 0] == 0.0
    res = operator_norm(D)
    assert res.value == 1.0
    assert res.attained == "not-attained"


def test_diagonal_non_attainer_rejects_bad_params():
    with pytest.raises(ModelError):
        diagonal_non_attainer(0.0, 0.5)
    with pytest.raises(ModelError):
        diagonal_non_attainer(0.5, 1.0)
