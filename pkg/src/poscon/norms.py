"""Operator p-norms, norming vectors, and attainment analysis.

Block norms come from one of three methods:

* ``diagonal-closed-form`` for diagonal blocks (any exponent): the largest
  absolute diagonal entry.
* ``symmetric-eigen`` for p = 2: a symmetric eigendecomposition of Bᵀ·B;
  the norming vector is the entrywise-nonnegative top eigenvector obtained
  by projecting the all-ones vector onto the top eigenspace (for a
  nonnegative block such a vector exists).
* ``p-power-iteration`` for p != 2 on nonnegative blocks: alternate
  y = Bx, x' ∝ dual-exponent map of Bᵀ(p-power map of y), started from the
  normalized all-ones vector. Estimates are monotone nondecreasing; the
  iteration stops when the relative change drops below tolerance.

The full operator norm obeys the direct-sum law
``max(block norm, tail sup)`` where the tail sup is 0, 1, or 1 for the
zero, identity, and geometric variants. A geometric tail whose sup
strictly exceeds the block norm never attains it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CoordVector,
    IdentityTail,
    ModelError,
    OperatorModel,
    SupportSet,
    ZeroTail,
    adjoint,
    apply,
    basis,
    is_positive,
    modulus,
    support,
)

__all__ = [
    "DEFAULT_STOP_TOL",
    "DEFAULT_MAX_ITER",
    "NonConvergenceError",
    "NormResult",
    "NormingCertificate",
    "NormingReport",
    "vector_norm",
    "matrix_norm",
    "power_norm_history",
    "operator_norm",
    "norming_vector",
    "make_certificate",
    "tail_certificate",
    "verify_norming",
    "norming_from_image",
    "modulus_norming",
]

DEFAULT_STOP_TOL = 1e-13
DEFAULT_MAX_ITER = 10_000


class NonConvergenceError(RuntimeError):
    """Iteration cap reached with the residual above tolerance; carries the
    best estimate found."""

    def __init__(self, message: str, best: float, iterations: int, residual: float):
        super().__init__(message)
        self.best = best
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class NormResult:
    value: float
    method: str  # diagonal-closed-form | symmetric-eigen | p-power-iteration
    iterations: int
    residual: float
    attained: str  # attained | not-attained | tail-attained
    norming: CoordVector | None = None
    tail_index: int | None = None


@dataclass(frozen=True)
class NormingCertificate:
    """A nonnegative unit vector u with residuals witnessing ||Tu|| = ||T||
    and, on l2, T*Tu = ||T||² u."""

    u: CoordVector
    norm_value: float
    residual_norming: float
    residual_eigen: float | None
    support: SupportSet


@dataclass(frozen=True)
class NormingReport:
    residual_norming: float
    residual_eigen: float | None
    accepted: bool
    tolerance: float


def vector_norm(x, p: float) -> float:
    """lp norm (sum |x_n|^p)^(1/p), p in (1, inf)."""
    pv = float(p)
    if not (np.isfinite(pv) and pv > 1.0):
        raise ModelError(f"exponent must lie in (1, inf), got {p!r}")
    arr = x.entries if isinstance(x, CoordVector) else np.asarray(x, dtype=float)
    if arr.size == 0:
        return 0.0
    return float(np.sum(np.abs(arr) ** pv) ** (1.0 / pv))


def _boyd(a: np.ndarray, p: float, tol: float, max_iter: int):
    """Power iteration for the lp->lp norm of a nonnegative matrix.

    Returns (estimate, maximizer, iterations, residual, history).
    """
    m, n = a.shape
    q = p / (p - 1.0)
    x = np.full(n, n ** (-1.0 / p))
    history: list[float] = []
    prev = None
    residual = np.inf
    est = 0.0
    for it in range(1, max_iter + 1):
        y = a @ x
        est = float(np.sum(y**p) ** (1.0 / p))
        history.append(est)
        if est == 0.0:
            return 0.0, x, it, 0.0, history
        z = a.T @ (y ** (p - 1.0))
        xn = z ** (q - 1.0)
        x = xn / np.sum(xn**p) ** (1.0 / p)
        if prev is not None:
            residual = abs(est - prev) / max(est, 1.0)
            if residual < tol:
                return est, x, it, residual, history
        prev = est
    return est, x, max_iter, residual, history


def matrix_norm(
    a,
    p: float,
    *,
    tol: float = DEFAULT_STOP_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """lp->lp operator norm of a rectangular matrix.

    p = 2 uses an exact singular value decomposition and accepts signed
    entries; any other exponent runs the nonnegative power iteration.
    """
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ModelError("matrix norm expects a nonempty 2-d array")
    pv = float(p)
    if pv == 2.0:
        return float(np.linalg.svd(arr, compute_uv=False)[0])
    if not (np.isfinite(pv) and pv > 1.0):
        raise ModelError(f"exponent must lie in (1, inf), got {p!r}")
    if np.any(arr < 0):
        raise ModelError("p != 2 norms are only computed for nonnegative matrices")
    est, _, iters, residual, _ = _boyd(arr, pv, tol, max_iter)
    if iters >= max_iter and residual >= tol:
        raise NonConvergenceError(
            f"power iteration did not converge in {max_iter} iterations "
            f"(residual {residual:.3e})",
            best=est,
            iterations=iters,
            residual=residual,
        )
    return est


def power_norm_history(
    block,
    p: float,
    *,
    tol: float = DEFAULT_STOP_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[float]:
    """Norm estimates of each power-iteration step (diagnostic; the sequence
    is nondecreasing for nonnegative data)."""
    arr = np.asarray(block, dtype=float)
    if np.any(arr < 0):
        raise ModelError("power iteration needs nonnegative entries")
    _, _, _, _, history = _boyd(arr, float(p), tol, max_iter)
    return history


def _is_diagonal(block: np.ndarray) -> bool:
    return bool(np.count_nonzero(block - np.diag(np.diagonal(block))) == 0)


def _indicator_unit(diag_abs: np.ndarray, p: float) -> np.ndarray:
    # Equal weights on the argmax set: the limit of power iteration from the
    # all-ones start, hence consistent with the eigen-path tie-break.
    top = diag_abs.max()
    mask = diag_abs == top if top > 0 else np.ones_like(diag_abs, dtype=bool)
    vec = mask.astype(float)
    return vec / np.sum(vec**p) ** (1.0 / p)


def _eigen_block_norm(block: np.ndarray):
    """Top singular value of the block plus a nonnegative top right-singular
    vector (projection of the all-ones start onto the top eigenspace of
    BᵀB, the Perron choice for nonnegative blocks)."""
    gram = block.T @ block
    w, V = np.linalg.eigh(gram)
    lam = float(max(w[-1], 0.0))
    sigma = float(np.sqrt(lam))
    d = gram.shape[0]
    if lam == 0.0:
        u = np.zeros(d)
        u[0] = 1.0
        return 0.0, u, 0.0
    thresh = lam - 1e-10 * max(lam, 1.0)
    cols = V[:, w >= thresh]
    u = cols @ (cols.T @ np.ones(d))
    nrm = float(np.linalg.norm(u))
    if nrm < 1e-8:
        # Signed blocks may leave the all-ones start orthogonal to the top
        # eigenspace; fall back to the raw eigenvector.
        u = V[:, -1].copy()
        if u.sum() < 0:
            u = -u
        nrm = float(np.linalg.norm(u))
    u = u / nrm
    if np.all(block >= 0):
        np.clip(u, 0.0, None, out=u)
        u = u / np.linalg.norm(u)
    residual = float(np.linalg.norm(gram @ u - lam * u))
    return sigma, u, residual


def operator_norm(
    T: OperatorModel,
    *,
    tol: float = DEFAULT_STOP_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> NormResult:
    """Norm of block ⊕ tail with the attainment flag.

    Raises :class:`NonConvergenceError` when the p-power iteration hits the
    cap with the residual still above tolerance.
    """
    block = T.block
    if _is_diagonal(block):
        diag_abs = np.abs(np.diagonal(block))
        bval = float(diag_abs.max())
        method, iterations, residual = "diagonal-closed-form", 0, 0.0
        block_u = _indicator_unit(diag_abs, T.p)
    elif T.p == 2.0:
        bval, block_u, residual = _eigen_block_norm(block)
        method, iterations = "symmetric-eigen", 0
    else:
        if np.any(block < 0):
            raise ModelError("p != 2 norms are only computed for nonnegative blocks")
        bval, block_u, iterations, residual, _ = _boyd(block, T.p, tol, max_iter)
        if iterations >= max_iter and residual >= tol:
            raise NonConvergenceError(
                f"power iteration did not converge in {max_iter} iterations "
                f"(residual {residual:.3e})",
                best=bval,
                iterations=iterations,
                residual=residual,
            )
        method = "p-power-iteration"
    tail = T.tail
    tsup = tail.sup()
    value = max(bval, tsup)
    if bval > tsup or isinstance(tail, ZeroTail):
        attained = "attained"
        norming: CoordVector | None = CoordVector(block_u)
        tail_index = None
    elif isinstance(tail, IdentityTail):
        attained = "tail-attained"
        norming = None
        tail_index = T.block_dim
    elif bval == tsup:
        # Exact tie with a geometric tail: the sup is achieved from the block.
        attained = "attained"
        norming = CoordVector(block_u)
        tail_index = None
    else:
        attained = "not-attained"
        norming = None
        tail_index = None
    return NormResult(
        value=value,
        method=method,
        iterations=iterations,
        residual=residual,
        attained=attained,
        norming=norming,
        tail_index=tail_index,
    )


def make_certificate(
    T: OperatorModel,
    u: CoordVector,
    *,
    norm_value: float | None = None,
) -> NormingCertificate:
    """Package a candidate norming vector with its residuals.

    The vector must be a nonnegative unit vector; residual thresholds are
    left to the caller (see :func:`verify_norming`).
    """
    if np.any(u.entries < 0):
        raise ModelError("norming certificates carry nonnegative vectors")
    un = vector_norm(u, T.p)
    if abs(un - 1.0) > 1e-9:
        raise ModelError(f"norming certificates carry unit vectors, got norm {un!r}")
    nv = operator_norm(T).value if norm_value is None else float(norm_value)
    Tu = apply(T, u)
    residual_norming = abs(vector_norm(Tu, T.p) - nv * un)
    residual_eigen = None
    if T.p == 2.0:
        w = apply(adjoint(T), Tu)
        L = max(len(w), len(u))
        residual_eigen = float(np.linalg.norm(w.padded(L) - nv**2 * u.padded(L)))
    return NormingCertificate(
        u=u,
        norm_value=nv,
        residual_norming=float(residual_norming),
        residual_eigen=residual_eigen,
        support=support(u),
    )


def tail_certificate(T: OperatorModel, start: int) -> NormingCertificate:
    """Certificate for the identity-tail norming family {e_j : j >= start},
    recorded with a cofinite support and the representative e_start."""
    if not isinstance(T.tail, IdentityTail):
        raise ModelError("cofinite norming families need an identity tail")
    if start < T.block_dim:
        raise ModelError("the cofinite family starts at or after the block edge")
    nv = operator_norm(T).value
    if abs(nv - 1.0) > 1e-9:
        raise ModelError("tail basis vectors are norming only at norm one")
    u = basis(start)
    return NormingCertificate(
        u=u,
        norm_value=nv,
        residual_norming=0.0,
        residual_eigen=0.0 if T.p == 2.0 else None,
        support=SupportSet(cofinite_from=start),
    )


def norming_vector(T: OperatorModel) -> NormingCertificate:
    """Norming vector of an attaining operator.

    For p = 2 this is the nonnegative top eigenvector of BᵀB; for an
    identity tail at or above the block norm it is e_{blockDim}; for p != 2
    it is the power-iteration fixed point.
    """
    res = operator_norm(T)
    if res.attained == "not-attained":
        raise ModelError("the operator does not attain its norm")
    if res.attained == "tail-attained":
        u = basis(res.tail_index)
    else:
        u = res.norming
    return make_certificate(T, u, norm_value=res.value)


def verify_norming(T: OperatorModel, u: CoordVector, tol: float = 1e-8) -> NormingReport:
    """Residual report for the norming identity and, on l2, the eigenvector
    identity T*Tu = ||T||² u (scaled by ||u||); accepts iff both residuals
    are at most ``tol``."""
    un = vector_norm(u, T.p)
    if un == 0.0:
        raise ModelError("a norming candidate must be nonzero")
    nv = operator_norm(T).value
    Tu = apply(T, u)
    residual_norming = abs(vector_norm(Tu, T.p) - nv * un)
    residual_eigen = None
    if T.p == 2.0:
        w = apply(adjoint(T), Tu)
        L = max(len(w), len(u))
        residual_eigen = float(np.linalg.norm(w.padded(L) - nv**2 * u.padded(L)) / un)
    accepted = residual_norming <= tol and (residual_eigen is None or residual_eigen <= tol)
    return NormingReport(
        residual_norming=float(residual_norming),
        residual_eigen=residual_eigen,
        accepted=bool(accepted),
        tolerance=tol,
    )


def norming_from_image(T: OperatorModel, u: CoordVector, tol: float = 1e-8) -> CoordVector:
    """Tu normalized: a norming vector for the adjoint whenever u is norming
    for T."""
    report = verify_norming(T, u, tol)
    if not report.accepted:
        raise ModelError(
            f"input vector is not norming (residuals {report.residual_norming:.3e}"
            + (f", {report.residual_eigen:.3e}" if report.residual_eigen is not None else "")
            + ")"
        )
    Tu = apply(T, u)
    n = vector_norm(Tu, T.p)
    if n == 0.0:
        # Unreachable for a norming u of a nonzero operator; reported anyway.
        raise ModelError("the image Tu vanishes, nothing to normalize")
    return CoordVector(Tu.entries / n)


def modulus_norming(T: OperatorModel, x: CoordVector, tol: float = 1e-8) -> CoordVector:
    """|x| stays norming for a positive T, with the same support."""
    if not is_positive(T):
        raise ModelError("the modulus trick needs a positive operator")
    report = verify_norming(T, x, tol)
    if not report.accepted:
        raise ModelError("input vector is not norming for the operator")
    return modulus(x)
