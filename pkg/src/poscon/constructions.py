"""Explicit operator constructions: norm-one extensions with fully
supported norming vectors, finite representatives inside SOT*-open sets,
density embeddings with covering norming families, and the counterexample
sequences separating the operator topologies at finite index.

The extension doubles the coordinate block and works in two regimes:

* block norm close to one (at least 1 - eps/4): shrink slightly, then raise
  the norm back to exactly one by a rank-one bump aligned with the norming
  direction of the shrunken block (the bump grows the norm linearly, so the
  bisected coupling stays below eps/2 and the whole extension stays within
  eps of the original);
* otherwise: keep the shrunken block and let a mirror block on the fresh
  coordinates carry the norm up to one.

Both regimes add strictly positive glue of size O(eps) connecting every
head coordinate to every mirror coordinate. The glue makes the Gram matrix
of the assembled block strictly positive, so its top singular vector is
strictly positive and the norming vector together with its image has full
support. All postconditions are re-verified numerically; a failure raises
instead of returning a defective extension.
"""

from __future__ import annotations

import numpy as np

from .core import (
    GeometricTail,
    IdentityTail,
    ModelError,
    OperatorModel,
    ZeroTail,
    corner,
    is_positive,
)
from .norms import (
    matrix_norm,
    norming_vector,
    operator_norm,
    vector_norm,
)
from .topologies import adj_gap, sot_gap

__all__ = [
    "extend_with_full_norming",
    "locate_norming_representative",
    "density_embed",
    "seq_norm_deficit",
    "seq_zero_row",
    "seq_non_attaining",
    "diagonal_non_attainer",
]

NORM_ONE_TOL = 1e-10
BISECT_STEPS = 200


def _bisect_to_norm_one(assemble, p: float):
    """Largest coupling strength keeping the assembled block at norm <= 1.

    ``assemble(s)`` must be entrywise nondecreasing in s. Returns the block
    at the bisected coupling; its norm is within NORM_ONE_TOL of 1 from
    below, preserving the contraction invariant.
    """
    lo, hi = 0.0, 0.5
    while matrix_norm(assemble(hi), p) < 1.0:
        hi *= 2.0
        if hi > 64.0:
            raise ModelError("extension bisection failed to bracket norm one")
    for _ in range(BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if matrix_norm(assemble(mid), p) < 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    blk = assemble(lo)
    nv = matrix_norm(blk, p)
    if abs(nv - 1.0) > NORM_ONE_TOL:
        blk = assemble(hi)
        nv = matrix_norm(blk, p)
        if abs(nv - 1.0) > NORM_ONE_TOL:
            raise ModelError(f"extension bisection stalled at norm {nv!r}")
    return blk


def _column_restriction_gap(B_block: np.ndarray, A_block: np.ndarray, p: float) -> float:
    """Operator-norm bound for B P_N - A where A sits in the leading corner.

    Exact for p = 2 (singular value of the rectangle); for other exponents
    an entrywise-modulus upper bound, which is what the postcondition
    checks need."""
    d = A_block.shape[0]
    diff = B_block[:, :d].copy()
    diff[:d, :] -= A_block
    if p == 2.0:
        return matrix_norm(diff, 2.0)
    return matrix_norm(np.abs(diff), p)


def extend_with_full_norming(A: OperatorModel, eps: float):
    """Extend a positive zero-tail contraction on E_N to a norm-one positive
    B on E_{2N+1} with a norming vector u such that u and Bu are supported
    on all of {0, ..., 2N+1}, while ||B P_N - A|| < eps. When
    ||A|| >= 1 - eps/4 the stronger bound ||B - A|| < eps holds as well.

    Returns ``(B, cert)`` where ``cert`` is the norming certificate of B.
    """
    if not isinstance(A.tail, ZeroTail):
        raise ModelError("the extension starts from a zero-tail block")
    if not is_positive(A):
        raise ModelError("the extension starts from a positive block")
    if not (0.0 < eps < 1.0):
        raise ModelError(f"extension tolerance must lie in (0, 1), got {eps!r}")
    norm_A = operator_norm(A).value
    if norm_A > 1.0 + 1e-12:
        raise ModelError("the extension starts from a contraction")
    d = A.block_dim
    p = A.p
    G = np.full((d, d), 1.0 / d)  # all-ones block, lp norm exactly 1
    shrunk = (1.0 - eps / 4.0) * A.block
    close_to_one = norm_A >= 1.0 - eps / 4.0

    if close_to_one:
        cert = norming_vector(OperatorModel(p, shrunk))
        v = cert.u.padded(d)
        w = shrunk @ v
        wn = vector_norm(w, p)
        w = w / wn if wn > 0 else np.full(d, d ** (-1.0 / p))
        dual = v ** (p - 1.0)  # unit in the dual norm, pairs to 1 with v
        bump = np.outer(w, dual)
        glue = eps / 24.0

        def assemble(s: float) -> np.ndarray:
            return np.block([[shrunk + s * bump, glue * G], [glue * G, glue * G]])

    else:
        cglue = eps / 16.0
        nu = eps / 16.0

        def assemble(s: float) -> np.ndarray:
            return np.block([[shrunk, cglue * G], [nu * G, s * G]])

    blk = _bisect_to_norm_one(assemble, p)
    B = OperatorModel(p, blk)
    cert = norming_vector(B)

    # Postconditions, re-verified; never return a defective extension.
    failures = []
    if abs(cert.norm_value - 1.0) > NORM_ONE_TOL:
        failures.append(f"norm {cert.norm_value!r} not within 1e-10 of 1")
    u_entries = cert.u.padded(2 * d)
    if np.any(u_entries == 0.0):
        failures.append("norming vector support is not full")
    Bu = blk @ u_entries
    if np.any(Bu == 0.0):
        failures.append("support of B u is not full")
    col_gap = _column_restriction_gap(blk, A.block, p)
    if not col_gap < eps:
        failures.append(f"column restriction gap {col_gap!r} not below {eps}")
    if close_to_one:
        full_diff = blk.copy()
        full_diff[:d, :d] -= A.block
        whole_gap = (
            matrix_norm(full_diff, 2.0) if p == 2.0 else matrix_norm(np.abs(full_diff), p)
        )
        if not whole_gap < eps:
            failures.append(f"whole-operator gap {whole_gap!r} not below {eps}")
    if failures:
        raise ModelError("extension recipe failed its postconditions: " + "; ".join(failures))
    return B, cert


def locate_norming_representative(
    center: OperatorModel,
    rows: int,
    eps_c: float,
    n0: int,
):
    """Inside the SOT*-open set
    {T : sot_gap(T, center, rows) < eps_c and adj_gap(T, center, rows) < eps_c}
    find a finite zero-tail representative B on E_M, M >= n0, of norm one
    with a norming vector u whose support and image support fill
    {0, ..., M}. Returns ``(M, B, cert)``.

    The norm is raised by an all-ones bump on a fresh coordinate past
    max(rows, block edge), which leaves every column and row at index
    <= rows untouched, so membership in the constraint set is exact.
    """
    if eps_c <= 0.0:
        raise ModelError("the SOT* constraint radius must be positive")
    if rows < 0 or n0 < 0:
        raise ModelError("row count and minimal index must be nonnegative")
    if not is_positive(center):
        raise ModelError("the center must be a positive operator")
    if operator_norm(center).value > 1.0 + 1e-12:
        raise ModelError("the center must be a contraction")
    n_trunc = max(n0, rows, center.block_dim - 1)
    head = corner(center, n_trunc)
    size = n_trunc + 2
    bumped = np.zeros((size, size))
    bumped[: n_trunc + 1, : n_trunc + 1] = head
    bumped[size - 1, size - 1] = 1.0 - eps_c / 8.0
    eps_prime = min(eps_c / 2.0, 0.5)
    # The bump puts the norm at >= 1 - eps_prime/4, so the extension's
    # strengthened bound ||B - bumped|| < eps_prime applies.
    B, cert = extend_with_full_norming(OperatorModel(center.p, bumped), eps_prime)
    sgap = sot_gap(B, center, rows)
    agap = adj_gap(B, center, rows)
    if not (sgap < eps_c and agap < eps_c):
        raise ModelError(
            f"finite representative left the constraint set "
            f"(sot gap {sgap!r}, adjoint gap {agap!r}, radius {eps_c})"
        )
    M = B.block_dim - 1
    return M, B, cert


def density_embed(A: OperatorModel, eps: float) -> OperatorModel:
    """Extend A to T = B ⊕ identity tail with max_{k<=N} ||(T-A) e_k|| < eps.

    T has norm one and carries covering norming families on both sides: the
    extension's fully supported head vectors plus the identity-tail basis
    vectors, so the class probes in the typicality module find witnesses.
    Requires ||A|| < 1.
    """
    if not isinstance(A.tail, ZeroTail):
        raise ModelError("density embedding starts from a zero-tail block")
    if operator_norm(A).value >= 1.0:
        raise ModelError("density embedding needs ||A|| < 1")
    B, _ = extend_with_full_norming(A, eps)
    T = OperatorModel(A.p, B.block, IdentityTail())
    gap = sot_gap(T, A, A.block_dim - 1)
    if not gap < eps:
        raise ModelError(f"density embedding failed the column bound ({gap!r} >= {eps})")
    return T


def seq_norm_deficit(T: OperatorModel, delta: float):
    """Sequence T_n = T P_n + delta * e_0 <e_{n+1}, .>  for a zero-tail
    contraction with ||T|| + delta < 1.

    Each element is a positive contraction; the corner gaps against T
    vanish for n past the corner while the adjoint gap at row 0 stays at
    delta (up to the column tail of T beyond n).
    """
    if not isinstance(T.tail, ZeroTail):
        raise ModelError("the norm-deficit sequence starts from a zero-tail block")
    if not is_positive(T):
        raise ModelError("the norm-deficit sequence starts from a positive block")
    if delta < 0.0:
        raise ModelError("the cross weight must be nonnegative")
    if operator_norm(T).value + delta >= 1.0:
        raise ModelError("need ||T|| + delta < 1 to keep every element a contraction")
    base = T.block
    d = T.block_dim
    p = T.p

    def element(n: int) -> OperatorModel:
        if n < 0:
            raise ModelError("sequence index must be nonnegative")
        size = max(d, n + 2)
        blk = np.zeros((size, size))
        cols = min(d, n + 1)  # T P_n keeps columns 0..n only
        blk[:d, :cols] = base[:, :cols]
        blk[0, n + 1] += delta
        return OperatorModel(p, blk)

    return element


def seq_zero_row(T: OperatorModel, l: int):
    """Sequence T_n = T P_n + e_l <., e_{n+1}> for a zero-tail contraction
    whose row l vanishes (the adjoint kills e_l).

    Every element is a positive contraction: the unit cross entry lands in
    the otherwise empty row l, so row masses never exceed one.
    """
    if not isinstance(T.tail, ZeroTail):
        raise ModelError("the zero-row sequence starts from a zero-tail block")
    if not is_positive(T):
        raise ModelError("the zero-row sequence starts from a positive block")
    if l < 0:
        raise ModelError("row index must be nonnegative")
    if l < T.block_dim and np.any(T.block[l, :] != 0.0):
        raise ModelError(f"row {l} of the operator must vanish")
    if operator_norm(T).value > 1.0 + 1e-12:
        raise ModelError("the zero-row sequence starts from a contraction")
    base = T.block
    d = T.block_dim
    p = T.p

    def element(n: int) -> OperatorModel:
        if n < 0:
            raise ModelError("sequence index must be nonnegative")
        size = max(d, n + 2, l + 1)
        blk = np.zeros((size, size))
        cols = min(d, n + 1)
        blk[:d, :cols] = base[:, :cols]
        blk[l, n + 1] += 1.0
        return OperatorModel(p, blk)

    return element


def seq_non_attaining(A: OperatorModel, eps_seq, tail_c: float, tail_r: float):
    """Sequence T_N = (1 - eps_N) P_N A P_N ⊕ geometric tail: every element
    has norm one without attaining it, yet the gap traces against A at any
    fixed index vanish as N grows."""
    if not is_positive(A):
        raise ModelError("the non-attaining sequence starts from a positive operator")
    if operator_norm(A).value > 1.0 + 1e-12:
        raise ModelError("the non-attaining sequence starts from a contraction")
    tail = GeometricTail(tail_c, tail_r)  # validates the parameters
    p = A.p

    def element(N: int) -> OperatorModel:
        if N < 0:
            raise ModelError("sequence index must be nonnegative")
        e = float(eps_seq(N))
        if not (0.0 < e < 1.0):
            raise ModelError(f"the shrink sequence must lie in (0, 1), got {e!r} at {N}")
        blk = (1.0 - e) * corner(A, N)
        return OperatorModel(p, blk, tail)

    return element


def diagonal_non_attainer(c: float, r: float, p: float = 2.0) -> OperatorModel:
    """The diagonal operator with entries a_n = 1 - c * r**n: norm one,
    never attained. The first entry sits in the block, the rest in a
    geometric tail with shifted leading coefficient."""
    if not (0.0 < c <= 1.0):
        raise ModelError(f"need c in (0, 1], got {c!r}")
    if not (0.0 < r < 1.0):
        raise ModelError(f"need r in (0, 1), got {r!r}")
    return OperatorModel(p, [[1.0 - c]], GeometricTail(c * r, r))
