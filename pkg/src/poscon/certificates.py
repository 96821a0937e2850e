"""Explicit continuity certificates on the positive contractions of l2.

A certificate pins down a weak-corner neighborhood
W = {T positive contraction : max_{k,l <= m} |<e_k, (T-B) e_l>| < delta}
of a norm-one center B together with a guarantee
max_{k <= r} ||(T-B)* e_k|| < eps for every T in W.

``delta_for_corner`` produces the single-norming-vector certificate: with a
fully supported nonnegative unit vector u norming for B*, the radius

    delta = min( min positive entry of B / 2 , eps² / (2 K) ),
    K = max_l (1/u_l²) ( sum_j u_j² sum_k b_{j,k}
                         + sum_{i<j} u_i u_j sum_k (b_{i,k} + b_{j,k}) )

makes the guarantee hold. The underlying bound controls the squared gap,
so it is instantiated at eps_sq = eps², which yields the unsquared claim
at level eps.

``class_m_certificate`` generalizes to a covering family of norming vectors
for B* (finite supports plus cofinite identity-tail supports): a finite
subfamily covering rows 0..r is selected, finite members get a tail index
past which their mass conditions hold to within eps²/4, and the radius
comes from the same positivity condition plus the two displayed quadratic
sums, each instantiated at eps_sq/2. The corner-certificate radius is
therefore exactly twice this one whenever the quadratic term binds.

``diameter_certificate`` turns a corner certificate at level eta/8 into a
neighborhood of adjoint-row-metric diameter below eta.

``falsify`` attacks a certificate empirically: rejection sampling of
positive contractions inside the corner ball plus coordinate-wise
finite-step ascent on the corner entries with step halving. A sound
certificate never reaches eps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    CoordVector,
    IdentityTail,
    ModelError,
    OperatorModel,
    ZeroTail,
    adjoint,
    apply,
    corner,
    row_array,
    support,
)
from .norms import NormingCertificate, operator_norm, vector_norm, verify_norming
from .serialization import (
    dumps_canonical,
    load_json,
    operator_from_dict,
    operator_to_dict,
    write_text,
)

__all__ = [
    "CertificateError",
    "WotNeighborhood",
    "ContinuityCertificate",
    "FalsifyReport",
    "delta_for_corner",
    "class_m_certificate",
    "diameter_certificate",
    "falsify",
    "sample_in_neighborhood",
    "certificate_to_dict",
    "certificate_from_dict",
    "save_certificate",
    "load_certificate",
]

NORM_ONE_TOL = 1e-10


class CertificateError(ValueError):
    """A certificate hypothesis fails or a certificate cannot be produced."""


@dataclass(frozen=True)
class WotNeighborhood:
    """Corner ball {T : max_{k,l <= corner_size} |<e_k,(T-center)e_l>| < radius}."""

    center: OperatorModel
    corner_size: int
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise CertificateError("a neighborhood needs a positive radius")
        if self.corner_size < 0:
            raise CertificateError("corner size must be nonnegative")

    def contains(self, T: OperatorModel) -> bool:
        from .topologies import wot_gap

        return wot_gap(T, self.center, self.corner_size) < self.radius


@dataclass(frozen=True)
class ContinuityCertificate:
    """Guarantee: positive contractions in the neighborhood satisfy
    max_{k <= rows} ||(T-center)* e_k||² < epsilon_sq (= epsilon²)."""

    neighborhood: WotNeighborhood
    rows: int
    epsilon: float
    epsilon_sq: float
    family_vectors: tuple = ()
    family_cofinite: tuple = ()
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FalsifyReport:
    max_gap: float
    witness: OperatorModel
    epsilon: float
    violated: bool
    random_trials: int
    climb_steps: int
    seed: int


def _check_center(B: OperatorModel) -> float:
    if B.p != 2.0:
        raise CertificateError("continuity certificates are stated on l2")
    value = operator_norm(B).value
    if abs(value - 1.0) > NORM_ONE_TOL:
        raise CertificateError(f"the center must have norm one, got {value!r}")
    return value


def _check_unit_nonneg(u: CoordVector) -> None:
    if np.any(u.entries < 0):
        raise CertificateError("norming vectors in certificates must be nonnegative")
    n = vector_norm(u, 2.0)
    if abs(n - 1.0) > 1e-9:
        raise CertificateError(f"norming vectors in certificates must be unit, got {n!r}")


def _quadratic_sum(u: np.ndarray, row_sums: np.ndarray) -> float:
    # sum_j u_j² s_j + sum_{i<j} u_i u_j (s_i + s_j); the cross part
    # collapses to sum_i u_i s_i (U - u_i) with U = sum_j u_j.
    s = row_sums[: u.size]
    total = float(np.sum(u**2 * s))
    U = float(np.sum(u))
    total += float(np.sum(u * s * (U - u)))
    return total


def delta_for_corner(
    B: OperatorModel,
    u: CoordVector,
    eps: float,
    *,
    accept_tol: float = 1e-8,
) -> ContinuityCertificate:
    """Corner certificate from a single fully supported norming vector of B*.

    Requires: p = 2, zero tail, ||B|| = 1 within 1e-10, u a nonnegative unit
    vector norming for the adjoint with support exactly {0, ..., M} where
    M + 1 is the block dimension.
    """
    if eps <= 0.0:
        raise CertificateError("the target gap must be positive")
    if not isinstance(B.tail, ZeroTail):
        raise CertificateError("corner certificates need a zero-tail center")
    _check_center(B)
    M = B.block_dim - 1
    _check_unit_nonneg(u)
    supp = support(u)
    if supp.indices != frozenset(range(M + 1)):
        raise CertificateError(
            f"the norming vector must be supported on all of 0..{M} "
            f"(got {sorted(supp.indices)})"
        )
    report = verify_norming(adjoint(B), u, accept_tol)
    if not report.accepted:
        raise CertificateError(
            f"the vector is not norming for the adjoint "
            f"(residuals {report.residual_norming:.3e}, {report.residual_eigen:.3e})"
        )
    b = B.block
    row_sums = b.sum(axis=1)
    uv = u.padded(M + 1)
    S = _quadratic_sum(uv, row_sums)
    if S <= 0.0:
        raise CertificateError("degenerate center: the quadratic sum vanishes")
    K = S / float(np.min(uv) ** 2)
    positive = b[b > 0]
    if positive.size == 0:
        raise CertificateError("degenerate center: no positive entries")
    eps_sq = eps * eps
    delta = min(float(positive.min()) / 2.0, eps_sq / (2.0 * K))
    return ContinuityCertificate(
        neighborhood=WotNeighborhood(center=B, corner_size=M, radius=delta),
        rows=M,
        epsilon=eps,
        epsilon_sq=eps_sq,
        family_vectors=(u,),
        provenance={
            "operation": "delta_for_corner",
            "parameters": {"epsilon": eps, "K": K},
        },
    )


def class_m_certificate(
    B: OperatorModel,
    family,
    eps: float,
    r: int,
    *,
    index_cap: int | None = None,
    accept_tol: float = 1e-8,
) -> ContinuityCertificate:
    """Certificate from a family of norming vectors for B* whose supports
    cover rows 0..r.

    A finite subfamily covering the rows is selected greedily. Its
    finite-support members get the least tail index n' > r at which both
    mass conditions drop below eps²/4; cofinite members must come from an
    identity tail, where the conditions hold with zero defect.
    """
    if eps <= 0.0:
        raise CertificateError("the target gap must be positive")
    if r < 0:
        raise CertificateError("the row count must be nonnegative")
    _check_center(B)
    Badj = adjoint(B)
    eps_sq = eps * eps
    quarter = eps_sq / 4.0

    # Validate and greedily select a covering subfamily.
    selected_finite: list[CoordVector] = []
    selected_cofinite: list[int] = []
    covered: set = set()
    for member in family:
        if not isinstance(member, NormingCertificate):
            raise CertificateError("family members must be norming certificates")
        if member.support.is_finite():
            u = member.u
            _check_unit_nonneg(u)
            rep = verify_norming(Badj, u, accept_tol)
            if not rep.accepted:
                raise CertificateError(
                    f"a family member is not norming for the adjoint "
                    f"(residuals {rep.residual_norming:.3e}, {rep.residual_eigen:.3e})"
                )
            contribution = support(u).covered_upto(r) - covered
            if contribution:
                selected_finite.append(u)
                covered |= contribution
        else:
            start = member.support.cofinite_from
            if not isinstance(B.tail, IdentityTail):
                raise CertificateError("cofinite norming families need an identity tail")
            if start < B.block_dim:
                raise CertificateError(
                    "cofinite supports must start at or after the block edge"
                )
            contribution = set(range(start, r + 1)) - covered
            if contribution:
                selected_cofinite.append(start)
                covered |= contribution
    missing = set(range(r + 1)) - covered
    if missing:
        raise CertificateError(
            f"family supports do not cover rows 0..{r} (missing {sorted(missing)})"
        )

    cap = index_cap if index_cap is not None else 10 * (r + B.block_dim)
    # Row tails ||Q_n B* e_l||² for l <= r, shared by every member search.
    width = max(B.block_dim, cap + 2, r + 1)
    rows = np.stack([row_array(B, l, width) for l in range(r + 1)])
    row_tail_sq = np.cumsum((rows**2)[:, ::-1], axis=1)[:, ::-1]  # sum_{j>=n}

    n_max = 0
    nprime = r + 1
    for u in selected_finite:
        idx = sorted(support(u).indices)
        n_max = max(n_max, idx[-1])
        image = apply(Badj, u)  # B* u, finitely supported
        img = image.padded(max(len(image), cap + 2))
        head_sq = np.cumsum(img**2)
        umin_sq = min(u.entry(l) for l in support(u).covered_upto(r)) ** 2
        found = None
        best_defect = np.inf
        for cand in range(r + 1, cap + 1):
            defect1 = (1.0 - float(head_sq[cand])) / umin_sq
            defect2 = float(row_tail_sq[:, cand + 1].max()) if cand + 1 < width else 0.0
            worst = max(defect1, defect2)
            best_defect = min(best_defect, worst)
            if defect1 < quarter and defect2 < quarter:
                found = cand
                break
        if found is None:
            raise CertificateError(
                f"tail-index search exceeded the cap {cap}; "
                f"smallest achieved defect {best_defect!r} (needs < {quarter!r})"
            )
        nprime = max(nprime, found)

    N_cof = max(r, B.block_dim - 1) if selected_cofinite else 0
    m_corner = max(n_max, nprime, N_cof) + 1
    big = corner(B, m_corner)

    K1 = 0.0
    if selected_finite:
        wide = corner(B, max(n_max, nprime))
        row_sums_1 = wide[:, : nprime + 1].sum(axis=1)
        for u in selected_finite:
            uv = u.padded(n_max + 1)
            S = _quadratic_sum(uv, row_sums_1)
            for l in support(u).covered_upto(r):
                K1 = max(K1, S / u.entry(l) ** 2)
    K2 = 0.0
    if selected_cofinite:
        row_sums_2 = corner(B, N_cof).sum(axis=1)
        for start in selected_cofinite:
            for l in range(start, r + 1):
                K2 = max(K2, float(row_sums_2[l]))

    positive = big[big > 0]
    if positive.size == 0:
        raise CertificateError("degenerate center: no positive entries")
    candidates = [float(positive.min()) / 2.0]
    if K1 > 0.0:
        candidates.append(eps_sq / (4.0 * K1))
    if K2 > 0.0:
        candidates.append(eps_sq / (4.0 * K2))
    delta = min(candidates)
    return ContinuityCertificate(
        neighborhood=WotNeighborhood(center=B, corner_size=m_corner, radius=delta),
        rows=r,
        epsilon=eps,
        epsilon_sq=eps_sq,
        family_vectors=tuple(selected_finite),
        family_cofinite=tuple(selected_cofinite),
        provenance={
            "operation": "class_m_certificate",
            "parameters": {
                "epsilon": eps,
                "r": r,
                "n_prime": nprime,
                "K1": K1,
                "K2": K2,
            },
        },
    )


def diameter_certificate(B: OperatorModel, u: CoordVector, eta: float) -> WotNeighborhood:
    """Corner ball around B of adjoint-row-metric diameter below eta.

    Needs the corner certificate hypotheses at target eta/8 and a block
    large enough that the metric tail past the block weighs less than
    eta/8, i.e. M >= n0 where n0 is minimal with 2^{-n0} < eta/8.
    """
    if eta <= 0.0:
        raise CertificateError("the diameter target must be positive")
    n0 = 0
    while 2.0 ** (-n0) >= eta / 8.0:
        n0 += 1
    M = B.block_dim - 1
    if M < n0:
        raise CertificateError(
            f"block too small for the eta/8 tail bound: needs block dimension "
            f">= {n0 + 1} (M >= {n0}), got {M + 1}"
        )
    cert = delta_for_corner(B, u, eta / 8.0)
    return WotNeighborhood(center=B, corner_size=M, radius=cert.neighborhood.radius)


def _batch_top_singular(blocks: np.ndarray) -> np.ndarray:
    return np.linalg.svd(blocks, compute_uv=False)[..., 0]


def _batch_row_gap(blocks: np.ndarray, base: np.ndarray, r: int) -> np.ndarray:
    diff = blocks[:, : r + 1, :] - base[None, : r + 1, :]
    return np.sqrt(np.sum(diff**2, axis=2)).max(axis=1)


def _project_candidates(cand, base, m, lo_c, hi_c, margin):
    """Clamp to the nonnegative cone and the corner box, rescale any
    non-contraction, then recheck ball membership (rescaling can move
    corner entries). Returns (blocks, in_ball)."""
    np.clip(cand, 0.0, None, out=cand)
    cand[:, : m + 1, : m + 1] = np.clip(cand[:, : m + 1, : m + 1], lo_c[None], hi_c[None])
    norms = _batch_top_singular(cand)
    scale = np.maximum(norms, 1.0)[:, None, None]
    cand = cand / scale
    corner_diff = np.abs(cand[:, : m + 1, : m + 1] - base[None, : m + 1, : m + 1])
    in_ball = (corner_diff <= margin + 1e-15).all(axis=(1, 2))
    return cand, in_ball


def sample_in_neighborhood(
    W: WotNeighborhood,
    count: int,
    seed: int = 0,
    *,
    pad: int = 0,
    max_batches: int = 400,
) -> list:
    """Positive contractions inside the corner ball: center plus clamped
    noise with graded amplitudes, renormalized to contractions, rejecting
    samples the rescaling pushed out of the ball."""
    B = W.center
    m = W.corner_size
    dim = max(m + 1, B.block_dim) + max(pad, 0)
    base = corner(B, dim - 1)
    margin = 0.999 * W.radius
    lo_c = np.clip(base[: m + 1, : m + 1] - margin, 0.0, None)
    hi_c = base[: m + 1, : m + 1] + margin
    rng = np.random.default_rng(seed)
    out: list = []
    batches = 0
    while len(out) < count and batches < max_batches:
        batches += 1
        nb = max(count, 64)
        amp = rng.random((nb, 1, 1)) ** 2  # biased small so rescaling stays gentle
        noise = amp * rng.uniform(-margin, margin, size=(nb, dim, dim))
        cand = base[None] + noise
        cand, ok = _project_candidates(cand, base, m, lo_c, hi_c, margin)
        for blk in cand[ok]:
            out.append(OperatorModel(2.0, blk))
            if len(out) == count:
                break
    if len(out) < count:
        raise CertificateError(
            f"neighborhood sampler produced only {len(out)} of {count} samples"
        )
    return out


def falsify(
    cert: ContinuityCertificate,
    trials: int = 2000,
    climb_steps: int = 200,
    seed: int = 0,
    *,
    pad: int = 3,
    batch: int = 256,
) -> FalsifyReport:
    """Adversarial stress test of a certificate.

    Random phase: positive contractions sampled around the center, corner
    entries clamped inside the delta-ball, everything renormalized to a
    contraction with rejection of samples the rescaling pushed out of the
    ball. Climb phase: coordinate-wise finite-step ascent of the
    adjoint-row gap over the corner entries with step halving. The sampled
    blocks extend ``pad`` coordinates past the corner so that mass outside
    the certified corner is attacked as well.
    """
    B = cert.neighborhood.center
    m = cert.neighborhood.corner_size
    delta = cert.neighborhood.radius
    r = cert.rows
    eps = cert.epsilon
    dim = max(m + 1, B.block_dim, r + 1) + max(pad, 0)
    base = corner(B, dim - 1)
    margin = 0.999 * delta
    lo_c = np.clip(base[: m + 1, : m + 1] - margin, 0.0, None)
    hi_c = base[: m + 1, : m + 1] + margin

    rng = np.random.default_rng(seed)
    best_gap = 0.0
    best = base.copy()  # the center itself always belongs to the ball

    remaining = max(int(trials), 0)
    while remaining > 0:
        nb = min(batch, remaining)
        remaining -= nb
        cand = np.repeat(base[None], nb, axis=0)
        # Graded amplitudes: small perturbations survive the contraction
        # rescaling, full-box ones (every fourth sample) probe the ball edge.
        amp = rng.random((nb, 1, 1)) ** 1.5
        amp[::4] = 1.0
        cand[:, : m + 1, : m + 1] += amp * rng.uniform(
            -margin, margin, size=(nb, m + 1, m + 1)
        )
        if dim > m + 1:
            out_amp = rng.uniform(0.0, 0.35, size=(nb, 1, 1))
            noise = out_amp * (rng.random((nb, dim, dim)) - 0.5)
            noise[:, : m + 1, : m + 1] = 0.0
            cand = cand + noise
        cand, ok = _project_candidates(cand, base, m, lo_c, hi_c, margin)
        if not np.any(ok):
            continue
        gaps = _batch_row_gap(cand[ok], base, r)
        i = int(np.argmax(gaps))
        if gaps[i] > best_gap:
            best_gap = float(gaps[i])
            best = cand[ok][i].copy()

    coords = [(k, l) for k in range(m + 1) for l in range(m + 1)]
    step = delta / 2.0
    current = best.copy()
    for _ in range(max(int(climb_steps), 0)):
        if step < 1e-9 * max(delta, 1e-300):
            break
        cand = np.repeat(current[None], 2 * len(coords), axis=0)
        for j, (k, l) in enumerate(coords):
            cand[2 * j, k, l] += step
            cand[2 * j + 1, k, l] -= step
        cand, ok = _project_candidates(cand, base, m, lo_c, hi_c, margin)
        improved = False
        if np.any(ok):
            gaps = _batch_row_gap(cand[ok], base, r)
            i = int(np.argmax(gaps))
            if gaps[i] > best_gap + 1e-15:
                best_gap = float(gaps[i])
                best = cand[ok][i].copy()
                current = best.copy()
                improved = True
        if not improved:
            step /= 2.0

    witness = OperatorModel(2.0, best)
    return FalsifyReport(
        max_gap=float(best_gap),
        witness=witness,
        epsilon=eps,
        violated=bool(best_gap >= eps),
        random_trials=int(trials),
        climb_steps=int(climb_steps),
        seed=int(seed),
    )


def certificate_to_dict(cert: ContinuityCertificate) -> dict:
    family = [{"entries": [float(v) for v in u.entries]} for u in cert.family_vectors]
    family += [{"cofinite_from": int(k)} for k in cert.family_cofinite]
    return {
        "center": operator_to_dict(cert.neighborhood.center),
        "m": cert.neighborhood.corner_size,
        "delta": cert.neighborhood.radius,
        "r": cert.rows,
        "epsilon": cert.epsilon,
        "epsilon_sq": cert.epsilon_sq,
        "family": family,
        "provenance": cert.provenance,
    }


def certificate_from_dict(data) -> ContinuityCertificate:
    if not isinstance(data, dict):
        raise ModelError("certificate file must hold a JSON object")
    for key in ("center", "m", "delta", "r", "epsilon", "epsilon_sq"):
        if key not in data:
            raise ModelError(f"certificate file is missing the field {key!r}")
    vectors = []
    cofinite = []
    for entry in data.get("family", []):
        if "entries" in entry:
            vectors.append(CoordVector(entry["entries"]))
        elif "cofinite_from" in entry:
            cofinite.append(int(entry["cofinite_from"]))
        else:
            raise ModelError("family members carry 'entries' or 'cofinite_from'")
    return ContinuityCertificate(
        neighborhood=WotNeighborhood(
            center=operator_from_dict(data["center"]),
            corner_size=int(data["m"]),
            radius=float(data["delta"]),
        ),
        rows=int(data["r"]),
        epsilon=float(data["epsilon"]),
        epsilon_sq=float(data["epsilon_sq"]),
        family_vectors=tuple(vectors),
        family_cofinite=tuple(cofinite),
        provenance=data.get("provenance", {}),
    )


def save_certificate(path, cert: ContinuityCertificate) -> None:
    write_text(path, dumps_canonical(certificate_to_dict(cert)))


def load_certificate(path) -> ContinuityCertificate:
    return certificate_from_dict(load_json(path))
