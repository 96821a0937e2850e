"""Monte-Carlo campaigns probing properties of random positive contractions.

The probes operationalize, at finite scale, properties that hold for
"most" positive contractions in the Baire-category sense: not being a
co-isometry, having no invariant coordinate ideal (strong connectivity of
the support digraph), norm attainment, and membership in the classes with
covering norming families. The reported frequencies are relative to the
documented sampler and are never claims about category.

Campaigns are deterministic: sample i draws from a seed derived by hashing
(seed, i), so reports are bit-identical across runs and independent of any
execution order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import time
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    IdentityTail,
    ModelError,
    OperatorModel,
    ZeroTail,
    adjoint,
    corner,
)
from .norms import (
    NormingCertificate,
    operator_norm,
    norming_vector,
    tail_certificate,
)

__all__ = [
    "CAMPAIGN_CSV_HEADER",
    "PROBE_NAMES",
    "SamplerSpec",
    "CampaignReport",
    "EigenPersistenceTrace",
    "sample_positive_contraction",
    "probe_not_coisometry",
    "probe_irreducible",
    "probe_attainment",
    "probe_class_m",
    "probe_class_m_prime",
    "probe_eigen_persistence",
    "run_campaign",
]

CAMPAIGN_CSV_HEADER = (
    "sample,seed,dim,p,norm,attained,not_coisometry,irreducible,class_m,class_m_prime,error"
)
PROBE_NAMES = ("not_coisometry", "irreducible", "class_m", "class_m_prime")

DISTRIBUTIONS = ("uniform01", "exponential", "sparse")
NORM_TARGETS = ("leq1", "near1")


@dataclass(frozen=True)
class SamplerSpec:
    """How to draw a random positive contraction.

    distribution: 'uniform01' (iid U[0,1] entries), 'exponential'
    (iid Exp(1) entries), or 'sparse' (U[0,1] entries kept with the given
    density). norm_target: 'leq1' divides by max(1, norm); 'near1' rescales
    to norm exactly 1 - eta.
    """

    dim: int
    p: float = 2.0
    distribution: str = "uniform01"
    density: float | None = None
    norm_target: str = "leq1"
    eta: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ModelError("sampler dimension must be at least 1")
        if not (np.isfinite(self.p) and self.p > 1.0):
            raise ModelError("sampler exponent must lie in (1, inf)")
        if self.distribution not in DISTRIBUTIONS:
            raise ModelError(f"unknown distribution {self.distribution!r}")
        if self.distribution == "sparse":
            if self.density is None or not (0.0 < self.density <= 1.0):
                raise ModelError("sparse sampling needs a density in (0, 1]")
        if self.norm_target not in NORM_TARGETS:
            raise ModelError(f"unknown norm target {self.norm_target!r}")
        if self.norm_target == "near1":
            if self.eta is None or not (0.0 < self.eta < 1.0):
                raise ModelError("near1 rescaling needs eta in (0, 1)")

    def provenance(self) -> dict:
        return {
            "dim": self.dim,
            "p": self.p,
            "distribution": self.distribution,
            "density": self.density,
            "norm_target": self.norm_target,
            "eta": self.eta,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class EigenPersistenceTrace:
    """Heuristic diagnostic only: eigenvalues of growing corners with
    nearest-neighbor matching across sizes. No statement about the spectrum
    of the full operator is implied."""

    indices: tuple
    spectra: tuple
    max_drift: float
    heuristic: bool = True


@dataclass(frozen=True)
class CampaignReport:
    spec: SamplerSpec
    count: int
    probes: tuple
    rows: tuple
    counts: dict
    fractions: dict
    error_count: int
    wall_time: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CAMPAIGN_CSV_HEADER.split(","))
        for row in self.rows:
            writer.writerow(row)
        return buf.getvalue()


def _derive_seed(seed: int, index: int) -> int:
    digest = hashlib.sha256(f"{seed}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def _draw_block(rng: np.random.Generator, spec: SamplerSpec) -> np.ndarray:
    shape = (spec.dim, spec.dim)
    if spec.distribution == "uniform01":
        return rng.random(shape)
    if spec.distribution == "exponential":
        return rng.exponential(1.0, shape)
    keep = rng.random(shape) < spec.density
    return rng.random(shape) * keep


def sample_positive_contraction(spec: SamplerSpec) -> OperatorModel:
    """Draw one positive contraction per the spec; deterministic in the seed."""
    rng = np.random.default_rng(spec.seed)
    for _ in range(128):
        block = _draw_block(rng, spec)
        value = operator_norm(OperatorModel(spec.p, block)).value
        if spec.norm_target == "leq1":
            if value > 1.0:
                block = block / value
            return OperatorModel(spec.p, block)
        if value > 0.0:
            return OperatorModel(spec.p, block * ((1.0 - spec.eta) / value))
        # near1 cannot rescale a zero draw; redraw deterministically.
    raise ModelError("sampler drew zero matrices 128 times in a row")


def probe_not_coisometry(T: OperatorModel) -> bool:
    """Some block column carries strictly positive mass in both rows 0 and 1."""
    b = T.block
    if T.block_dim < 2:
        return False
    return bool(np.any((b[0, :] > 0) & (b[1, :] > 0)))


def _reaches_all(adj_list, start, n) -> bool:
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    queue = deque([start])
    count = 1
    while queue:
        v = queue.popleft()
        for w in adj_list[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    return count == n


def probe_irreducible(T: OperatorModel) -> bool:
    """Strong connectivity of the block support digraph (edge i -> j iff
    <e_j, T e_i> > 0): equivalent to the absence of nontrivial invariant
    coordinate ideals for the finite block.

    Only zero-tail models are accepted; for structured infinite tails the
    criterion is undefined at finite scale and refusing is the honest
    answer.
    """
    if not isinstance(T.tail, ZeroTail):
        raise ModelError(
            "invariant-ideal criterion undefined at finite scale for "
            f"{T.tail.kind!r} tails"
        )
    b = T.block
    n = T.block_dim
    if n == 1:
        return True
    forward = [list(np.nonzero(b[:, i] > 0)[0]) for i in range(n)]
    backward = [list(np.nonzero(b[i, :] > 0)[0]) for i in range(n)]
    return _reaches_all(forward, 0, n) and _reaches_all(backward, 0, n)


def probe_attainment(T: OperatorModel) -> str:
    return operator_norm(T).attained


def _class_witness(T: OperatorModel, against_adjoint: bool):
    res = operator_norm(T)
    if abs(res.value - 1.0) > 1e-9:
        return None
    if not isinstance(T.tail, IdentityTail):
        return None  # no finite model covers every coordinate without one
    head = OperatorModel(T.p, T.block.T if against_adjoint else T.block)
    head_norm = operator_norm(head)
    if abs(head_norm.value - 1.0) > 1e-9:
        return None
    cert = norming_vector(head)
    covered = {i for i in cert.support.indices}
    if covered != set(range(T.block_dim)):
        return None
    target = adjoint(T) if against_adjoint else T
    full = NormingCertificate(
        u=cert.u,
        norm_value=res.value,
        residual_norming=cert.residual_norming,
        residual_eigen=cert.residual_eigen,
        support=cert.support,
    )
    return (full, tail_certificate(target, T.block_dim))


def probe_class_m(T: OperatorModel):
    """Witness family of norming vectors for T* covering every coordinate,
    or None. The head witness is the single Perron norming vector of the
    transposed block; richer families in degenerate top eigenspaces are not
    searched."""
    return _class_witness(T, against_adjoint=True)


def probe_class_m_prime(T: OperatorModel):
    """Witness family of norming vectors for T covering every coordinate,
    or None."""
    return _class_witness(T, against_adjoint=False)


def probe_eigen_persistence(T: OperatorModel, index_list) -> EigenPersistenceTrace:
    """Eigenvalues of growing corners with nearest matching across sizes.

    Heuristic: drift says nothing about the spectrum of the full operator.
    """
    if T.p != 2.0:
        raise ModelError("the eigenvalue diagnostic is restricted to l2 models")
    indices = sorted(int(n) for n in index_list)
    if not indices or indices[0] < 0:
        raise ModelError("the diagnostic needs nonnegative corner indices")
    spectra = []
    for n in indices:
        eigs = np.linalg.eigvals(corner(T, n))
        spectra.append(tuple(sorted(eigs, key=lambda z: (z.real, z.imag))))
    max_drift = 0.0
    for a, b in zip(spectra, spectra[1:]):
        for z in a:
            nearest = min(abs(z - w) for w in b)
            max_drift = max(max_drift, nearest)
    return EigenPersistenceTrace(
        indices=tuple(indices), spectra=tuple(spectra), max_drift=float(max_drift)
    )


_PROBE_FUNCS = {
    "not_coisometry": probe_not_coisometry,
    "irreducible": probe_irreducible,
    "class_m": lambda T: probe_class_m(T) is not None,
    "class_m_prime": lambda T: probe_class_m_prime(T) is not None,
}


def run_campaign(spec: SamplerSpec, count: int, probes=PROBE_NAMES) -> CampaignReport:
    """Sample ``count`` operators and evaluate the requested probes.

    Per-sample errors are recorded in the row and counted, never aborting
    the campaign. Identical specs give byte-identical CSVs.
    """
    if count < 1:
        raise ModelError("a campaign needs at least one sample")
    probes = tuple(probes)
    for name in probes:
        if name not in _PROBE_FUNCS:
            raise ModelError(f"unknown probe {name!r}")
    t0 = time.perf_counter()
    rows = []
    counts = {name: {"true": 0, "false": 0, "error": 0} for name in probes}
    error_count = 0
    for i in range(count):
        seed_i = _derive_seed(spec.seed, i)
        sample_spec = replace(spec, seed=seed_i)
        fields = {name: "" for name in PROBE_NAMES}
        norm_field = ""
        attained_field = ""
        error_field = ""
        try:
            T = sample_positive_contraction(sample_spec)
            res = operator_norm(T)
            norm_field = repr(res.value)
            attained_field = res.attained
            for name in probes:
                try:
                    outcome = bool(_PROBE_FUNCS[name](T))
                    fields[name] = "true" if outcome else "false"
                    counts[name]["true" if outcome else "false"] += 1
                except Exception as exc:  # per-probe failure, recorded
                    fields[name] = "error"
                    counts[name]["error"] += 1
                    error_field = f"{name}: {exc}"
        except Exception as exc:  # per-sample failure, recorded
            error_field = str(exc)
            error_count += 1
            for name in probes:
                counts[name]["error"] += 1
        rows.append(
            (
                i,
                seed_i,
                spec.dim,
                repr(spec.p),
                norm_field,
                attained_field,
                fields["not_coisometry"],
                fields["irreducible"],
                fields["class_m"],
                fields["class_m_prime"],
                error_field,
            )
        )
    fractions = {name: counts[name]["true"] / count for name in probes}
    wall = time.perf_counter() - t0
    return CampaignReport(
        spec=spec,
        count=count,
        probes=probes,
        rows=tuple(rows),
        counts=counts,
        fractions=fractions,
        error_count=error_count,
        wall_time=wall,
    )
