"""Finite-index gap functionals for the operator topologies and the
adjoint-row metric with rigorous tail bounds.

The four gaps operationalize convergence at finite indices:

* ``wot_gap``: largest corner-entry difference max |<e_k, (S-T) e_l>|.
* ``sot_gap``: largest column-difference norm max ||(S-T) e_k||.
* ``adj_gap``: largest adjoint-column (row) difference norm
  max ||(S-T)* e_k||. On l2 this is the quantity every certificate in the
  certificates module bounds; for other exponents it is computed in the
  same lp column norm but certificates refuse it (non-certified).
* ``canonical_metric``: a two-sided enclosure of
  d(S, T) = sum 2^{-n} ||(T-S)* e_n||, the metric generating pointwise
  adjoint convergence on the positive contractions of l2. The lower bound
  is the partial sum through the cutoff; the upper bound adds either the
  exact structured-tail contribution (shared tails) or the generic
  contraction bound ||(T-S)* e_n|| <= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GeometricTail, ModelError, OperatorModel, column_array, row_array
from .norms import operator_norm, vector_norm

__all__ = [
    "GapProfile",
    "MetricInterval",
    "TraceSummary",
    "ConvergenceReport",
    "wot_gap",
    "sot_gap",
    "adj_gap",
    "gap_profile",
    "canonical_metric",
    "converge_report",
]

CONTRACTION_TOL = 1e-12


@dataclass(frozen=True)
class GapProfile:
    topology: str  # WOT | SOT | SOT_adj | SOTSTAR
    bound: int
    value: float


@dataclass(frozen=True)
class MetricInterval:
    lower: float
    upper: float
    cutoff: int


@dataclass(frozen=True)
class TraceSummary:
    below_tol_at: int | None
    floor: float


@dataclass(frozen=True)
class ConvergenceReport:
    steps: tuple
    wot: tuple
    sot: tuple
    adj: tuple
    metric_lo: tuple
    metric_hi: tuple
    summaries: dict
    tol: float

    def to_csv(self) -> str:
        lines = ["step,wot,sot,adj,metric_lo,metric_hi"]
        for i, n in enumerate(self.steps):
            lines.append(
                f"{n},{self.wot[i]!r},{self.sot[i]!r},{self.adj[i]!r},"
                f"{self.metric_lo[i]!r},{self.metric_hi[i]!r}"
            )
        return "\n".join(lines) + "\n"


def _require_same_p(S: OperatorModel, T: OperatorModel) -> None:
    if S.p != T.p:
        raise ModelError(f"operators live on different lp spaces (p={S.p} vs p={T.p})")


def wot_gap(S: OperatorModel, T: OperatorModel, m: int) -> float:
    """max over 0 <= k, l <= m of |<e_k, (S-T) e_l>|, reading tails exactly."""
    _require_same_p(S, T)
    if m < 0:
        raise ModelError("corner index must be nonnegative")
    from .core import corner

    return float(np.max(np.abs(corner(S, m) - corner(T, m))))


def sot_gap(S: OperatorModel, T: OperatorModel, r: int) -> float:
    """max over 0 <= k <= r of ||(S-T) e_k|| in the common lp norm."""
    _require_same_p(S, T)
    if r < 0:
        raise ModelError("column index must be nonnegative")
    worst = 0.0
    for k in range(r + 1):
        L = max(S.block_dim, T.block_dim, k + 1)
        diff = column_array(S, k, L) - column_array(T, k, L)
        worst = max(worst, vector_norm(diff, S.p))
    return worst


def adj_gap(S: OperatorModel, T: OperatorModel, r: int) -> float:
    """max over 0 <= k <= r of ||(S-T)* e_k||, i.e. over row differences."""
    _require_same_p(S, T)
    if r < 0:
        raise ModelError("row index must be nonnegative")
    worst = 0.0
    for k in range(r + 1):
        L = max(S.block_dim, T.block_dim, k + 1)
        diff = row_array(S, k, L) - row_array(T, k, L)
        worst = max(worst, vector_norm(diff, S.p))
    return worst


def gap_profile(S: OperatorModel, T: OperatorModel, topology: str, bound: int) -> GapProfile:
    if topology == "WOT":
        value = wot_gap(S, T, bound)
    elif topology == "SOT":
        value = sot_gap(S, T, bound)
    elif topology == "SOT_adj":
        value = adj_gap(S, T, bound)
    elif topology == "SOTSTAR":
        value = max(sot_gap(S, T, bound), adj_gap(S, T, bound))
    else:
        raise ModelError(f"unknown topology tag {topology!r}")
    return GapProfile(topology=topology, bound=bound, value=value)


def _shared_tail_structure(S: OperatorModel, T: OperatorModel) -> bool:
    if S.tail != T.tail:
        return False
    if isinstance(S.tail, GeometricTail) and S.block_dim != T.block_dim:
        # Same parameters but offset starts give different diagonal values.
        return False
    return True


def canonical_metric(
    S: OperatorModel,
    T: OperatorModel,
    cutoff: int,
    *,
    contraction_tol: float = CONTRACTION_TOL,
) -> MetricInterval:
    """Enclosure [lower, upper] of sum_n 2^{-n} ||(T-S)* e_n|| on l2.

    Both inputs must be contractions: the generic tail bound uses
    ||(T-S)* e_n|| <= ||T|| + ||S|| <= 2. When the two operators share the
    same tail structure, rows beyond both blocks cancel exactly and the
    remaining finitely many rows past the cutoff are summed exactly.
    """
    _require_same_p(S, T)
    if S.p != 2.0:
        raise ModelError("the adjoint-row metric is defined on l2")
    if cutoff < 0:
        raise ModelError("cutoff must be nonnegative")
    for name, X in (("first", S), ("second", T)):
        if operator_norm(X).value > 1.0 + contraction_tol:
            raise ModelError(f"the {name} operator is not a contraction")

    def row_gap(n: int) -> float:
        L = max(S.block_dim, T.block_dim, n + 1)
        return float(np.linalg.norm(row_array(S, n, L) - row_array(T, n, L)))

    lower = sum(2.0 ** (-n) * row_gap(n) for n in range(cutoff + 1))
    if _shared_tail_structure(S, T):
        last_block_row = max(S.block_dim, T.block_dim) - 1
        extra = sum(2.0 ** (-n) * row_gap(n) for n in range(cutoff + 1, last_block_row + 1))
        upper = lower + extra
    else:
        upper = lower + 2.0 ** (1 - cutoff)
    return MetricInterval(lower=float(lower), upper=float(upper), cutoff=cutoff)


def _summary(values, tol: float) -> TraceSummary:
    below = None
    for i, v in enumerate(values):
        if not math.isnan(v) and v < tol:
            below = i
            break
    quartile = [v for v in values[-max(1, len(values) // 4):] if not math.isnan(v)]
    floor = min(quartile) if quartile else float("nan")
    return TraceSummary(below_tol_at=below, floor=floor)


def converge_report(
    sequence,
    limit: OperatorModel,
    steps: int,
    m: int,
    r: int,
    *,
    tol: float = 1e-9,
    contraction_tol: float = CONTRACTION_TOL,
) -> ConvergenceReport:
    """Gap traces of an operator sequence against its limit.

    ``sequence`` is a callable n -> OperatorModel (a list works too). All
    elements and the limit must be contractions on the same lp space. The
    metric columns are computed at cutoff max(m, r) and are NaN when
    p != 2 (the metric is l2-only).
    """
    if steps < 1:
        raise ModelError("a convergence report needs at least one step")
    seq = sequence if callable(sequence) else sequence.__getitem__
    if operator_norm(limit).value > 1.0 + contraction_tol:
        raise ModelError("the limit operator is not a contraction")
    cutoff = max(m, r)
    wot, sot, adj, mlo, mhi = [], [], [], [], []
    indices = []
    for n in range(steps):
        Tn = seq(n)
        _require_same_p(Tn, limit)
        if operator_norm(Tn).value > 1.0 + contraction_tol:
            raise ModelError(f"sequence element {n} is not a contraction")
        indices.append(n)
        wot.append(wot_gap(Tn, limit, m))
        sot.append(sot_gap(Tn, limit, r))
        adj.append(adj_gap(Tn, limit, r))
        if limit.p == 2.0:
            interval = canonical_metric(Tn, limit, cutoff, contraction_tol=contraction_tol)
            mlo.append(interval.lower)
            mhi.append(interval.upper)
        else:
            mlo.append(float("nan"))
            mhi.append(float("nan"))
    summaries = {
        "wot": _summary(wot, tol),
        "sot": _summary(sot, tol),
        "adj": _summary(adj, tol),
        "metric": _summary(mhi, tol),
    }
    return ConvergenceReport(
        steps=tuple(indices),
        wot=tuple(wot),
        sot=tuple(sot),
        adj=tuple(adj),
        metric_lo=tuple(mlo),
        metric_hi=tuple(mhi),
        summaries=summaries,
        tol=tol,
    )
