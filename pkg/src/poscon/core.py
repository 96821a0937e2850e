"""Vectors and positive operators on lp truncations with structured tails.

Every operator handled by this package has the shape ``block ⊕ tail``: a
finite square block acting on the leading coordinates e_0..e_{M-1} and a
structured diagonal tail (zero, identity, or a geometric diagonal climbing
to 1) acting on the remaining coordinates. There are never cross terms
between head and tail; constructions that need one enlarge the block until
the cross entry fits inside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelError",
    "CoordVector",
    "ZeroTail",
    "IdentityTail",
    "GeometricTail",
    "OperatorModel",
    "SupportSet",
    "basis",
    "modulus",
    "apply",
    "adjoint",
    "project_head",
    "corner",
    "support",
    "is_positive",
    "column_array",
    "row_array",
    "pairing",
]


class ModelError(ValueError):
    """Raised for structurally invalid vectors, tails, or operator data."""


def _finite_array(values, name: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelError(f"{name} is not a rectangular array of reals: {exc}") from exc
    if arr.size and not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} must contain only finite real numbers")
    return arr


class CoordVector:
    """Finitely supported coordinates against the canonical basis.

    Entries beyond the stored prefix are implicitly zero, so logical
    equality ignores trailing explicit zeros.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries) -> None:
        arr = _finite_array(entries, "entries")
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim != 1:
            raise ModelError("a coordinate vector needs a flat list of entries")
        if arr.size == 0:
            arr = np.zeros(1)
        arr = arr.copy()
        arr.flags.writeable = False
        self._entries = arr

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    def __len__(self) -> int:
        return int(self._entries.size)

    def entry(self, k: int) -> float:
        if k < 0:
            raise ModelError("coordinate indices start at 0")
        return float(self._entries[k]) if k < self._entries.size else 0.0

    def padded(self, length: int) -> np.ndarray:
        """Writable copy of the first ``length`` coordinates."""
        out = np.zeros(max(length, 0))
        n = min(self._entries.size, length)
        out[:n] = self._entries[:n]
        return out

    def trimmed(self) -> np.ndarray:
        nz = np.nonzero(self._entries)[0]
        if nz.size == 0:
            return self._entries[:0]
        return self._entries[: nz[-1] + 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoordVector):
            return NotImplemented
        a, b = self.trimmed(), other.trimmed()
        return a.size == b.size and bool(np.all(a == b))

    def __hash__(self) -> int:
        return hash(tuple(self.trimmed().tolist()))

    def __repr__(self) -> str:
        return f"CoordVector({self._entries.tolist()!r})"


def basis(k: int, length: int | None = None) -> CoordVector:
    """Canonical basis vector e_k."""
    if k < 0:
        raise ModelError("basis index must be nonnegative")
    n = k + 1 if length is None else max(int(length), k + 1)
    out = np.zeros(n)
    out[k] = 1.0
    return CoordVector(out)


@dataclass(frozen=True)
class ZeroTail:
    """Tail annihilating every coordinate beyond the block."""

    kind = "zero"

    def entry(self, k: int) -> float:
        return 0.0

    def diag(self, count: int) -> np.ndarray:
        return np.zeros(max(count, 0))

    def sup(self) -> float:
        return 0.0


@dataclass(frozen=True)
class IdentityTail:
    """Tail acting as the identity beyond the block."""

    kind = "identity"

    def entry(self, k: int) -> float:
        return 1.0

    def diag(self, count: int) -> np.ndarray:
        return np.ones(max(count, 0))

    def sup(self) -> float:
        return 1.0


@dataclass(frozen=True)
class GeometricTail:
    """Diagonal tail 1 - c * r**k: entries strictly increase to the sup 1,
    which is never attained."""

    c: float
    r: float

    kind = "geometric_diagonal"

    def __post_init__(self) -> None:
        if not (np.isfinite(self.c) and 0.0 < self.c <= 1.0):
            raise ModelError(f"geometric tail needs c in (0, 1], got {self.c!r}")
        if not (np.isfinite(self.r) and 0.0 < self.r < 1.0):
            raise ModelError(f"geometric tail needs r in (0, 1), got {self.r!r}")

    def entry(self, k: int) -> float:
        return 1.0 - self.c * self.r**k

    def diag(self, count: int) -> np.ndarray:
        return 1.0 - self.c * self.r ** np.arange(max(count, 0), dtype=float)

    def sup(self) -> float:
        return 1.0


TailModel = ZeroTail | IdentityTail | GeometricTail


class OperatorModel:
    """Operator ``block ⊕ tail`` on lp.

    The block is a finite square matrix over the leading coordinates; the
    tail acts diagonally on the complement. Positive operators carry
    entrywise nonnegative blocks (checked by :func:`is_positive`; the block
    itself may store signed data so that the sign test is meaningful).
    Instances are immutable.
    """

    __slots__ = ("_p", "_block", "_tail")

    def __init__(self, p: float, block, tail: TailModel | None = None) -> None:
        pv = float(p)
        if not (np.isfinite(pv) and pv > 1.0):
            raise ModelError(f"exponent must lie in (1, inf), got {p!r}")
        arr = _finite_array(block, "block")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ModelError("block must be a nonempty square matrix")
        arr = arr.copy()
        arr.flags.writeable = False
        t: TailModel = ZeroTail() if tail is None else tail
        if not isinstance(t, (ZeroTail, IdentityTail, GeometricTail)):
            raise ModelError(f"unknown tail model: {tail!r}")
        self._p = pv
        self._block = arr
        self._tail = t

    @property
    def p(self) -> float:
        return self._p

    @property
    def block(self) -> np.ndarray:
        return self._block

    @property
    def tail(self) -> TailModel:
        return self._tail

    @property
    def block_dim(self) -> int:
        return int(self._block.shape[0])

    def entry(self, i: int, j: int) -> float:
        """Matrix entry <e_i, T e_j> including the structured tail."""
        if i < 0 or j < 0:
            raise ModelError("matrix indices start at 0")
        d = self.block_dim
        if i < d and j < d:
            return float(self._block[i, j])
        if i == j:
            return self._tail.entry(i - d)
        return 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorModel):
            return NotImplemented
        return (
            self._p == other._p
            and self._block.shape == other._block.shape
            and bool(np.all(self._block == other._block))
            and self._tail == other._tail
        )

    def __hash__(self) -> int:
        return hash((self._p, self._block.shape, self._tail))

    def __repr__(self) -> str:
        return (
            f"OperatorModel(p={self._p!r}, block_dim={self.block_dim}, "
            f"tail={self._tail!r})"
        )


@dataclass(frozen=True)
class SupportSet:
    """Index set of nonzero coordinates: either finite or a cofinite tail
    {j : j >= cofinite_from}. Exactly one of the two shapes."""

    indices: frozenset = frozenset()
    cofinite_from: int | None = None

    def __post_init__(self) -> None:
        if self.cofinite_from is not None:
            if self.indices:
                raise ModelError("a support set is finite or cofinite, not both")
            if self.cofinite_from < 0:
                raise ModelError("cofinite supports start at a nonnegative index")

    def is_finite(self) -> bool:
        return self.cofinite_from is None

    def __contains__(self, j: int) -> bool:
        if self.cofinite_from is not None:
            return j >= self.cofinite_from
        return j in self.indices

    def covered_upto(self, r: int) -> set:
        """Indices of {0, ..., r} belonging to this support."""
        if self.cofinite_from is not None:
            return set(range(self.cofinite_from, r + 1))
        return {j for j in self.indices if j <= r}


def modulus(x: CoordVector) -> CoordVector:
    """Entrywise absolute value |x|."""
    return CoordVector(np.abs(x.entries))


def apply(T: OperatorModel, x: CoordVector) -> CoordVector:
    """T x, exact on the finite model: block on the head, tail diagonal on
    the rest. The result is finitely supported whenever x is."""
    d = T.block_dim
    n = max(d, len(x))
    xs = x.padded(n)
    out = np.zeros(n)
    out[:d] = T.block @ xs[:d]
    if n > d:
        out[d:] = T.tail.diag(n - d) * xs[d:]
    return CoordVector(out)


def adjoint(T: OperatorModel) -> OperatorModel:
    """Transpose of the block; every structured tail is self-adjoint."""
    return OperatorModel(T.p, T.block.T, T.tail)


def corner(T: OperatorModel, N: int) -> np.ndarray:
    """(N+1)x(N+1) matrix of <e_i, T e_j>, reading tail diagonal entries
    where the corner extends past the block."""
    if N < 0:
        raise ModelError("corner index must be nonnegative")
    d = T.block_dim
    n = N + 1
    out = np.zeros((n, n))
    m = min(d, n)
    out[:m, :m] = T.block[:m, :m]
    if n > d:
        idx = np.arange(d, n)
        out[idx, idx] = T.tail.diag(n - d)
    return out


def project_head(T: OperatorModel, N: int) -> OperatorModel:
    """The compression P_N T P_N as a zero-tail model on E_N."""
    return OperatorModel(T.p, corner(T, N), ZeroTail())


def support(x: CoordVector) -> SupportSet:
    """Exact (no tolerance) set of indices with a nonzero stored entry."""
    nz = np.nonzero(x.entries)[0]
    return SupportSet(indices=frozenset(int(i) for i in nz))


def is_positive(T: OperatorModel) -> bool:
    """Strict entrywise sign test on the block; tails are nonnegative by
    construction."""
    return bool(np.all(T.block >= 0.0))


def column_array(T: OperatorModel, j: int, length: int | None = None) -> np.ndarray:
    """First ``length`` coordinates of T e_j (default covers the support)."""
    if j < 0:
        raise ModelError("column index must be nonnegative")
    d = T.block_dim
    L = max(d, j + 1) if length is None else int(length)
    out = np.zeros(L)
    if j < d:
        m = min(d, L)
        out[:m] = T.block[:m, j]
    elif j < L:
        out[j] = T.tail.entry(j - d)
    return out


def row_array(T: OperatorModel, i: int, length: int | None = None) -> np.ndarray:
    """First ``length`` coordinates of the i-th row, i.e. of T* e_i."""
    if i < 0:
        raise ModelError("row index must be nonnegative")
    d = T.block_dim
    L = max(d, i + 1) if length is None else int(length)
    out = np.zeros(L)
    if i < d:
        m = min(d, L)
        out[:m] = T.block[i, :m]
    elif i < L:
        out[i] = T.tail.entry(i - d)
    return out


def pairing(x: CoordVector, y: CoordVector) -> float:
    """Duality pairing sum(x_n * y_n) of finitely supported vectors."""
    n = max(len(x), len(y))
    return float(np.dot(x.padded(n), y.padded(n)))
