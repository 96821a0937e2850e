"""Independent oracles used by the tests.

These deliberately avoid the package's own computational paths: the norm
oracle is a zoom-refined brute-force grid over the nonnegative part of the
lp sphere, and the irreducibility oracle accumulates boolean powers of the
support matrix.
"""

from __future__ import annotations

import numpy as np


def _eval_sphere_2(block: np.ndarray, p: float, ts: np.ndarray) -> np.ndarray:
    # nonnegative lp sphere in 2d: x = (t^(1/p), (1-t)^(1/p))
    x = np.stack([ts ** (1.0 / p), (1.0 - ts) ** (1.0 / p)])
    y = np.abs(block @ x)
    return np.sum(y**p, axis=0) ** (1.0 / p)


def _eval_sphere_3(block: np.ndarray, p: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    c = np.clip(1.0 - a - b, 0.0, 1.0)
    x = np.stack([a ** (1.0 / p), b ** (1.0 / p), c ** (1.0 / p)])
    y = np.abs(block @ x)
    return np.sum(y**p, axis=0) ** (1.0 / p)


def sphere_grid_norm(block, p: float, *, coarse: int = 81, rounds: int = 12) -> float:
    """Brute-force lp->lp norm of a nonnegative 2x2 or 3x3 block.

    For a nonnegative block the maximum of ||Bx||_p over the unit sphere is
    attained on the nonnegative part, parametrized by the simplex of p-th
    powers. A coarse grid locates the basins; repeated zooming around the
    best few candidates refines the value far below 1e-6.
    """
    B = np.asarray(block, dtype=float)
    n = B.shape[0]
    if n == 2:
        ts = np.linspace(0.0, 1.0, 2001)
        vals = _eval_sphere_2(B, p, ts)
        order = np.argsort(vals)[-3:]
        best = float(vals.max())
        for t0 in ts[order]:
            width = 1.0 / 2000
            center = float(t0)
            for _ in range(rounds):
                lo = max(0.0, center - width)
                hi = min(1.0, center + width)
                grid = np.linspace(lo, hi, 201)
                v = _eval_sphere_2(B, p, grid)
                i = int(np.argmax(v))
                best = max(best, float(v[i]))
                center = float(grid[i])
                width *= 0.2
        return best
    if n == 3:
        lin = np.linspace(0.0, 1.0, coarse)
        A, Bb = np.meshgrid(lin, lin, indexing="ij")
        mask = A + Bb <= 1.0 + 1e-12
        a0, b0 = A[mask], np.clip(Bb[mask], 0.0, None)
        vals = _eval_sphere_3(B, p, a0, np.clip(b0, 0.0, 1.0 - a0))
        order = np.argsort(vals)[-4:]
        best = float(vals.max())
        for idx in order:
            ca, cb = float(a0[idx]), float(b0[idx])
            width = 1.0 / (coarse - 1)
            for _ in range(rounds):
                la = np.linspace(max(0.0, ca - width), min(1.0, ca + width), 41)
                lb = np.linspace(max(0.0, cb - width), min(1.0, cb + width), 41)
                Ag, Bg = np.meshgrid(la, lb, indexing="ij")
                keep = Ag + Bg <= 1.0
                if not np.any(keep):
                    break
                av, bv = Ag[keep], Bg[keep]
                v = _eval_sphere_3(B, p, av, bv)
                i = int(np.argmax(v))
                best = max(best, float(v[i]))
                ca, cb = float(av[i]), float(bv[i])
                width *= 0.2
        return best
    raise ValueError("the grid oracle supports 2x2 and 3x3 blocks only")


def bool_power_irreducible(block) -> bool:
    """Support-digraph irreducibility via boolean powers: the union of
    A^1..A^n over the boolean semiring must have every off-diagonal entry
    positive (paths of each length counted exactly, no floating point)."""
    A = np.asarray(block) > 0
    n = A.shape[0]
    if n == 1:
        return True
    reach = np.zeros((n, n), dtype=bool)
    power = np.eye(n, dtype=bool)
    for _ in range(n):
        power = (power.astype(np.int64) @ A.astype(np.int64)) > 0
        reach |= power
    off = ~np.eye(n, dtype=bool)
    return bool(reach[off].all())
