"""Minimal self-contained SVG line plots (polylines plus axes), no
plotting dependency."""

from __future__ import annotations

import math

__all__ = ["line_plot"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float):
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo == hi:
        return [lo]
    return [lo, 0.5 * (lo + hi), hi]


def line_plot(xs, series: dict, *, title: str = "", width: int = 720, height: int = 420) -> str:
    """Render named y-series over common x-values as an SVG document."""
    xs = [float(x) for x in xs]
    clean = {}
    for name, ys in series.items():
        pts = [(x, float(y)) for x, y in zip(xs, ys) if math.isfinite(float(y))]
        clean[name] = pts
    all_y = [y for pts in clean.values() for _, y in pts]
    all_x = [x for pts in clean.values() for x, _ in pts] or [0.0, 1.0]
    if not all_y:
        all_y = [0.0, 1.0]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_lo == x_hi:
        x_hi = x_lo + 1.0
    if y_lo == y_hi:
        y_hi = y_lo + 1.0
    pad_l, pad_r, pad_t, pad_b = 64, 16, 34, 40
    iw, ih = width - pad_l - pad_r, height - pad_t - pad_b

    def px(x: float) -> float:
        return pad_l + (x - x_lo) / (x_hi - x_lo) * iw

    def py(y: float) -> float:
        return pad_t + ih - (y - y_lo) / (y_hi - y_lo) * ih

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
        f'<line x1="{pad_l}" y1="{pad_t + ih}" x2="{pad_l + iw}" y2="{pad_t + ih}" '
        f'stroke="black" stroke-width="1"/>',
        f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{pad_t + ih}" '
        f'stroke="black" stroke-width="1"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        parts.append(
            f'<text x="{px(t):.1f}" y="{pad_t + ih + 16}" text-anchor="middle" '
            f'font-family="monospace" font-size="11">{t:g}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        parts.append(
            f'<text x="{pad_l - 6}" y="{py(t) + 4:.1f}" text-anchor="end" '
            f'font-family="monospace" font-size="11">{t:.3g}</text>'
        )
    for i, (name, pts) in enumerate(clean.items()):
        color = _PALETTE[i % len(_PALETTE)]
        if pts:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"/>'
            )
        parts.append(
            f'<text x="{pad_l + iw - 4}" y="{pad_t + 14 + 14 * i}" text-anchor="end" '
            f'font-family="monospace" font-size="11" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
