"""Minimal dependency-free SVG line plots for batch output eyeballing."""

from __future__ import annotations

import math

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / n))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= n:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def write_svg(path, curves, title: str = "", xlabel: str = "", ylabel: str = "",
              width: int = 640, height: int = 480, equal_axes: bool = False) -> None:
    """Write polyline curves to an SVG file.

    ``curves`` is a list of (xs, ys, label, stroke_width) tuples.
    """
    margin = 56
    xs_all = [x for xs, _, _, _ in curves for x in xs]
    ys_all = [y for _, ys, _, _ in curves for y in ys]
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad_x = 0.05 * (x_hi - x_lo)
    pad_y = 0.05 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y
    if equal_axes:
        cx, cy = 0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi)
        half = 0.5 * max(x_hi - x_lo, y_hi - y_lo)
        x_lo, x_hi = cx - half, cx + half
        y_lo, y_hi = cy - half, cy + half

    plot_w = width - 2 * margin
    plot_h = height - 2 * margin

    def X(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * plot_w

    def Y(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        px = X(t)
        parts.append(f'<line x1="{px:.1f}" y1="{height - margin}" x2="{px:.1f}" '
                     f'y2="{height - margin + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px:.1f}" y="{height - margin + 18}" font-size="11" '
                     f'text-anchor="middle" font-family="sans-serif">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        py = Y(t)
        parts.append(f'<line x1="{margin - 5}" y1="{py:.1f}" x2="{margin}" '
                     f'y2="{py:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{margin - 8}" y="{py + 4:.1f}" font-size="11" '
                     f'text-anchor="end" font-family="sans-serif">{t:g}</text>')
    if title:
        parts.append(f'<text x="{width / 2}" y="{margin - 16}" font-size="14" '
                     f'text-anchor="middle" font-family="sans-serif">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{width / 2}" y="{height - 10}" font-size="12" '
                     f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="14" y="{height / 2}" font-size="12" text-anchor="middle" '
                     f'font-family="sans-serif" transform="rotate(-90 14 {height / 2})">{ylabel}</text>')

    legend_y = margin + 14
    for i, (xs, ys, label, stroke) in enumerate(curves):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="{stroke}"/>')
        if label:
            parts.append(f'<line x1="{width - margin - 120}" y1="{legend_y}" '
                         f'x2="{width - margin - 96}" y2="{legend_y}" '
                         f'stroke="{color}" stroke-width="{stroke}"/>')
            parts.append(f'<text x="{width - margin - 90}" y="{legend_y + 4}" font-size="11" '
                         f'font-family="sans-serif">{label}</text>')
            legend_y += 16
    parts.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
