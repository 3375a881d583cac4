"""Minimal dependency-free SVG line plots with quantile bands."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"]
WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 120, 40, 50


def _fmt(v):
    return f"{v:.2f}"


def line_plot_svg(series, title, xlabel, ylabel, logy=False):
    """Render ``{name: (xs, ys, lows, highs)}`` as an SVG document string.

    With ``logy`` non-positive values are clipped to the smallest positive
    value present.
    """
    def ty(v):
        return math.log10(v) if logy else v

    xs_all, ys_all = [], []
    floor = None
    if logy:
        pos = [v for xs, ys, lo, hi in series.values() for v in (*ys, *lo, *hi) if v > 0]
        floor = min(pos) if pos else 1e-300
    cleaned = {}
    for name, (xs, ys, lo, hi) in series.items():
        if logy:
            ys = [max(v, floor) for v in ys]
            lo = [max(v, floor) for v in lo]
            hi = [max(v, floor) for v in hi]
        cleaned[name] = (list(xs), [ty(v) for v in ys], [ty(v) for v in lo], [ty(v) for v in hi])
        xs_all.extend(xs)
        ys_all.extend(cleaned[name][2] + cleaned[name][3] + cleaned[name][1])
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{TOP + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.0f})">{escape(ylabel)}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        yv = y0 + frac * (y1 - y0)
        label = f"1e{yv:.1f}" if logy else f"{yv:.3g}"
        out.append(f'<text x="{LEFT - 6}" y="{_fmt(py(yv) + 4)}" text-anchor="end">{label}</text>')
        xv = x0 + frac * (x1 - x0)
        out.append(f'<text x="{_fmt(px(xv))}" y="{TOP + ph + 16}" text-anchor="middle">{xv:.3g}</text>')
    if y0 < 0 < y1 and not logy:
        out.append(
            f'<line x1="{LEFT}" x2="{LEFT + pw}" y1="{_fmt(py(0))}" y2="{_fmt(py(0))}" '
            f'stroke="#888" stroke-dasharray="4 3"/>'
        )
    for i, (name, (xs, ys, lo, hi)) in enumerate(cleaned.items()):
        color = PALETTE[i % len(PALETTE)]
        band = [f"{_fmt(px(x))},{_fmt(py(v))}" for x, v in zip(xs, hi)]
        band += [f"{_fmt(px(x))},{_fmt(py(v))}" for x, v in zip(reversed(xs), reversed(lo))]
        if band:
            out.append(f'<polygon points="{" ".join(band)}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
        line = " ".join(f"{_fmt(px(x))},{_fmt(py(v))}" for x, v in zip(xs, ys))
        out.append(f'<polyline points="{line}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = TOP + 14 + 18 * i
        out.append(
            f'<line x1="{WIDTH - RIGHT + 10}" x2="{WIDTH - RIGHT + 30}" y1="{ly}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(f'<text x="{WIDTH - RIGHT + 35}" y="{ly + 4}">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
