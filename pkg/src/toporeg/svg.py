"""Minimal deterministic SVG plots: embedding scatter, persistence diagram,
loss traces. Coordinates are written with fixed precision so identical
inputs give identical files."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from . import __version__

WIDTH, HEIGHT, MARGIN = 480, 480, 40
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _num(v: float) -> str:
    return f"{v:.2f}"


def _header(title: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<!-- toporeg {__version__} -->",
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="{MARGIN // 2 + 5}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{_escape(title)}</text>',
    ]


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Frame:
    """Maps data coordinates into the plotting square."""

    def __init__(self, xs, ys, equal: bool = False):
        xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
        self.x0, self.x1 = _span(xs)
        self.y0, self.y1 = _span(ys)
        if equal:
            half = max(self.x1 - self.x0, self.y1 - self.y0) / 2
            cx, cy = (self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2
            self.x0, self.x1, self.y0, self.y1 = cx - half, cx + half, cy - half, cy + half

    def x(self, v):
        return MARGIN + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def y(self, v):
        return HEIGHT - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)


def _span(v):
    v = v[np.isfinite(v)]
    if len(v) == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _axes(frame: _Frame) -> list:
    left, right = MARGIN, WIDTH - MARGIN
    top, bottom = MARGIN, HEIGHT - MARGIN
    return [
        f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
        'fill="none" stroke="#888"/>',
        f'<text x="{left}" y="{bottom + 15}" font-family="sans-serif" font-size="10">'
        f"{frame.x0:.3g}</text>",
        f'<text x="{right}" y="{bottom + 15}" text-anchor="end" font-family="sans-serif" '
        f'font-size="10">{frame.x1:.3g}</text>',
        f'<text x="{left - 4}" y="{bottom}" text-anchor="end" font-family="sans-serif" '
        f'font-size="10">{frame.y0:.3g}</text>',
        f'<text x="{left - 4}" y="{top + 8}" text-anchor="end" font-family="sans-serif" '
        f'font-size="10">{frame.y1:.3g}</text>',
    ]


def scatter_svg(points, labels: Optional[Sequence] = None, title: str = "embedding") -> str:
    pts = np.asarray(points, dtype=float)
    labels = ["0"] * len(pts) if labels is None else [str(l) for l in labels]
    colour = {l: PALETTE[k % len(PALETTE)] for k, l in enumerate(sorted(set(labels)))}
    frame = _Frame(pts[:, 0], pts[:, 1], equal=True)
    out = _header(title) + _axes(frame)
    for (x, y), l in zip(pts, labels):
        out.append(f'<circle cx="{_num(frame.x(x))}" cy="{_num(frame.y(y))}" r="3" '
                   f'fill="{colour[l]}"/>')
    return "\n".join(out + ["</svg>"]) + "\n"


def diagram_svg(diagrams, title: str = "persistence diagram") -> str:
    """Birth/death scatter per dimension; essential classes are drawn on a
    dashed line above the finite range."""
    pairs = [(d.dimension, p.birth, p.death) for d in diagrams for p in d]
    finite = [v for _, b, d in pairs for v in (b, d) if math.isfinite(v)] or [0.0, 1.0]
    lo, hi = min(finite), max(finite)
    top = hi + 0.1 * (hi - lo if hi > lo else 1.0)
    frame = _Frame(np.array([lo, top]), np.array([lo, top]))
    out = _header(title) + _axes(frame)
    out.append(f'<line x1="{_num(frame.x(lo))}" y1="{_num(frame.y(lo))}" x2="{_num(frame.x(top))}" '
               f'y2="{_num(frame.y(top))}" stroke="#bbb"/>')
    out.append(f'<line x1="{_num(frame.x(lo))}" y1="{_num(frame.y(top))}" x2="{_num(frame.x(top))}" '
               f'y2="{_num(frame.y(top))}" stroke="#bbb" stroke-dasharray="4 3"/>')
    for dim, b, d in pairs:
        y = top if math.isinf(d) else d
        out.append(f'<circle cx="{_num(frame.x(b))}" cy="{_num(frame.y(y))}" r="3" '
                   f'fill="{PALETTE[dim % len(PALETTE)]}"><title>H{dim}</title></circle>')
    return "\n".join(out + ["</svg>"]) + "\n"


def trace_svg(trace, title: str = "loss trace") -> str:
    epochs = np.asarray(trace.epoch, dtype=float)
    series = (("emb_loss", trace.emb_loss), ("topo_loss", trace.topo_loss),
              ("total_loss", trace.total_loss))
    values = np.concatenate([np.asarray(v, dtype=float) for _, v in series])
    frame = _Frame(epochs, values)
    out = _header(title) + _axes(frame)
    for k, (name, vals) in enumerate(series):
        path = " ".join(f"{_num(frame.x(e))},{_num(frame.y(v))}" for e, v in zip(epochs, vals))
        out.append(f'<polyline points="{path}" fill="none" stroke="{PALETTE[k]}" '
                   f'stroke-width="1.5"><title>{name}</title></polyline>')
        out.append(f'<text x="{WIDTH - MARGIN - 4}" y="{MARGIN + 14 + 14 * k}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11" fill="{PALETTE[k]}">{name}</text>')
    return "\n".join(out + ["</svg>"]) + "\n"
