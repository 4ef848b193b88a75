"""Minimal standalone SVG scatter plots with log-log fit overlays."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from radarlab.errors import DegenerateFitError, DomainError, InsufficientDataError
from radarlab.scaling import RegressionResult, loglog_fit

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
MARKERS = ["circle", "square", "triangle", "diamond", "cross", "star"]

WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 80, 30, 40, 60


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    fit: bool = True


@dataclass
class Axes:
    xlabel: str = "x"
    ylabel: str = "y"
    title: str = ""
    loglog: bool = True


def _marker(kind: str, cx: float, cy: float, color: str, r: float = 4.5) -> str:
    if kind == "circle":
        return f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r}" fill="{color}"/>'
    if kind == "square":
        return f'<rect x="{cx - r:.2f}" y="{cy - r:.2f}" width="{2 * r}" height="{2 * r}" fill="{color}"/>'
    if kind == "triangle":
        pts = f"{cx:.2f},{cy - r:.2f} {cx - r:.2f},{cy + r:.2f} {cx + r:.2f},{cy + r:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if kind == "diamond":
        pts = f"{cx:.2f},{cy - r:.2f} {cx + r:.2f},{cy:.2f} {cx:.2f},{cy + r:.2f} {cx - r:.2f},{cy:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if kind == "cross":
        return (
            f'<path d="M{cx - r:.2f},{cy - r:.2f}L{cx + r:.2f},{cy + r:.2f}'
            f'M{cx - r:.2f},{cy + r:.2f}L{cx + r:.2f},{cy - r:.2f}" stroke="{color}" stroke-width="2"/>'
        )
    pts = " ".join(
        f"{cx + (r if i % 2 == 0 else r / 2) * math.sin(i * math.pi / 5):.2f},"
        f"{cy - (r if i % 2 == 0 else r / 2) * math.cos(i * math.pi / 5):.2f}"
        for i in range(10)
    )
    return f'<polygon points="{pts}" fill="{color}"/>'


def _ticks(lo: float, hi: float, log: bool) -> List[float]:
    if log:
        return [float(k) for k in range(math.floor(lo), math.ceil(hi) + 1) if lo - 1e-9 <= k <= hi + 1e-9]
    return list(np.linspace(lo, hi, 5))


def _fmt_tick(v: float, log: bool) -> str:
    if log:
        return f"1e{int(v)}" if not 0 <= v <= 3 else f"{10 ** v:g}"
    return f"{v:.3g}"


def emit_plot(series: Sequence[Series], axes: Axes, path) -> dict:
    """Write an SVG scatter plot and return the fits drawn, keyed by label.

    On log-log axes each series with at least 3 points gets its least-squares
    line and slope annotation. A legend is drawn whenever there is more than
    one series.
    """
    if not series:
        raise DomainError("nothing to plot")
    tx = (lambda v: np.log10(v)) if axes.loglog else (lambda v: np.asarray(v, dtype=float))
    pts = []
    for s in series:
        x, y = np.asarray(s.x, dtype=float), np.asarray(s.y, dtype=float)
        if x.size == 0 or x.shape != y.shape:
            raise DomainError(f"series {s.label!r} is empty or ragged")
        if axes.loglog and (np.any(x <= 0) or np.any(y <= 0)):
            raise DomainError(f"series {s.label!r} has non-positive values on log axes")
        pts.append((tx(x), tx(y)))
    allx = np.concatenate([p[0] for p in pts])
    ally = np.concatenate([p[1] for p in pts])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 0.5, y1 + 0.5
    padx, pady = 0.05 * (x1 - x0), 0.08 * (y1 - y0)
    x0, x1, y0, y1 = x0 - padx, x1 + padx, y0 - pady, y1 + pady
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(v):
        return LEFT + (v - x0) / (x1 - x0) * pw

    def py(v):
        return TOP + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if axes.title:
        out.append(f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(axes.title)}</text>')
    for v in _ticks(x0, x1, axes.loglog):
        out.append(f'<line x1="{px(v):.2f}" y1="{TOP + ph}" x2="{px(v):.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(v):.2f}" y="{TOP + ph + 18}" text-anchor="middle">{_fmt_tick(v, axes.loglog)}</text>')
    for v in _ticks(y0, y1, axes.loglog):
        out.append(f'<line x1="{LEFT - 5}" y1="{py(v):.2f}" x2="{LEFT}" y2="{py(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{py(v) + 4:.2f}" text-anchor="end">{_fmt_tick(v, axes.loglog)}</text>')
    xl = escape(axes.xlabel + (" (log)" if axes.loglog else ""))
    yl = escape(axes.ylabel + (" (log)" if axes.loglog else ""))
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">{xl}</text>')
    out.append(
        f'<text x="18" y="{TOP + ph / 2}" text-anchor="middle" transform="rotate(-90 18 {TOP + ph / 2})">{yl}</text>'
    )

    fits: dict = {}
    for i, (s, (lx, ly)) in enumerate(zip(series, pts)):
        color, marker = COLORS[i % len(COLORS)], MARKERS[i % len(MARKERS)]
        out.append(f'<g class="series" data-label="{escape(s.label)}">')
        for a, b in zip(lx, ly):
            out.append(_marker(marker, px(a), py(b), color))
        fit: Optional[RegressionResult] = None
        if axes.loglog and s.fit and lx.size >= 3:
            try:
                fit = loglog_fit(s.x, s.y)
            except (InsufficientDataError, DegenerateFitError, DomainError):
                fit = None
        if fit is not None:
            # fitted in natural logs; the plot is in log10, and the slope is unchanged
            a, b = float(lx.min()), float(lx.max())
            ya = (fit.intercept + fit.slope * a * math.log(10)) / math.log(10)
            yb = (fit.intercept + fit.slope * b * math.log(10)) / math.log(10)
            out.append(
                f'<line class="fit" x1="{px(a):.2f}" y1="{py(ya):.2f}" x2="{px(b):.2f}" y2="{py(yb):.2f}" '
                f'stroke="{color}" stroke-dasharray="5,3"/>'
            )
            out.append(
                f'<text class="slope" x="{px(b) - 4:.2f}" y="{py(yb) - 8:.2f}" text-anchor="end" fill="{color}">'
                f"slope = {fit.slope:.4f}</text>"
            )
            fits[s.label] = fit
        out.append("</g>")

    if len(series) > 1:
        ly0 = TOP + 10
        out.append('<g class="legend">')
        for i, s in enumerate(series):
            color, marker = COLORS[i % len(COLORS)], MARKERS[i % len(MARKERS)]
            y = ly0 + 18 * i
            out.append(_marker(marker, LEFT + 16, y, color))
            out.append(f'<text x="{LEFT + 28}" y="{y + 4}">{escape(s.label)}</text>')
        out.append("</g>")
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
    return fits
