"""Self-contained SVG line plots (no renderer dependency).

Axes schema is fixed: x = alpha or n, y = value, and each series is tagged
``simulation`` (markers with 1-SE bars), ``theory`` (solid line) or
``bounds`` (dashed line).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=64, right=150, top=36, bottom=48)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
SERIES_KINDS = ("simulation", "theory", "bounds")


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    kind: str = "simulation"
    err: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in SERIES_KINDS:
            raise ValueError(f"series kind must be one of {SERIES_KINDS}")
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.err is not None:
            self.err = np.asarray(self.err, dtype=float)


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _fmt(v):
    return f"{v:.4g}"


def render_svg(series, title: str = "", xlabel: str = "alpha", ylabel: str = "value") -> str:
    series = [s for s in series if len(s.x)]
    xs = np.concatenate([s.x for s in series]) if series else np.array([0.0, 1.0])
    ys = [s.y for s in series] + [s.y - s.err for s in series if s.err is not None]
    ys += [s.y + s.err for s in series if s.err is not None]
    yv = np.concatenate(ys) if series else np.array([0.0, 1.0])
    yv = yv[np.isfinite(yv)]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(yv.min()), float(yv.max())
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    L, R, T, B = MARGIN["left"], WIDTH - MARGIN["right"], MARGIN["top"], HEIGHT - MARGIN["bottom"]

    def px(x):
        return L + (x - x0) / (x1 - x0) * (R - L)

    def py(y):
        return B - (y - y0) / (y1 - y0) * (B - T)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{(L + R) / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{L}" y="{T}" width="{R - L}" height="{B - T}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        if x0 <= t <= x1:
            out.append(f'<line x1="{px(t):.1f}" y1="{B}" x2="{px(t):.1f}" y2="{B + 4}" stroke="black"/>')
            out.append(f'<text x="{px(t):.1f}" y="{B + 16}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _nice_ticks(y0, y1):
        if y0 <= t <= y1:
            out.append(f'<line x1="{L - 4}" y1="{py(t):.1f}" x2="{L}" y2="{py(t):.1f}" stroke="black"/>')
            out.append(f'<text x="{L - 6}" y="{py(t) + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{(L + R) / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{(T + B) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(T + B) / 2:.1f})">{escape(ylabel)}</text>'
    )
    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        order = np.argsort(s.x)
        pts = [(px(a), py(b)) for a, b in zip(s.x[order], s.y[order]) if np.isfinite(b)]
        cls = f'class="{s.kind}"'
        if s.kind == "simulation":
            for j in order:
                cx, cy = px(s.x[j]), py(s.y[j])
                if s.err is not None and np.isfinite(s.err[j]):
                    e0, e1 = py(s.y[j] - s.err[j]), py(s.y[j] + s.err[j])
                    out.append(f'<line {cls} x1="{cx:.1f}" y1="{e0:.1f}" x2="{cx:.1f}" y2="{e1:.1f}" stroke="{color}"/>')
                out.append(f'<circle {cls} cx="{cx:.1f}" cy="{cy:.1f}" r="3" fill="{color}"/>')
        else:
            dash = ' stroke-dasharray="6 4"' if s.kind == "bounds" else ""
            d = " ".join(f"{a:.1f},{b:.1f}" for a, b in pts)
            out.append(f'<polyline {cls} points="{d}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        ly = T + 14 + 18 * k
        out.append(f'<line x1="{R + 10}" y1="{ly - 4}" x2="{R + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{R + 34}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def series_from_rows(rows, label: str = "", x: str = "x_axis") -> list:
    """Simulation, theory and bound series from CSV-style dict rows."""
    def col(name):
        return np.array([float(r[name]) if r.get(name) not in (None, "", "None") else np.nan for r in rows])

    xs = col(x)
    out = [Series(f"{label} simulation".strip(), xs, col("estimate"), "simulation", col("se"))]
    if any(r.get("theory") not in (None, "", "None") for r in rows):
        out.append(Series(f"{label} theory".strip(), xs, col("theory"), "theory"))
    keys = sorted({k for r in rows for k in r if k.startswith("bound_") or k == "asymptotic"})
    for k in keys:
        y = col(k)
        if np.isfinite(y).any():
            out.append(Series(f"{label} {k}".strip(), xs, y, "bounds"))
    return out
