"""Minimal native SVG line charts for the reproduction figures."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class Series:
    x: Sequence[float]
    y: Sequence[float]
    label: Optional[str] = None
    color: str = PALETTE[0]
    width: float = 1.5
    opacity: float = 1.0
    dashed: bool = False


@dataclass
class Panel:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    series: list[Series] = field(default_factory=list)
    # (x, lower, upper) shaded band
    bands: list[tuple[Sequence[float], Sequence[float], Sequence[float]]] = field(default_factory=list)
    hlines: list[float] = field(default_factory=list)
    vlines: list[float] = field(default_factory=list)
    xlim: Optional[tuple[float, float]] = None
    ylim: Optional[tuple[float, float]] = None


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-9 * span:
        out.append(round(v, 10))
        v += step
    return out


def _limits(panel: Panel) -> tuple[float, float, float, float]:
    xs = [float(v) for s in panel.series for v in s.x] + [float(v) for b in panel.bands for v in b[0]]
    ys = [float(v) for s in panel.series for v in s.y if math.isfinite(float(v))]
    ys += [float(v) for b in panel.bands for v in list(b[1]) + list(b[2])]
    ys += panel.hlines
    xs += panel.vlines
    x0, x1 = panel.xlim or (min(xs), max(xs))
    y0, y1 = panel.ylim or (min(ys), max(ys))
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    if panel.ylim is None:
        pad = 0.05 * (y1 - y0)
        y0, y1 = y0 - pad, y1 + pad
    return x0, x1, y0, y1


def render(panels: Sequence[Panel], width: int = 420, height: int = 320) -> str:
    """Lay ``panels`` out side by side and return the SVG document."""
    margin_l, margin_r, margin_t, margin_b = 60, 15, 30, 45
    total_w = width * len(panels)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{height}" '
        f'viewBox="0 0 {total_w} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{total_w}" height="{height}" fill="white"/>',
    ]
    for idx, panel in enumerate(panels):
        ox = idx * width
        pw = width - margin_l - margin_r
        ph = height - margin_t - margin_b
        x0, x1, y0, y1 = _limits(panel)
        xspan = (x1 - x0) or 1.0
        yspan = (y1 - y0) or 1.0

        def sx(v: float) -> float:
            return ox + margin_l + (float(v) - x0) / xspan * pw

        def sy(v: float) -> float:
            return margin_t + (1 - (float(v) - y0) / yspan) * ph

        clip = f"clip{idx}"
        parts.append(
            f'<clipPath id="{clip}"><rect x="{_fmt(ox + margin_l)}" y="{margin_t}" '
            f'width="{pw}" height="{ph}"/></clipPath>'
        )
        parts.append(
            f'<rect x="{_fmt(ox + margin_l)}" y="{margin_t}" width="{pw}" height="{ph}" '
            'fill="none" stroke="#333"/>'
        )
        for t in _ticks(x0, x1):
            parts.append(f'<line x1="{_fmt(sx(t))}" y1="{margin_t + ph}" x2="{_fmt(sx(t))}" '
                         f'y2="{margin_t + ph + 4}" stroke="#333"/>')
            parts.append(f'<text x="{_fmt(sx(t))}" y="{margin_t + ph + 16}" '
                         f'text-anchor="middle">{t:g}</text>')
        for t in _ticks(y0, y1):
            parts.append(f'<line x1="{_fmt(ox + margin_l - 4)}" y1="{_fmt(sy(t))}" '
                         f'x2="{_fmt(ox + margin_l)}" y2="{_fmt(sy(t))}" stroke="#333"/>')
            parts.append(f'<text x="{_fmt(ox + margin_l - 6)}" y="{_fmt(sy(t) + 4)}" '
                         f'text-anchor="end">{t:g}</text>')
        group = [f'<g clip-path="url(#{clip})">']
        for bx, lo, hi in panel.bands:
            pts = [(sx(a), sy(b)) for a, b in zip(bx, hi)] + [
                (sx(a), sy(b)) for a, b in reversed(list(zip(bx, lo)))
            ]
            group.append('<polygon fill="#1f77b4" fill-opacity="0.2" stroke="none" points="'
                         + " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts) + '"/>')
        for s in panel.series:
            pts = [(sx(a), sy(b)) for a, b in zip(s.x, s.y) if math.isfinite(float(b))]
            dash = ' stroke-dasharray="6,4"' if s.dashed else ""
            group.append(
                f'<polyline fill="none" stroke="{s.color}" stroke-width="{s.width}" '
                f'stroke-opacity="{s.opacity}"{dash} points="'
                + " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts) + '"/>'
            )
        for h in panel.hlines:
            group.append(f'<line x1="{_fmt(ox + margin_l)}" y1="{_fmt(sy(h))}" x2="{_fmt(ox + margin_l + pw)}" '
                         f'y2="{_fmt(sy(h))}" stroke="black" stroke-dasharray="6,4"/>')
        for v in panel.vlines:
            group.append(f'<line x1="{_fmt(sx(v))}" y1="{margin_t}" x2="{_fmt(sx(v))}" '
                         f'y2="{margin_t + ph}" stroke="black" stroke-dasharray="6,4"/>')
        group.append("</g>")
        parts.extend(group)
        parts.append(f'<text x="{_fmt(ox + margin_l + pw / 2)}" y="18" text-anchor="middle" '
                     f'font-size="13">{escape(panel.title)}</text>')
        parts.append(f'<text x="{_fmt(ox + margin_l + pw / 2)}" y="{height - 8}" '
                     f'text-anchor="middle">{escape(panel.xlabel)}</text>')
        cy = margin_t + ph / 2
        parts.append(f'<text x="{_fmt(ox + 14)}" y="{_fmt(cy)}" text-anchor="middle" '
                     f'transform="rotate(-90 {_fmt(ox + 14)} {_fmt(cy)})">{escape(panel.ylabel)}</text>')
        labelled = [s for s in panel.series if s.label]
        for i, s in enumerate(labelled):
            ly = margin_t + 14 + 14 * i
            lx = ox + margin_l + pw - 90
            parts.append(f'<line x1="{_fmt(lx)}" y1="{ly - 4}" x2="{_fmt(lx + 18)}" y2="{ly - 4}" '
                         f'stroke="{s.color}" stroke-width="2"/>')
            parts.append(f'<text x="{_fmt(lx + 22)}" y="{ly}">{escape(s.label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
