"""Minimal self-contained SVG 1.1 line charts.

Deliberately dependency-free so figure emission works anywhere the
package imports.  Output is static markup: fixed canvas, linear axes
with rounded tick steps, optional per-series dash patterns and point
markers, and a legend block.  Not a general plotting surface; just
enough to render probability curves and peak-location series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

PALETTE = ("#1f4e8c", "#c0392b", "#1e8449", "#8e44ad", "#b7950b", "#16a085")
DASHES = {"solid": None, "dashed": "8,5", "dotted": "2,4"}
MARKERS = ("none", "circle", "square", "diamond", "triangle")


@dataclass
class LineSeries:
    """One plotted curve: coordinates plus drawing hints."""

    x: list = field(default_factory=list)
    y: list = field(default_factory=list)
    label: str = ""
    style: str = "solid"
    marker: str = "none"
    color: str = ""

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError(f"x and y lengths differ: {len(self.x)} vs {len(self.y)}")
        if self.style not in DASHES:
            raise ValueError(f"unknown line style {self.style!r}")
        if self.marker not in MARKERS:
            raise ValueError(f"unknown marker {self.marker!r}")


def _nice_step(span: float, target_ticks: int = 5) -> float:
    if span <= 0.0 or not math.isfinite(span):
        return 1.0
    rough = span / target_ticks
    power = 10.0 ** math.floor(math.log10(rough))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if mult * power >= rough:
            return mult * power
    return 10.0 * power


def _ticks(lo: float, hi: float) -> list:
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step - 1e-9) * step
    out = []
    t = first
    while t <= hi + 1e-9 * max(1.0, abs(hi)):
        out.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return out


def _fmt(v: float) -> str:
    return f"{v:g}"


def _marker_svg(marker: str, px: float, py: float, color: str) -> str:
    s = 3.5
    if marker == "circle":
        return f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{s:.1f}" fill="{color}"/>'
    if marker == "square":
        return (
            f'<rect x="{px - s:.2f}" y="{py - s:.2f}" width="{2 * s:.1f}" '
            f'height="{2 * s:.1f}" fill="{color}"/>'
        )
    if marker == "diamond":
        pts = f"{px:.2f},{py - s:.2f} {px + s:.2f},{py:.2f} {px:.2f},{py + s:.2f} {px - s:.2f},{py:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if marker == "triangle":
        pts = f"{px:.2f},{py - s:.2f} {px + s:.2f},{py + s:.2f} {px - s:.2f},{py + s:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    return ""


def render_line_chart(
    series,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 640,
    height: int = 480,
) -> str:
    """Render curves to an SVG 1.1 document string."""
    series = list(series)
    if not series or all(len(s.x) == 0 for s in series):
        raise ValueError("nothing to plot")

    xs = [v for s in series for v in s.x]
    ys = [v for s in series for v in s.y]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(min(ys), 0.0), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    y_hi += 0.05 * (y_hi - y_lo)

    left, right, top, bottom = 64, 20, 34, 48
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return top + (y_hi - y) / (y_hi - y_lo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(title)}</text>'
        )

    for t in _ticks(x_lo, x_hi):
        x = px(t)
        parts.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="#333"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        parts.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="#333"/>')
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{escape(x_label)}</text>'
        )
    if y_label:
        yc = top + ph / 2
        parts.append(
            f'<text x="16" y="{yc:.1f}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12" transform="rotate(-90 16 {yc:.1f})">{escape(y_label)}</text>'
        )

    for k, s in enumerate(series):
        color = s.color or PALETTE[k % len(PALETTE)]
        dash = DASHES[s.style]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.x, s.y))
        if len(s.x) > 1:
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.6"{dash_attr}/>'
            )
        if s.marker != "none":
            for x, y in zip(s.x, s.y):
                parts.append(_marker_svg(s.marker, px(x), py(y), color))

    lx, ly = left + 10, top + 10
    for k, s in enumerate(series):
        if not s.label:
            continue
        color = s.color or PALETTE[k % len(PALETTE)]
        dash = DASHES[s.style]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<line x1="{lx}" y1="{ly + 14 * k}" x2="{lx + 26}" y2="{ly + 14 * k}" '
            f'stroke="{color}" stroke-width="1.6"{dash_attr}/>'
        )
        if s.marker != "none":
            parts.append(_marker_svg(s.marker, lx + 13, ly + 14 * k, color))
        parts.append(
            f'<text x="{lx + 32}" y="{ly + 14 * k + 4}" font-family="sans-serif" '
            f'font-size="11">{escape(s.label)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, svg_text: str) -> None:
    """Write rendered markup; callers treat failures as non-fatal."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg_text)
