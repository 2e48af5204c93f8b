"""Deterministic SVG boxplot rendering with group colour coding.

Output is plain SVG 1.1 text built with fixed-precision coordinates, so
identical inputs produce byte-identical documents. Glyph parts carry
class attributes (``box``, ``median``, ``whisker``, ``outlier``,
``overflow``) both for styling and so tests can locate them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import defaults
from .stats import BoxplotStats

__all__ = ["RenderSpec", "render_boxplots", "render_panel"]

# Plot-area margins inside each panel cell, in pixels.
MARGIN_LEFT = 56.0
MARGIN_RIGHT = 16.0
MARGIN_TOP = 34.0
MARGIN_BOTTOM = 48.0

_OUTLIER_GLYPHS = ("circle", "diamond", "cross")
_NO_GROUP_FILL = "#b0b0b0"


@dataclass(frozen=True)
class RenderSpec:
    """Styling and layout instructions for boxplot figures.

    When ``y_limits`` is omitted the scale is chosen from the data:
    symmetric about zero at 1.05x the largest absolute whisker/outlier
    when ``zero_line`` is set (the RLE convention), otherwise the data
    range with 5% padding.
    """

    title: str = ""
    width: float = 640.0
    height: float = 400.0
    group_palette: dict = field(default_factory=dict)
    y_limits: tuple[float, float] | None = None
    zero_line: bool = True
    outlier_glyph: str = "circle"
    box_width_fraction: float = 0.6

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive")
        if self.y_limits is not None:
            lo, hi = self.y_limits
            if not (lo < hi):
                raise ValueError(f"y_limits must satisfy low < high, got {self.y_limits}")
        if self.outlier_glyph not in _OUTLIER_GLYPHS:
            raise ValueError(f"outlier_glyph must be one of {_OUTLIER_GLYPHS}")
        if not 0 < self.box_width_fraction <= 1:
            raise ValueError("box_width_fraction must lie in (0, 1]")


def _fmt(x: float) -> str:
    return "%.2f" % x


def _fmt_tick(x: float) -> str:
    return "%g" % round(x, 10)


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def plot_area(width: float, height: float) -> tuple[float, float, float, float]:
    """(left, top, inner width, inner height) of the drawing region."""
    return (MARGIN_LEFT, MARGIN_TOP,
            width - MARGIN_LEFT - MARGIN_RIGHT,
            height - MARGIN_TOP - MARGIN_BOTTOM)


def value_to_y(value: float, lo: float, hi: float, top: float, inner_h: float) -> float:
    """Affine data-to-pixel map for the vertical axis (invertible)."""
    return top + (hi - value) / (hi - lo) * inner_h


def _check_summaries(summaries):
    if not summaries:
        raise ValueError("no summaries to render")
    for s in summaries:
        parts = (s.median, s.q1, s.q3, s.whisker_low, s.whisker_high, *s.outliers)
        if not all(math.isfinite(v) for v in parts):
            raise ValueError(f"non-finite statistic for sample {s.sample_id!r}")


def _auto_limits(summary_lists, zero_line: bool) -> tuple[float, float]:
    lo = math.inf
    hi = -math.inf
    for summaries in summary_lists:
        for s in summaries:
            lo = min(lo, s.whisker_low, *s.outliers) if s.outliers else min(lo, s.whisker_low)
            hi = max(hi, s.whisker_high, *s.outliers) if s.outliers else max(hi, s.whisker_high)
    if zero_line:
        a = 1.05 * max(abs(lo), abs(hi))
        if a <= 0.0:
            a = 1.0
        return (-a, a)
    span = hi - lo
    pad = 0.05 * span if span > 0 else 0.5
    return (lo - pad, hi + pad)


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 2.5, 5.0):
        if mult * mag >= raw:
            step = mult * mag
            break
    k0 = math.ceil(lo / step - 1e-9)
    k1 = math.floor(hi / step + 1e-9)
    return [k * step for k in range(k0, k1 + 1)]


def _resolve_palette(summary_lists, explicit: dict) -> dict:
    palette = {}
    auto = 0
    for summaries in summary_lists:
        for s in summaries:
            if s.group is None or s.group in palette:
                continue
            if s.group in explicit:
                palette[s.group] = explicit[s.group]
            else:
                palette[s.group] = defaults.PALETTE[auto % len(defaults.PALETTE)]
                auto += 1
    return palette


def _outlier_elem(glyph: str, x: float, y: float, color: str) -> str:
    if glyph == "diamond":
        pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in
                       ((x, y - 3.2), (x + 3.2, y), (x, y + 3.2), (x - 3.2, y)))
        return f'<polygon class="outlier" points="{pts}" fill="none" stroke="{color}"/>'
    if glyph == "cross":
        return (f'<path class="outlier" d="M{_fmt(x - 2.6)} {_fmt(y - 2.6)}'
                f'L{_fmt(x + 2.6)} {_fmt(y + 2.6)}M{_fmt(x - 2.6)} {_fmt(y + 2.6)}'
                f'L{_fmt(x + 2.6)} {_fmt(y - 2.6)}" stroke="{color}" fill="none"/>')
    return f'<circle class="outlier" cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.6" fill="none" stroke="{color}"/>'


def _overflow_elem(x: float, y: float, upward: bool, color: str) -> str:
    d = -4.6 if upward else 4.6
    pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in
                   ((x - 3.6, y), (x + 3.6, y), (x, y + d)))
    return f'<polygon class="overflow" points="{pts}" fill="{color}"/>'


def _render_cell(lines: list[str], summaries: list[BoxplotStats], spec: RenderSpec,
                 ox: float, oy: float, title: str, y_limits: tuple[float, float],
                 palette: dict) -> None:
    left, top, inner_w, inner_h = plot_area(spec.width, spec.height)
    left += ox
    top += oy
    lo, hi = y_limits
    m = len(summaries)
    slot = inner_w / m
    box_w = slot * spec.box_width_fraction

    def ypix(v):
        return value_to_y(v, lo, hi, top, inner_h)

    def clamp(v):
        return min(max(v, lo), hi)

    if title:
        lines.append(f'<text class="title" x="{_fmt(left + inner_w / 2)}" '
                     f'y="{_fmt(oy + 22.0)}" text-anchor="middle" '
                     f'font-size="14">{_escape(title)}</text>')

    # Axes and ticks.
    lines.append(f'<rect class="frame" x="{_fmt(left)}" y="{_fmt(top)}" '
                 f'width="{_fmt(inner_w)}" height="{_fmt(inner_h)}" '
                 f'fill="none" stroke="#000000"/>')
    for t in _nice_ticks(lo, hi):
        ty = ypix(t)
        lines.append(f'<line class="tick" x1="{_fmt(left - 4.0)}" y1="{_fmt(ty)}" '
                     f'x2="{_fmt(left)}" y2="{_fmt(ty)}" stroke="#000000"/>')
        lines.append(f'<text class="ticklabel" x="{_fmt(left - 7.0)}" '
                     f'y="{_fmt(ty + 3.5)}" text-anchor="end" '
                     f'font-size="10">{_fmt_tick(t)}</text>')
    if spec.zero_line and lo < 0.0 < hi:
        zy = ypix(0.0)
        lines.append(f'<line class="zeroline" x1="{_fmt(left)}" y1="{_fmt(zy)}" '
                     f'x2="{_fmt(left + inner_w)}" y2="{_fmt(zy)}" '
                     f'stroke="#888888" stroke-dasharray="4 3"/>')

    rotate_labels = m > 12
    for i, s in enumerate(summaries):
        cx = left + (i + 0.5) * slot
        color = _NO_GROUP_FILL if s.group is None else palette[s.group]

        # Whisker stems and caps (drawn clamped to the viewport).
        for lo_v, hi_v in ((s.q3, s.whisker_high), (s.whisker_low, s.q1)):
            y1 = ypix(clamp(lo_v))
            y2 = ypix(clamp(hi_v))
            lines.append(f'<line class="whisker" x1="{_fmt(cx)}" y1="{_fmt(y1)}" '
                         f'x2="{_fmt(cx)}" y2="{_fmt(y2)}" stroke="#000000"/>')
        for wv in (s.whisker_low, s.whisker_high):
            wy = ypix(clamp(wv))
            lines.append(f'<line class="cap" x1="{_fmt(cx - box_w / 4)}" y1="{_fmt(wy)}" '
                         f'x2="{_fmt(cx + box_w / 4)}" y2="{_fmt(wy)}" stroke="#000000"/>')

        by_top = ypix(clamp(s.q3))
        by_bot = ypix(clamp(s.q1))
        lines.append(f'<rect class="box" x="{_fmt(cx - box_w / 2)}" y="{_fmt(by_top)}" '
                     f'width="{_fmt(box_w)}" height="{_fmt(by_bot - by_top)}" '
                     f'fill="{color}" stroke="#000000"/>')
        if lo <= s.median <= hi:
            my = ypix(s.median)
            lines.append(f'<line class="median" x1="{_fmt(cx - box_w / 2)}" y1="{_fmt(my)}" '
                         f'x2="{_fmt(cx + box_w / 2)}" y2="{_fmt(my)}" '
                         f'stroke="#000000" stroke-width="1.6"/>')

        for v in s.outliers:
            if v < lo:
                lines.append(_overflow_elem(cx, ypix(lo), False, "#000000"))
            elif v > hi:
                lines.append(_overflow_elem(cx, ypix(hi), True, "#000000"))
            else:
                lines.append(_outlier_elem(spec.outlier_glyph, cx, ypix(v), "#000000"))

        ly = top + inner_h + 12.0
        label = _escape(s.sample_id)
        if rotate_labels:
            lines.append(f'<text class="xlabel" x="{_fmt(cx)}" y="{_fmt(ly)}" '
                         f'text-anchor="end" font-size="8" '
                         f'transform="rotate(-60 {_fmt(cx)} {_fmt(ly)})">{label}</text>')
        else:
            lines.append(f'<text class="xlabel" x="{_fmt(cx)}" y="{_fmt(ly)}" '
                         f'text-anchor="middle" font-size="9">{label}</text>')


def _legend(lines: list[str], palette: dict, ox: float, oy: float) -> None:
    x = ox + 8.0
    for i, (group, color) in enumerate(palette.items()):
        y = oy + 10.0 + 14.0 * i
        lines.append(f'<rect class="legendswatch" x="{_fmt(x)}" y="{_fmt(y)}" '
                     f'width="10.00" height="10.00" fill="{color}" stroke="#000000"/>')
        lines.append(f'<text class="legendlabel" x="{_fmt(x + 14.0)}" y="{_fmt(y + 8.5)}" '
                     f'font-size="10">{_escape(group)}</text>')


def _document(width: float, height: float, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
            f'font-family="Helvetica, Arial, sans-serif">')
    background = f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>'
    return "\n".join([head, background, *body, "</svg>"]) + "\n"


def render_boxplots(summaries: list[BoxplotStats], spec: RenderSpec = RenderSpec()) -> str:
    """One box-whisker glyph per sample, in input order, filled by group."""
    _check_summaries(summaries)
    y_limits = spec.y_limits or _auto_limits([summaries], spec.zero_line)
    palette = _resolve_palette([summaries], spec.group_palette)
    body: list[str] = []
    _render_cell(body, summaries, spec, 0.0, 0.0, spec.title, y_limits, palette)
    if palette:
        _legend(body, palette, plot_area(spec.width, spec.height)[0] + 4.0, MARGIN_TOP)
    return _document(spec.width, spec.height, body)


def render_panel(series: list[tuple[str, list[BoxplotStats]]],
                 spec: RenderSpec = RenderSpec()) -> str:
    """Small-multiples grid of boxplot cells, as near square as possible
    and wider than tall, with sub-titles taken from the series labels.

    A shared vertical scale is used when ``spec.y_limits`` is given;
    otherwise each cell scales to its own data.
    """
    if not series:
        raise ValueError("no series to render")
    for _, summaries in series:
        _check_summaries(summaries)
    k = len(series)
    cols = math.ceil(math.sqrt(k))
    rows = math.ceil(k / cols)
    palette = _resolve_palette([s for _, s in series], spec.group_palette)
    body: list[str] = []
    for idx, (label, summaries) in enumerate(series):
        ox = (idx % cols) * spec.width
        oy = (idx // cols) * spec.height
        y_limits = spec.y_limits or _auto_limits([summaries], spec.zero_line)
        _render_cell(body, summaries, spec, ox, oy, label, y_limits, palette)
    if palette:
        _legend(body, palette, plot_area(spec.width, spec.height)[0] + 4.0, MARGIN_TOP)
    return _document(cols * spec.width, rows * spec.height, body)
