"""Deterministic SVG 1.1 rendering of PlotData.

Pure function of its inputs: identical plot data and dimensions give
identical bytes. No external plotting dependency; layout is a simple
margin model with nice-number ticks, a color cycle for series and a
blue-to-red gradient for per-point color scalars.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .errors import ValidationError
from .plots import PlotData, Series

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
)
GRADIENT_LOW = (59, 76, 192)    # cold blue
GRADIENT_MID = (221, 221, 221)  # neutral
GRADIENT_HIGH = (180, 4, 38)    # hot red

MARGIN_LEFT = 62.0
MARGIN_RIGHT = 18.0
MARGIN_TOP = 34.0
MARGIN_BOTTOM = 48.0
LEGEND_WIDTH = 110.0
FACET_GAP = 26.0


def _num(v: float) -> str:
    return f"{v:.2f}"


def _fmt_tick(v: float) -> str:
    if v == 0:
        return "0"
    return f"{v:.4g}"


def nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _interp_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    if t < 0.5:
        a, b, u = GRADIENT_LOW, GRADIENT_MID, t * 2.0
    else:
        a, b, u = GRADIENT_MID, GRADIENT_HIGH, (t - 0.5) * 2.0
    rgb = tuple(round(ca + (cb - ca) * u) for ca, cb in zip(a, b))
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


class _Scale:
    """Linear data-to-pixel mapping; pass a reversed pixel range for y."""

    def __init__(self, lo: float, hi: float, px_lo: float, px_hi: float):
        if hi <= lo:
            pad = 0.5 if lo == 0 else abs(lo) * 0.5
            lo, hi = lo - pad, hi + pad
        self.lo, self.hi = lo, hi
        self.px_lo, self.px_hi = px_lo, px_hi

    def __call__(self, v: float) -> float:
        t = (v - self.lo) / (self.hi - self.lo)
        return self.px_lo + t * (self.px_hi - self.px_lo)


def _data_range(values, pad_frac: float = 0.05, include_zero: bool = False):
    lo, hi = min(values), max(values)
    if include_zero:
        lo, hi = min(lo, 0.0), max(hi, 0.0)
    span = hi - lo
    pad = span * pad_frac if span > 0 else (abs(hi) * 0.5 or 0.5)
    return lo - pad, hi + pad


def _series_color(plot: PlotData, series: Series, fallback_index: int) -> str:
    drawable = [s for s in plot.series if s.role != "outline"]
    try:
        idx = drawable.index(series)
    except ValueError:
        idx = fallback_index
    return PALETTE[idx % len(PALETTE)]


def render_svg(plot: PlotData, width_px: float = 720, height_px: float = 480) -> bytes:
    """Render one plot; facetted series get stacked panels."""
    if width_px < 100 or height_px < 100 or not (
        math.isfinite(width_px) and math.isfinite(height_px)
    ):
        raise ValidationError("plot dimensions must be finite and >= 100 px")

    body: list[str] = []
    body.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(width_px)}" height="{_num(height_px)}" '
        f'viewBox="0 0 {_num(width_px)} {_num(height_px)}">'
    )
    body.append(f'<rect width="{_num(width_px)}" height="{_num(height_px)}" fill="white"/>')
    if plot.title:
        body.append(
            f'<text x="{_num(width_px / 2)}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(plot.title)}</text>'
        )

    non_empty = [s for s in plot.series if len(s.x) > 0]
    if not non_empty:
        body.append(
            f'<text x="{_num(width_px / 2)}" y="{_num(height_px / 2)}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="13" '
            f'fill="#666">(empty plot)</text>'
        )
        body.append("</svg>")
        return ("\n".join(body) + "\n").encode("utf-8")

    facets = sorted({s.facet for s in non_empty if s.facet is not None})
    legend_series = [s for s in non_empty if s.role in ("line", "points")]
    want_legend = (
        not facets
        and len(legend_series) > 1
        and plot.kind in ("density", "time_series")
    )
    right = MARGIN_RIGHT + (LEGEND_WIDTH if want_legend else 0.0)

    if facets:
        panel_h = (height_px - MARGIN_TOP - MARGIN_BOTTOM
                   - FACET_GAP * (len(facets) - 1)) / len(facets)
        panels = [
            (
                facet,
                [s for s in non_empty if s.facet == facet],
                MARGIN_TOP + i * (panel_h + FACET_GAP),
                panel_h,
            )
            for i, facet in enumerate(facets)
        ]
    else:
        panels = [(None, non_empty, MARGIN_TOP, height_px - MARGIN_TOP - MARGIN_BOTTOM)]

    # shared x range across panels
    all_x = [v for s in non_empty for v in s.x]
    include_zero_y = plot.kind == "importance_bar"
    if plot.categories is not None and plot.kind in ("importance_bar", "feature_violin"):
        x_lo, x_hi = -0.6, len(plot.categories) - 0.4
    else:
        x_lo, x_hi = _data_range(all_x)

    for facet, members, top, panel_h in panels:
        sx = _Scale(x_lo, x_hi, MARGIN_LEFT, width_px - right)
        all_y = [v for s in members for v in s.y]
        y_lo, y_hi = _data_range(all_y, include_zero=include_zero_y)
        sy = _Scale(y_lo, y_hi, top + panel_h, top)
        body.append(_panel(plot, members, sx, sy, top, panel_h, facet))

    # axis titles
    body.append(
        f'<text x="{_num((MARGIN_LEFT + width_px - right) / 2)}" '
        f'y="{_num(height_px - 10)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{escape(plot.x_label)}</text>'
    )
    body.append(
        f'<text x="14" y="{_num(height_px / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 14 {_num(height_px / 2)})">{escape(plot.y_label)}</text>'
    )

    if want_legend:
        lx = width_px - right + 14.0
        ly = MARGIN_TOP + 8.0
        body.append('<g font-family="sans-serif" font-size="11">')
        for i, s in enumerate(legend_series):
            color = _series_color(plot, s, i)
            y = ly + i * 16.0
            body.append(
                f'<rect x="{_num(lx)}" y="{_num(y - 8)}" width="10" height="10" '
                f'fill="{color}"/>'
            )
            body.append(
                f'<text x="{_num(lx + 14)}" y="{_num(y + 1)}">{escape(s.name)}</text>'
            )
        body.append("</g>")

    body.append("</svg>")
    return ("\n".join(body) + "\n").encode("utf-8")


def _panel(plot, members, sx, sy, top, panel_h, facet) -> str:
    parts = [f'<g font-family="sans-serif" font-size="10">']
    left_px, right_px = sx.px_lo, sx.px_hi
    bottom_px = top + panel_h
    parts.append(
        f'<rect x="{_num(left_px)}" y="{_num(top)}" '
        f'width="{_num(right_px - left_px)}" height="{_num(panel_h)}" '
        f'fill="none" stroke="#888" stroke-width="1"/>'
    )
    if facet is not None:
        parts.append(
            f'<text x="{_num(left_px + 4)}" y="{_num(top - 5)}" '
            f'font-size="11" fill="#444">{escape(facet)}</text>'
        )

    # x ticks: explicit (time), categorical, or computed
    if plot.x_ticks is not None:
        xticks = [(pos, label) for pos, label in plot.x_ticks]
    elif plot.categories is not None and plot.kind in ("importance_bar", "feature_violin"):
        xticks = [(float(i), c) for i, c in enumerate(plot.categories)]
    else:
        xticks = [(t, _fmt_tick(t)) for t in nice_ticks(sx.lo, sx.hi)]
    for pos, label in xticks:
        if not sx.lo <= pos <= sx.hi:
            continue
        px = sx(pos)
        parts.append(
            f'<line x1="{_num(px)}" y1="{_num(bottom_px)}" '
            f'x2="{_num(px)}" y2="{_num(bottom_px + 4)}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{_num(px)}" y="{_num(bottom_px + 15)}" '
            f'text-anchor="middle">{escape(label)}</text>'
        )
    for t in nice_ticks(sy.lo, sy.hi):
        py = sy(t)
        parts.append(
            f'<line x1="{_num(left_px - 4)}" y1="{_num(py)}" '
            f'x2="{_num(left_px)}" y2="{_num(py)}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{_num(left_px - 6)}" y="{_num(py + 3)}" '
            f'text-anchor="end">{escape(_fmt_tick(t))}</text>'
        )

    drawable_index = 0
    for s in members:
        color = _series_color(plot, s, drawable_index)
        if s.role != "outline":
            drawable_index += 1
        if s.role == "line":
            pts = " ".join(f"{_num(sx(x))},{_num(sy(y))}" for x, y in zip(s.x, s.y))
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"/>'
            )
        elif s.role == "bar":
            for x, y in zip(s.x, s.y):
                x0, x1 = sx(x - 0.3), sx(x + 0.3)
                y0, y1 = sy(max(y, 0.0)), sy(min(y, 0.0))
                parts.append(
                    f'<rect x="{_num(x0)}" y="{_num(y0)}" '
                    f'width="{_num(x1 - x0)}" height="{_num(y1 - y0)}" '
                    f'fill="{color}" fill-opacity="0.85"/>'
                )
        elif s.role == "outline":
            pts = " ".join(f"{_num(sx(x))},{_num(sy(y))}" for x, y in zip(s.x, s.y))
            parts.append(
                f'<polygon points="{pts}" fill="#d7dce3" fill-opacity="0.7" '
                f'stroke="#6b7a90" stroke-width="1"/>'
            )
        else:  # points
            lo_c, hi_c = (min(s.color), max(s.color)) if s.color else (0.0, 0.0)
            for j, (x, y) in enumerate(zip(s.x, s.y)):
                if s.color is not None:
                    t = 0.5 if hi_c == lo_c else (s.color[j] - lo_c) / (hi_c - lo_c)
                    fill = _interp_color(t)
                else:
                    fill = color
                parts.append(
                    f'<circle cx="{_num(sx(x))}" cy="{_num(sy(y))}" r="3" '
                    f'fill="{fill}" fill-opacity="0.8"/>'
                )
            if s.labels is not None:
                for j, (x, y) in enumerate(zip(s.x, s.y)):
                    parts.append(
                        f'<text x="{_num(sx(x) + 6)}" y="{_num(sy(y) - 5)}" '
                        f'font-size="11">{escape(s.labels[j])}</text>'
                    )
    parts.append("</g>")
    return "\n".join(parts)


def plot_data_text(plot: PlotData) -> bytes:
    """Long-form CSV dump of the plot points, for external tooling."""
    lines = [f"# kind={plot.kind} title={plot.title!r} "
             f"x_label={plot.x_label!r} y_label={plot.y_label!r}"]
    lines.append("series,role,facet,x,y,color,label")
    for s in plot.series:
        facet = s.facet or ""
        for j in range(len(s.x)):
            color = repr(s.color[j]) if s.color is not None else ""
            label = s.labels[j] if s.labels is not None else ""
            lines.append(
                f"{s.name},{s.role},{facet},{s.x[j]!r},{s.y[j]!r},{color},{label}"
            )
    return ("\n".join(lines) + "\n").encode("utf-8")
