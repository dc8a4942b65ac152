"""Diagnostic plot construction.

Builders turn summaries and raw sensitivity tensors into `PlotData`, a
renderer-independent description (named series of finite points) that
`render_svg` turns into deterministic SVG and that can also be dumped
as text for external tooling.

The four visualizations:

* label scatter: (mean, sd) per input. Near the origin the input is
  unused; on the x-axis away from zero the relationship is linear;
  large sd means a non-linear relationship.
* importance bars: mean squared sensitivity per input.
* density: distribution of raw sensitivities per input.
* time series and violins: raw sensitivities against time and against
  the input values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .errors import DegenerateDistributionError, ValidationError
from .jacobian import SensitivityTensor
from .measures import SensitivitySummary
from .model import Dataset
from .rng import Rng

PLOT_KINDS = (
    "label_scatter", "importance_bar", "density", "time_series", "feature_violin",
)

KDE_GRID_POINTS = 512
VIOLIN_HALF_WIDTH = 0.4  # in category units; jitter scales inside it
JITTER_SEED = 0x7E0_5EED


@dataclass(frozen=True)
class Series:
    """One named sequence of points.

    `role` tells the renderer how to draw it: "points", "line", "bar"
    or "outline" (closed polygon). `color` holds an optional per-point
    color scalar, `labels` optional per-point text.
    """

    name: str
    x: tuple[float, ...]
    y: tuple[float, ...]
    role: str = "points"
    labels: tuple[str, ...] | None = None
    color: tuple[float, ...] | None = None
    facet: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValidationError(f"series {self.name!r}: x/y length mismatch")
        if not all(math.isfinite(v) for v in self.x + self.y):
            raise ValidationError(f"series {self.name!r}: non-finite coordinates")
        if self.color is not None:
            object.__setattr__(self, "color", tuple(float(v) for v in self.color))


@dataclass(frozen=True)
class PlotData:
    kind: str
    series: tuple[Series, ...]
    x_label: str
    y_label: str
    title: str = ""
    categories: tuple[str, ...] | None = None
    x_ticks: tuple[tuple[float, str], ...] | None = None

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValidationError(f"unknown plot kind {self.kind!r}")
        names = [s.name for s in self.series]
        if len(set(names)) != len(names):
            raise ValidationError("series names must be unique")
        object.__setattr__(self, "series", tuple(self.series))


def kde(values, grid_points: int = KDE_GRID_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian kernel density with the 1.06 sd N^(-1/5) bandwidth.

    Returns (grid, density) over [min - 3h, max + 3h]. Raises
    DegenerateDistributionError when all values coincide, since the
    bandwidth would be zero.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 2:
        raise ValidationError("kde needs a flat list of at least two values")
    if not np.all(np.isfinite(values)):
        raise ValidationError("kde values must be finite")
    if grid_points < 2:
        raise ValidationError("grid_points must be >= 2")
    sd = float(np.std(values, ddof=1))
    if sd == 0.0:
        raise DegenerateDistributionError(
            "all values identical; density is a point mass"
        )
    h = 1.06 * sd * len(values) ** (-1.0 / 5.0)
    grid = np.linspace(values.min() - 3.0 * h, values.max() + 3.0 * h, grid_points)
    z = (grid[:, None] - values[None, :]) / h
    density = np.exp(-0.5 * z * z).sum(axis=1) / (len(values) * h * math.sqrt(2.0 * math.pi))
    return grid, density


def _resolve_output(names: tuple[str, ...], output_name: str | None) -> int:
    if output_name is None:
        return 0
    if output_name not in names:
        raise ValidationError(
            f"unknown output {output_name!r}; expected one of {', '.join(names)}"
        )
    return names.index(output_name)


def sensitivity_plots(
    summary: SensitivitySummary,
    tensor: SensitivityTensor | None = None,
    output_name: str | None = None,
) -> list[PlotData]:
    """The label scatter, the importance bars and, when the raw tensor
    is available, the density plot; without it only the first two are
    returned."""
    k = _resolve_output(summary.output_names, output_name)
    out = summary.output_names[k]
    rows = [summary.per_output[(i, out)] for i in summary.input_names]

    label = PlotData(
        kind="label_scatter",
        series=(
            Series(
                name="inputs",
                x=tuple(r.mean for r in rows),
                y=tuple(r.sd for r in rows),
                role="points",
                labels=tuple(summary.input_names),
            ),
        ),
        x_label="mean sensitivity",
        y_label="sensitivity sd",
        title=f"Sensitivity mean vs sd ({out})",
    )
    bars = PlotData(
        kind="importance_bar",
        series=(
            Series(
                name="mean_sq",
                x=tuple(float(i) for i in range(len(rows))),
                y=tuple(r.mean_sq for r in rows),
                role="bar",
            ),
        ),
        x_label="input",
        y_label="mean squared sensitivity",
        title=f"Input importance ({out})",
        categories=tuple(summary.input_names),
    )
    plots = [label, bars]
    if tensor is not None:
        series = []
        for i, iname in enumerate(tensor.input_names):
            cell = tensor.values[:, i, k]
            try:
                grid, dens = kde(cell)
            except DegenerateDistributionError:
                # point mass: a narrow spike marks the constant
                c = float(cell[0])
                eps = max(abs(c), 1.0) * 1e-3
                grid = np.array([c - eps, c, c + eps])
                dens = np.array([0.0, 1.0 / eps, 0.0])
            series.append(Series(name=iname, x=tuple(grid), y=tuple(dens), role="line"))
        plots.append(
            PlotData(
                kind="density",
                series=tuple(series),
                x_label="sensitivity",
                y_label="density",
                title=f"Sensitivity distributions ({out})",
            )
        )
    return plots


def _time_positions(timestamps) -> tuple[list[float], tuple[tuple[float, str], ...] | None]:
    is_dt = [isinstance(t, datetime) for t in timestamps]
    if any(is_dt) and not all(is_dt):
        raise ValidationError("timestamps mix datetimes and numbers")
    if all(is_dt):
        t0 = timestamps[0]
        xs = [(t - t0).total_seconds() / 86400.0 for t in timestamps]
        tick_idx = np.linspace(0, len(xs) - 1, min(6, len(xs))).astype(int)
        ticks = tuple((xs[i], timestamps[i].date().isoformat()) for i in tick_idx)
        return xs, ticks
    xs = [float(t) for t in timestamps]
    return xs, None


def time_plot(
    tensor: SensitivityTensor,
    timestamps,
    facet: bool = False,
    output_name: str | None = None,
) -> PlotData:
    """Raw sensitivities as sequences over a monotone time axis.

    One line per input, overlaid or in per-input facets.
    """
    timestamps = list(timestamps)
    if len(timestamps) != tensor.n_samples:
        raise ValidationError(
            f"{len(timestamps)} timestamps for {tensor.n_samples} samples"
        )
    xs, ticks = _time_positions(timestamps)
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValidationError("timestamps must be monotone non-decreasing")
    k = _resolve_output(tensor.output_names, output_name)
    series = tuple(
        Series(
            name=iname,
            x=tuple(xs),
            y=tuple(tensor.values[:, i, k]),
            role="line",
            facet=iname if facet else None,
        )
        for i, iname in enumerate(tensor.input_names)
    )
    return PlotData(
        kind="time_series",
        series=series,
        x_label="time",
        y_label="sensitivity",
        title=f"Sensitivity over time ({tensor.output_names[k]})",
        x_ticks=ticks,
    )


def feature_plot(
    tensor: SensitivityTensor,
    data: Dataset,
    output_name: str | None = None,
) -> PlotData:
    """Violin of each input's sensitivities plus density-jittered
    points colored by the input's value at each sample.

    Jitter comes from a fixed-seed generator so renders reproduce
    byte-for-byte.
    """
    if data.n_samples != tensor.n_samples:
        raise ValidationError(
            f"dataset has {data.n_samples} rows, tensor {tensor.n_samples} samples"
        )
    k = _resolve_output(tensor.output_names, output_name)
    gen = Rng(JITTER_SEED).split("feature-jitter")
    name_to_col = {n: c for c, n in zip(data.input_columns, data.input_names)}
    series: list[Series] = []
    for i, iname in enumerate(tensor.input_names):
        cell = tensor.values[:, i, k]
        pos = float(i)
        try:
            grid, dens = kde(cell, grid_points=64)
            scale = VIOLIN_HALF_WIDTH / dens.max()
            right = [(pos + d * scale, g) for g, d in zip(grid, dens)]
            left = [(pos - d * scale, g) for g, d in zip(reversed(grid), reversed(dens))]
            outline = right + left
            local = np.interp(cell, grid, dens) / dens.max()
        except DegenerateDistributionError:
            c = float(cell[0])
            eps = max(abs(c), 1.0) * 1e-3
            w = 0.02
            outline = [(pos + w, c - eps), (pos + w, c + eps),
                       (pos - w, c + eps), (pos - w, c - eps)]
            local = np.zeros(len(cell))
        series.append(
            Series(
                name=f"{iname} violin",
                x=tuple(p for p, _ in outline),
                y=tuple(v for _, v in outline),
                role="outline",
            )
        )
        if iname not in name_to_col:
            raise ValidationError(f"tensor input {iname!r} not found in dataset")
        colors = data.values[:, name_to_col[iname]]
        jitter = [gen.uniform(-1.0, 1.0) * VIOLIN_HALF_WIDTH * d for d in local]
        series.append(
            Series(
                name=iname,
                x=tuple(pos + j for j in jitter),
                y=tuple(cell),
                role="points",
                color=tuple(colors),
            )
        )
    return PlotData(
        kind="feature_violin",
        series=tuple(series),
        x_label="input",
        y_label="sensitivity",
        title=f"Sensitivity vs input values ({tensor.output_names[k]})",
        categories=tuple(tensor.input_names),
    )
