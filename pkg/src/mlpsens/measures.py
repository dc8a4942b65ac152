"""Reductions of a sensitivity tensor to summary measures.

Per (input, output) cell over the N samples: the mean sensitivity, the
sample standard deviation (divisor N-1) and the mean squared
sensitivity. With several outputs the per-output rows can be combined
into whole-model rows per input:

    avg_i = mean_k(avg_ik)
    sd_i  = sqrt(mean_k(sd_ik^2 + (avg_ik - avg_i)^2))
    sq_i  = (sum_k sqrt(sq_ik))^2 / n_outputs
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .jacobian import SensitivityTensor

METRICS = ("mean", "sd", "mean_sq")


@dataclass(frozen=True)
class MeasureRow:
    """One (input, output) or combined row of summary measures.

    `has_nan` marks rows whose underlying sensitivities contained NaN
    (possible with the step activation); their measures are NaN too.
    """

    mean: float
    sd: float
    mean_sq: float
    has_nan: bool = False

    def metric(self, name: str) -> float:
        if name not in METRICS:
            raise ValidationError(
                f"unknown metric {name!r}; expected one of {', '.join(METRICS)}"
            )
        return getattr(self, name)


@dataclass(frozen=True)
class SensitivitySummary:
    """Summary rows per (input, output), plus optional combined rows.

    `degenerate` flags N = 1, where the sd is reported as 0 because a
    sample standard deviation needs two samples.
    """

    input_names: tuple[str, ...]
    output_names: tuple[str, ...]
    per_output: dict[tuple[str, str], MeasureRow]
    sample_count: int
    combined: dict[str, MeasureRow] | None = None
    degenerate: bool = False

    def row(self, input_name: str, output_name: str) -> MeasureRow:
        return self.per_output[(input_name, output_name)]


def summarize(tensor: SensitivityTensor) -> SensitivitySummary:
    """Reduce the raw tensor to per-(input, output) measure rows."""
    values = tensor.values
    n = values.shape[0]
    degenerate = n < 2
    rows: dict[tuple[str, str], MeasureRow] = {}
    for i, iname in enumerate(tensor.input_names):
        for k, kname in enumerate(tensor.output_names):
            cell = values[:, i, k]
            has_nan = bool(np.any(np.isnan(cell)))
            mean = float(np.mean(cell))
            sd = 0.0 if degenerate else float(np.std(cell, ddof=1))
            if has_nan and degenerate:
                sd = float("nan")
            mean_sq = float(np.mean(cell * cell))
            rows[(iname, kname)] = MeasureRow(mean, sd, mean_sq, has_nan)
    return SensitivitySummary(
        input_names=tensor.input_names,
        output_names=tensor.output_names,
        per_output=rows,
        sample_count=n,
        degenerate=degenerate,
    )


def combine(summary: SensitivitySummary) -> SensitivitySummary:
    """Fill the whole-model combined rows from the per-output rows."""
    n_out = len(summary.output_names)
    combined: dict[str, MeasureRow] = {}
    for iname in summary.input_names:
        try:
            cells = [summary.per_output[(iname, k)] for k in summary.output_names]
        except KeyError as exc:
            raise ValidationError(
                f"summary is missing a row for input {iname!r}: {exc}"
            ) from exc
        avg = sum(c.mean for c in cells) / n_out
        sd = math.sqrt(
            sum(c.sd ** 2 + (c.mean - avg) ** 2 for c in cells) / n_out
        )
        sq = sum(math.sqrt(c.mean_sq) for c in cells) ** 2 / n_out
        has_nan = any(c.has_nan for c in cells)
        if has_nan:
            avg = sd = sq = float("nan")
        combined[iname] = MeasureRow(avg, sd, sq, has_nan)
    return replace(summary, combined=combined)


def rank_inputs(summary: SensitivitySummary, by: str = "mean_sq") -> list[str]:
    """Input names ordered by decreasing |metric|.

    Uses the combined rows when present; with a single output the
    per-output rows are equivalent; multi-output summaries without
    combined rows are combined on the fly. Ties keep declaration
    order.
    """
    if by not in METRICS:
        raise ValidationError(
            f"unknown metric {by!r}; expected one of {', '.join(METRICS)}"
        )
    if not summary.input_names:
        return []
    if summary.combined is not None:
        rows = summary.combined
    elif len(summary.output_names) == 1:
        only = summary.output_names[0]
        rows = {i: summary.per_output[(i, only)] for i in summary.input_names}
    else:
        rows = combine(summary).combined
    order = sorted(
        range(len(summary.input_names)),
        key=lambda idx: (-abs(rows[summary.input_names[idx]].metric(by)), idx),
    )
    return [summary.input_names[idx] for idx in order]
