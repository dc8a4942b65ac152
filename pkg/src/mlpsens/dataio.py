"""Serialization, dataset loading, synthetic data and result export.

The model file is a versioned JSON document (schema version "1"), the
one interchange format the toolkit understands:

    {
      "schema_version": "1",
      "structure": [3, 10, 1],
      "input_names": ["X1", "X2", "X3"],
      "output_names": ["Y"],
      "activations": [{"kind": "sigmoid", "param": 0.0}, {"kind": "linear"}],
      "weights": [ [[...], ...], ... ]   // per layer, bias row first
    }

CSV datasets use a mandatory header, comma separator and '.' decimal
point; no locale handling.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from datetime import date, datetime
from importlib import resources
from typing import Sequence

import numpy as np

from .errors import ParseError, ValidationError
from .jacobian import SensitivityTensor
from .measures import MeasureRow, SensitivitySummary
from .model import (
    Dataset,
    LayerSpec,
    NetworkSpec,
    activation,
    validate_network,
)
from .rng import Rng

SCHEMA_VERSION = "1"
SIMDATA_DEFAULT_N = 1500
SEASONAL_START = date(2007, 7, 2)

FORMATS = ("csv", "text")


# ---------------------------------------------------------------------------
# model files

def save_model(spec: NetworkSpec) -> bytes:
    """Serialize a validated network to the JSON document format."""
    problems = validate_network(spec)
    if problems:
        raise ValidationError("cannot save invalid network: " + "; ".join(problems))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "structure": list(spec.structure),
        "input_names": list(spec.input_names),
        "output_names": list(spec.output_names),
        "activations": [
            {"kind": l.activation.kind, "param": l.activation.param}
            for l in spec.layers
        ],
        "weights": [[list(row) for row in l.weights] for l in spec.layers],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _expect(doc: dict, key: str, kind: type, path: str):
    if key not in doc:
        raise ParseError(f"{path}{key}: missing required field")
    value = doc[key]
    if not isinstance(value, kind):
        raise ParseError(
            f"{path}{key}: expected {kind.__name__}, got {type(value).__name__}"
        )
    return value


def load_model(raw: bytes | str) -> NetworkSpec:
    """Parse a model document; errors carry the offending field path."""
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"model document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("model document must be a JSON object")

    version = _expect(doc, "schema_version", str, "")
    if version != SCHEMA_VERSION:
        raise ParseError(
            f"schema_version: unknown version {version!r}, expected {SCHEMA_VERSION!r}"
        )
    structure = _expect(doc, "structure", list, "")
    input_names = _expect(doc, "input_names", list, "")
    output_names = _expect(doc, "output_names", list, "")
    act_docs = _expect(doc, "activations", list, "")
    weight_docs = _expect(doc, "weights", list, "")

    for i, width in enumerate(structure):
        if not isinstance(width, int) or width < 1:
            raise ParseError(f"structure[{i}]: expected a positive integer, got {width!r}")
    if len(act_docs) != len(structure) - 1:
        raise ParseError(
            f"activations: expected {len(structure) - 1} entries, got {len(act_docs)}"
        )
    if len(weight_docs) != len(structure) - 1:
        raise ParseError(
            f"weights: expected {len(structure) - 1} layers, got {len(weight_docs)}"
        )

    acts = []
    for i, entry in enumerate(act_docs):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ParseError(f"activations[{i}]: expected an object with a 'kind' field")
        kind = entry["kind"]
        if not isinstance(kind, str):
            raise ParseError(f"activations[{i}].kind: expected string, got {kind!r}")
        param = entry.get("param")
        if param is not None and not isinstance(param, (int, float)):
            raise ParseError(f"activations[{i}].param: expected a number, got {param!r}")
        try:
            acts.append(activation(kind, param))
        except ValidationError as exc:
            raise ParseError(f"activations[{i}]: {exc}") from exc

    layers = []
    for li, rows in enumerate(weight_docs):
        prev, width = structure[li], structure[li + 1]
        if not isinstance(rows, list) or len(rows) != prev + 1:
            raise ParseError(
                f"weights[{li}]: expected {prev + 1} rows (bias row plus "
                f"{prev} connection rows)"
            )
        matrix = np.empty((prev + 1, width))
        for ri, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != width:
                raise ParseError(f"weights[{li}][{ri}]: expected {width} entries")
            for ci, cell in enumerate(row):
                if not isinstance(cell, (int, float)) or isinstance(cell, bool):
                    raise ParseError(
                        f"weights[{li}][{ri}][{ci}]: expected a number, "
                        f"got {type(cell).__name__}"
                    )
                if not math.isfinite(cell):
                    raise ParseError(f"weights[{li}][{ri}][{ci}]: non-finite weight")
                matrix[ri, ci] = cell
        layers.append(LayerSpec(width=width, weights=matrix, activation=acts[li]))

    spec = NetworkSpec(tuple(input_names), tuple(output_names), tuple(layers))
    problems = validate_network(spec)
    if problems:
        raise ParseError("model fails validation: " + "; ".join(problems))
    return spec


# ---------------------------------------------------------------------------
# CSV datasets

def _parse_time_cell(cell: str, row: int, column: str):
    try:
        return float(cell)
    except ValueError:
        pass
    try:
        return datetime.fromisoformat(cell)
    except ValueError as exc:
        raise ParseError(
            f"row {row}, column {column!r}: {cell!r} is neither a number "
            f"nor an ISO-8601 instant"
        ) from exc


def load_dataset(
    raw: bytes | str,
    input_columns: Sequence[str],
    output_columns: Sequence[str],
    timestamp_column: str | None = None,
) -> Dataset:
    """Load a header-ed CSV, keeping the selected columns only.

    Input/output cells must be finite numbers; the timestamp column
    accepts plain reals or ISO-8601 instants. Errors name the 1-based
    data row and the column.
    """
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    reader = csv.reader(_io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("CSV is empty; a header row is required") from None
    header = [h.strip() for h in header]

    wanted = list(input_columns) + list(output_columns)
    missing = [c for c in wanted if c not in header]
    if timestamp_column is not None and timestamp_column not in header:
        missing.append(timestamp_column)
    if missing:
        raise ValidationError(
            f"CSV is missing columns: {', '.join(repr(m) for m in missing)}"
        )
    overlap = set(input_columns) & set(output_columns)
    if overlap:
        raise ValidationError(f"columns used as both input and output: {overlap}")

    keep = [c for c in header if c in set(wanted)]  # CSV order
    col_pos = {c: header.index(c) for c in keep}
    ts_pos = header.index(timestamp_column) if timestamp_column else None

    rows: list[list[float]] = []
    timestamps: list = []
    for row_num, record in enumerate(reader, start=1):
        if not record or all(cell.strip() == "" for cell in record):
            continue
        if len(record) != len(header):
            raise ParseError(
                f"row {row_num}: expected {len(header)} cells, got {len(record)}"
            )
        values = []
        for name in keep:
            cell = record[col_pos[name]].strip()
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"row {row_num}, column {name!r}: expected a number, got {cell!r}"
                ) from None
            if not math.isfinite(value):
                raise ParseError(
                    f"row {row_num}, column {name!r}: non-finite value {cell!r}"
                )
            values.append(value)
        rows.append(values)
        if ts_pos is not None:
            timestamps.append(
                _parse_time_cell(record[ts_pos].strip(), row_num, timestamp_column)
            )

    if not rows:
        raise ParseError("CSV has a header but no data rows")

    return Dataset(
        column_names=tuple(keep),
        values=np.array(rows),
        input_columns=tuple(keep.index(c) for c in input_columns),
        output_columns=tuple(keep.index(c) for c in output_columns),
        timestamp=tuple(timestamps) if ts_pos is not None else None,
    )


def write_dataset_csv(data: Dataset, timestamp_name: str = "DATE") -> bytes:
    """Render a dataset back to CSV (timestamp first when present)."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(data.column_names)
    if data.timestamp is not None:
        header = [timestamp_name] + header
    writer.writerow(header)
    for n in range(data.n_samples):
        row = [repr(float(v)) for v in data.values[n]]
        if data.timestamp is not None:
            ts = data.timestamp[n]
            cell = ts.isoformat() if isinstance(ts, datetime) else repr(float(ts))
            row = [cell] + row
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# synthetic data

def generate_simdata(n: int = SIMDATA_DEFAULT_N, seed: int = 0) -> Dataset:
    """Three standard-normal inputs and Y = X1^2 - 0.5 X2 + 0.1 noise."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    gen = Rng(seed).split("simdata")
    values = np.empty((n, 4))
    for row in range(n):
        x1, x2, x3, eps = (gen.normal() for _ in range(4))
        values[row] = (x1, x2, x3, x1 * x1 - 0.5 * x2 + 0.1 * eps)
    return Dataset(
        column_names=("X1", "X2", "X3", "Y"),
        values=values,
        input_columns=(0, 1, 2),
        output_columns=(3,),
    )


def generate_seasonal_demand(n_days: int, seed: int = 0) -> Dataset:
    """Synthetic daily electricity-demand-style dataset.

    TEMP follows a yearly sinusoid (coldest mid-January), WD is a
    weekday factor in [0.4, 1.05] dipping on weekends, and DEM
    responds to temperature through a U-shaped term centred at 16
    degrees, so the demand-temperature sensitivity flips sign between
    cold and hot days:

        TEMP = 14 - 9 cos(2 pi (doy - 15) / 365.25) + 2 e1
        WD   = clip(base(weekday) + 0.02 e2, 0.4, 1.05)
        DEM  = (18 + 0.09 (TEMP - 16)^2) WD + 0.8 e3

    with e1, e2, e3 independent standard normals.
    """
    if n_days < 14:
        raise ValidationError("n_days must be >= 14")
    gen = Rng(seed).split("seasonal-demand")
    weekday_base = (0.98, 1.0, 1.0, 1.0, 0.96, 0.62, 0.45)  # Mon..Sun
    values = np.empty((n_days, 3))
    stamps = []
    ordinal0 = SEASONAL_START.toordinal()
    for t in range(n_days):
        day = date.fromordinal(ordinal0 + t)
        doy = day.timetuple().tm_yday
        temp = 14.0 - 9.0 * math.cos(2.0 * math.pi * (doy - 15) / 365.25)
        temp += 2.0 * gen.normal()
        wd = weekday_base[day.weekday()] + 0.02 * gen.normal()
        wd = min(max(wd, 0.4), 1.05)
        dem = (18.0 + 0.09 * (temp - 16.0) ** 2) * wd + 0.8 * gen.normal()
        values[t] = (temp, wd, dem)
        stamps.append(datetime(day.year, day.month, day.day))
    return Dataset(
        column_names=("TEMP", "WD", "DEM"),
        values=values,
        input_columns=(0, 1),
        output_columns=(2,),
        timestamp=tuple(stamps),
    )


def load_iris_fixture() -> Dataset:
    """The bundled 150-row iris dataset with one-hot species outputs."""
    raw = resources.files("mlpsens").joinpath("data/iris.csv").read_bytes()
    return load_dataset(
        raw,
        input_columns=["Sepal.Length", "Sepal.Width", "Petal.Length", "Petal.Width"],
        output_columns=["setosa", "versicolor", "virginica"],
    )


# ---------------------------------------------------------------------------
# result export

def _summary_rows(
    summary: SensitivitySummary, rows: dict[str, MeasureRow]
) -> list[tuple[str, float, float, float]]:
    return [
        (name, rows[name].mean, rows[name].sd, rows[name].mean_sq)
        for name in summary.input_names
    ]


def _table_bytes(rows: list[tuple[str, float, float, float]], fmt: str) -> bytes:
    header = ("varNames", "mean", "std", "meanSensSQ")
    if fmt == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for name, mean, sd, sq in rows:
            writer.writerow([name, repr(mean), repr(sd), repr(sq)])
        return buf.getvalue().encode("utf-8")
    if fmt == "text":
        cells = [list(header)]
        for name, mean, sd, sq in rows:
            cells.append([name, f"{mean:.9g}", f"{sd:.9g}", f"{sq:.9g}"])
        widths = [max(len(r[c]) for r in cells) for c in range(4)]
        lines = []
        for r in cells:
            lines.append(
                r[0].ljust(widths[0])
                + "".join("  " + r[c].rjust(widths[c]) for c in range(1, 4))
            )
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValidationError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def export_summary(summary: SensitivitySummary, fmt: str = "csv") -> dict[str, bytes]:
    """One table per output keyed by '_<output>'; combined rows, when
    present, under the empty key (unsuffixed file)."""
    if fmt not in FORMATS:
        raise ValidationError(
            f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}"
        )
    out: dict[str, bytes] = {}
    for output in summary.output_names:
        rows = {i: summary.per_output[(i, output)] for i in summary.input_names}
        out[f"_{output}"] = _table_bytes(_summary_rows(summary, rows), fmt)
    if summary.combined is not None:
        out[""] = _table_bytes(_summary_rows(summary, summary.combined), fmt)
    return out


def export_tensor(tensor: SensitivityTensor, fmt: str = "csv") -> bytes:
    """Long-form sample,input,output,value rows (sample-major order)."""
    if fmt not in FORMATS:
        raise ValidationError(
            f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}"
        )
    rows = []
    for n in range(tensor.n_samples):
        for i, iname in enumerate(tensor.input_names):
            for k, kname in enumerate(tensor.output_names):
                rows.append((n, iname, kname, tensor.values[n, i, k]))
    if fmt == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("sample", "input", "output", "value"))
        for n, iname, kname, value in rows:
            writer.writerow([n, iname, kname, repr(float(value))])
        return buf.getvalue().encode("utf-8")
    lines = ["sample  input  output  value"]
    for n, iname, kname, value in rows:
        lines.append(f"{n}  {iname}  {kname}  {float(value):.9g}")
    return ("\n".join(lines) + "\n").encode("utf-8")
