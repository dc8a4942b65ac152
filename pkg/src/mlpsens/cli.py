"""Command-line interface.

Subcommands cover the full workflow: generate synthetic data, train a
model, compute sensitivity measures, render plots and produce a
combined report. Exit codes are stable for scripting:

    0  success
    2  validation error (bad flags, shapes, names, malformed files)
    3  I/O error
    4  training divergence
    5  unsupported network structure (importance baselines)

Every output file is written to a temporary sibling and renamed into
place, so failed runs leave no partial files.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import baselines, dataio, jacobian, measures, plots, svg, training
from .errors import (
    DivergenceError,
    MlpSensError,
    UnsupportedStructureError,
    ValidationError,
)
from .model import Dataset, NetworkSpec, activation

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_DIVERGENCE = 4
EXIT_UNSUPPORTED = 5


def _write_atomic(path: str, payload: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mlpsens-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _parse_names(raw: str) -> list[str]:
    names = [n.strip() for n in raw.split(",") if n.strip()]
    if not names:
        raise ValidationError(f"empty name list {raw!r}")
    return names


def _parse_activation(raw: str):
    """'kind' or 'kind:param', e.g. 'elu:0.8'."""
    if ":" in raw:
        kind, param = raw.split(":", 1)
        try:
            return activation(kind.strip(), float(param))
        except ValueError:
            raise ValidationError(f"bad activation parameter in {raw!r}") from None
    return activation(raw.strip())


def _load_model_file(path: str) -> NetworkSpec:
    return dataio.load_model(_read_bytes(path))


def _load_inputs_for(model: NetworkSpec, path: str, timestamp: str | None = None) -> Dataset:
    return dataio.load_dataset(
        _read_bytes(path),
        input_columns=list(model.input_names),
        output_columns=[],
        timestamp_column=timestamp,
    )


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen_data(args) -> int:
    if args.kind == "simdata":
        data = dataio.generate_simdata(args.n, seed=args.seed)
    else:
        data = dataio.generate_seasonal_demand(args.days, seed=args.seed)
    _write_atomic(args.out, dataio.write_dataset_csv(data))
    print(f"wrote {args.out} ({data.n_samples} rows)")
    return EXIT_OK


def cmd_train(args) -> int:
    input_names = _parse_names(args.inputs)
    output_names = _parse_names(args.outputs)
    data = dataio.load_dataset(
        _read_bytes(args.data),
        input_columns=input_names,
        output_columns=output_names,
    )
    hidden = [int(w) for w in args.hidden.split(",") if w.strip()]
    structure = [len(input_names)] + hidden + [len(output_names)]
    acts = [_parse_activation(args.hidden_activation)] * len(hidden)
    acts.append(_parse_activation(args.output_activation))
    config = training.TrainConfig(
        max_epochs=args.epochs,
        learning_rate=args.lr,
        l2_decay=args.decay,
        loss=args.loss,
        seed=args.seed,
        init_scale=args.init_scale,
    )
    network = training.init_weights(
        structure, acts, seed=args.seed, init_scale=args.init_scale,
        input_names=input_names, output_names=output_names,
    )
    trained, report = training.train(network, data, config)

    lines = [
        f"epochs_run: {report.epochs_run}",
        f"final_objective: {report.final_loss!r}",
        f"final_mse: {training.mse(trained, data)!r}",
    ]
    if args.loss == "cross_entropy":
        lines.append(f"final_accuracy: {training.accuracy(trained, data)!r}")
    lines.append("loss_history:")
    lines.extend(repr(v) for v in report.loss_history)
    report_path = args.report or args.out + ".train.txt"
    _write_atomic(args.out, dataio.save_model(trained))
    _write_atomic(report_path, ("\n".join(lines) + "\n").encode("utf-8"))
    print(f"wrote {args.out}; final mse {training.mse(trained, data):.6g}")
    return EXIT_OK


def _select_output(tensor: jacobian.SensitivityTensor, name: str | None):
    if name is None:
        return tensor
    if name not in tensor.output_names:
        raise ValidationError(
            f"unknown output {name!r}; model outputs: "
            f"{', '.join(tensor.output_names)}"
        )
    k = tensor.output_names.index(name)
    return jacobian.SensitivityTensor(
        tensor.values[:, :, k:k + 1], tensor.input_names, (name,)
    )


def cmd_analyze(args) -> int:
    model = _load_model_file(args.model)
    data = _load_inputs_for(model, args.data)
    tensor = _select_output(
        jacobian.sensitivities(model, data.inputs()), args.output_name
    )
    summary = measures.summarize(tensor)
    if args.combine:
        summary = measures.combine(summary)

    ext = "csv" if args.format == "csv" else "txt"
    outputs: dict[str, bytes] = {}
    for suffix, payload in dataio.export_summary(summary, args.format).items():
        if suffix == "" and not args.combine:
            continue
        outputs[os.path.join(args.out_dir, f"summary{suffix}.{ext}")] = payload
    if args.raw:
        outputs[os.path.join(args.out_dir, f"sensitivities_raw.{ext}")] = (
            dataio.export_tensor(tensor, args.format)
        )
    for path, payload in outputs.items():
        _write_atomic(path, payload)
    for path in outputs:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_plot(args) -> int:
    model = _load_model_file(args.model)
    if args.kind == "time" and not args.date_column:
        raise ValidationError("time plots require --date-column")
    data = _load_inputs_for(
        model, args.data, timestamp=args.date_column if args.kind == "time" else None
    )
    tensor = jacobian.sensitivities(model, data.inputs())
    if args.output_name:
        tensor = _select_output(tensor, args.output_name)

    made: list[tuple[str, plots.PlotData]] = []
    if args.kind == "sensitivity":
        summary = measures.summarize(tensor)
        trio = plots.sensitivity_plots(summary, tensor)
        for stem, plot in zip(("label", "bars", "density"), trio):
            made.append((f"sensitivity_{stem}", plot))
    elif args.kind == "time":
        made.append(
            ("sensitivity_time",
             plots.time_plot(tensor, data.timestamp, facet=args.facet))
        )
    else:
        made.append(("sensitivity_features", plots.feature_plot(tensor, data)))

    for stem, plot in made:
        path = os.path.join(args.out_dir, f"{stem}.svg")
        _write_atomic(path, svg.render_svg(plot, args.width, args.height))
        print(f"wrote {path}")
        if args.data_sidecar:
            side = os.path.join(args.out_dir, f"{stem}.csv")
            _write_atomic(side, svg.plot_data_text(plot))
            print(f"wrote {side}")
    return EXIT_OK


def _report_text(model: NetworkSpec, data: Dataset) -> bytes:
    tensor = jacobian.sensitivities(model, data.inputs())
    summary = measures.combine(measures.summarize(tensor))
    parts: list[str] = []
    structure = "-".join(str(w) for w in model.structure)
    acts = ", ".join(l.activation.kind for l in model.layers)
    parts.append("Sensitivity report")
    parts.append("==================")
    parts.append(f"model: structure {structure}; activations {acts}")
    parts.append(f"dataset: {data.n_samples} samples")
    parts.append("")
    tables = dataio.export_summary(summary, "text")
    for name in model.output_names:
        parts.append(f"Sensitivity measures, output {name}:")
        parts.append(tables[f"_{name}"].decode("utf-8").rstrip("\n"))
        parts.append("")
    if len(model.output_names) > 1:
        parts.append("Combined whole-model measures:")
        parts.append(tables[""].decode("utf-8").rstrip("\n"))
        parts.append("")
    ranking = measures.rank_inputs(summary)
    parts.append("Input ranking by mean squared sensitivity:")
    for pos, name in enumerate(ranking, start=1):
        parts.append(f"{pos}. {name}")
    parts.append("")
    try:
        gar = baselines.garson(model, 0)
        old = baselines.olden(model, 0)
        for table in (gar, old):
            parts.append(
                f"{table.method.capitalize()} importance (output {table.output_name}):"
            )
            width = max(len(n) for n in table.input_names)
            for name, value in zip(table.input_names, table.values):
                parts.append(f"{name.ljust(width)}  {value:.9g}")
            parts.append("")
    except UnsupportedStructureError:
        parts.append("Importance baselines: unsupported structure "
                     "(needs exactly one hidden layer)")
        parts.append("")
    return ("\n".join(parts)).encode("utf-8")


def cmd_report(args) -> int:
    model = _load_model_file(args.model)
    data = _load_inputs_for(model, args.data)
    _write_atomic(args.out, _report_text(model, data))
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlpsens",
        description="Analytic sensitivity analysis for feed-forward MLPs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic dataset CSV")
    p.add_argument("--kind", choices=("simdata", "seasonal"), required=True)
    p.add_argument("--n", type=int, default=dataio.SIMDATA_DEFAULT_N,
                   help="rows for simdata")
    p.add_argument("--days", type=int, default=730, help="days for seasonal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train an MLP on a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--inputs", required=True, help="comma-separated input columns")
    p.add_argument("--outputs", required=True, help="comma-separated output columns")
    p.add_argument("--hidden", default="10", help="comma-separated hidden widths")
    p.add_argument("--hidden-activation", default="sigmoid",
                   help="activation kind, optionally kind:param")
    p.add_argument("--output-activation", default="linear")
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--lr", type=float, default=0.3)
    p.add_argument("--decay", type=float, default=0.0)
    p.add_argument("--loss", choices=training.LOSSES, default="mse")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init-scale", type=float, default=1.0)
    p.add_argument("--out", required=True, help="model file path")
    p.add_argument("--report", help="training report path (default <out>.train.txt)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("analyze", help="compute sensitivity measures")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--raw", action="store_true", help="also export the raw tensor")
    p.add_argument("--combine", action="store_true",
                   help="add whole-model combined measures")
    p.add_argument("--output-name", help="restrict analysis to one output")
    p.add_argument("--format", choices=dataio.FORMATS, default="csv")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plot", help="render diagnostic SVG plots")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--kind", choices=("sensitivity", "time", "feature"), required=True)
    p.add_argument("--date-column", help="timestamp column for time plots")
    p.add_argument("--facet", action="store_true")
    p.add_argument("--output-name", help="restrict plots to one output")
    p.add_argument("--data-sidecar", action="store_true",
                   help="write plot data CSV next to each SVG")
    p.add_argument("--width", type=float, default=720)
    p.add_argument("--height", type=float, default=480)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("report", help="write a combined text report")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except UnsupportedStructureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ValidationError, MlpSensError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
