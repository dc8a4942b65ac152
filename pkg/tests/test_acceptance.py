"""Acceptance suite.

One test per acceptance criterion; each prints a single pass/fail line
(visible with `pytest -s` or in the captured output) and enforces the
stated tolerance and runtime budget.
"""

import time

import numpy as np

from mlpsens import (
    SensitivityTensor,
    TrainConfig,
    activation,
    apply_scaler,
    fit_scaler,
    flatten_network,
    garson,
    generate_simdata,
    init_weights,
    load_iris_fixture,
    load_model,
    network_from_flat,
    olden,
    predict,
    rank_inputs,
    save_model,
    sensitivities,
    summarize,
    train,
)
from mlpsens.cli import main as cli_main
from mlpsens.measures import MeasureRow, SensitivitySummary, combine
from mlpsens.plots import kde
from mlpsens.training import accuracy, loss_and_gradients

SMOOTH_HIDDEN = ("sigmoid", "tanh", "softplus", "arctan", "linear")


def _verdict(num: int, ok: bool, elapsed: float, limit: float, label: str):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    print(f"[acceptance {num}] {status} ({elapsed:.2f}s / limit {limit:.0f}s): {label}")
    assert ok, f"criterion {num} failed: {label}"
    assert elapsed < limit, f"criterion {num} over budget: {elapsed:.2f}s >= {limit}s"


def _random_network(rng, out_kind=None):
    depth = int(rng.integers(2, 5))
    structure = [int(rng.integers(1, 9)) for _ in range(depth)]
    acts = [activation(rng.choice(SMOOTH_HIDDEN)) for _ in structure[1:-1]]
    if out_kind is None:
        out_kind = "softmax" if (structure[-1] > 1 and rng.random() < 0.3) else "linear"
    acts.append(activation(out_kind))
    count = sum((p + 1) * n for p, n in zip(structure, structure[1:]))
    return network_from_flat(structure, rng.normal(scale=0.8, size=count), acts)


def test_criterion_1_gradient_oracle():
    """Analytic sensitivities vs central finite differences."""
    start = time.perf_counter()
    rng = np.random.default_rng(1001)
    h = 1e-5
    worst = 0.0
    for _ in range(50):
        net = _random_network(rng)
        n_in = net.n_inputs
        xs = rng.normal(size=(20, n_in))
        tensor = sensitivities(net, xs)
        for n in range(20):
            numeric = np.empty((n_in, net.n_outputs))
            for i in range(n_in):
                xp, xm = xs[n].copy(), xs[n].copy()
                xp[i] += h
                xm[i] -= h
                numeric[i] = (predict(net, xp[None])[0] - predict(net, xm[None])[0]) / (2 * h)
            err = np.abs(tensor.values[n] - numeric)
            bound = np.maximum(1e-5 * np.abs(numeric), 1e-7)
            worst = max(worst, float((err / bound).max()))
    elapsed = time.perf_counter() - start
    _verdict(1, worst <= 1.0, elapsed, 10.0,
             f"50 networks x 20 samples, worst err/bound ratio {worst:.3f}")


def test_criterion_2_simdata_reproduction():
    """Quadratic synthetic experiment: train 3-10-1 and check the
    sensitivity table against the published tolerance bands."""
    start = time.perf_counter()
    wins = 0
    for seed in range(10):
        data = generate_simdata(1500, seed=seed)
        net = init_weights(
            [3, 10, 1], [activation("sigmoid"), activation("linear")],
            seed=seed, init_scale=1.0,
            input_names=list(data.input_names), output_names=list(data.output_names),
        )
        trained, _ = train(
            net, data,
            TrainConfig(max_epochs=2000, learning_rate=0.3, seed=seed),
        )
        summary = summarize(sensitivities(trained, data.inputs()))
        x1 = summary.row("X1", "Y")
        x2 = summary.row("X2", "Y")
        x3 = summary.row("X3", "Y")
        ok = (
            -0.55 <= x2.mean <= -0.45
            and x2.sd < 0.15
            and abs(x1.mean) < 0.15
            and 1.5 <= x1.sd <= 2.4
            and x3.mean_sq < 0.02
            and rank_inputs(summary) == ["X1", "X2", "X3"]
        )
        wins += ok
    elapsed = time.perf_counter() - start
    _verdict(2, wins >= 8, elapsed, 120.0,
             f"{wins}/10 seeds inside tolerance bands")


def test_criterion_3_measure_identities():
    """Moment identity, single-output combine identity, closed forms."""
    start = time.perf_counter()
    rng = np.random.default_rng(1003)
    ok = True
    for _ in range(20):
        n = int(rng.integers(2, 80))
        tensor = SensitivityTensor(
            rng.normal(size=(n, 3, 2)) * rng.uniform(0.1, 5.0),
            ("a", "b", "c"), ("u", "v"),
        )
        summary = summarize(tensor)
        for row in summary.per_output.values():
            expected = row.mean ** 2 + row.sd ** 2 * (n - 1) / n
            ok &= abs(row.mean_sq - expected) <= 1e-9 * max(abs(expected), 1e-300)
    # single output: combine is the identity
    tensor = SensitivityTensor(rng.normal(size=(30, 4, 1)), ("a", "b", "c", "d"), ("y",))
    summary = combine(summarize(tensor))
    for name in summary.input_names:
        per, comb = summary.row(name, "y"), summary.combined[name]
        ok &= (
            abs(per.mean - comb.mean) < 1e-15
            and abs(per.sd - comb.sd) < 1e-15
            and abs(per.mean_sq - comb.mean_sq) < 1e-15
        )
    # identical rows across outputs: closed forms of the combination
    m_, s_, q_ = -0.3, 0.8, 1.7
    summary = SensitivitySummary(
        input_names=("a",), output_names=("u", "v", "w"),
        per_output={("a", k): MeasureRow(m_, s_, q_) for k in ("u", "v", "w")},
        sample_count=10,
    )
    row = combine(summary).combined["a"]
    ok &= abs(row.mean - m_) < 1e-12
    ok &= abs(row.sd - s_) < 1e-12
    ok &= abs(row.mean_sq - 3.0 * q_) < 1e-12  # (3 sqrt(q))^2 / 3
    elapsed = time.perf_counter() - start
    _verdict(3, ok, elapsed, 1.0, "moment identity and combine closed forms")


def test_criterion_4_softmax_conservation_iris():
    """Iris classifier: class-probability sensitivities sum to zero and
    the petal variables carry the expected signs."""
    start = time.perf_counter()
    data = load_iris_fixture()
    scaled = apply_scaler(data, fit_scaler(data, data.input_columns))
    wins = 0
    for seed in range(10):
        net = init_weights(
            [4, 5, 3], [activation("sigmoid"), activation("softmax")],
            seed=seed, init_scale=1.0,
            input_names=list(data.input_names), output_names=list(data.output_names),
        )
        trained, _ = train(
            net, scaled,
            TrainConfig(max_epochs=2000, learning_rate=0.5, l2_decay=1e-4,
                        loss="cross_entropy", seed=seed),
        )
        tensor = sensitivities(trained, scaled.inputs())
        conserved = np.abs(tensor.values.sum(axis=2)).max() <= 1e-8
        summary = summarize(tensor)
        signs = (
            summary.row("Petal.Length", "virginica").mean > 0
            and summary.row("Petal.Width", "virginica").mean > 0
            and summary.row("Petal.Length", "setosa").mean < 0
            and summary.row("Petal.Width", "setosa").mean < 0
        )
        wins += accuracy(trained, scaled) >= 0.9 and conserved and signs
    elapsed = time.perf_counter() - start
    _verdict(4, wins >= 8, elapsed, 60.0,
             f"{wins}/10 seeds: >=90% accuracy, conservation, petal signs")


def test_criterion_5_baseline_equivalence():
    """Olden == sensitivities on linear nets; Garson sums to one."""
    start = time.perf_counter()
    rng = np.random.default_rng(1005)
    ok = True
    for _ in range(20):
        structure = [int(rng.integers(1, 6)), int(rng.integers(1, 6)),
                     int(rng.integers(1, 4))]
        count = sum((p + 1) * n for p, n in zip(structure, structure[1:]))
        net = network_from_flat(
            structure, rng.normal(size=count),
            [activation("linear"), activation("linear")],
        )
        tensor = sensitivities(net, rng.normal(size=(3, structure[0])))
        for k in range(structure[2]):
            imp = np.array(olden(net, k).values)
            ok &= np.all(np.abs(tensor.values[:, :, k] - imp) <= 1e-12)
        gar = np.array(garson(net, 0).values)
        ok &= abs(gar.sum() - 1.0) <= 1e-12 and np.all(gar >= 0)
    elapsed = time.perf_counter() - start
    _verdict(5, ok, elapsed, 1.0,
             "olden == linear-net sensitivities; garson sums to 1")


def test_criterion_6_trainer_gradient_check():
    """Backprop weight gradients vs finite differences, both losses."""
    start = time.perf_counter()
    rng = np.random.default_rng(1006)
    h = 1e-5
    ok = True
    for loss, out_kind in (("mse", "linear"), ("cross_entropy", "softmax")):
        for trial in range(5):
            net = init_weights(
                [2, 3, 2], [activation("tanh"), activation(out_kind)],
                seed=trial, init_scale=1.5,
            )
            x = rng.normal(size=(8, 2))
            if loss == "mse":
                t = rng.normal(size=(8, 2))
            else:
                t = np.eye(2)[rng.integers(0, 2, size=8)]
            _, grads = loss_and_gradients(net, x, t, loss, 0.01)
            analytic = np.concatenate([g.flatten(order="F") for g in grads])
            flat = flatten_network(net)
            acts = [l.activation for l in net.layers]
            numeric = np.empty_like(flat)
            for i in range(len(flat)):
                fp, fm = flat.copy(), flat.copy()
                fp[i] += h
                fm[i] -= h
                lp = loss_and_gradients(
                    network_from_flat([2, 3, 2], fp, acts), x, t, loss, 0.01)[0]
                lm = loss_and_gradients(
                    network_from_flat([2, 3, 2], fm, acts), x, t, loss, 0.01)[0]
                numeric[i] = (lp - lm) / (2 * h)
            rel = np.abs(analytic - numeric) / np.maximum(np.abs(numeric), 1e-8)
            ok &= bool(np.all(rel <= 1e-4))
    elapsed = time.perf_counter() - start
    _verdict(6, ok, elapsed, 5.0, "weight gradients match FD for mse and CE")


def test_criterion_7_determinism(tmp_path):
    """Byte-identical reports; exact model round-trips."""
    start = time.perf_counter()
    data_path = tmp_path / "sim.csv"
    model_path = tmp_path / "model.json"
    assert cli_main(["gen-data", "--kind", "simdata", "--n", "200", "--seed", "5",
                     "--out", str(data_path)]) == 0
    assert cli_main(["train", "--data", str(data_path),
                     "--inputs", "X1,X2,X3", "--outputs", "Y",
                     "--hidden", "6", "--epochs", "300", "--lr", "0.3",
                     "--seed", "5", "--out", str(model_path)]) == 0
    reports = []
    for name in ("r1.txt", "r2.txt"):
        out = tmp_path / name
        assert cli_main(["report", "--model", str(model_path),
                         "--data", str(data_path), "--out", str(out)]) == 0
        reports.append(out.read_bytes())
    ok = reports[0] == reports[1]

    rng = np.random.default_rng(1007)
    for _ in range(10):
        net = _random_network(rng)
        back = load_model(save_model(net))
        ok &= bool(np.array_equal(flatten_network(back), flatten_network(net)))
        ok &= save_model(back) == save_model(net)
    elapsed = time.perf_counter() - start
    _verdict(7, ok, elapsed, 10.0,
             "report bytes identical; save/load round-trips exact")


def test_criterion_8_kde_sanity():
    """Density integrates to one (trapezoid) on 100 random samples."""
    start = time.perf_counter()
    rng = np.random.default_rng(1008)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(20, 500))
        scale = rng.uniform(0.01, 100.0)
        values = rng.normal(size=n) * scale + rng.uniform(-50, 50)
        grid, density = kde(values)
        worst = max(worst, abs(float(np.trapezoid(density, grid)) - 1.0))
    elapsed = time.perf_counter() - start
    _verdict(8, worst <= 1e-3, elapsed, 1.0,
             f"100 samples, worst |integral - 1| = {worst:.2e}")
