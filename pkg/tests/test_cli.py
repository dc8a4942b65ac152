"""CLI subcommands: workflows, exit codes, determinism, atomicity."""

import os
import xml.etree.ElementTree as ET

import pytest

from mlpsens import (
    activation,
    apply_scaler,
    fit_scaler,
    init_weights,
    load_iris_fixture,
    save_model,
    train,
    TrainConfig,
)
from mlpsens.cli import main
from mlpsens.dataio import write_dataset_csv


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Generated data plus a small trained model, shared by the tests."""
    root = tmp_path_factory.mktemp("cli")
    data_path = root / "sim.csv"
    model_path = root / "model.json"
    assert main(["gen-data", "--kind", "simdata", "--n", "300", "--seed", "3",
                 "--out", str(data_path)]) == 0
    assert main([
        "train", "--data", str(data_path),
        "--inputs", "X1,X2,X3", "--outputs", "Y",
        "--hidden", "10", "--epochs", "500", "--lr", "0.3", "--seed", "3",
        "--out", str(model_path),
    ]) == 0
    return root


class TestGenData:
    def test_seasonal_has_date_column(self, tmp_path):
        out = tmp_path / "demand.csv"
        assert main(["gen-data", "--kind", "seasonal", "--days", "60",
                     "--seed", "1", "--out", str(out)]) == 0
        header = out.read_text().splitlines()[0]
        assert header == "DATE,TEMP,WD,DEM"

    def test_deterministic_per_seed(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["gen-data", "--kind", "simdata", "--n", "50",
                         "--seed", "7", "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestTrain:
    def test_writes_model_and_report(self, workdir):
        assert (workdir / "model.json").exists()
        report = (workdir / "model.json.train.txt").read_text()
        assert "final_mse:" in report and "loss_history:" in report

    def test_missing_dataset_is_io_error(self, tmp_path):
        out = tmp_path / "m.json"
        code = main(["train", "--data", str(tmp_path / "nope.csv"),
                     "--inputs", "X1", "--outputs", "Y", "--out", str(out)])
        assert code == 3
        assert not out.exists()

    def test_width_mismatch_is_validation_error(self, workdir, tmp_path):
        out = tmp_path / "m.json"
        code = main(["train", "--data", str(workdir / "sim.csv"),
                     "--inputs", "X1,X2,X3,X9", "--outputs", "Y",
                     "--out", str(out)])
        assert code == 2
        assert not out.exists()

    def test_divergence_exit_code(self, workdir, tmp_path):
        out = tmp_path / "m.json"
        code = main(["train", "--data", str(workdir / "sim.csv"),
                     "--inputs", "X1,X2,X3", "--outputs", "Y",
                     "--hidden", "4", "--epochs", "2000", "--lr", "1e3",
                     "--seed", "0", "--out", str(out)])
        assert code == 4
        assert not out.exists()


class TestAnalyze:
    def test_default_summary_rows(self, workdir, tmp_path):
        out_dir = tmp_path / "res"
        assert main(["analyze", "--model", str(workdir / "model.json"),
                     "--data", str(workdir / "sim.csv"),
                     "--out-dir", str(out_dir)]) == 0
        lines = (out_dir / "summary_Y.csv").read_text().strip().splitlines()
        assert lines[0] == "varNames,mean,std,meanSensSQ"
        assert [l.split(",")[0] for l in lines[1:]] == ["X1", "X2", "X3"]

    def test_raw_tensor_row_count(self, workdir, tmp_path):
        out_dir = tmp_path / "res"
        assert main(["analyze", "--model", str(workdir / "model.json"),
                     "--data", str(workdir / "sim.csv"), "--raw",
                     "--out-dir", str(out_dir)]) == 0
        lines = (out_dir / "sensitivities_raw.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 300 * 3 * 1

    def test_combine_writes_unsuffixed_summary(self, workdir, tmp_path):
        out_dir = tmp_path / "res"
        assert main(["analyze", "--model", str(workdir / "model.json"),
                     "--data", str(workdir / "sim.csv"), "--combine",
                     "--out-dir", str(out_dir)]) == 0
        assert (out_dir / "summary.csv").exists()
        assert (out_dir / "summary_Y.csv").exists()

    def test_missing_input_columns_listed(self, workdir, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("X1,Y\n1.0,2.0\n")
        code = main(["analyze", "--model", str(workdir / "model.json"),
                     "--data", str(bad), "--out-dir", str(tmp_path / "res")])
        assert code == 2

    def test_unknown_output_name(self, workdir, tmp_path):
        code = main(["analyze", "--model", str(workdir / "model.json"),
                     "--data", str(workdir / "sim.csv"),
                     "--output-name", "Z", "--out-dir", str(tmp_path / "res")])
        assert code == 2

    def test_iris_model_three_per_output_summaries(self, tmp_path):
        data = load_iris_fixture()
        scaled = apply_scaler(data, fit_scaler(data, data.input_columns))
        net = init_weights(
            [4, 5, 3], [activation("sigmoid"), activation("softmax")], seed=0,
            input_names=list(data.input_names), output_names=list(data.output_names),
        )
        trained, _ = train(net, scaled, TrainConfig(
            max_epochs=300, learning_rate=0.5, loss="cross_entropy", seed=0))
        model_path = tmp_path / "iris.json"
        data_path = tmp_path / "iris.csv"
        model_path.write_bytes(save_model(trained))
        data_path.write_bytes(write_dataset_csv(scaled))
        out_dir = tmp_path / "res"
        assert main(["analyze", "--model", str(model_path),
                     "--data", str(data_path), "--out-dir", str(out_dir)]) == 0
        assert sorted(p.name for p in out_dir.iterdir()) == [
            "summary_setosa.csv", "summary_versicolor.csv", "summary_virginica.csv",
        ]


class TestPlot:
    def test_sensitivity_kind_writes_three_svgs(self, workdir, tmp_path):
        out_dir = tmp_path / "figs"
        assert main(["plot", "--model", str(workdir / "model.json"),
                     "--data", str(workdir / "sim.csv"),
                     "--kind", "sensitivity", "--out-dir", str(out_dir)]) == 0
        files = sorted(p.name for p in out_dir.iterdir())
        assert files == ["sensitivity_bars.svg", "sensitivity_density.svg",
                         "sensitivity_label.svg"]
        for name in files:
            ET.fromstring((out_dir / name).read_text())

    def test_feature_kind(self, workdir, tmp_path):
        out_dir = tmp_path / "figs"
        assert main(["plot", "--model", str(workdir / "model.json"),
                     "--data", str(workdir / "sim.csv"),
                     "--kind", "feature", "--data-sidecar",
                     "--out-dir", str(out_dir)]) == 0
        assert (out_dir / "sensitivity_features.svg").exists()
        assert (out_dir / "sensitivity_features.csv").exists()

    def test_time_kind_requires_date_column(self, workdir, tmp_path):
        code = main(["plot", "--model", str(workdir / "model.json"),
                     "--data", str(workdir / "sim.csv"),
                     "--kind", "time", "--out-dir", str(tmp_path / "figs")])
        assert code == 2

    def test_time_kind_faceted_on_seasonal_data(self, tmp_path):
        demand = tmp_path / "demand.csv"
        assert main(["gen-data", "--kind", "seasonal", "--days", "730",
                     "--seed", "2", "--out", str(demand)]) == 0
        model = tmp_path / "m.json"
        net = init_weights(
            [2, 4, 1], [activation("sigmoid"), activation("linear")], seed=1,
            input_names=["TEMP", "WD"], output_names=["DEM"],
        )
        model.write_bytes(save_model(net))
        out_dir = tmp_path / "figs"
        assert main(["plot", "--model", str(model), "--data", str(demand),
                     "--kind", "time", "--date-column", "DATE", "--facet",
                     "--out-dir", str(out_dir)]) == 0
        root = ET.fromstring((out_dir / "sensitivity_time.svg").read_text())
        assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 2


class TestReport:
    def test_contains_tables_ranking_and_baselines(self, workdir, tmp_path):
        out = tmp_path / "report.txt"
        assert main(["report", "--model", str(workdir / "model.json"),
                     "--data", str(workdir / "sim.csv"), "--out", str(out)]) == 0
        text = out.read_text()
        assert "varNames" in text
        assert "Input ranking" in text
        assert "Garson importance" in text
        assert "Olden importance" in text

    def test_regeneration_is_byte_identical(self, workdir, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for out in (a, b):
            assert main(["report", "--model", str(workdir / "model.json"),
                         "--data", str(workdir / "sim.csv"), "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_deep_model_marks_baselines_unsupported(self, workdir, tmp_path):
        net = init_weights(
            [3, 4, 4, 1],
            [activation("tanh"), activation("tanh"), activation("linear")],
            seed=0, input_names=["X1", "X2", "X3"], output_names=["Y"],
        )
        model = tmp_path / "deep.json"
        model.write_bytes(save_model(net))
        out = tmp_path / "report.txt"
        assert main(["report", "--model", str(model),
                     "--data", str(workdir / "sim.csv"), "--out", str(out)]) == 0
        assert "unsupported structure" in out.read_text()

    def test_no_partial_files_on_bad_model(self, workdir, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out = tmp_path / "report.txt"
        assert main(["report", "--model", str(bad),
                     "--data", str(workdir / "sim.csv"), "--out", str(out)]) == 2
        assert not out.exists()
        assert not [p for p in tmp_path.iterdir() if p.name.startswith(".mlpsens-")]


class TestAtomicity:
    def test_no_temp_files_left_behind(self, workdir):
        leftovers = [p for p in os.listdir(workdir) if p.startswith(".mlpsens-")]
        assert leftovers == []
