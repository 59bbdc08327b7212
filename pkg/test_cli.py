"""
End-to-end runs of the command line tool (gen -> train -> verify -> report), in process.
"""
import json

import pandas as pd
import pytest

from datagen.dataset import Dataset
from engines.trainer import CSV_COLUMNS, RunReport
from engines.verification import SUMMARY_COLUMNS
from main import EXIT_ERROR, EXIT_OK, EXIT_USAGE, main


def _gen(path, *extra):
    return main(["gen", "-o", str(path), *extra])


@pytest.fixture
def regression_file(tmp_path):
    path = tmp_path / "reg.json"
    assert _gen(path, "--kind", "regression", "--n", "5", "--t", "50", "--noise", "0.1", "--seed", "42") == EXIT_OK
    return path


@pytest.fixture
def classification_file(tmp_path):
    path = tmp_path / "cls.json"
    assert _gen(path, "--kind", "classification", "--n", "2", "--t", "40", "--margin", "0.5", "--seed", "7") == EXIT_OK
    return path


class TestGen:

    def test_writes_dataset_with_meta(self, regression_file):
        data = Dataset.load(regression_file)
        assert (data.n, data.T) == (5, 50)
        assert data.meta.seed == 42 and data.meta.noise == 0.1
        assert data.truth.w.shape == (5,)

    def test_reruns_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert _gen(path, "--kind", "spiked", "--n", "4", "--t", "30", "--m", "1", "--seed", "3") == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_invalid_spiked_dimension(self, tmp_path):
        assert _gen(tmp_path / "s.json", "--kind", "spiked", "--n", "2", "--t", "10", "--m", "3") == EXIT_USAGE
        assert not (tmp_path / "s.json").exists()

    def test_unknown_flag(self, tmp_path):
        assert main(["gen", "--kind", "regression", "--bogus", "-o", str(tmp_path / "x.json")]) == EXIT_USAGE


class TestTrain:

    def test_zero_epochs(self, tmp_path, regression_file):
        out = tmp_path / "run.json"
        assert main(["train", "--model", "ridge", "--epochs", "0", "--data", str(regression_file),
                     "-o", str(out)]) == EXIT_OK
        report = RunReport.load(out)
        assert len(report.epochs) == 1
        assert report.final_state["w"] == [0.0] * 5
        header = out.with_suffix(".csv").read_bytes().split(b"\r\n")[0].decode()
        assert header == ",".join(CSV_COLUMNS)

    def test_classifier_on_regression_data(self, tmp_path, regression_file):
        assert main(["train", "--model", "svm", "--epochs", "1", "--data", str(regression_file),
                     "-o", str(tmp_path / "run.json")]) == EXIT_USAGE

    def test_missing_data_file(self, tmp_path):
        assert main(["train", "--model", "ridge", "--epochs", "1", "--data", str(tmp_path / "none.json"),
                     "-o", str(tmp_path / "run.json")]) == EXIT_ERROR

    def test_negative_epochs(self, tmp_path, regression_file):
        assert main(["train", "--model", "ridge", "--epochs", "-1", "--data", str(regression_file),
                     "-o", str(tmp_path / "run.json")]) == EXIT_USAGE

    def test_diverging_run_aborts(self, tmp_path):
        data = tmp_path / "pos.json"
        assert _gen(data, "--kind", "regression", "--n", "3", "--t", "10", "--positive-w") == EXIT_OK
        assert main(["train", "--model", "expgrad", "--epochs", "1", "--eta", "10000", "--data", str(data),
                     "-o", str(tmp_path / "run.json")]) == EXIT_ERROR

    def test_session_log(self, tmp_path, classification_file):
        logs = tmp_path / "logs"
        assert main(["train", "--model", "svm", "--epochs", "2", "--kappa", "0.2", "--data", str(classification_file),
                     "-o", str(tmp_path / "svm.json"), "--log-dir", str(logs)]) == EXIT_OK
        assert any(logs.iterdir())


class TestVerify:

    def _ridge_run(self, tmp_path, data):
        out = tmp_path / "ridge.json"
        assert main(["train", "--model", "ridge", "--epochs", "500", "--eta", "0.1", "--lambda", "0.1",
                     "--lambda-eff", "0.1", "--schedule", "inverse_time", "--decay", "0.02", "--dyn-step", "1",
                     "--data", str(data), "-o", str(out)]) == EXIT_OK
        return out

    def test_ridge_run_passes(self, tmp_path, regression_file):
        run = self._ridge_run(tmp_path, regression_file)
        checks_file = tmp_path / "checks.json"
        assert main(["verify", "--data", str(regression_file), "--report", str(run),
                     "-o", str(checks_file)]) == EXIT_OK
        result = json.loads(checks_file.read_text())
        assert result["passed"] is True
        statuses = {c["check"]: c["status"] for c in result["checks"]}
        assert statuses["oracle_distance"] == "PASS"
        assert statuses["primal_suboptimality"] == "INFO"

    def test_tampered_weights_fail(self, tmp_path, regression_file):
        run = self._ridge_run(tmp_path, regression_file)
        raw = json.loads(run.read_text())
        raw["final_state"]["w"] = [0.0] * 5
        run.write_text(json.dumps(raw))
        checks_file = tmp_path / "checks.json"
        assert main(["verify", "--data", str(regression_file), "--report", str(run),
                     "-o", str(checks_file)]) == EXIT_ERROR
        checks = {c["check"]: c for c in json.loads(checks_file.read_text())["checks"]}
        assert checks["oracle_distance"]["status"] == "FAIL"
        assert checks["oracle_distance"]["value"] == pytest.approx(1.0)

    def test_subspace_checks_without_planted_basis(self, tmp_path):
        data = tmp_path / "spiked.json"
        assert _gen(data, "--kind", "spiked", "--n", "6", "--t", "200", "--m", "2", "--seed", "3") == EXIT_OK
        raw = json.loads(data.read_text())
        raw["truth"] = None
        data.write_text(json.dumps(raw))

        run = tmp_path / "sm.json"
        assert main(["train", "--model", "sm", "--epochs", "2", "--eta", "0.02", "--data", str(data),
                     "-o", str(run)]) == EXIT_OK
        checks_file = tmp_path / "checks.json"
        main(["verify", "--data", str(data), "--report", str(run), "-o", str(checks_file)])
        statuses = {c["check"]: c["status"] for c in json.loads(checks_file.read_text())["checks"]}
        assert statuses["subspace_error"] in ("PASS", "FAIL")
        assert statuses["truth_subspace_error"] == "SKIPPED"
        assert statuses["lateral_stability"] == "PASS"

    def test_malformed_report(self, tmp_path, regression_file):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["verify", "--data", str(regression_file), "--report", str(bad)]) == EXIT_ERROR


class TestReport:

    @pytest.fixture
    def runs(self, tmp_path, regression_file, classification_file):
        svm, ridge = tmp_path / "svm.json", tmp_path / "ridge.json"
        assert main(["train", "--model", "svm", "--epochs", "3", "--kappa", "0.2",
                     "--data", str(classification_file), "-o", str(svm)]) == EXIT_OK
        assert main(["train", "--model", "ridge", "--epochs", "3", "--lambda-eff", "0.1",
                     "--data", str(regression_file), "-o", str(ridge)]) == EXIT_OK
        return svm, ridge

    def test_single_run(self, tmp_path, runs):
        out = tmp_path / "summary.csv"
        assert main(["report", str(runs[0]), "-o", str(out)]) == EXIT_OK
        lines = out.read_bytes().split(b"\r\n")
        assert lines[0].decode() == ",".join(SUMMARY_COLUMNS)
        assert lines[1].startswith(b"svm,")
        assert lines[2] == b""

    def test_rows_sorted_and_reruns_identical(self, tmp_path, runs):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert main(["report", *map(str, runs), "-o", str(out)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        rows = json.loads(a.read_text())["runs"]
        assert [row["model"] for row in rows] == ["ridge", "svm"]
        assert len(rows[0]["update_norm_trajectory"]) == 3

    def test_malformed_input(self, tmp_path, runs):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"model": "ridge"}))
        assert main(["report", str(runs[0]), str(bad), "-o", str(tmp_path / "out.csv")]) == EXIT_ERROR

    def test_relative_update_trajectories(self, tmp_path, regression_file):
        positive = tmp_path / "pos.json"
        assert _gen(positive, "--kind", "regression", "--n", "5", "--t", "50", "--noise", "0", "--seed", "11",
                    "--positive-w") == EXIT_OK
        ridge, expgrad = tmp_path / "ridge.json", tmp_path / "expgrad.json"
        assert main(["train", "--model", "ridge", "--epochs", "3", "--lambda-eff", "0.1",
                     "--data", str(regression_file), "-o", str(ridge)]) == EXIT_OK
        assert main(["train", "--model", "expgrad", "--epochs", "3", "--eta", "0.03", "--dyn-step", "1",
                     "--data", str(positive), "-o", str(expgrad)]) == EXIT_OK

        summary_json, summary_csv = tmp_path / "summary.json", tmp_path / "summary.csv"
        assert main(["report", str(ridge), str(expgrad), "-o", str(summary_json)]) == EXIT_OK
        assert main(["report", str(ridge), str(expgrad), "-o", str(summary_csv)]) == EXIT_OK

        rows = json.loads(summary_json.read_text())["runs"]
        assert [row["model"] for row in rows] == ["expgrad", "ridge"]
        for row, path in zip(rows, (expgrad, ridge)):
            expected = [e.mean_relative_update for e in RunReport.load(path).epochs[1:]]
            assert row["relative_update_trajectory"] == pytest.approx(expected)
            assert len(expected) == 3 and all(v > 0.0 for v in expected)

        table = pd.read_csv(summary_csv, dtype=str, keep_default_na=False)
        assert list(table.columns) == SUMMARY_COLUMNS
        for row, cell in zip(rows, table["relative_update_trajectory"]):
            assert [float(v) for v in cell.split(";")] == row["relative_update_trajectory"]

    def test_seeds_sort_numerically(self, tmp_path, regression_file):
        paths = []
        for seed in ("10", "9"):
            path = tmp_path / f"ridge_{seed}.json"
            assert main(["train", "--model", "ridge", "--epochs", "1", "--seed", seed,
                         "--data", str(regression_file), "-o", str(path)]) == EXIT_OK
            paths.append(str(path))
        out = tmp_path / "summary.json"
        assert main(["report", *paths, "-o", str(out)]) == EXIT_OK
        assert [row["seed"] for row in json.loads(out.read_text())["runs"]] == [9, 10]
