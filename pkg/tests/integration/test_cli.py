"""Integration tests for the scsvm command line."""
import json

import numpy as np
import pytest

from scsvm.cli import EXIT_ERROR, EXIT_NOT_CERTIFIED, EXIT_OK, EXIT_USAGE, main
from scsvm.services.artifacts import load_model, read_index_map, read_scores, read_trace
from scsvm.services.data_io import load_dataset, load_sign_mask, load_similarity


@pytest.fixture
def trained(toy_files, tmp_path):
    """Model and trace from an FW run on the bundled toy data."""
    model = tmp_path / "toy.json"
    code = main([
        "train",
        "--data", str(toy_files["toy.svm"]),
        "--signs", str(toy_files["toy_signs.txt"]),
        "--lambda", "0.1",
        "--epsilon", "1e-3",
        "--max-iter", "20000",
        "--model", str(model),
    ])
    assert code == EXIT_OK
    return model


class TestTrain:
    """Tests for the train command."""

    def test_fw_certifies(self, trained, capsys):
        """The trace ends with a gap below epsilon and the model keeps the signs."""
        trace = read_trace(trained.with_suffix(".trace.csv"))
        assert trace[0].iter == 0
        assert trace[-1].gap <= 1e-3
        record = load_model(trained)
        assert record.solver.value == "fw"
        assert record.certified
        assert record.weights[0] >= 0.0
        assert record.weights[2] <= 0.0
        assert record.lam == 0.1

    def test_pg_log_schedule(self, toy_files, tmp_path, capsys):
        """PG with 100 iterations writes 55 trace rows."""
        model = tmp_path / "pg.json"
        trace = tmp_path / "pg.csv"
        code = main([
            "train", "--data", str(toy_files["toy.svm"]), "--solver", "pg",
            "--max-iter", "100", "--lambda", "0.1", "--model", str(model), "--trace", str(trace),
        ])
        assert code == EXIT_OK
        rows = read_trace(trace)
        assert len(rows) == 55
        assert rows[-1].iter == 100
        assert "best P=" in capsys.readouterr().out

    def test_lambda_over_n(self, toy_files, tmp_path):
        """--lambda-over-n divides by the number of examples."""
        model = tmp_path / "m.json"
        code = main([
            "train", "--data", str(toy_files["toy.svm"]), "--lambda-over-n", "1.2",
            "--epsilon", "0.05", "--model", str(model),
        ])
        assert code == EXIT_OK
        assert load_model(model).lam == pytest.approx(0.1)

    def test_not_certified(self, toy_files, tmp_path, capsys):
        """A budget too small for epsilon exits 3 but still writes the model."""
        model = tmp_path / "m.json"
        code = main([
            "train", "--data", str(toy_files["toy.svm"]), "--lambda", "0.001",
            "--epsilon", "1e-9", "--max-iter", "2", "--model", str(model),
        ])
        assert code == EXIT_NOT_CERTIFIED
        assert "not certified" in capsys.readouterr().err
        assert model.exists()

    def test_missing_signs_file(self, toy_files, tmp_path, capsys):
        """A missing sign file fails with its path in the message."""
        missing = tmp_path / "nope_signs.txt"
        code = main([
            "train", "--data", str(toy_files["toy.svm"]), "--signs", str(missing),
            "--lambda", "0.1", "--model", str(tmp_path / "m.json"),
        ])
        assert code == EXIT_ERROR
        assert str(missing) in capsys.readouterr().err

    def test_usage_error(self, capsys):
        """Missing required options exit 2."""
        assert main(["train", "--data", "x.svm"]) == EXIT_USAGE

    def test_help(self, capsys):
        """--help exits 0."""
        assert main(["--help"]) == EXIT_OK

    def test_reproducible_without_timing(self, toy_files, tmp_path):
        """Two runs with --no-timing give byte-identical model and trace files."""
        outputs = []
        for name in ("a", "b"):
            model = tmp_path / f"{name}.json"
            trace = tmp_path / f"{name}.csv"
            main([
                "train", "--data", str(toy_files["toy.svm"]), "--signs",
                str(toy_files["toy_signs.txt"]), "--lambda", "0.1", "--model", str(model),
                "--trace", str(trace), "--no-timing",
            ])
            outputs.append((model.read_bytes(), trace.read_bytes()))
        assert outputs[0] == outputs[1]


class TestPredict:
    """Tests for the predict command."""

    def test_scores_and_auc(self, trained, toy_files, tmp_path, capsys):
        """Scores equal <weights, x> bit for bit and the AUC line follows."""
        scores_path = tmp_path / "toy.scores"
        code = main([
            "predict", "--model", str(trained), "--data", str(toy_files["toy.svm"]),
            "--scores", str(scores_path), "--auc",
        ])
        assert code == EXIT_OK
        scores, auc = read_scores(scores_path)
        raw = load_dataset(toy_files["toy.svm"], d=4)
        weights = np.asarray(load_model(trained).weights)
        np.testing.assert_array_equal(scores, raw.features @ weights)
        assert 0.5 < auc <= 1.0

    def test_zero_model_scores_zero(self, toy_files, tmp_path, capsys):
        """A model with w = 0 scores every example 0."""
        model = tmp_path / "zero.json"
        model.write_text(json.dumps({
            "weights": [0.0, 0.0, 0.0, 0.0],
            "sigma": [0, 0, 0, 0],
            "negated": [0, 0, 0, 0],
            "lambda": 1.0,
            "solver": "fw",
            "iterations": 0,
            "dataset_fingerprint": "none",
        }), encoding="utf-8")
        code = main(["predict", "--model", str(model), "--data", str(toy_files["toy.svm"])])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.split()
        assert lines == ["0.0"] * 12

    def test_dimension_mismatch(self, trained, tmp_path, capsys):
        """Data wider than the model is rejected; .csv files load as dense."""
        wide = tmp_path / "wide.csv"
        wide.write_text("label,f0,f1,f2,f3,f4\n1,1,0,0,0,0\n", encoding="utf-8")
        code = main(["predict", "--model", str(trained), "--data", str(wide)])
        assert code == EXIT_ERROR


class TestPairwise:
    """Tests for the pairwise command."""

    def test_toy_matrix(self, toy_files, tmp_path, capsys):
        """Positives come first; the mask is '+' on them and '-' on the negatives."""
        data = tmp_path / "pw.svm"
        signs = tmp_path / "pw_signs.txt"
        code = main([
            "pairwise", "--similarity", str(toy_files["toy_similarity.csv"]),
            "--labels", str(toy_files["toy_labels.txt"]),
            "--data", str(data), "--signs", str(signs),
        ])
        assert code == EXIT_OK
        assert load_sign_mask(signs) == ({0, 1}, {2, 3})
        np.testing.assert_array_equal(read_index_map(tmp_path / "pw.index"), [1, 3, 0, 2])
        raw = load_dataset(data, d=4)
        np.testing.assert_array_equal(raw.labels, [1, 1, -1, -1])
        np.testing.assert_array_equal(raw.features[0], [1.0, 0.8, 0.2, 0.3])

    def test_pairwise_then_train(self, toy_files, tmp_path, capsys):
        """The written files train a model with the pairwise signs."""
        data = tmp_path / "pw.svm"
        signs = tmp_path / "pw_signs.txt"
        main([
            "pairwise", "--similarity", str(toy_files["toy_similarity.csv"]),
            "--labels", str(toy_files["toy_labels.txt"]),
            "--data", str(data), "--signs", str(signs),
        ])
        model = tmp_path / "pw.json"
        code = main([
            "train", "--data", str(data), "--signs", str(signs), "--lambda", "0.5",
            "--max-iter", "20000", "--model", str(model),
        ])
        assert code == EXIT_OK
        weights = load_model(model).weights
        assert all(w >= 0.0 for w in weights[:2])
        assert all(w <= 0.0 for w in weights[2:])

    def test_index_map_restores_order(self, toy_files, tmp_path, capsys):
        """Scores put back through the id map line up with the original sequences."""
        data = tmp_path / "pw.svm"
        signs = tmp_path / "pw_signs.txt"
        model = tmp_path / "pw.json"
        scores = tmp_path / "pw.scores"
        sim_path, labels_path = toy_files["toy_similarity.csv"], toy_files["toy_labels.txt"]
        main([
            "pairwise", "--similarity", str(sim_path), "--labels", str(labels_path),
            "--data", str(data), "--signs", str(signs),
        ])
        main(["train", "--data", str(data), "--signs", str(signs), "--lambda", "0.5",
              "--model", str(model)])
        assert main(["predict", "--model", str(model), "--data", str(data),
                     "--scores", str(scores)]) == EXIT_OK

        order = read_index_map(tmp_path / "pw.index")
        restored = np.empty(order.shape[0])
        restored[order] = read_scores(scores)[0]
        values = load_similarity(sim_path, labels_path).values
        weights = np.asarray(load_model(model).weights)
        np.testing.assert_allclose(restored, values[order, :].T @ weights, rtol=1e-12)

    def test_non_square(self, toy_files, tmp_path, capsys):
        """A non-square similarity matrix is rejected."""
        sim = tmp_path / "sim.csv"
        sim.write_text("1,0.5,0.2\n0.5,1,0.1\n", encoding="utf-8")
        labels = tmp_path / "labels.txt"
        labels.write_text("1\n-1\n", encoding="utf-8")
        code = main([
            "pairwise", "--similarity", str(sim), "--labels", str(labels),
            "--data", str(tmp_path / "pw.svm"), "--signs", str(tmp_path / "s.txt"),
        ])
        assert code == EXIT_ERROR
        assert "not square" in capsys.readouterr().err

    def test_single_class_labels(self, toy_files, tmp_path, capsys):
        """Single-class label files are rejected."""
        labels = tmp_path / "ones.txt"
        labels.write_text("1\n1\n1\n1\n", encoding="utf-8")
        code = main([
            "pairwise", "--similarity", str(toy_files["toy_similarity.csv"]),
            "--labels", str(labels), "--data", str(tmp_path / "pw.svm"),
            "--signs", str(tmp_path / "s.txt"),
        ])
        assert code == EXIT_ERROR
        assert "both classes" in capsys.readouterr().err


class TestEval:
    """Tests for the eval command."""

    def test_holdout(self, toy_files, tmp_path, capsys):
        """A single lambda skips cross-validation and writes the report and ROC."""
        report = tmp_path / "report.json"
        roc = tmp_path / "roc.csv"
        code = main([
            "eval", "--data", str(toy_files["toy.svm"]), "--signs", str(toy_files["toy_signs.txt"]),
            "--lambda", "0.1", "--report", str(report), "--roc", str(roc),
        ])
        assert code == EXIT_OK
        records = json.loads(report.read_text(encoding="utf-8"))
        assert records[0]["lambda"] == 0.1
        assert records[0]["n_pos"] + records[0]["n_neg"] == 6
        assert roc.read_text(encoding="utf-8").startswith("fpr,tpr\n0.0,0.0\n")
        assert capsys.readouterr().out.startswith("auc ")

    def test_similarity_comparison(self, toy_files, tmp_path, capsys):
        """The pairwise comparison prints both variants."""
        sim = tmp_path / "sim.csv"
        labels = tmp_path / "labels.txt"
        rng = np.random.default_rng(0)
        points = rng.standard_normal((16, 3)) + np.repeat([[1.0, 0, 0], [-1.0, 0, 0]], 8, axis=0)
        values = np.exp(-0.5 * np.sum((points[:, None] - points[None]) ** 2, axis=-1))
        sim.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in values) + "\n")
        labels.write_text("\n".join(["1"] * 8 + ["-1"] * 8) + "\n")
        code = main([
            "eval", "--similarity", str(sim), "--labels", str(labels), "--lambda", "0.1",
            "--repeats", "2",
        ])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "constrained: mean AUC" in out
        assert "unconstrained: mean AUC" in out

    def test_needs_input(self, capsys):
        """Neither --data nor --similarity is an error."""
        assert main(["eval"]) == EXIT_ERROR


class TestVerify:
    """Tests for the verify command."""

    def test_rate_bound_reported(self, capsys):
        """lambda=0.1, epsilon=0.01 prints the 1998-iteration bound."""
        code = main([
            "verify", "--check", "rate", "--lambda", "0.1", "--epsilon", "0.01", "--instances", "1",
        ])
        out = capsys.readouterr().out
        assert "bound 1998 iterations" in out
        assert code == EXIT_OK
        assert out.startswith("PASS rate")

    def test_seed_is_deterministic(self, capsys):
        """The same seed prints the same report."""
        argv = ["verify", "--check", "lmo", "--instances", "3", "--seed", "4"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_unknown_check(self, capsys):
        """Unknown check names are usage errors."""
        assert main(["verify", "--check", "everything"]) == EXIT_USAGE
