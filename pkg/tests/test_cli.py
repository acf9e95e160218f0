import numpy as np
import pytest

from skewbench.cli import main
from skewbench.config import ConfigError, load_config, parse_config_text
from skewbench.core import Dataset, ExampleKind, SkewbenchError
from skewbench.datagen import GenSpec, generate_imbalanced
from skewbench.io import (dataset_to_csv_text, read_dataset_csv,
                          write_dataset_csv)
from skewbench.plotting import scatter_svg


class TestCsvRoundTrip:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        ds = Dataset(rng.normal(size=(40, 3)) * 1e3,
                     rng.integers(0, 2, size=40),
                     kinds=rng.integers(0, 4, size=40).astype(np.uint8))
        path = tmp_path / "ds.csv"
        write_dataset_csv(ds, path)
        back = read_dataset_csv(path)
        assert np.array_equal(back.points, ds.points)  # 17 sig digits round-trip
        assert np.array_equal(back.labels, ds.labels)
        assert np.array_equal(back.kinds, ds.kinds)

    def test_round_trip_without_kinds(self, tmp_path):
        ds = Dataset(np.array([[0.1, 0.2], [1.0 / 3.0, 2.0 / 7.0]]), np.array([0, 1]))
        path = tmp_path / "d.csv"
        write_dataset_csv(ds, path)
        back = read_dataset_csv(path)
        assert back.kinds is None
        assert np.array_equal(back.points, ds.points)

    def test_header_and_tags(self):
        ds = Dataset(np.array([[1.5, 2.5]]), np.array([1]),
                     kinds=np.array([int(ExampleKind.BORDERLINE)], dtype=np.uint8))
        text = dataset_to_csv_text(ds)
        lines = text.splitlines()
        assert lines[0] == "f0,f1,label,kind"
        assert lines[1] == "1.5,2.5,1,borderline"

    def test_malformed_row_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f0,f1,label\n1.0,2.0,0\n3.0,oops,1\n")
        with pytest.raises(SkewbenchError, match="line 3"):
            read_dataset_csv(path)

    def test_wrong_field_count_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f0,f1,label\n1.0,2.0\n")
        with pytest.raises(SkewbenchError, match="line 2"):
            read_dataset_csv(path)

    def test_bad_kind_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f0,label,kind\n1.0,0,odd\n")
        with pytest.raises(SkewbenchError, match="line 2"):
            read_dataset_csv(path)


class TestConfigParsing:
    def test_basic_parse_with_comments(self):
        cfg = parse_config_text("# comment\ngen.n_samples = 400 # inline\n\n"
                                "gen.ratio = 79:21\n")
        assert cfg == {"gen.n_samples": "400", "gen.ratio": "79:21"}

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            parse_config_text("gen.bogus = 1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate key"):
            parse_config_text("gen.dims = 2\ngen.dims = 3\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="expected key = value"):
            parse_config_text("gen.dims 2\n")

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="not found"):
            load_config("/definitely/not/here.cfg")


class TestGenerateCommand:
    def test_prints_counts_and_writes_files(self, tmp_path, capsys):
        cfg = tmp_path / "gen.cfg"
        cfg.write_text("gen.n_samples = 400\ngen.ratio = 79:21\ngen.seed = 3\n")
        out = tmp_path / "data.csv"
        code = main(["generate", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        captured = capsys.readouterr().out
        assert "316 / 84, IR 3.8" in captured
        assert out.exists()
        sidecar = tmp_path / "data_centers.csv"
        assert sidecar.exists()
        assert sidecar.read_text().splitlines()[0] == "center_x0,center_x1,label,subcluster"
        ds = read_dataset_csv(out)
        assert ds.n == 400
        assert ds.kinds is not None

    def test_seed_repeat_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out1, out2):
            assert main(["generate", "--seed", "9", "--out", str(out)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert (tmp_path / "a_centers.csv").read_bytes() == \
            (tmp_path / "b_centers.csv").read_bytes()

    def test_invalid_fractions_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("gen.disturbance_ratio = 0.8\ngen.rare_fraction = 0.3\n"
                       "gen.safe_fraction = 0.3\n")
        code = main(["generate", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "must equal 1" in capsys.readouterr().err

    def test_infeasible_packing_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "packed.cfg"
        cfg.write_text("gen.box = 0,1\ngen.min_center_separation = 50\n")
        code = main(["generate", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])
        assert code == 1
        assert "center packing infeasible" in capsys.readouterr().err


class TestResampleCommand:
    @pytest.fixture()
    def dataset_csv(self, tmp_path):
        ds, _ = generate_imbalanced(GenSpec(n_samples=400, class_ratio=(79, 21),
                                            seed=5, minority_subclusters=2))
        path = tmp_path / "in.csv"
        write_dataset_csv(ds, path)
        return path

    def test_ncr_preserves_minority_count_in_block(self, dataset_csv, tmp_path, capsys):
        out = tmp_path / "out.csv"
        code = main(["resample", str(dataset_csv), "--method", "ncr",
                     "--out", str(out)])
        assert code == 0
        captured = capsys.readouterr().out
        blocks = captured.split("--- after ---")
        assert "Number of samples: 400" in blocks[0]
        assert "Number of Minority class sample: 84" in blocks[0]
        assert "Number of Minority class sample: 84" in blocks[1]
        assert "Imbalance Ratio : 3.8" in blocks[0]

    def test_ro_balances_and_reports(self, dataset_csv, tmp_path, capsys):
        out = tmp_path / "out.csv"
        assert main(["resample", str(dataset_csv), "--method", "ro", "--seed", "1",
                     "--out", str(out)]) == 0
        captured = capsys.readouterr().out
        after = captured.split("--- after ---")[1]
        assert "Number of samples: 632" in after
        assert "Imbalance Ratio : 1.0" in after
        assert read_dataset_csv(out).n == 632

    def test_ro_on_balanced_input_identity(self, tmp_path, capsys):
        ds = Dataset(np.arange(8.0).reshape(4, 2), np.array([0, 0, 1, 1]))
        src = tmp_path / "b.csv"
        write_dataset_csv(ds, src)
        out = tmp_path / "out.csv"
        assert main(["resample", str(src), "--method", "ro", "--out", str(out)]) == 0
        assert out.read_bytes() == src.read_bytes()

    def test_unknown_method_exit_2(self, dataset_csv, tmp_path, capsys):
        code = main(["resample", str(dataset_csv), "--method", "wild",
                     "--out", str(tmp_path / "o.csv")])
        assert code == 2
        err = capsys.readouterr().err
        for name in ("base", "ro", "co", "smote", "ncr", "sparsity"):
            assert name in err

    def test_malformed_csv_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("f0,label\nx,0\n")
        code = main(["resample", str(bad), "--method", "ro",
                     "--out", str(tmp_path / "o.csv")])
        assert code == 1
        assert "line 2" in capsys.readouterr().err


class TestEvalCommand:
    def test_eval_prints_metric_table(self, tmp_path, capsys):
        ds, _ = generate_imbalanced(GenSpec(n_samples=150, class_ratio=(4, 1),
                                            seed=2, minority_subclusters=2,
                                            center_box=(0.0, 12.0),
                                            min_center_separation=3.0))
        path = tmp_path / "d.csv"
        write_dataset_csv(ds, path)
        code = main(["eval", str(path), "--method", "base", "--method", "ncr",
                     "--classifier", "knn", "--folds", "3", "--seed", "4"])
        assert code == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out[0].startswith("method,classifier,sensitivity_mean")
        assert len(out) == 3
        assert out[1].startswith("base,knn,")
        assert out[2].startswith("ncr,knn,")


class TestExperimentCommand:
    def test_smoke_config_runs_and_writes(self, tmp_path, capsys):
        code = main(["experiment", "--config", "configs/smoke.cfg",
                     "--out", str(tmp_path / "run")])
        assert code == 0
        report = (tmp_path / "run" / "report.csv").read_text()
        lines = report.strip().splitlines()
        assert len(lines) == 1 + 2  # header + methods x classifiers
        assert (tmp_path / "run" / "pivots.txt").exists()

    def test_missing_config_exit_2(self, tmp_path, capsys):
        code = main(["experiment", "--out", str(tmp_path / "run")])
        assert code == 2
        assert "requires --config" in capsys.readouterr().err

    def test_cell_errors_warn_but_exit_0(self, tmp_path, capsys):
        # 15 samples at 5:1 leave 2 minority points, below folds=3: the cell
        # fails, the failure lands in the report, and the exit code stays 0.
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text("exp.sizes = 15\nexp.subclusters = 1\nexp.folds = 3\n"
                       "exp.repeats = 1\nexp.methods = base\n"
                       "exp.classifiers = knn\n")
        code = main(["experiment", "--config", str(cfg),
                     "--out", str(tmp_path / "run")])
        assert code == 0
        err = capsys.readouterr().err
        assert "warning" in err
        report = (tmp_path / "run" / "report.csv").read_text()
        assert "smaller than folds" in report

    def test_progress_lines_on_stderr(self, tmp_path, capsys):
        code = main(["experiment", "--config", "configs/smoke.cfg",
                     "--out", str(tmp_path / "run")])
        assert code == 0
        assert "cell 1/1 finished" in capsys.readouterr().err


class TestPlotCommand:
    def make_five_blob_csv(self, tmp_path):
        ds, _ = generate_imbalanced(GenSpec(
            n_samples=480, class_ratio=(5, 1), seed=21, minority_subclusters=4,
            majority_subclusters=1, sub_sigma=1.0, center_box=(0.0, 40.0),
            min_center_separation=8.0))
        path = tmp_path / "five.csv"
        write_dataset_csv(ds, path)
        return path

    def test_show_centers_draws_five_crosses(self, tmp_path):
        path = self.make_five_blob_csv(tmp_path)
        out = tmp_path / "plot.svg"
        assert main(["plot", str(path), "--show-centers", "--out", str(out)]) == 0
        svg = out.read_text()
        assert svg.count('class="center"') == 5
        assert svg.startswith("<svg")

    def test_empty_dataset_errors(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("f0,f1,label\n")
        code = main(["plot", str(empty), "--out", str(tmp_path / "o.svg")])
        assert code == 1
        assert "empty" in capsys.readouterr().err

    def test_non_2d_errors(self, tmp_path, capsys):
        ds = Dataset(np.zeros((4, 3)), np.array([0, 0, 1, 1]))
        path = tmp_path / "d3.csv"
        write_dataset_csv(ds, path)
        code = main(["plot", str(path), "--out", str(tmp_path / "o.svg")])
        assert code == 1
        assert "requires 2-D" in capsys.readouterr().err

    def test_byte_identical_output(self, tmp_path):
        path = self.make_five_blob_csv(tmp_path)
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        for out in (a, b):
            assert main(["plot", str(path), "--show-centers", "--show-kinds",
                         "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_kind_rings_rendered(self, tmp_path):
        ds, _ = generate_imbalanced(GenSpec(
            n_samples=200, class_ratio=(4, 1), seed=3, minority_subclusters=2,
            disturbance_ratio=0.4, rare_fraction=0.2,
            center_box=(0.0, 14.0), min_center_separation=3.0))
        path = tmp_path / "k.csv"
        write_dataset_csv(ds, path)
        out = tmp_path / "k.svg"
        assert main(["plot", str(path), "--show-kinds", "--out", str(out)]) == 0
        svg = out.read_text()
        assert "stroke-dasharray" in svg  # borderline rings
        svg_plain = scatter_svg(read_dataset_csv(path), show_kinds=False)
        assert "stroke-dasharray" not in svg_plain
