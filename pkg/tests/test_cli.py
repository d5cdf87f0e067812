import json
from fractions import Fraction

import pytest

from hyperzeros import serialize
from hyperzeros.cli import main
from hyperzeros.exact import ComplexRational
from hyperzeros.hyppoly import ParameterSchedule

CR = ComplexRational
F = Fraction
K1 = ParameterSchedule.loop_2f1(1)


@pytest.fixture()
def sched_file(tmp_path):
    path = tmp_path / "schedule.json"
    serialize.write_schedule(path, K1)
    return path


def run(*args):
    return main([str(a) for a in args])


class TestPoly:
    def test_writes_exact_rows(self, tmp_path):
        spath = tmp_path / "s.json"
        serialize.write_schedule(spath, ParameterSchedule((-1, 0), (0, 2), (0,), (2,)))
        out = tmp_path / "out"
        assert run("poly", "--schedule", spath, "--n", 2, "--out", out) == 0
        rows = [
            l for l in (out / "poly_n2.txt").read_text().splitlines()
            if not l.startswith("#")
        ]
        assert rows == ["0 1/1 0/1", "1 -4/3 0/1", "2 1/2 0/1"]
        assert (out / "manifest_poly.json").exists()

    def test_n_zero_single_row(self, sched_file, tmp_path):
        out = tmp_path / "out"
        assert run("poly", "--schedule", sched_file, "--n", 0, "--out", out) == 0
        rows = [
            l for l in (out / "poly_n0.txt").read_text().splitlines()
            if not l.startswith("#")
        ]
        assert rows == ["0 1/1 0/1"]

    def test_invalid_denominator_exit_two(self, tmp_path, capsys):
        bad = ParameterSchedule((-1, 1), (0, 1), (-1,), (0,))
        spath = tmp_path / "bad.json"
        serialize.write_schedule(spath, bad)
        code = run("poly", "--schedule", spath, "--n", 5, "--out", tmp_path / "o")
        assert code == 2
        err = capsys.readouterr().err
        assert "b_1" in err

    def test_missing_schedule_exit_four(self, tmp_path):
        code = run("poly", "--schedule", tmp_path / "nope.json", "--n", 2,
                   "--out", tmp_path / "o")
        assert code == 4


class TestRootsAndVerify:
    def test_pipeline(self, sched_file, tmp_path):
        out = tmp_path / "out"
        assert run("roots", "--schedule", sched_file, "--n-list", "4,8",
                   "--precision", 128, "--out", out) == 0
        assert (out / "roots_n4.txt").exists() and (out / "roots_n8.txt").exists()
        assert run("curve", "--schedule", sched_file, "--out", out) == 0
        assert (out / "curve.txt").exists() and (out / "branch_points.txt").exists()
        assert run("levels", "--schedule", sched_file, "--step", 0.01, "--out", out) == 0
        assert (out / "level_1_2.csv").exists()
        assert run("regions", "--schedule", sched_file, "--box", "-1:2:-1.5:1.5",
                   "--resolution", 80, "--out", out) == 0
        assert (out / "regions.txt").exists() and (out / "k_cells.txt").exists()
        assert run("verify", "--schedule", sched_file, "--n-list", "4,8",
                   "--out", out) == 0
        for name in ("report_distance.json", "report_convergence.json",
                     "report_kscore.json"):
            assert (out / name).exists(), name
        dist = json.loads((out / "report_distance.json").read_text())
        assert dist["max_decreasing"] in (True, False)
        conv = json.loads((out / "report_convergence.json").read_text())
        assert conv["monotone_last_below_first"] is True
        assert run("plot", "--out", out, "--box", "-1:2:-1.5:1.5") == 0
        svg = (out / "figure.svg").read_text()
        assert svg.startswith("<svg") and "circle" in svg

    def test_roots_rerun_byte_identical(self, sched_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run("roots", "--schedule", sched_file, "--n", 6,
                       "--precision", 128, "--out", out) == 0
        assert (out1 / "roots_n6.txt").read_bytes() == (out2 / "roots_n6.txt").read_bytes()

    def test_levels_explicit_pair_and_seed(self, sched_file, tmp_path):
        out = tmp_path / "out"
        # (1 + sqrt 2)/2 lies on the k=1 lemniscate
        assert run("levels", "--schedule", sched_file, "--pair", "1,2",
                   "--seed", "1.2071067811865475,0", "--step", 0.01, "--out", out) == 0
        text = (out / "level_1_2.csv").read_text()
        assert "closed = True" in text

    def test_levels_pair_without_seed_exit_two(self, sched_file, tmp_path):
        code = run("levels", "--schedule", sched_file, "--pair", "1,2",
                   "--out", tmp_path / "o")
        assert code == 2

    def test_verify_without_roots_exit_four(self, sched_file, tmp_path):
        code = run("verify", "--schedule", sched_file, "--n-list", "4,8",
                   "--out", tmp_path / "empty")
        assert code == 4

    def test_plot_without_data_exit_four(self, sched_file, tmp_path):
        code = run("plot", "--out", tmp_path / "empty")
        assert code == 4


class TestConfigPrecedence:
    def test_flags_override_config(self, sched_file, tmp_path):
        out = tmp_path / "out"
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "schedule": str(sched_file),
            "n": 3,
            "out": str(out),
        }))
        assert run("--config", cfg, "poly") == 0
        assert (out / "poly_n3.txt").exists()
        assert run("--config", cfg, "poly", "--n", 5) == 0
        assert (out / "poly_n5.txt").exists()

    def test_help_exits_zero(self):
        assert run("--help") == 0
