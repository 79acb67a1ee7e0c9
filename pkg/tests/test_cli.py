"""CLI behaviour and golden-file comparisons.

Regenerate the golden files after an intentional output change with::

    SOURCE_DATE_EPOCH=0 python tests/test_cli.py
"""

import csv
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from torusvq.cli import APPROX_COLUMNS, POSTERIOR_COLUMNS, SOLVE_COLUMNS, SWEEP_COLUMNS, main

GOLDEN_DIR = Path(__file__).parent / "golden"

GOLDEN = {
    "solve_circle_8_2.json": ["solve", "--manifold", "circle", "--M", "8", "--n", "2"],
    "solve_circle_8_100.csv": ["solve", "--M", "8", "--n", "100", "--format", "csv"],
    "solve_factorial_16_2.json": ["solve", "--manifold", "torus-factorial", "--M", "16", "--n", "2"],
    "solve_circle_8_1.json": ["solve", "--M", "8", "--n", "1"],
    "sweep_circle.csv": ["sweep", "--M", "8", "16", "--n-range", "2", "100", "--steps", "4"],
    "sweep_factorial.json": ["sweep", "--manifold", "torus-factorial", "--M", "7", "16",
                             "--n-range", "1", "1e4", "--steps", "3", "--format", "json"],
    "boundary_circle.csv": ["boundary", "--kind", "two-three-circle", "--range", "8", "20", "--steps", "4"],
    "boundary_factorial.csv": ["boundary", "--kind", "two-three-factorial", "--range", "16", "40", "--steps", "4"],
    "boundary_joint_factorial.csv": ["boundary", "--kind", "joint-factorial", "--range", "1", "1e6",
                                     "--steps", "3"],
    "posterior_circle_8_2.csv": ["posterior", "--M", "8", "--n", "2", "--points", "16"],
    "posterior_circle_8_100.json": ["posterior", "--M", "8", "--n", "100", "--points", "8", "--format", "json"],
    "approx_8_2.csv": ["approx", "--M", "8", "--n", "2", "--points", "11"],
}


def run(argv, capsys, epoch="0", monkeypatch=None):
    if monkeypatch is not None:
        monkeypatch.setenv("SOURCE_DATE_EPOCH", epoch)
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def fixed_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")


@pytest.mark.usefixtures("fixed_clock")
class TestGolden:
    @pytest.mark.parametrize("name", sorted(GOLDEN))
    def test_matches(self, name, capsys):
        code, out, _ = run(GOLDEN[name], capsys)
        assert code == 0
        assert out == (GOLDEN_DIR / name).read_text(encoding="utf-8")

    @pytest.mark.parametrize("name", ["sweep_circle.csv", "solve_circle_8_2.json"])
    def test_repeat_is_identical(self, name, capsys):
        first = run(GOLDEN[name], capsys)
        assert run(GOLDEN[name], capsys) == first

    def test_out_file_and_sidecar(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, stdout, _ = run(GOLDEN["sweep_circle.csv"] + ["--out", str(out)], capsys)
        assert code == 0 and stdout == ""
        assert out.read_bytes() == (GOLDEN_DIR / "sweep_circle.csv").read_bytes()
        manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
        assert manifest["command"] == "sweep"
        assert manifest["timestamp"] == "1970-01-01T00:00:00Z"

    def test_lf_line_endings(self, capsys):
        _, out, _ = run(GOLDEN["sweep_circle.csv"], capsys)
        assert "\r" not in out and out.endswith("\n")


@pytest.mark.usefixtures("fixed_clock")
class TestSchemas:
    def test_solve(self, capsys):
        _, out, _ = run(GOLDEN["solve_circle_8_2.json"], capsys)
        doc = json.loads(out)
        assert set(doc) == {"manifest", "result"}
        assert list(doc["result"]) == SOLVE_COLUMNS
        assert set(doc["manifest"]) == {"command", "parameters", "version", "timestamp"}
        assert doc["result"]["s_over_piM"] == pytest.approx(0.49, abs=0.01)
        assert doc["result"]["regime"] == "two"

    def test_solve_n1(self, capsys):
        _, out, _ = run(GOLDEN["solve_circle_8_1.json"], capsys)
        res = json.loads(out)["result"]
        assert (res["s"], res["regime"]) == (0.0, "two")

    def test_sweep_columns_and_order(self, capsys):
        _, out, _ = run(GOLDEN["sweep_circle.csv"], capsys)
        assert out.splitlines()[0].split(",") == SWEEP_COLUMNS
        table = rows(out)
        assert [(float(r["M"]), float(r["n"])) for r in table] == sorted(
            (float(r["M"]), float(r["n"])) for r in table)

    def test_sweep_reference_points(self, capsys):
        _, out, _ = run(["sweep", "--M", "8", "--n-range", "2", "100", "--steps", "2"], capsys)
        table = rows(out)
        assert float(table[0]["s_normalized"]) == pytest.approx(0.49, abs=0.01)
        assert float(table[1]["s_normalized"]) == pytest.approx(1.39, abs=0.01)

    def test_regime_flips_once(self, capsys):
        _, out, _ = run(["sweep", "--M", "8", "20", "--n-range", "1", "1e4", "--steps", "40"], capsys)
        for M in ("8.0", "20.0"):
            regimes = [r["regime"] for r in rows(out) if r["M"] == M]
            assert sum(a != b for a, b in zip(regimes, regimes[1:])) == 1

    def test_sweep_partial_failure(self, capsys):
        code, out, _ = run(["sweep", "--manifold", "torus-factorial", "--M", "7", "16",
                            "--n-range", "2", "3", "--steps", "2"], capsys)
        assert code == 0
        table = rows(out)
        assert [r["error"] != "" for r in table] == [True, True, False, False]
        assert "M/2 ≥ 4 required" in table[0]["error"]

    def test_boundary(self, capsys):
        _, out, _ = run(["boundary", "--kind", "two-three-circle", "--range", "20", "20", "--steps", "1"], capsys)
        (row,) = rows(out)
        assert abs(float(row["n_exact"]) / float(row["n_asymptotic"]) - 1) <= 0.1

    def test_boundary_joint_factorial(self, capsys):
        _, out, _ = run(["boundary", "--kind", "joint-factorial", "--range", "1e6", "1e6", "--steps", "1"], capsys)
        (row,) = rows(out)
        assert float(row["M_critical"]) == pytest.approx(11.74, abs=0.05)
        assert float(row["M_asymptotic"]) == pytest.approx(11.74, abs=0.01)

    def test_boundary_absent_is_blank(self, capsys):
        _, out, _ = run(["boundary", "--kind", "joint-factorial", "--range", "1", "1", "--steps", "1"], capsys)
        assert rows(out)[0]["M_critical"] == ""

    def test_posterior_shapes(self, capsys):
        _, out, _ = run(["posterior", "--M", "8", "--n", "2", "--points", "1000"], capsys)
        table = rows(out)
        assert list(table[0]) == POSTERIOR_COLUMNS
        p = [float(r["p"]) for r in table]
        assert max(p) == 1.0
        _, out, _ = run(["posterior", "--M", "8", "--n", "100", "--points", "1000"], capsys)
        p = [float(r["p"]) for r in rows(out)]
        assert max(p) < 1.0

    def test_posterior_single_point(self, capsys):
        _, out, _ = run(["posterior", "--M", "8", "--n", "2", "--points", "1"], capsys)
        (row,) = rows(out)
        assert (float(row["theta"]), float(row["p"])) == (0.0, 1.0)

    def test_approx(self, capsys):
        _, out, _ = run(["approx", "--M", "8", "--n", "2"], capsys)
        table = rows(out)
        assert list(table[0]) == APPROX_COLUMNS
        assert [r["kind"] for r in table].count("summary") == 1
        assert len(table) == 202

    def test_approx_breaks_down(self, capsys):
        sup = []
        for M in ("8", "128"):
            _, out, _ = run(["approx", "--M", M, "--n", "2", "--points", "3"], capsys)
            sup.append(float(rows(out)[-1]["sup_error"]))
        assert sup[1] > sup[0]


class TestExitCodes:
    def test_factorial_too_small(self, capsys):
        code, out, err = run(["solve", "--manifold", "torus-factorial", "--M", "7", "--n", "2"], capsys)
        assert code == 2 and out == ""
        assert "M/2 ≥ 4 required" in err

    def test_integer_M(self, capsys):
        code, _, err = run(["solve", "--M", "8.5", "--n", "2", "--integer-M"], capsys)
        assert code == 2 and "integer M" in err

    def test_empty_range(self, capsys):
        assert run(["sweep", "--M", "8", "--n-range", "10", "2"], capsys)[0] == 2
        assert run(["boundary", "--kind", "two-three-circle", "--range", "20", "8"], capsys)[0] == 2

    def test_no_solvable_point(self, capsys):
        code, _, err = run(["sweep", "--manifold", "torus-factorial", "--M", "6", "--n-range", "2", "3",
                            "--steps", "2"], capsys)
        assert code == 2 and "no grid point" in err

    def test_approx_three_overlap(self, capsys):
        code, _, err = run(["approx", "--M", "8", "--n", "100"], capsys)
        assert code == 2 and "three" in err

    def test_approx_n1(self, capsys):
        assert run(["approx", "--M", "8", "--n", "1"], capsys)[0] == 2

    def test_bad_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["solve", "--M", "8"])
        assert info.value.code == 2


class TestVerify:
    def test_fast_passes(self, capsys, fixed_clock):
        code, out, _ = run(["verify", "--level", "fast", "--seed", "42"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["manifest"]["seed"] == 42
        assert doc["result"]["passed"] is True
        assert set(doc["result"]["families"]) == {"closed_form", "stationarity_P", "stationarity_X",
                                                  "local_minimum", "minimization", "monte_carlo"}
        again = run(["verify", "--level", "fast", "--seed", "42"], capsys)[1]
        assert again == out

    def test_detects_wrong_r(self, capsys, monkeypatch):
        import torusvq.solver as solver

        original = solver.optimal_r
        monkeypatch.setattr(solver, "optimal_r", lambda *a: 1.01 * original(*a))
        code, out, err = run(["verify", "--level", "fast", "--format", "json"], capsys)
        assert code == 1
        fams = json.loads(out)["result"]["families"]
        assert fams["stationarity_X"]["passed"] is False
        assert "stationarity_X[" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "torusvq", "solve", "--M", "8", "--n", "2", "--format", "csv"],
                          capture_output=True, text=True, env={**os.environ, "SOURCE_DATE_EPOCH": "0"})
    assert proc.returncode == 0
    assert proc.stdout.startswith(",".join(SOLVE_COLUMNS))


if __name__ == "__main__":
    import contextlib

    os.environ["SOURCE_DATE_EPOCH"] = "0"
    GOLDEN_DIR.mkdir(exist_ok=True)
    for name, argv in GOLDEN.items():
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            assert main(argv) == 0, name
        (GOLDEN_DIR / name).write_text(buf.getvalue(), encoding="utf-8", newline="\n")
        print(f"wrote {name}")
