import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pstchain import ChainSpec, optimal_chain
from pstchain.chainfile import ChainFileError, dumps_chain, loads_chain
from pstchain.cli import bench_gap_sequences, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def chain_file(tmp_path):
    def write(chain, name="chain.json"):
        path = tmp_path / name
        path.write_text(dumps_chain(chain))
        return path

    return write


class TestChainFile:
    def test_roundtrip_bits(self, rng):
        c = ChainSpec(7, rng.uniform(0.1, 3, 6), rng.normal(size=7))
        back, meta = loads_chain(dumps_chain(c, {"note": "x"}))
        assert back == c
        assert meta == {"note": "x"}

    @pytest.mark.parametrize(
        "text",
        [
            '{"n": 2, "omega": [0.5], "lambda": [0, 0], "extra": 1}',
            '{"n": 2, "omega": [0.5]}',
            '{"n": 2.0, "omega": [0.5], "lambda": [0, 0]}',
            '{"n": 2, "omega": ["0.5"], "lambda": [0, 0]}',
            '{"n": 2, "omega": [-0.5], "lambda": [0, 0]}',
            '{"n": 3, "omega": [0.5], "lambda": [0, 0]}',
            '{"n": 2, "omega": [0.5], "lambda": [0, 0], "meta": {"a": 1}}',
            '[1, 2]',
            'not json',
        ],
    )
    def test_strict(self, text):
        with pytest.raises(ChainFileError):
            loads_chain(text)


class TestOptimal:
    def test_four(self, capsys):
        code, out, _ = run(capsys, "optimal", "--n", 4)
        assert code == 0
        data = json.loads(out)
        assert data["omega"] == [0.8660254037844386, 1.0, 0.8660254037844386]
        assert data["lambda"] == [0.0] * 4

    def test_two(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        assert run(capsys, "optimal", "--n", 2, "--out", path)[0] == 0
        assert json.loads(path.read_text())["omega"] == [0.5]

    def test_one(self, capsys):
        code, _, err = run(capsys, "optimal", "--n", 1)
        assert code == 1
        assert "at least 2" in err

    def test_usage_error_exit_code(self, capsys):
        for argv in (["optimal"], ["optimal", "--n", "four"], ["frobnicate"]):
            with pytest.raises(SystemExit) as info:
                main(argv)
            assert info.value.code == 1


class TestEngineer:
    def test_linear(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        code, out, _ = run(capsys, "engineer", "--gaps", "1,1,1", "--out", path)
        assert code == 0
        report = json.loads(out)
        assert report["eta"] == pytest.approx(1.0, abs=1e-9)
        chain, _ = loads_chain(path.read_text())
        np.testing.assert_allclose(chain.omega, optimal_chain(4).omega, atol=1e-9)

    def test_gapped(self, capsys):
        code, out, _ = run(capsys, "engineer", "--gaps", "3,1,3")
        assert code == 0
        report = json.loads(out)
        np.testing.assert_allclose(report["chain"]["omega"], [1.3228756555, 3, 1.3228756555], atol=1e-10)
        assert report["eta"] == pytest.approx(3.0, abs=1e-9)
        assert report["tau"] == pytest.approx(math.pi)

    def test_even_gap(self, capsys):
        assert run(capsys, "engineer", "--gaps", "2,1,2")[0] == 2

    @pytest.mark.parametrize("gaps", ["1,x", "0,1", ""])
    def test_bad_gaps(self, capsys, gaps):
        assert run(capsys, "engineer", "--gaps", gaps)[0] == 1


class TestVerify:
    def test_auto(self, capsys, chain_file):
        code, out, _ = run(capsys, "verify", chain_file(optimal_chain(8)), "--time", "auto")
        assert code == 0
        data = json.loads(out)
        assert data["magnitude"] >= 1 - 1e-10
        assert data["time"] == pytest.approx(math.pi, rel=1e-12)

    def test_two_site_fixed_time(self, capsys, chain_file):
        path = chain_file(ChainSpec(2, [0.5], [0.0, 0.0]))
        code, out, _ = run(capsys, "verify", path, "--time", "3.14159265358979")
        data = json.loads(out)
        assert code == 0
        assert data["magnitude"] == pytest.approx(1.0, abs=1e-12)
        assert data["phase"] == pytest.approx(1.5 * math.pi, abs=1e-12)

    def test_random_chain_no_window(self, capsys, chain_file, rng):
        c = ChainSpec(6, rng.uniform(0.5, 1.5, 5), rng.uniform(-1, 1, 6))
        assert run(capsys, "verify", chain_file(c), "--time", "auto")[0] == 2

    def test_other_site(self, capsys, chain_file):
        code, out, _ = run(capsys, "verify", chain_file(optimal_chain(7)), "--from-site", 3)
        data = json.loads(out)
        assert data["to_site"] == 5
        assert data["magnitude"] >= 1 - 1e-9

    def test_bad_inputs(self, capsys, chain_file, tmp_path):
        assert run(capsys, "verify", tmp_path / "missing.json")[0] == 1
        assert run(capsys, "verify", chain_file(optimal_chain(3)), "--time", "soon")[0] == 1
        assert run(capsys, "verify", chain_file(optimal_chain(3)), "--from-site", 9)[0] == 1
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 2, "omega": [0.5], "lambda": [0, 0], "colour": "red"}')
        assert run(capsys, "verify", bad)[0] == 1


class TestCurve:
    def _rows(self, text):
        return list(csv.reader(io.StringIO(text)))

    def test_two_site(self, capsys, chain_file):
        code, out, _ = run(capsys, "curve", chain_file(optimal_chain(2)), "--t-max", 2 * math.pi, "--steps", 5)
        assert code == 0
        rows = self._rows(out)
        assert rows[0] == ["t", "magnitude", "phase"]
        mags = [float(r[1]) for r in rows[1:]]
        np.testing.assert_allclose(mags, [0, math.sqrt(0.5), 1, math.sqrt(0.5), 0], atol=1e-14)

    def test_two_steps(self, capsys, chain_file, tmp_path):
        out_path = tmp_path / "curve.csv"
        code, _, _ = run(capsys, "curve", chain_file(optimal_chain(3)), "--t-max", 2.5, "--steps", 2, "--out", out_path)
        assert code == 0
        rows = self._rows(out_path.read_text())
        assert [float(r[0]) for r in rows[1:]] == [0.0, 2.5]

    def test_seventeen_digits(self, capsys, chain_file):
        _, out, _ = run(capsys, "curve", chain_file(optimal_chain(4)), "--t-max", 1.0, "--steps", 3)
        value = self._rows(out)[2][1]
        assert float(value) == float(format(float(value), ".17g"))

    def test_zero_tmax(self, capsys, chain_file):
        assert run(capsys, "curve", chain_file(optimal_chain(2)), "--t-max", 0, "--steps", 5)[0] == 1


class TestReport:
    KEYS = {
        "time", "magnitude", "phase", "eta", "omega_max", "ref_omega_max", "tau", "ref_tau",
        "delta_lambda", "range_bound_residual", "ml_mean_energy", "ml_uncertainty", "ml_min_time",
    }

    def test_optimal_five(self, capsys, chain_file):
        code, out, _ = run(capsys, "report", chain_file(optimal_chain(5)))
        assert code == 0
        data = json.loads(out)
        assert set(data) == self.KEYS
        assert data["eta"] == pytest.approx(1.0, abs=1e-9)
        assert data["ref_omega_max"] == pytest.approx(1.224744871, abs=1e-9)
        assert data["range_bound_residual"] == pytest.approx(4 * math.sqrt(6) / 2 - 4, abs=1e-9)

    def test_gapped(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        run(capsys, "engineer", "--gaps", "3,1,3", "--out", path)
        code, out, _ = run(capsys, "report", path)
        assert code == 0
        assert json.loads(out)["eta"] == pytest.approx(3.0, abs=1e-9)

    def test_explicit_time_on_generic_chain(self, capsys, chain_file, rng):
        c = ChainSpec(5, rng.uniform(0.5, 1.5, 4), rng.uniform(-1, 1, 5))
        code, out, _ = run(capsys, "report", chain_file(c), "--time", "2.0")
        assert code == 0
        assert json.loads(out)["range_bound_residual"] >= 0


class TestBench:
    def test_passes_and_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["bench", "--n-min", 2, "--n-max", 12, "--samples", 50, "--seed", 7]
        assert run(capsys, *args, "--out", a)[0] == 0
        assert run(capsys, *args, "--out", b, "--workers", 3)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        rows = list(csv.DictReader(io.StringIO(a.read_text())))
        assert len(rows) == 11 * 50
        assert list(rows[0]) == ["n", "gaps", "omega_max", "tau", "eta", "fidelity"]
        for row in rows:
            gaps = [int(g) for g in row["gaps"].split(",")]
            assert len(gaps) == int(row["n"]) - 1
            assert set(gaps) <= {1, 3, 5, 7}
            if set(gaps) == {1}:
                assert abs(float(row["eta"]) - 1) <= 1e-9

    def test_draws_depend_on_seed(self):
        assert bench_gap_sequences(2, 6, 3, 1) == bench_gap_sequences(2, 6, 3, 1)
        assert bench_gap_sequences(2, 6, 3, 1) != bench_gap_sequences(2, 6, 3, 2)

    def test_bad_args(self, capsys):
        assert run(capsys, "bench", "--n-min", 1, "--n-max", 3, "--samples", 1)[0] == 1
        assert run(capsys, "bench", "--n-min", 2, "--n-max", 3, "--samples", 0)[0] == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pstchain", "optimal", "--n", "3"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 3
