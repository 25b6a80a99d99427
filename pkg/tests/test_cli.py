import csv
import io
import json
import os
import subprocess
import sys

import pytest

from edgeheat import __version__, acceptance, cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = text.splitlines()
    assert lines[0].startswith(f"# edgeheat {__version__} ")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_kernel_example(capsys):
    code, out, _ = run(capsys, "kernel", "--nu", "0.5", "--t", "1", "--x", "1", "--xt", "1")
    assert code == 0
    (row,) = rows(out)
    assert float(row["kernel"]) == pytest.approx(0.178319, abs=1.5e-6)
    assert row["kernel"] == "0.178317917419"


def test_boundary_kernel_example(capsys):
    code, out, _ = run(capsys, "kernel", "--nu", "0", "--ne", "--t", "1", "--x", "1")
    assert code == 0
    assert float(rows(out)[0]["ne_kernel"]) == pytest.approx(0.3894004, abs=5e-8)


def test_missing_nu_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["kernel", "--t", "1", "--x", "1", "--xt", "1"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["kernel", "--nu", "1.5", "--t", "1", "--x", "1", "--xt", "1"],
                                  ["kernel", "--nu", "0.2", "--t", "1:2", "--x", "1", "--xt", "1"],
                                  ["kernel", "--nu", "0.2", "--t", "1", "--x", "1"],
                                  ["invlap", "--symbol", "pole", "--t", "1", "--nodes", "8"]])
def test_bad_flags_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_console_script_usage_error():
    out = subprocess.run([sys.executable, "-m", "edgeheat.cli", "kernel"], capture_output=True, text=True)
    assert out.returncode == 2 and "usage" in out.stderr


def _config(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_predict_examples(capsys, tmp_path):
    code, out, _ = run(capsys, "predict", "--config", _config(tmp_path, {"nus": [0.0], "theta": [[0.0]]}))
    assert code == 0
    doc = json.loads(out)
    assert doc["leading"] == "log(t)^-1"
    assert doc["meta"]["version"] == __version__ and len(doc["meta"]["config_hash"]) == 64

    cfg = _config(tmp_path, {"nus": [0.0, 0.4], "theta": [[0, 1], [0.8, 0]]}, "coupled.json")
    code, out, _ = run(capsys, "predict", "--config", cfg)
    assert code == 0
    assert "t^{0.2} * log(t)^-1" in out

    code, out, _ = run(capsys, "predict", "--config", _config(tmp_path, {"nus": [0.3]}, "f.json"))
    doc = json.loads(out)
    assert code == 0 and doc["leading"] is None and doc["entries"] == []


def test_invalid_lagrangian_exit_3(capsys, tmp_path):
    cfg = _config(tmp_path, {"nus": [0.3, 0.3], "theta": [[0, 1], [2, 0]]})
    code, _, err = run(capsys, "predict", "--config", cfg)
    assert code == 3
    report = json.loads(err)
    assert report["lagrangian_defect"] == pytest.approx(0.6)
    assert "defect_matrix" in report


@pytest.mark.parametrize("data", ["{not json", json.dumps({"nus": [0.2], "colour": 1}),
                                  json.dumps({"nus": [1.2]})])
def test_bad_config_exit_3(capsys, tmp_path, data):
    p = tmp_path / "bad.json"
    p.write_text(data)
    code, _, err = run(capsys, "predict", "--config", str(p))
    assert code == 3 and "error" in json.loads(err)


def test_indexset_composition_error_exit_3(capsys):
    left = json.dumps({"lf": [[0, 0]], "rf": [[0, 0]]})
    right = json.dumps({"lf": [[0, 0]], "rf": [[-5, 0]]})
    code, _, err = run(capsys, "indexset", "--left", left, "--right", right, "--l", "0", "--lp", "0")
    assert code == 3
    assert json.loads(err)["error"] == "CompositionError"


def test_indexset_success(capsys):
    fam = json.dumps({"lf": [[0, 0], [1, 1]], "rf": [[0, 0]], "gamma_max": 4})
    code, out, _ = run(capsys, "indexset", "--left", fam, "--right", fam, "--l", "-1", "--lp", "-1")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"lf", "rf", "meta"}


def test_spectrum_and_oracle(capsys):
    code, out, _ = run(capsys, "spectrum", "--nu", "0.5", "--lambda-max", "10")
    assert code == 0
    vals = [float(r["eigenvalue"]) for r in rows(out)]
    assert vals == pytest.approx([9.8696044011, 39.4784176044, 88.8264396099], rel=1e-10)
    code, out, _ = run(capsys, "spectrum", "--nu", "0.5", "--bc", "mixed", "--lambda-max", "10",
                       "--oracle", "--oracle-count", "3")
    assert code == 0
    assert all(float(r["rel_diff"]) < 1e-4 for r in rows(out))


def test_trace_and_fit_pipeline(capsys, tmp_path):
    path = str(tmp_path / "sub" / "d.csv")
    code, _, _ = run(capsys, "trace", "--nu", "0.5", "--bc", "mixed", "--theta", "0", "--difference",
                     "--out", path)
    assert code == 0
    with open(path) as fh:
        data = rows(fh.read())
    assert len(data) == 25
    assert float(data[0]["trace"]) == pytest.approx(0.5, abs=1e-6)
    code, out, _ = run(capsys, "fit", "--input", path)
    doc = json.loads(out)
    assert code == 0 and doc["family"] == "const"
    assert doc["const"] == pytest.approx(0.5, abs=0.005)


def test_fit_too_short_window_exit_3(capsys):
    code, _, err = run(capsys, "fit", "--nu", "0.5", "--window", "1e-3", "1e-2")
    assert code == 3 and "12 points" in json.loads(err)["message"]


def test_signal_and_invlap(capsys):
    code, out, _ = run(capsys, "signal", "--nu", "0.4", "--t", "0.8", "--extract")
    (row,) = rows(out)
    assert code == 0 and float(row["cminus"]) == pytest.approx(float(row["h"]), rel=1e-4)
    code, out, _ = run(capsys, "invlap", "--symbol", "pole", "--a", "1", "--t", "1")
    doc = json.loads(out)
    assert code == 0 and doc["results"][0]["value"] == pytest.approx(0.36787944, abs=1e-7)


def _trace_bytes(tmp_path, threads):
    cfg = _config(tmp_path, {"realizations": [{"nu": 0.0, "bc": "mixed", "theta": -1.0},
                                              {"nu": 0.3, "bc": "mixed", "theta": 0.5},
                                              {"nu": 0.5, "bc": "friedrichs"}],
                             "t_grid": {"t_min": 1e-4, "t_max": 1e-2, "per_decade": 3}})
    out = tmp_path / f"t{threads}.csv"
    env = dict(os.environ, EDGEHEAT_THREADS=str(threads))
    subprocess.run([sys.executable, "-m", "edgeheat.cli", "trace", "--difference", "--config", cfg,
                    "--out", str(out)], env=env, check=True)
    return out.read_bytes()


def test_deterministic_across_thread_counts(tmp_path):
    a, b, c = (_trace_bytes(tmp_path, n) for n in (1, 3, 8))
    assert a == b == c
    assert a.count(b"\n") == 1 + 1 + 3 * 7


def test_verify_symbolic_passes(capsys):
    code, out, err = run(capsys, "verify", "--suite", "symbolic")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["failed"] == []
    assert err.count("PASS") == 3


def test_verify_reports_failure(capsys, monkeypatch):
    def broken():
        return acceptance.CriterionResult(9, "symbol inverse", False, {"error": 1.0}, "forced")

    monkeypatch.setitem(acceptance.CHECKS, 9, broken)
    code, out, _ = run(capsys, "verify", "--suite", "symbolic")
    doc = json.loads(out)
    assert code == 1 and doc["failed"] == [9]
