import csv
import io
import json

import numpy as np
import pytest

from ellbethe import __version__
from ellbethe.cli import EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_FAIL, EXIT_OK, main, parse_complex


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text()), out


def test_parse_complex():
    assert parse_complex("0.9j") == 0.9j
    assert parse_complex("0.4+0.8i") == 0.4 + 0.8j
    assert parse_complex([0.1, -0.2]) == 0.1 - 0.2j
    assert parse_complex(3) == 3


def test_check_default_passes_and_is_deterministic(tmp_path):
    code, rep, out = run(tmp_path, "check")
    assert code == EXIT_OK and rep["status"] == "pass"
    assert len(rep["suites"]) >= 8 and all(s["status"] == "pass" for s in rep["suites"])
    assert rep["version"] == __version__
    assert rep["params"]["tau"] == [0.0, 0.9] and rep["params"]["eta"] == [0.11, 0.0]
    _, _, out2 = run(tmp_path, "check", name="again.json")
    assert out.read_bytes() == out2.read_bytes()


def test_bad_tau_names_the_field(tmp_path, capsys):
    code, rep, _ = run(tmp_path, "check", "--tau=-0.5j")
    assert code == EXIT_CONFIG and "tau" in rep["error"]
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tau": [0.2, 0.0]}))
    code, rep, _ = run(tmp_path, "check", "--config", str(cfg))
    assert code == EXIT_CONFIG and "tau" in rep["error"]
    assert "tau" in capsys.readouterr().err


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tau": "0.6j", "eta": 0.09}))
    code, rep, _ = run(tmp_path, "check", "--config", str(cfg), "--eta", "0.1")
    assert code == EXIT_OK
    assert rep["params"]["tau"] == [0.0, 0.6] and rep["params"]["eta"] == [0.1, 0.0]


def test_unknown_tolerance_is_a_config_error(tmp_path):
    code, rep, _ = run(tmp_path, "check", "--tol", "nonsense=1e-3")
    assert code == EXIT_CONFIG


def test_tightened_tolerance_reports_failures(tmp_path):
    code, rep, _ = run(tmp_path, "check", "--tol", "rll=1e-16")
    assert code == EXIT_FAIL and rep["status"] == "fail"
    rll = next(s for s in rep["suites"] if s["suite"] == "rll")
    assert rll["status"] == "fail" and rll["tol"] == 1e-16 and rll["max_residual"] > 1e-16


def test_bethe_fixture(tmp_path):
    code, rep, _ = run(tmp_path, "bethe")
    assert code == EXIT_OK
    assert rep["solution"]["residual"] < 1e-12
    assert len(rep["eigen_checks"]) == 3
    assert max(x["residual"] for x in rep["eigen_checks"]) < 1e-9


def test_bethe_coincident_start(tmp_path):
    code, rep, _ = run(tmp_path, "bethe", "--t0", "0.2+0.1j,0.2+0.1j", "--Lambda", "1,1,1,1",
                       "--z", "0,0.2,0.4,0.6")
    assert code == EXIT_CONFIG and rep["status"] == "config_error"


def test_bethe_wrong_root_count(tmp_path):
    code, _, _ = run(tmp_path, "bethe", "--t0", "0.2,0.3")
    assert code == EXIT_CONFIG


def test_bethe_eight_vertex_record(tmp_path):
    code, rep, _ = run(tmp_path, "bethe", "--eta", "1/5", "--z", "0,0.37+0.05j",
                       "--eight-vertex")
    assert code == EXIT_OK
    rec = rep["eight_vertex"]
    assert rec["p"] == 1 and rec["q"] == 5 and rec["status"] == "pass"
    assert len(rec["z"]) == 5 and max(rec["residual"]) < 1e-8
    assert len(rec["eigenvalue"]) == 5 and rec["vector"]


def test_bethe_eight_vertex_degenerate_root(tmp_path):
    # z_2 - z_1 = 2 eta: the root found gives a vector every mu annihilates
    code, rep, _ = run(tmp_path, "bethe", "--eta", "1/5", "--eight-vertex")
    assert code == EXIT_FAIL
    assert rep["eight_vertex"]["status"] == "degenerate" and "error" in rep["eight_vertex"]


def test_eight_vertex_needs_rational_eta(tmp_path):
    code, rep, _ = run(tmp_path, "bethe", "--eight-vertex")
    assert code == EXIT_CONFIG and "eta" in rep["error"]


def test_qlame_m1_closed_form_branch(tmp_path):
    code, rep, _ = run(tmp_path, "qlame", "--m", "1", "--c", "0")
    assert code == EXIT_OK
    (pt,) = rep["points"]
    assert pt["residual"] < 1e-12 and pt["eigen_residual"] < 1e-10


def test_qlame_continuation_and_csv(tmp_path):
    csv_path = tmp_path / "trace.csv"
    code, rep, _ = run(tmp_path, "qlame", "--eta", "0.1", "--m", "2", "--c-start", "0",
                       "--c-stop", "0.3", "--c-steps", "30", "--csv", str(csv_path))
    assert code == EXIT_OK and rep["csv_path"] == str(csv_path)
    pts = rep["points"]
    assert len(pts) == 30
    assert all(x["residual"] < 1e-10 and x["eigen_residual"] < 1e-10 for x in pts)
    rows = list(csv.DictReader(io.StringIO(csv_path.read_text())))
    assert len(rows) == 30
    cs = [float(r["c_re"]) for r in rows]
    assert np.all(np.diff(cs) > 0) and cs[0] == 0.0 and abs(cs[-1] - 0.3) < 1e-15
    # monotone path: roots move by small steps
    roots = np.array([sorted([float(r["t1_re"]) + 1j * float(r["t1_im"]),
                              float(r["t2_re"]) + 1j * float(r["t2_im"])], key=np.imag)
                      for r in rows])
    assert np.max(np.abs(np.diff(roots, axis=0))) < 0.02


def test_qlame_continuation_failure_reports_last_point(tmp_path):
    code, rep, _ = run(tmp_path, "qlame", "--eta", "0.1", "--m", "2", "--c-start", "0",
                       "--c-stop", "40", "--c-steps", "3")
    assert code == EXIT_CONVERGENCE and rep["status"] == "no_convergence"
    assert rep["last"]["residual"] < 1e-12 and rep["trace"]


def test_qlame_classical_limit(tmp_path):
    code, rep, _ = run(tmp_path, "qlame", "--m", "2", "--classical-limit")
    assert code == EXIT_OK
    cl = rep["classical_limit"]
    assert cl["etas"] == [0.08, 0.04, 0.02, 0.01] and len(cl["residuals"]) == 4
    assert abs(cl["order"] - 2.0) < 0.3


def test_irf_and_vertex8(tmp_path):
    code, rep, _ = run(tmp_path, "irf", "--n", "2", "--n", "4")
    assert code == EXIT_OK and all(s["status"] == "pass" for s in rep["suites"])
    code, rep, _ = run(tmp_path, "vertex8", "--draws", "10")
    assert code == EXIT_OK and all(s["status"] == "pass" for s in rep["suites"])


def test_stdout_when_no_out(capsys):
    assert main(["qlame", "--m", "1"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["command"] == "qlame" and "config" in rep
