import io
import json

import numpy as np
import pytest

from spectralmono.cli import ENV_CONFIG, main
from spectralmono.matrixio import diag_json, matrix_json


def write(path, A, diag=False):
    path.write_text(diag_json(A) if diag else matrix_json(A))
    return str(path)


@pytest.fixture
def files(tmp_path):
    P2 = np.array([[0.0, 1.0], [1.0, 0.0]])
    return {
        "P2": write(tmp_path / "p2.json", P2),
        "A28": write(tmp_path / "a28.json", np.array([[0.0, 2.0], [8.0, 0.0]])),
        "lazy": write(tmp_path / "lazy.json", 0.75 * np.eye(2) + 0.25 * P2),
        "D": write(tmp_path / "d.json", [1.0, 2.0], diag=True),
        "D4": write(tmp_path / "d4.json", [1.0, 2.0, 3.0, 5.0], diag=True),
        "Dflat": write(tmp_path / "dflat.json", [2.0, 2.0], diag=True),
        "tri": write(tmp_path / "tri.json", np.array([[0.0, 1, 1], [2, 0, 1], [1, 3, 0]])),
        "dir": tmp_path,
    }


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_canon(files, capsys):
    code, rep, _ = run(["canon", "--matrix", files["A28"]], capsys)
    assert code == 0
    assert rep["command"] == "canon" and set(rep) >= {"inputs", "tolerances", "results", "assertions"}
    assert rep["results"]["rho"] == pytest.approx(4.0)
    assert rep["inputs"]["matrix"]["sha256"]


def test_canon_reports_cycle(files, capsys):
    code, rep, err = run(["canon", "--matrix", files["tri"]], capsys)
    assert code == 1 and rep is None
    assert "cycle 1 -> 2 -> 3 -> 1" in err


def test_derivative(files, capsys):
    code, rep, _ = run(["derivative", "--A", files["P2"], "--B", files["P2"], "--D", files["D"], "--grid", "5"], capsys)
    assert code == 0
    res = rep["results"]
    assert res["sign_class"] == "C2" and res["predicted"] == ">"
    assert len(res["rows"]) == 5 and all(r["dr_analytic"] > 0 for r in res["rows"])


def test_derivative_scalar_D(files, capsys):
    code, rep, _ = run(["derivative", "--A", files["lazy"], "--B", files["P2"], "--D", files["Dflat"]], capsys)
    assert code == 0
    assert any("scalar D => constant" in a["name"] for a in rep["assertions"])


def test_failed_assertion_exits_2(files, capsys):
    # a forward step of 1e-8 cannot meet a 1e-15 oracle band
    argv = ["derivative", "--A", files["P2"], "--B", files["P2"], "--D", files["D"], "--tol-fd", "1e-15", "--tol-fd-step", "1e-8"]
    code, rep, _ = run(argv, capsys)
    assert code == 2
    assert not all(a["passed"] for a in rep["assertions"])


def test_ordering(files, capsys):
    code, rep, _ = run(["ordering", "--A", files["P2"], "--D", files["D"]], capsys)
    assert code == 0 and rep["results"]["relation"] == "<"


def test_sojourn_and_stdin(files, capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("0.9,0.1\n0.4,0.6\n"))
    code, rep, _ = run(["sojourn", "--P", "-"], capsys)
    assert code == 0
    assert rep["inputs"]["P"]["convention"] == "row"
    assert rep["results"]["reversible"] is True


def test_sojourn_absorbing(tmp_path, capsys):
    path = write(tmp_path / "abs.json", np.array([[1.0, 0.5], [0.0, 0.5]]))
    code, _, err = run(["sojourn", "--P", path], capsys)
    assert code == 1 and "absorbing" in err


def test_quasispecies(files, capsys):
    code, rep, _ = run(["quasispecies", "--factors", files["P2"], files["P2"], "--m", "0.1,0.2", "--D", files["D4"]], capsys)
    assert code == 0 and rep["results"]["regime"] is True
    assert all(g < 0 for g in rep["results"]["grad"])
    code, rep, _ = run(["quasispecies", "--factors", files["P2"], "--m", "0.8", "--D", files["D"]], capsys)
    assert code == 0 and rep["results"]["warnings"]


def test_matrix_file_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\n1,oops\n")
    code, _, err = run(["canon", "--matrix", str(bad)], capsys)
    assert code == 1 and "bad.csv:2:2" in err


def test_config_precedence(files, tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "tol.toml"
    cfg.write_text("[tolerances]\ntol_sym = 1e-7\nzero_tol = 1e-6\n")
    code, rep, _ = run(["canon", "--matrix", files["A28"], "--config", str(cfg), "--tol-sym", "1e-8"], capsys)
    assert code == 0
    assert rep["tolerances"]["tol_sym"] == 1e-8 and rep["tolerances"]["zero_tol"] == 1e-6
    monkeypatch.setenv(ENV_CONFIG, str(cfg))
    _, rep, _ = run(["canon", "--matrix", files["A28"]], capsys)
    assert rep["tolerances"]["tol_sym"] == 1e-7


def test_bad_config_key(files, tmp_path, capsys):
    cfg = tmp_path / "tol.json"
    cfg.write_text('{"tol_bogus": 1}')
    code, _, err = run(["canon", "--matrix", files["A28"], "--config", str(cfg)], capsys)
    assert code == 1 and "tol_bogus" in err


def test_output_flag(files, capsys):
    out = files["dir"] / "report.json"
    assert main(["ordering", "--A", files["P2"], "--D", files["D"], "-o", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["command"] == "ordering"


@pytest.mark.parametrize(
    "extra, names",
    [
        (["--kind", "chain", "--class", "C2"], ["g.json"]),
        (["--kind", "pair", "--mode", "shared_k"], ["g_A.json", "g_B.json"]),
        (["--kind", "diag"], ["g.json"]),
    ],
)
def test_gen_is_byte_deterministic(tmp_path, capsys, extra, names):
    blobs = []
    for run_dir in ("one", "two"):
        d = tmp_path / run_dir
        d.mkdir()
        code, rep, _ = run(["gen", "--n", "5", "--seed", "17", "--out", str(d / "g"), *extra], capsys)
        assert code == 0
        blobs.append([(d / name).read_bytes() for name in names])
    assert blobs[0] == blobs[1]


def test_gen_chain_reads_back(tmp_path, capsys):
    prefix = tmp_path / "c"
    assert run(["gen", "--kind", "chain", "--class", "C3", "--n", "4", "--seed", "1", "--out", str(prefix)], capsys)[0] == 0
    code, rep, _ = run(["sojourn", "--P", f"{prefix}.json"], capsys)
    assert code == 0 and rep["results"]["bound"] == "="
