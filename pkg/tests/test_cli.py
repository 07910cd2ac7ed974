import csv
import io
import json

import pytest

from gadgetopt.cli import run
from gadgetopt.dense import load_matrix

from conftest import DEMOS

PAIR = str(DEMOS / "pair.ham")
SINGLE = str(DEMOS / "single3.ham")


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    lines = text.splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(ln for ln in lines if not ln.startswith("#")))))
    return meta, rows


def test_build(capsys):
    code, out, _ = call(capsys, "build", "-i", PAIR, "--compact", "--delta", "1000")
    assert code == 0
    doc = json.loads(out)
    assert doc["M"][0][1] == 3 and doc["energy_levels"] == [0, 1000, 1000, 0]
    assert doc["lambdas"][0] == pytest.approx(25.54, rel=1e-3)


def test_build_raw(capsys):
    code, out, _ = call(capsys, "build", "-i", PAIR, "--compact", "--delta", "1000", "--raw-couplings")
    assert json.loads(out)["lambdas"][0] == pytest.approx(0.1 ** (1 / 3))


def test_bound(capsys):
    code, out, _ = call(capsys, "bound", "-i", PAIR, "--delta", "1e4")
    assert code == 0
    doc = json.loads(out)
    assert doc["total_bound"] > 0 and doc["truncation_order"] >= 4
    assert doc["per_order"][0]["r"] == 2


def test_sweep_csv_and_determinism(tmp_path, capsys):
    argv = ["sweep", "-i", PAIR, "--compact", "--delta-from", "1e3", "--delta-to", "1e5", "--points", "3",
            "--epsilon", "0.1"]
    # same arguments, including the output path recorded in the provenance line
    a = tmp_path / "a.csv"
    assert run(argv + ["-o", str(a)]) == 0
    first = a.read_bytes()
    assert run(argv + ["-o", str(a)]) == 0
    assert a.read_bytes() == first
    meta, rows = read_csv(a.read_text())
    assert meta[0].startswith("# gadget") and "sweep" in meta[1]
    assert list(rows[0]) == ["delta", "total_bound_walk", "total_bound_simple", "tail_bound", "truncation_order"]
    assert len(rows) == 3
    walk = [float(r["total_bound_walk"]) for r in rows]
    assert walk == sorted(walk, reverse=True)
    # 17 significant digits round-trip
    assert float(rows[0]["total_bound_walk"]) == pytest.approx(0.0337645408144, rel=1e-10)


def test_sweep_with_dense(capsys):
    code, out, _ = call(capsys, "sweep", "-i", SINGLE, "--compact", "--delta-from", "1e3", "--delta-to", "1e4",
                        "--points", "2", "--with-dense", "--epsilon", "0.1")
    assert code == 0
    _, rows = read_csv(out)
    for r in rows:
        assert float(r["total_bound_walk"]) >= float(r["dense_sigma_err"]) >= float(r["dense_spectral_err"])


def test_optimize(capsys):
    code, out, _ = call(capsys, "optimize", "-i", PAIR, "--compact", "--epsilon", "1e-2", "--method", "walkbound")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"delta_opt", "method", "epsilon", "iterations", "report"}
    assert doc["report"]["total_bound"] <= 1e-2


def test_alpha_sweep(capsys):
    code, out, _ = call(capsys, "alpha-sweep", "-i", PAIR, "--compact", "--epsilon", "0.1",
                        "--alpha-from", "0.1", "--alpha-to", "0.2", "--alpha-points", "2")
    assert code == 0
    _, rows = read_csv(out)
    assert list(rows[0]) == ["alpha", "delta_simple", "delta_walkbound", "delta_dense", "ratio"]
    assert rows[0]["delta_dense"] == "nan"
    assert float(rows[1]["alpha"]) == 0.2


def test_alpha_sweep_bad_index(capsys):
    code, _, err = call(capsys, "alpha-sweep", "-i", PAIR, "--epsilon", "0.1", "--alpha-from", "0.1",
                        "--alpha-to", "0.2", "--index", "5")
    assert code == 1 and "--index" in err


def test_verify_and_dump(tmp_path, capsys):
    dump = tmp_path / "h.ggdm"
    code, out, _ = call(capsys, "verify", "-i", SINGLE, "--compact", "--delta", "1000", "--epsilon", "0.1",
                        "--dump-matrix", str(dump), "--n-z", "3")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["z_grid"]) == 3 and "4" in doc["per_order_norms"]
    assert load_matrix(dump).shape == (64, 64)


def test_verify_cap_exceeded(tmp_path, capsys):
    big = tmp_path / "big.ham"
    big.write_text("\n".join(f"0.1 X{3 * i} X{3 * i + 1} X{3 * i + 2}" for i in range(4)))
    code, _, err = call(capsys, "verify", "-i", str(big), "--delta", "1000")
    assert code == 1 and "cap" in err


def test_sw_compare(capsys):
    code, out, _ = call(capsys, "sw-compare", "-i", SINGLE, "--compact", "--delta-from", "1e3",
                        "--delta-to", "1e4", "--points", "2")
    assert code == 0
    meta, rows = read_csv(out)
    assert len(meta) == 2
    assert list(rows[0]) == ["delta", "fd_error", "sw_error", "spectral_error"]
    assert float(rows[0]["sw_error"]) <= float(rows[0]["fd_error"])


@pytest.mark.parametrize("argv", [
    ["bound", "--delta", "1"],                                  # missing input
    ["bound", "-i", PAIR, "--delta", "-1"],                     # non-positive
    ["bound", "-i", PAIR, "--delta", "1"],                      # below 4 z*
    ["bound", "-i", "/nonexistent.ham", "--delta", "10"],
    ["frobnicate"],
])
def test_validation_exit_code(capsys, argv):
    assert call(capsys, *argv)[0] == 1


def test_syntax_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ham"
    bad.write_text("0.1 X0 X0 X1\n")
    code, _, err = call(capsys, "build", "-i", str(bad), "--delta", "10")
    assert code == 1 and "duplicate qubit" in err


def test_computational_exit_code(capsys):
    # passes the 4 z* floor but the geometric tail cannot converge
    code, _, err = call(capsys, "bound", "-i", PAIR, "--delta", "5")
    assert code == 2 and "gap too small" in err


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("GADGET_THREADS", "zero")
    code, _, _ = call(capsys, "verify", "-i", SINGLE, "--delta", "1000", "--n-z", "3")
    assert code == 1
    monkeypatch.setenv("GADGET_THREADS", "2")
    code, _, _ = call(capsys, "verify", "-i", SINGLE, "--delta", "1000", "--n-z", "3")
    assert code == 0


def test_help(capsys):
    assert call(capsys, "--help")[0] == 0
