import csv
import io
import json
from contextlib import redirect_stdout
from pathlib import Path

import pytest

from quantprox.cli import main
from conftest import INSTANCE_DIR, h2

BINARY = str(INSTANCE_DIR / "binary_hamming.json")
TRIANGLE = str(INSTANCE_DIR / "triangle_circulant.json")
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def run_cli(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def test_compute_guaranteed_binary():
    code, out = run_cli("compute", "--instance", BINARY, "--mode", "guaranteed", "--d", "0")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert float(rows[0]["value"]) == pytest.approx(1.0, abs=1e-9)
    assert rows[0]["converged"] == "true"


def test_compute_expected_json():
    code, out = run_cli(
        "compute", "--instance", BINARY, "--mode", "expected", "--d", "0.11", "--format", "json"
    )
    assert code == 0
    row = json.loads(out)[0]
    assert row["value"] == pytest.approx(1 - h2(0.11), abs=1e-5)
    assert row["lambda_star"] == pytest.approx(2.0907, abs=1e-3)


def test_exact_triangle():
    code, out = run_cli("exact", "--instance", TRIANGLE, "--mode", "guaranteed", "--d", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["value"]) == pytest.approx(h2(1 / 3), abs=1e-9)
    assert rows[0]["exact"] == "true"


def test_sweep_cond_excess_binary():
    code, out = run_cli(
        "sweep", "--instance", BINARY, "--mode", "cond-excess", "--d", "0", "--eps", "0:0.5:0.05"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 11
    values = [float(r["R"]) for r in rows]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))
    for r in rows:
        eps = float(r["eps"])
        assert float(r["R"]) == pytest.approx(1 - h2(eps), abs=1e-4)
        assert r["sandwich_lower_ok"] == "true"
        assert r["sandwich_upper_ok"] == "true"


def test_sweep_column_order():
    _, out = run_cli("sweep", "--instance", BINARY, "--mode", "guaranteed", "--d", "0:1:0.5")
    header = out.splitlines()[0]
    assert header == "d,eps,R,H_or_bound,sandwich_lower_ok,sandwich_upper_ok,residual,iterations"


def test_simulate_deterministic():
    args = (
        "simulate", "--instance", BINARY, "--d", "0", "--trials", "500",
        "--codebook-len", "32", "--seed", "42", "--format", "json",
    )
    code1, out1 = run_cli(*args)
    code2, out2 = run_cli(*args)
    assert code1 == code2 == 0
    assert out1 == out2
    row = json.loads(out1)[0]
    assert row["trials"] == 500
    assert row["bound_waiting_bits"] == pytest.approx(1.0)


def test_verify_triangle_passes(tmp_path):
    out_file = tmp_path / "verify.csv"
    code, _ = run_cli(
        "verify", "--instance", TRIANGLE, "--seed", "7", "--output", str(out_file)
    )
    assert code == 0
    text = out_file.read_text()
    assert "FAIL" not in text
    code2, _ = run_cli(
        "verify", "--instance", TRIANGLE, "--seed", "7", "--output", str(out_file.with_suffix(".2"))
    )
    assert out_file.read_text() == out_file.with_suffix(".2").read_text()


def test_exit_code_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"px": [0.5, 0.6], "dist": [[0, 1], [1, 0]]}')
    code, _ = run_cli("compute", "--instance", str(bad), "--mode", "guaranteed", "--d", "0")
    assert code == 1


def test_exit_code_missing_file():
    code, _ = run_cli("compute", "--instance", "/nonexistent.json", "--mode", "guaranteed", "--d", "0")
    assert code == 1


def test_exit_code_infeasible(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text('{"px": [0.5, 0.5], "dist": [[0.0, 1.0], [2.0, 2.0]]}')
    code, _ = run_cli("compute", "--instance", str(inst), "--mode", "guaranteed", "--d", "1")
    assert code == 2


def test_exit_code_not_converged():
    code, out = run_cli(
        "compute", "--instance", BINARY, "--mode", "guaranteed", "--d", "0", "--max-iter", "1"
    )
    assert code == 4
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["converged"] == "false"


def test_units_nats():
    _, out_bits = run_cli("compute", "--instance", BINARY, "--mode", "guaranteed", "--d", "0")
    _, out_nats = run_cli(
        "compute", "--instance", BINARY, "--mode", "guaranteed", "--d", "0", "--units", "nats"
    )
    vb = float(list(csv.DictReader(io.StringIO(out_bits)))[0]["value"])
    vn = float(list(csv.DictReader(io.StringIO(out_nats)))[0]["value"])
    assert vn == pytest.approx(vb * 0.6931471805599453, abs=1e-12)


def test_golden_fixtures():
    for name, argv in [
        (
            "binary_sweep_cond.csv",
            ["sweep", "--instance", BINARY, "--mode", "cond-excess", "--d", "0", "--eps", "0:0.5:0.1"],
        ),
        (
            "triangle_compute_guaranteed.csv",
            ["compute", "--instance", TRIANGLE, "--mode", "guaranteed", "--d", "1"],
        ),
        (
            "binary_simulate_seed42.json",
            ["simulate", "--instance", BINARY, "--d", "0", "--trials", "200",
             "--codebook-len", "16", "--seed", "42", "--format", "json"],
        ),
    ]:
        code, out = run_cli(*argv)
        assert code == 0
        expected = (FIXTURES / name).read_text()
        assert out == expected, f"fixture drift: {name}"
