import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from xisb import cli
from xisb.xi_core import theta, v2


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), stdout=out)
    return code, out.getvalue()


def test_eval_xi_zero():
    code, out = run("eval", "xi", "0")
    assert code == 0 and abs(float(out.split()[0]) - 0.5) < 1e-12


def test_eval_theta_one():
    code, out = run("eval", "theta", "1")
    assert code == 0 and abs(float(out.split()[0]) - 0.8934) < 1e-4


def test_eval_cdf1_large():
    code, out = run("eval", "cdf1", "100")
    assert abs(float(out.split()[0]) - 1) < 1e-8


def test_eval_complex_zeta_json():
    code, out = run("eval", "zeta", "2+0j", "--format", "json")
    payload = json.loads(out)
    assert code == 0 and abs(complex(payload["value"].replace("j", "j")) - np.pi**2 / 6) < 1e-12
    assert payload["err_estimate"] > 0


@pytest.mark.parametrize("fn", cli.FUNCTIONS)
def test_eval_every_function(fn):
    code, out = run("eval", fn, "1.5", "--k", "2")
    assert code == 0 and np.isfinite(float(out.split()[0]))


def test_eval_errors():
    assert run("eval", "nope", "1")[0] == 1
    assert run("eval", "theta", "-1")[0] == 1
    assert run("eval", "theta", "1+2j")[0] == 1
    assert run("eval", "theta", "abc")[0] == 1
    assert run("eval", "xi", "1")[0] == 0
    assert run("bogus")[0] == 1
    assert run("eval", "vk", "1", "--k", "0")[0] == 1


def test_non_convergence_exit_status():
    code, _ = run("eval", "vk", "1", "--k", "3", "--contour", "2:5:0.05")
    assert code == 2


def test_table_rows_and_header():
    code, out = run("table", "theta", "--grid", "0.2:5:25:log")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["x", "value", "err_estimate"] and len(rows) == 26
    assert sum(r == rows[0] for r in rows) == 1


def test_table_roundtrip():
    _, out = run("table", "theta", "--grid", "0.3:4:9")
    for r in list(csv.DictReader(io.StringIO(out))):
        x, v, err = float(r["x"]), float(r["value"]), float(r["err_estimate"])
        assert abs(theta(x) - v) <= err


def test_table_v2_reciprocal_symmetry():
    _, out = run("table", "v2", "--grid", "0.25:4:9:log")
    rows = list(csv.DictReader(io.StringIO(out)))
    x = np.array([float(r["x"]) for r in rows])
    v = np.array([float(r["value"]) for r in rows])
    # grid symmetric in log x, so row i pairs with row -1-i
    assert np.allclose(x * v, v[::-1], rtol=1e-12)


def test_table_json_and_linear():
    code, out = run("table", "K0", "--grid", "1:2:3:lin", "--format", "json")
    rows = json.loads(out)["rows"]
    assert code == 0 and [r["x"] for r in rows] == [1.0, 1.5, 2.0]


def test_table_needs_grid():
    assert run("table", "theta")[0] == 1
    assert run("table", "theta", "--grid", "0:1:5")[0] == 1
    assert run("table", "theta", "--grid", "1:2:1")[0] == 1
    assert run("table", "theta", "--grid", "1:2")[0] == 1


def test_sample_reproducible(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run("sample", "--n", "10", "--seed", "7", "--out", str(a))[0] == 0
    assert run("sample", "--n", "10", "--seed", "7", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 10


def test_sample_mean():
    _, out = run("sample", "--n", "10000", "--seed", "3")
    xs = np.array([float(s) for s in out.split()])
    assert abs(xs.mean() - 1) < 0.01


def test_sample_zero_is_usage_error():
    assert run("sample", "--n", "0")[0] == 1


def test_verify_single_claim():
    code, out = run("verify", "dominance-2")
    led = json.loads(out)["entries"]
    assert code == 0 and len(led) == 1 and led[0]["verdict"] == "discrepancy"


def test_verify_csv():
    code, out = run("verify", "xi-at-zero", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][0] == "claim_id" and len(rows) == 4


def test_verify_unknown():
    assert run("verify", "nonsense")[0] == 1


def test_console_script_subprocess():
    proc = subprocess.run([sys.executable, "-m", "xisb.cli", "eval", "xi", "0"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("0.4999999999999")


def test_bad_flag_exit_status():
    proc = subprocess.run([sys.executable, "-m", "xisb.cli", "eval", "--format", "xml", "xi", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
