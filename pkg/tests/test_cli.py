import csv
import io
import json
import subprocess
import sys

import mpmath
import pytest

from whittaker import cli

NU3 = "[0.1, 0.2, -0.1]"


def run(*argv):
    return cli.run(list(argv))


def test_eval_padic_example():
    text, code = run("eval", "padic", "--lambda", "[1,0]", "--alpha", '["1/2","3"]')
    doc = json.loads(text)
    assert code == 0
    assert (doc["q_exponent"], doc["value"]) == ("-1/2", "7/2")
    assert doc["params_echo"] == {"lambda": [1, 0], "alpha": ["1/2", "3"], "n": 2}


def test_eval_spherical_rank2_is_k_bessel():
    text, code = run("eval", "spherical-c", "--n", "2", "--nu", "[0,0]", "--a", "[1]")
    doc = json.loads(text)
    assert code == 0
    assert doc["value"]["re"] == pytest.approx(float(mpmath.besselk(0, 4 * mpmath.pi)), rel=1e-12)
    assert set(doc) == {"value", "error_estimate", "params_echo"}


def test_eval_all_targets_succeed():
    for argv in (["eval", "minimal-c", "--nu", "[0.1, -0.1]", "--kappa", "1", "--a", "[1]"],
                 ["eval", "minimal-c", "--nu", "[0.1, -0.1]", "--kappa", "1", "--a", "[1]",
                  "--method", "direct"],
                 ["eval", "gl3r", "--kappa", "2", "--w", "0.3+0.1i", "--a1", "1", "--a2", "1"],
                 ["eval", "asai-l", "--nu", "[0, 0]", "--kappa", "1", "--s", "1.5", "--zeta"]):
        text, code = run(*argv)
        assert code == 0, text
        assert {"value", "error_estimate", "params_echo"} <= set(json.loads(text))


def test_params_echo_round_trip():
    argv = ["eval", "minimal-c", "--nu", '[0.1, {"re": 0, "im": 0.2}]', "--kappa", "2",
            "--ell", "[1,1]", "--a", "[0.7]"]
    first = json.loads(run(*argv)[0])
    echo = first["params_echo"]
    again = ["eval", "minimal-c", "--nu", json.dumps(echo["nu"]), "--kappa", str(echo["kappa"]),
             "--ell", json.dumps(echo["ell"]), "--a", json.dumps(echo["a"])]
    second = json.loads(run(*again)[0])
    assert second == first


@pytest.mark.parametrize("argv", [
    ["eval", "padic", "--lambda", "[0,1]", "--alpha", '["1","2"]'],
    ["eval", "padic", "--lambda", "[1,0]", "--alpha", "[0.5, 2]"],
    ["eval", "spherical-c", "--nu", "[0,0]", "--a", "[-1]"],
    ["eval", "spherical-c", "--nu", "not json", "--a", "[1]"],
    ["frobnicate"],
    ["verify", "nonsense"],
])
def test_usage_errors_exit_2(argv):
    text, code = run(*argv)
    assert code == 2
    assert set(json.loads(text)) == {"error", "detail"}


def test_invalid_weight_kind():
    text, _ = run("eval", "padic", "--lambda", "[0,1]", "--alpha", '["1","2"]')
    assert json.loads(text)["error"] == "InvalidWeight"


def test_numerical_failure_exit_3():
    text, code = run("eval", "minimal-c", "--nu", NU3, "--kappa", "1", "--a", "[1,1]",
                     "--tol", "1e-15")
    assert code == 3
    assert json.loads(text)["error"] == "Unconverged"


def test_verify_pass_and_fail():
    text, code = run("verify", "shintani")
    doc = json.loads(text)
    assert code == 0 and doc["passed"]
    text, code = run("verify", "barnes", "--cases", "20")
    doc = json.loads(text)
    assert code == 0 and doc["suites"][0]["max_rel_err"] <= 1e-8
    _, code = run("verify", "barnes", "--cases", "3", "--tol", "1e-30")
    assert code == 1


def test_verify_csv_rows():
    text, code = run("verify", "barnes", "--cases", "4", "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0
    assert rows[0] == ["suite", "case", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err", "pass"]
    assert len(rows) == 5 and all(r[-1] == "pass" for r in rows[1:])


def test_table_monotone_rank2():
    text, code = run("table", "spherical-c", "--nu", "[0.2,-0.2]", "--a1", "logspace:0.1:10:50",
                     "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and len(rows) == 50
    vals = [float(r["value_re"]) for r in rows]
    assert all(x > y > 0 for x, y in zip(vals, vals[1:]))


def test_table_empty_grid_is_header_only():
    text, code = run("table", "spherical-c", "--nu", "[0,0]", "--a1", "[]", "--format", "csv")
    assert code == 0
    assert text.strip().splitlines() == ["a1,value_re,value_im,error_estimate"]


def test_table_identical_across_threads():
    argv = ["table", "minimal-c", "--nu", NU3, "--kappa", "1", "--a1", "[0.5,1,2]",
            "--a2", "[1,1.5]", "--format", "csv"]
    one, code1 = run(*argv, "--threads", "1")
    three, code3 = run(*argv, "--threads", "3")
    assert code1 == code3 == 0
    assert one == three
    assert len(one.strip().splitlines()) == 7


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"output_format": "csv", "threads": 2}))
    args = cli.build_parser().parse_args(["verify", "gamma", "--config", str(cfg)])
    assert cli.load_config(args).output_format == "csv"
    assert cli.load_config(args).threads == 2
    args = cli.build_parser().parse_args(["verify", "gamma", "--config", str(cfg),
                                          "--format", "json", "--threads", "1"])
    conf = cli.load_config(args)
    assert (conf.output_format, conf.threads) == ("json", 1)
    monkeypatch.setenv("WHITTAKER_THREADS", "4")
    assert cli.load_config(cli.build_parser().parse_args(["verify", "gamma"])).threads == 4
    # a config file value beats the environment
    args = cli.build_parser().parse_args(["verify", "gamma", "--config", str(cfg)])
    assert cli.load_config(args).threads == 2


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"tolerance": 1e-6, "colour": "blue"}))
    _, code = run("verify", "gamma", "--config", str(cfg))
    assert code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "whittaker.cli", "eval", "asai-l", "--nu", "[0,0]",
                           "--s", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"]["re"] > 0
