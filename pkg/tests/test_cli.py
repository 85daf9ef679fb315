import csv
import io
import json
import subprocess
import sys

import pytest

from fibcmv import cli, verify


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _csv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.reader(lines))


def _config(text):
    if text.startswith("{"):
        return json.loads(text)["config"]
    line = next(l for l in text.splitlines() if l.startswith("# config: "))
    return json.loads(line[len("# config: ") :])


def test_fib_census_json():
    code, out, _ = _run(["fib", "census", "--k", "4"])
    env = json.loads(out)
    assert code == 0 and env["schema"] == cli.SCHEMA
    assert env["payload"] == {"k": 4, "F_k": 8, "count": 9, "repeatable": 8, "nonrepeatable_word": env["payload"]["nonrepeatable_word"]}
    print(f"check fib census envelope: {env['payload']}")


def test_spectrum_csv():
    code, out, _ = _run(["spectrum", "--theta-a", "1.0471975511965976", "--theta-b", "0.5235987755982988", "--depth", "8", "--grid", "1000"])
    rows = _csv(out)
    assert code == 0 and rows[0] == ["angle", "in_spectrum", "I", "C", "gamma1", "gamma2", "beta"]
    body = rows[1:]
    assert len(body) == 1000
    for r in body:
        assert (r[1] == "1") == all(r[2:]) and (r[1] == "0") == (not any(r[2:]))
    inside = [r for r in body if r[1] == "1"]
    assert inside and all(0 < float(r[6]) < 1 for r in inside)
    assert out.startswith("# schema: fibcmv/1\n")
    print(f"check spectrum CSV: 1000 rows, {len(inside)} in spectrum, constants blank elsewhere")


def test_spectrum_threads_and_determinism():
    base = ["spectrum", "--theta-a", "0.9", "--theta-b", "-0.4", "--depth", "10", "--grid", "2000"]
    a = _run(base + ["--threads", "1"])[1]
    b = _run(base + ["--threads", "3"])[1]
    c = _run(base + ["--threads", "0"])[1]
    assert a == b == c
    print("check spectrum output is byte-identical for 1, 3 and auto threads")


def test_float_format():
    assert cli.fmt_float(0.1) == "0.10000000000000001"
    assert cli.fmt_float(1.0) == "1"
    assert cli.to_json({"x": [0.1, float("nan"), True, None, 3]}) == '{"x": [0.10000000000000001, null, true, null, 3]}'
    print("check floats written with 17 significant digits; nan becomes null")


def test_config_round_trip():
    argv = ["ising", "zeros", "--ja", "1.0", "--jb", "0.5", "--tau", "1.0", "--omega", "u", "--length", "21"]
    code, out, _ = _run(argv)
    assert code == 0
    again = _run(cli.config_to_argv(_config(out)))[1]
    assert again == out
    code, out, _ = _run(["walk", "series", "--theta-a", "0.3", "--theta-b", "0.2", "--steps", "40", "--omega", "shift:2"])
    assert _run(cli.config_to_argv(_config(out)))[1] == out
    code, out, _ = _run(["verify", "words", "--quick", "--format", "json", "--seed", "5"])
    assert _run(cli.config_to_argv(_config(out)) + ["--format", "json"])[1] == out
    print("check echoed configs rebuild argv that reproduce the output byte for byte")


def test_ising_zeros():
    code, out, _ = _run(["ising", "zeros", "--ja", "1.0", "--jb", "0.5", "--tau", "1.0", "--omega", "u", "--length", "34"])
    rows = _csv(out)
    assert code == 0 and rows[0] == ["angle", "residual", "band_index"]
    assert len(rows) == 35
    assert sorted(int(r[2]) for r in rows[1:]) == list(range(34))
    assert max(float(r[1]) for r in rows[1:]) < 1e-8
    code, out2, _ = _run(["ising", "zeros", "--ja", "1.0", "--jb", "0.5", "--length", "34", "--method", "both", "--format", "json"])
    assert code == 0 and len(json.loads(out2)["payload"]["rows"]) == 34
    print("check ising zeros at L = 34: 34 zeros, one per band, small residuals")


def test_ising_dos():
    code, out, _ = _run(["ising", "dos", "--ja", "1.0", "--jb", "0.5", "--tau", "1.0", "--kmax", "6"])
    p = json.loads(out)["payload"]
    assert code == 0 and len(p["successive"]) == 4 and len(p["cross_omega"]) == 10
    print("check ising dos JSON: successive and cross-omega tables")


def test_walk_outputs():
    code, out, _ = _run(["walk", "--theta-a", "0", "--theta-b", "0", "--steps", "50"])
    rows = _csv(out)
    assert code == 0 and rows[0] == ["n", "M", "Mtilde"] and len(rows) == 51
    assert all(float(r[1]) == 1 + (2 * int(r[0])) ** 2 for r in rows[1:])
    code, out, _ = _run(["walk", "exponents", "--theta-a", "0", "--theta-b", "0", "--steps", "256", "--grid", "2000"])
    p = json.loads(out)["payload"]
    assert code == 0 and set(p) >= {"p", "beta_tilde_fit", "beta_minus", "beta_plus", "theory_lower_bound"}
    assert abs(p["beta_tilde_fit"] - 1) < 0.1
    print(f"check walk series and exponents; free fit {p['beta_tilde_fit']:.4f}")


def test_verify_command():
    code, out, _ = _run(["verify", "all", "--quick"])
    assert code == 0 and "FAIL" not in out and out.count("PASS") >= 20
    code, out, _ = _run(["verify", "cmv", "--quick", "--format", "json"])
    rows = json.loads(out)["payload"]["rows"]
    assert code == 0 and all(r[0] == "cmv" and r[4] for r in rows)
    print(f"check verify table: {out.count('true')} passing cmv rows in JSON mode")


def test_verify_failure_exit_code(monkeypatch):
    bad = lambda rng, quick: [verify.Check("words", "forced", 1.0, 0.0, False)]
    monkeypatch.setitem(verify.SUITES, "words", bad)
    code, out, _ = _run(["verify", "words"])
    assert code == 2 and "FAIL" in out
    print("check a failing suite gives exit code 2")


def test_exit_codes():
    assert _run(["spectrum", "--theta-a", "0.1", "--theta-b", "0.1", "--bogus"])[0] == 1
    assert _run(["nope"])[0] == 1
    assert _run(["spectrum", "--theta-a", "2.0", "--theta-b", "0.1"])[0] == 1
    assert _run(["fib", "census", "--k", "3", "--out", "/nonexistent/dir/x.json"])[0] == 1
    assert _run(["walk", "exponents", "--theta-a", "0", "--theta-b", "0", "--steps", "64"])[0] == 1
    assert _run(["ising", "dos", "--ja", "1", "--jb", "0.5", "--kmax", "2"])[0] == 1
    code, _, err = _run(["ising", "zeros", "--ja", "1", "--jb", "0.5", "--length", "13", "--method", "both", "--tol", "-1"])
    assert code == 2 and "numerical inconsistency" in err
    print("check exit codes: validation errors 1, numerical inconsistency 2")


def test_out_file(tmp_path):
    path = tmp_path / "c.json"
    code, out, _ = _run(["fib", "census", "--k", "5", "--out", str(path)])
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["payload"]["F_k"] == 13
    print("check --out writes the envelope to a file")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "fibcmv", "fib", "census", "--k", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["payload"]["count"] == 4
    r = subprocess.run([sys.executable, "-m", "fibcmv", "fib"], capture_output=True, text=True)
    assert r.returncode == 1
    print("check python -m fibcmv runs and returns exit codes")
