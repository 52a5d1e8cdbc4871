import json
import subprocess
import sys

import pytest

from jetpoisson.workbench.cli import corpus_dir, corpus_verdicts, main, run_report

UX_FAMILY = "u_x*D + 1/2*u_xx"


def run(*argv):
    rep = run_report(list(argv))
    return rep.exit_code, json.loads(rep.to_json())


def test_euler_example():
    code, out = run("euler", "--expr", "1/2*u_x^2")
    assert code == 0
    assert out["result"]["euler"] == {"u": "-u[2]"}


def test_hamiltonian_example():
    code, out = run("hamiltonian", "--op", "J2", "--setup", "kdv.setup")
    assert code == 0
    assert out["result"]["verdict"] == "hamiltonian"
    assert out["setup"]["source"] == "kdv.setup"


def test_jacobi_search_example():
    code, out = run("jacobi", "--op", UX_FAMILY, "--search")
    assert code == 1
    assert out["result"]["verdict"] == "not-hamiltonian"
    assert len(out["witness"]) == 3
    checks = {c["name"]: c["verdict"] for c in out["checks"]}
    assert checks["witness_direct"] == "nonzero"


def test_jacobi_on_triple():
    code, out = run("jacobi", "--op", "D", "--expr", "u^3", "--expr", "u*u_x^2", "--expr", "u_xx^2")
    assert code == 0
    assert [c["name"] for c in out["checks"]] == ["direct", "theorem_mt"]
    assert all(c["verdict"] == "zero" for c in out["checks"])


def test_exit_codes():
    assert run("bracket", "--op", "D", "--expr", "1/2*u^2", "--expr", "1/6*u^3")[0] == 0
    assert run("bracket", "--op", "D", "--expr", "u", "--expr", "u_x*u^2")[0] == 0
    assert run("bracket", "--op", "u*D + 1/2*u_x", "--expr", "1/2*u_x^2", "--expr", "1/2*u^2")[0] == 1
    assert run("hamiltonian", "--op", UX_FAMILY)[0] == 1
    assert run("euler", "--expr", "u^")[0] == 2
    assert run("euler", "--expr", "u", "--expr", "u")[0] == 2
    assert run("hamiltonian", "--op", "D^2")[0] == 2
    assert run("adjoint", "--op", "D", "--setup", "no-such.setup")[0] == 2
    assert run("compose", "--op", "D")[0] == 2


def test_argparse_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


def test_other_commands():
    code, out = run("adjoint", "--op", "u*D")
    assert out["result"]["adjoint"] == "-u*D - u[1]" and code == 0
    code, out = run("compose", "--op", "D", "--op", "u")
    assert out["result"]["composition"] == "u*D + u[1]"
    code, out = run("frechet", "--expr", "u*u_xx")
    assert out["result"]["frechet"] == "u*D^2 + u[2]"
    code, out = run("green", "--op", "D^2", "--expr", "u^2", "--expr", "x*u_x")
    assert code == 0 and out["checks"][0]["verdict"] == "zero"
    code, out = run("green", "--independent", "x", "--dependent", "u,v", "--op", "[[0, D], [D, u]]",
                    "--expr", "[u, v]", "--expr", "[v_x, 1]")
    assert code == 0
    code, out = run("validate", "--independent", "x,y", "--samples", "5")
    assert code == 0 and out["result"]["all_passed"]
    assert [c["verdict"] for c in out["checks"]] == ["pass"] * 5


def test_text_output(capsys):
    assert main(["euler", "--expr", "1/2*u_x^2"]) == 0
    text = capsys.readouterr().out
    assert "euler: {u: -u[2]}" in text
    assert main(["euler", "--expr", "u^"]) == 2
    err = capsys.readouterr().err
    assert "position 2" in err


def test_report_determinism():
    argv = ["jacobi", "--op", UX_FAMILY, "--search", "--json", "--seed", "4"]
    first = run_report(argv).to_json()
    assert run_report(argv).to_json() == first
    assert list(json.loads(first)) == ["schema", "command", "args", "setup", "signature", "checks",
                                      "result", "witness", "exit_code"]


def test_timing_is_opt_in():
    plain = json.loads(run_report(["jacobi", "--op", "D", "--search"]).to_json())
    assert all("seconds" not in c for c in plain["checks"])
    timed = json.loads(run_report(["jacobi", "--op", "D", "--search", "--timing"]).to_json())
    assert any("seconds" in c for c in timed["checks"])


def test_corpus_matches_locked_verdicts(tmp_path):
    out_path = tmp_path / "fresh.json"
    code, out = run("corpus", "--write", str(out_path))
    assert code == 0 and out["result"]["all_match"]
    expected = json.loads((corpus_dir() / "expected.json").read_text())
    assert json.loads(out_path.read_text()) == expected
    verdicts = {c["name"]: c["classification"] for c in out["checks"]}
    assert verdicts == {
        "kdv.setup:J1": "hamiltonian",
        "kdv.setup:J2": "hamiltonian",
        "pair.setup:P": "hamiltonian",
        "scalar.setup:u_family": "hamiltonian",
        "scalar.setup:ux_family": "not-hamiltonian",
        "scalar.setup:x_family": "hamiltonian",
    }


def test_corpus_stable_across_search_bounds():
    base = corpus_verdicts()
    for deg, order in [(2, 1), (3, 1), (2, 2)]:
        other = corpus_verdicts(deg, order)
        for fname, table in base.items():
            for name, row in table.items():
                v = other[fname][name]["verdict"]
                assert v == row["verdict"] or (row["verdict"] == "not-hamiltonian" and v == "inconclusive")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "jetpoisson", "euler", "--expr", "u^2", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["euler"] == {"u": "2*u"}
