import json
import subprocess
import sys

import pytest

from gpbg import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_help_lists_common_flags(capsys):
    code, out, _ = run(capsys, "verify", "--help")
    assert code == 0
    for flag in ("--k", "--n", "--map", "--N", "--L", "--order", "--dim", "--seed", "--output", "--format", "--jobs"):
        assert flag in out


@pytest.mark.parametrize(
    "argv",
    [
        ["enumerate", "--bogus"],
        ["frobnicate"],
        ["enumerate", "--k", "1"],
        ["reduce", "--k", "1", "--map", "2,1"],
        ["reduce", "--k", "1", "--map", "a,b"],
        ["schedule", "--k", "1", "--map", "1", "--dim", "0"],
        ["forest", "--k", "1", "--map", "1", "--format", "csv"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_guard_exits_2(capsys):
    code, _, err = run(capsys, "enumerate", "--k", "3", "--n", "12")
    assert code == 2 and "SizeGuardExceeded" in err


def test_enumerate_json(capsys):
    code, out, _ = run(capsys, "enumerate", "--k", "2", "--n", "3")
    data = json.loads(out)
    assert code == 0 and data["count"] == 24 == len(data["maps"])


def test_enumerate_csv(capsys):
    _, out, _ = run(capsys, "enumerate", "--k", "1", "--n", "2", "--format", "csv")
    assert out.splitlines() == ["index,mu", "0,1 1", "1,1 2"]


def test_reduce_reports_moves(capsys):
    code, out, _ = run(capsys, "reduce", "--k", "1", "--map", "1,2,1")
    data = json.loads(out)
    assert code == 0 and data["moves"] and data["representative"]["mu"] == [1, 1, 2]


def test_reduce_dot(capsys):
    _, out, _ = run(capsys, "reduce", "--k", "1", "--map", "1,2,1", "--format", "dot")
    assert out.startswith("digraph")


def test_classes_within_bound(capsys):
    code, out, _ = run(capsys, "classes", "--k", "2", "--n", "4")
    data = json.loads(out)
    assert code == 0 and data["count"] <= data["bound"] == 256


def test_schedule_pretty(capsys):
    code, out, _ = run(capsys, "schedule", "--k", "2", "--map", "1,2,3,3", "--format", "pretty")
    assert code == 0
    assert out.splitlines()[-1].startswith("J^2: 2^4 (C T^ε)^3 ‖φ‖^12")


@pytest.mark.parametrize("dim, norm", [("1", "H^{1/6}"), ("2", "H^{1/3}"), ("3", "H^{s_ε}")])
def test_schedule_modes(capsys, dim, norm):
    _, out, _ = run(capsys, "schedule", "--k", "1", "--map", "1,2", "--dim", dim, "--format", "pretty")
    assert norm in out.splitlines()[-1]


def test_forest_dot_marks_distinguished_tree(capsys):
    _, out, _ = run(capsys, "forest", "--k", "2", "--map", "1,2,3,3", "--format", "dot")
    assert "penwidth=3" in out


def test_kernels_csv(capsys):
    _, out, _ = run(capsys, "kernels", "--k", "2", "--map", "1,2,3,3", "--format", "csv")
    terms = [int(row.split(",")[3]) for row in out.splitlines()[1:]]
    assert sorted(terms) == [2, 2, 4, 8]


def test_output_file_and_determinism(capsys, tmp_path):
    target = tmp_path / "classes.json"
    for _ in range(2):
        assert run(capsys, "classes", "--k", "2", "--n", "3", "-o", str(target))[0] == 0
    first = target.read_bytes()
    run(capsys, "classes", "--k", "2", "--n", "3", "-o", str(target))
    assert target.read_bytes() == first
    assert [p.name for p in tmp_path.iterdir()] == ["classes.json"]


def test_verify_single_target(capsys):
    code, out, _ = run(capsys, "verify", "invariance", "--k", "1", "--n", "3", "--N", "16")
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["results"][0]["criterion"] == 7


def test_verify_failure_exits_1(capsys, monkeypatch):
    from gpbg import suite

    monkeypatch.setitem(suite.CRITERIA, 9, lambda **_: {"check": "hierarchy", "criterion": 9, "pass": False})
    code, out, _ = run(capsys, "verify", "hierarchy", "--format", "pretty")
    assert code == 1 and out.startswith("[FAIL]")


def test_jobs_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("GPBG_JOBS", "two")
    assert run(capsys, "verify", "hierarchy")[0] == 2
    monkeypatch.setenv("GPBG_JOBS", "2")
    assert run(capsys, "verify", "hierarchy", "--format", "csv")[0] == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gpbg.cli", "enumerate", "--k", "1", "--n", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["count"] == 1
