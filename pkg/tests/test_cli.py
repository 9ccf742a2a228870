import json

import pytest

from flatorb import checks
from flatorb.cli import main
from flatorb.orbifold import catalog, dumps_spec


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_krawtchouk_zeros(capsys):
    assert run(capsys, "krawtchouk", "--d", "4", "--p", "2", "--zeros")[1] == "1 3\n"
    assert run(capsys, "krawtchouk", "--d", "6", "--p", "1", "--zeros")[1] == "3\n"


def test_krawtchouk_scan(capsys):
    code, out, _ = run(capsys, "krawtchouk", "--scan-odd-dims", "9")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "3: none"
    assert lines[-1].startswith("9: (2,3) (2,6)")


def test_krawtchouk_table(capsys):
    out = run(capsys, "krawtchouk", "--d", "2")[1].splitlines()
    assert out == ["p\tk=0\tk=1\tk=2", "0\t1\t1\t1", "1\t2\t0\t-2", "2\t1\t-1\t1"]


def test_compare_exit_codes(capsys):
    code, out, _ = run(capsys, "compare", "--spec-a", "builtin:O(4,2)",
                       "--spec-b", "builtin:M(4,2)", "--p", "1", "--cutoff", "16")
    assert (code, out) == (0, "EQUAL\n")
    code, out, _ = run(capsys, "compare", "--spec-a", "builtin:O(4,2)",
                       "--spec-b", "builtin:M(4,2)", "--p", "0", "--cutoff", "16")
    assert (code, out) == (3, "DIVERGES at q=1: 6 vs 4\n")


def test_strata_rows(capsys):
    code, out, _ = run(capsys, "strata", "builtin:O(4,2)")
    rows = [line for line in out.splitlines() if line and not line.startswith(("#", "index"))]
    assert code == 0 and len(rows) == 4


def test_strata_json(capsys):
    data = json.loads(run(capsys, "strata", "--spec", "builtin:sphere_244", "--format", "json")[1])
    assert sorted(s["isotropy_order"] for s in data["strata"]) == [2, 4, 4]


def test_spectrum_formats_are_deterministic(capsys):
    argv = ("spectrum", "--spec", "builtin:sphere_244", "--p", "0", "--cutoff", "25/2")
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    assert first.splitlines()[1] == "0\t1\t0\t1"
    data = json.loads(run(capsys, *argv, "--format", "json")[1])
    assert data["cutoff"] == "25/2"


def test_heat_command(capsys):
    code, out, _ = run(capsys, "heat", "--spec", "builtin:O(4,2)", "--p", "1",
                       "--cutoff", "25", "--t", "0.02", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["check"][0]["relative_error"] < 1e-2
    assert data["k_plus"] == 2


def test_spec_file(tmp_path, capsys):
    path = tmp_path / "o.json"
    path.write_text(dumps_spec(catalog("O(4,2)")))
    code, out, _ = run(capsys, "compare", "--spec-a", str(path), "--spec-b", "builtin:O(4,2)",
                       "--p", "0", "--cutoff", "4")
    assert (code, out) == (0, "EQUAL\n")


@pytest.mark.parametrize("argv", [
    ("strata", "builtin:nope"),
    ("spectrum", "--spec", "builtin:torus(2)", "--p", "5", "--cutoff", "1"),
    ("krawtchouk", "--d", "3", "--p", "9", "--zeros"),
    ("krawtchouk", "--zeros"),
    ("compare", "--spec-a", "builtin:torus(2)", "--spec-b", "builtin:torus(3)",
     "--p", "0", "--cutoff", "1"),
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("flatorb: error:")


def test_bad_json_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "name": "x",\n  "dim": }\n')
    code, _, err = run(capsys, "strata", str(path))
    assert code == 2 and "line 3" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--spec", "builtin:torus(2)", "--p", "0", "--cutoff", "-1"])
    assert exc.value.code == 2


def test_verify_json(capsys, monkeypatch):
    fake = [checks.CheckResult("1 krawtchouk zeros", True, 0.01),
            checks.CheckResult("7 heat trace numerics", False, 0.1, ["too far"])]
    monkeypatch.setattr(checks, "run_all", lambda: fake)
    code, out, _ = run(capsys, "verify", "--json")
    data = json.loads(out)
    assert code == 3
    assert [d["passed"] for d in data] == [True, False]
    code, out, _ = run(capsys, "verify")
    assert out.startswith("PASS  1 krawtchouk zeros")
    assert "FAIL  7 heat trace numerics" in out


def test_corrupted_catalog_names_failing_criterion():
    def corrupted(name):
        # the manifold is replaced by its singular partner
        return catalog(name.replace("M(", "O(")) if name.startswith("M(") else catalog(name)

    result = checks.run_check(2, corrupted)
    assert not result.passed
    assert result.line().startswith("FAIL  3 strata census")
    assert any("M(4,2) has singular strata" in f for f in result.failures)
