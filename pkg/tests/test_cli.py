import json

import pytest

from alexlab.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


def _write(tmp_path, raw, name="s.json"):
    p = tmp_path / name
    p.write_text(raw if isinstance(raw, str) else json.dumps(raw, indent=2), encoding="utf-8")
    return str(p)


def test_catalog_is_stable(capsys):
    assert main(["catalog"]) == EXIT_OK
    first = capsys.readouterr().out
    main(["catalog"])
    assert capsys.readouterr().out == first
    assert "sphere" in first and "dumbbell" in first


def test_catalog_json(capsys):
    assert main(["catalog", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    names = [e["name"] for e in data["surfaces"]]
    assert "sphere" in names and data["instances"]


def test_run_pass_exit_0(tmp_path, capsys):
    path = _write(tmp_path, {"version": 1, "name": "sph", "kind": "full-suite", "parameters": {"surface": "sphere"}})
    assert main(["run", path, "--out", str(tmp_path / "o")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out
    assert (tmp_path / "o" / "report.json").exists()


def test_run_violation_exit_1(tmp_path, capsys):
    path = _write(tmp_path, {"version": 1, "name": "pear", "kind": "surface-symmetry",
                             "parameters": {"surface": "pear"}})
    assert main(["run", path, "--out", str(tmp_path / "o")]) == EXIT_VIOLATION
    assert "[FAIL]" in capsys.readouterr().out


def test_run_unknown_key_exit_2_with_position(tmp_path, capsys):
    path = _write(tmp_path, '{"version": 1,\n "name": "x",\n "kind": "hopf", "oops": 1}')
    assert main(["run", path]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "line 3, column 18" in err and "oops" in err


def test_run_bad_tolerance_exit_2(tmp_path, capsys):
    path = _write(tmp_path, {"version": 1, "name": "x", "kind": "hopf", "tolerances": {"barrier_tol": 0}})
    assert main(["run", path]) == EXIT_USAGE
    assert "barrier_tol" in capsys.readouterr().err


def test_run_missing_file_exit_2(tmp_path, capsys):
    assert main(["run", str(tmp_path / "absent.json")]) == EXIT_USAGE


def test_run_bad_parameter_value_exit_2(tmp_path, capsys):
    path = _write(tmp_path, {"version": 1, "name": "x", "kind": "hopf", "parameters": {"check": "sideways"}})
    assert main(["run", path, "--out", str(tmp_path / "o")]) == EXIT_USAGE


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["frobnicate"])
    assert ei.value.code == EXIT_USAGE
    assert main(["suite", "--criteria", "1,x"]) == EXIT_USAGE
    assert main(["suite", "--criteria", "11"]) == EXIT_USAGE


def test_suite_subset(tmp_path, capsys):
    assert main(["suite", "--seed", "0", "--criteria", "1,6", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert [v["id"] for v in report["verdicts"]] == ["criterion-1", "criterion-6"]
