import json
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alexlab.reports import csv_text, dumps, strip_timings, write_csv, write_json
from alexlab.scenarios import (
    KINDS,
    PARAMS,
    TOLERANCES,
    ScenarioParseError,
    parse_scenario,
    run_scenario,
)


def _text(**over):
    raw = {"version": 1, "name": "t", "kind": "frequency"}
    raw.update(over)
    return json.dumps(raw, indent=2)


def test_minimal_scenario_defaults():
    sc = parse_scenario(_text())
    assert sc.kind == "frequency" and sc.seed == 0
    assert sc.tol("convexity_tol") > 0


def test_unknown_top_key_has_position():
    text = '{\n  "version": 1,\n  "name": "x", "oops": 3,\n  "kind": "hopf"\n}'
    with pytest.raises(ScenarioParseError) as ei:
        parse_scenario(text)
    assert ei.value.line == 3 and ei.value.col == 16
    assert "oops" in str(ei.value)


def test_syntax_error_position():
    with pytest.raises(ScenarioParseError) as ei:
        parse_scenario('{\n  "version": 1,\n  "name": \n}')
    assert ei.value.line == 4


@pytest.mark.parametrize("bad", [0, -1e-3, "small", True, float("inf")])
def test_nonpositive_tolerance_rejected(bad):
    text = _text(tolerances={"pde_tol": bad}).replace("Infinity", "1e999")
    with pytest.raises(ScenarioParseError, match="pde_tol"):
        parse_scenario(text)


def test_unknown_parameter_and_tolerance_per_kind():
    with pytest.raises(ScenarioParseError, match="unknown parameter"):
        parse_scenario(_text(parameters={"surface": "sphere"}))
    with pytest.raises(ScenarioParseError, match="unknown tolerance"):
        parse_scenario(_text(tolerances={"sym_tol": 1e-6}))


def test_unknown_surface_and_kind_and_version():
    with pytest.raises(ScenarioParseError, match="unknown surface"):
        parse_scenario(_text(kind="surface-symmetry", parameters={"surface": "torus"}))
    with pytest.raises(ScenarioParseError, match="kind"):
        parse_scenario(_text(kind="nope"))
    with pytest.raises(ScenarioParseError, match="version"):
        parse_scenario(_text(version=2))


@pytest.mark.parametrize("seed", [-1, 2 ** 64, 1.5, False])
def test_seed_range(seed):
    with pytest.raises(ScenarioParseError, match="seed"):
        parse_scenario(_text(seed=seed))


def test_every_kind_has_tables():
    for kind in KINDS:
        assert kind in PARAMS and kind in TOLERANCES
        assert all(v > 0 for v in TOLERANCES[kind].values())


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.text(min_size=1, max_size=8), st.integers(), max_size=3))
def test_parser_never_crashes_on_extra_keys(extra):
    raw = {"version": 1, "name": "t", "kind": "taylor", **extra}
    try:
        parse_scenario(json.dumps(raw))
    except ScenarioParseError as exc:
        assert exc.line >= 1 or exc.line is None


def test_dumps_sorted_with_nonfinite_as_strings():
    text = dumps({"b": 1, "a": {"d": np.float64(2.5), "c": np.arange(2)}})
    assert text.index('"a"') < text.index('"b"') and text.index('"c"') < text.index('"d"')
    assert json.loads(dumps({"x": float("nan"), "y": -np.inf})) == {"x": "nan", "y": "-inf"}


def test_strip_timings_only_drops_top_block():
    text = dumps({"timings": {"total": 1.0}, "verdicts": [{"timings": 3}]})
    assert json.loads(strip_timings(text)) == {"verdicts": [{"timings": 3}]}


def test_atomic_write_leaves_no_temp(tmp_path):
    p = tmp_path / "sub" / "r.json"
    write_json(p, {"a": 1})
    write_json(p, {"a": 2})
    assert json.loads(p.read_text(encoding="utf-8")) == {"a": 2}
    assert os.listdir(p.parent) == ["r.json"]


def test_csv_header_and_rows(tmp_path):
    assert csv_text(("s", "rho"), [(1, 2.5)]).splitlines() == ["s,rho", "1,2.5"]
    write_csv(tmp_path / "x.csv", ("a",), [(1,), (2,)])
    assert (tmp_path / "x.csv").read_text(encoding="utf-8").splitlines()[0] == "a"


def _run(tmp_path, **raw):
    sc = parse_scenario(json.dumps({"version": 1, "name": "t", **raw}))
    return run_scenario(sc, tmp_path)


def test_sphere_full_suite_passes(tmp_path):
    res = _run(tmp_path, kind="full-suite", parameters={"surface": "sphere"})
    assert res.exit_code == 0, res.summary_lines()
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["exit_code"] == 0 and "timings" in report
    assert all(isinstance(v["anchor"], str) and v["anchor"] for v in report["verdicts"])


def test_dumbbell_symmetry_exits_1(tmp_path):
    res = _run(tmp_path, kind="surface-symmetry", parameters={"surface": "dumbbell"})
    assert res.exit_code == 1


def test_frequency_run_writes_plots_and_is_repeatable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    _run(a, kind="frequency", seed=3)
    _run(b, kind="frequency", seed=3)
    ra = strip_timings((a / "report.json").read_text(encoding="utf-8"))
    rb = strip_timings((b / "report.json").read_text(encoding="utf-8"))
    assert ra == rb
    plots = sorted(p.name for p in (a / "plots").glob("*.csv"))
    assert plots and plots == sorted(p.name for p in (b / "plots").glob("*.csv"))
    head = (a / "plots" / plots[0]).read_text(encoding="utf-8").splitlines()[0]
    assert head.startswith("s,")


EXAMPLES = sorted((Path(__file__).parents[1] / "scripts" / "scenarios").glob("*.json"))


@pytest.mark.parametrize("path", EXAMPLES, ids=lambda p: p.stem)
def test_shipped_scenarios_parse(path):
    text = path.read_text(encoding="utf-8")
    if path.stem == "bad_key":
        with pytest.raises(ScenarioParseError, match="paramters"):
            parse_scenario(text)
    else:
        assert parse_scenario(text).name
