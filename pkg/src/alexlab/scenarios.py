"""Scenario files: parsing, validation, and the runners behind ``alexlab run``.

A scenario is a JSON object::

    {"version": 1, "name": "sphere", "kind": "surface-symmetry",
     "parameters": {"surface": "sphere"}, "tolerances": {"sym_tol": 1e-8}}

Every verdict carries a status (pass/fail); any failing verdict makes the run exit 1.
"""

from __future__ import annotations

import json
import math
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import CATALOG, build_surface
from .conditions import check_all
from .errors import AlexlabError, ScenarioError
from .hopf_lab import appendix, frequency, hopf_lemma, taylor
from .moving_planes import run_moving_planes
from .profiles import curvatures_at, patch_curvatures
from .reports import write_csv, write_json
from .surface_core import ScalarField

SCENARIO_VERSION = 1
KINDS = ("surface-symmetry", "hopf", "frequency", "taylor", "appendix", "full-suite")
TOP_KEYS = {"version", "name", "kind", "parameters", "tolerances", "output", "seed"}

# parameter keys and tolerance keys accepted per kind (with defaults)
PARAMS = {
    "surface-symmetry": {"surface": "sphere", "surface_params": {}, "tau_nodes": 128},
    "hopf": {"check": "growth", "n": 2, "C0": 1.0, "w": None, "power": 1.5, "grid": 200},
    "frequency": {"instances": None, "r_min": 0.1, "points": 201},
    "taylor": {"cases": None, "extra": 3, "nodes": 16},
    "appendix": {"G": ["trace", "trace2", "sigma2"], "n": [2, 3]},
    "full-suite": {"surface": "sphere", "surface_params": {}, "tau_nodes": 128},
}
TOLERANCES = {
    "surface-symmetry": {"sym_tol": 1e-8, "curvature_tol": 1e-6},
    "hopf": {"barrier_tol": 1e-10, "exponent_tol": 0.01},
    "frequency": {"convexity_tol": 1e-6, "pde_tol": 1e-6},
    "taylor": {"coeff_tol": 1e-6, "ratio_tol": 0.01},
    "appendix": {"even_tol": 1e-9, "slope_tol": 0.05},
}
TOLERANCES["full-suite"] = {k: v for kind in KINDS[:-1] for k, v in TOLERANCES[kind].items()}

ANCHORS = {
    "curvature": "mean curvature of a graph and the second fundamental form",
    "conditions": "Main Assumption and Conditions S, T, LC",
    "symmetry": "moving-plane symmetry theorem",
    "hopf": "quantitative Hopf lemma with power barrier",
    "hopf-corollary": "Hopf corollary for C0 < 2",
    "hopf-infinite": "infinite-order vanishing barrier",
    "frequency": "log-convexity of the frequency function",
    "uniqueness": "unique continuation from infinite-order vanishing",
    "taylor": "expansion of degenerate solutions determined by f and a_k",
    "asymptotics": "asymptotics of f and f_u near u = 0",
    "appendix": "invariant-function off-diagonal lemma",
    "acceptance": "acceptance criterion of the toolkit",
}


def _locate(text: str, key: str) -> tuple[int, int]:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return 1, 1
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


class ScenarioParseError(ScenarioError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col = line, col


@dataclass
class Scenario:
    name: str
    kind: str
    parameters: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    seed: int = 0
    version: int = SCENARIO_VERSION

    def param(self, key):
        return self.parameters.get(key, PARAMS[self.kind][key])

    def tol(self, key):
        return self.tolerances.get(key, TOLERANCES[self.kind][key])

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "version": self.version, "seed": self.seed,
                "parameters": self.parameters, "tolerances": self.tolerances}


def parse_scenario(text: str) -> Scenario:
    """Validate scenario JSON text; errors carry the line and column of the offending item."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise ScenarioParseError("scenario must be a JSON object")
    for key in raw:
        if key not in TOP_KEYS:
            raise ScenarioParseError(f"unknown key {key!r}", *_locate(text, key))
    for key in ("version", "name", "kind"):
        if key not in raw:
            raise ScenarioParseError(f"missing required key {key!r}")
    if raw["version"] != SCENARIO_VERSION:
        raise ScenarioParseError(f"unsupported version {raw['version']!r} (expected {SCENARIO_VERSION})",
                                 *_locate(text, "version"))
    kind = raw["kind"]
    if kind not in KINDS:
        raise ScenarioParseError(f"kind must be one of {', '.join(KINDS)}", *_locate(text, "kind"))
    params = raw.get("parameters", {})
    tols = raw.get("tolerances", {})
    if not isinstance(params, dict) or not isinstance(tols, dict):
        raise ScenarioParseError("parameters and tolerances must be objects")
    for key in params:
        if key not in PARAMS[kind]:
            raise ScenarioParseError(f"unknown parameter {key!r} for kind {kind}", *_locate(text, key))
    for key, val in tols.items():
        if key not in TOLERANCES[kind]:
            raise ScenarioParseError(f"unknown tolerance {key!r} for kind {kind}", *_locate(text, key))
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0 or not math.isfinite(val):
            raise ScenarioParseError(f"tolerance {key!r} must be a positive number", *_locate(text, key))
    if "surface" in params and params["surface"] not in CATALOG:
        raise ScenarioParseError(f"unknown surface {params['surface']!r}; known: {', '.join(CATALOG)}",
                                 *_locate(text, "surface"))
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ScenarioParseError("seed must be an integer in [0, 2^64)", *_locate(text, "seed"))
    return Scenario(str(raw["name"]), kind, params, tols, raw.get("output"), seed, raw["version"])


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text)


# --- verdicts ----------------------------------------------------------------------------

@dataclass
class Verdict:
    id: str
    anchor: str
    passed: bool
    summary: str
    report: dict
    series: dict = field(default_factory=dict)  # name -> (header, rows)

    def to_dict(self) -> dict:
        return {"id": self.id, "anchor": ANCHORS[self.anchor], "status": "pass" if self.passed else "fail",
                "summary": self.summary, "report": self.report}


def _from_check(id_: str, anchor: str, rep, consistency: bool = False) -> Verdict:
    """Direct checks pass when no hypothesis breaks. Consistency checks (rigidity statements probed on
    instances) pass unless every hypothesis holds while the conclusion fails."""
    ok = not rep.conclusion.startswith("contradiction") if consistency else not rep.broken
    return Verdict(id_, anchor, ok, rep.conclusion, rep.to_dict(), dict(rep.series))


# --- runners -----------------------------------------------------------------------------

def _curvature_verdict(M, tol: float) -> Verdict:
    """Closed-form revolution curvatures against the analytic graph patch over each pole."""
    worst, rows = 0.0, []
    for branch, zs in (("top", np.linspace(M.z_max - 0.2 * M.height, M.z_max - 2e-3, 12)),
                       ("bottom", np.linspace(M.z_min + 2e-3, M.z_min + 0.2 * M.height, 12))):
        lo, hi = M.branch_limits(branch)
        for z in zs:
            if not lo < z < hi:
                continue
            a = curvatures_at(M, z).k
            b = patch_curvatures(M, z, branch).k
            err = float(np.max(np.abs(a - b)))
            worst = max(worst, err)
            rows.append((float(z), float(a[0]), float(a[-1]), float(b[0]), float(b[-1])))
    ok = worst <= tol
    return Verdict("curvature", "curvature", ok, f"max |k_revolution - k_patch| = {worst:.3e}",
                   {"max_difference": worst, "tolerance": tol, "samples": len(rows)},
                   {"curvature": (("z", "k_min_rev", "k_max_rev", "k_min_patch", "k_max_patch"), rows)})


def run_surface(sc: Scenario) -> list[Verdict]:
    M = build_surface(sc.param("surface"), **sc.param("surface_params"))
    out = [_curvature_verdict(M, sc.tol("curvature_tol"))]
    conds = check_all(M)
    failed = [k for k, r in conds.items() if r.verdict != "holds"]
    out.append(Verdict("conditions", "conditions", not failed,
                       "all hold" if not failed else "not holding: " + ", ".join(f"{k} ({conds[k].verdict})" for k in failed),
                       {k: r.to_dict() for k, r in conds.items()}))
    sym = run_moving_planes(M, sym_tol=sc.tol("sym_tol"), tau_nodes=sc.param("tau_nodes"))
    series = {}
    if sym.tau_rows:
        series["tau"] = (("s", "y", "tau", "tau_bar", "t"), sym.tau_rows)
    summary = f"{sym.outcome}, lambda0 = {sym.lambda0:.10g}, deviation = {sym.deviation:.3e}"
    if sym.failure:
        summary += f"; plane stopped ({sym.failure}), no symmetry conclusion drawn"
    out.append(Verdict("symmetry", "symmetry", sym.symmetric, summary, sym.to_dict(), series))
    return out


def _hopf_field(sc: Scenario, n: int):
    w = sc.param("w")
    if w is None:
        return None
    if w == "poisson":
        return hopf_lemma.poisson_kernel(n)
    if w == "power":
        p = float(sc.param("power"))
        return ScalarField(lambda x: max(1 - math.sqrt(x @ x), 0.0) ** p, n, lo=-np.ones(n), hi=np.ones(n), fd_step=1e-5)
    if w == "exp-flat":
        return ScalarField(lambda x: math.exp(-1 / x[0]) if x[0] > 0 else 0.0, n,
                           lo=np.r_[0.0, -np.ones(n - 1)], hi=np.ones(n), fd_step=1e-5)
    raise ScenarioError(f"unknown hopf field {w!r} (poisson, power, exp-flat)")


def run_hopf(sc: Scenario) -> list[Verdict]:
    check, C0 = sc.param("check"), sc.param("C0")
    ns = sc.param("n")
    out = []
    for n in ns if isinstance(ns, list) else [ns]:
        w = _hopf_field(sc, n)
        if check == "growth":
            for c in C0 if isinstance(C0, list) else [C0]:
                c = float(c)
                rep = hopf_lemma.hopf_growth_check(c, n, w=w, grid=int(sc.param("grid")), barrier_tol=sc.tol("barrier_tol"))
                k = rep.fitted_constants["k"]
                exp_err = abs(rep.fitted_constants["barrier_exponent"] - k)
                rep.add("exponent_fit", exp_err <= sc.tol("exponent_tol"), exp_err, note="|fitted exponent - k|")
                rep.add("k_root", rep.fitted_constants["k_residual"] <= 1e-12 and k > n,
                        rep.fitted_constants["k_residual"], note="k (k - n) = C0, k > n")
                out.append(_from_check(f"hopf-n{n}-C0{c:g}", "hopf", rep))
        elif check == "corollary":
            rep = hopf_lemma.hopf_c0_lt2_corollary_check(
                w or _hopf_field(Scenario("", "hopf", {"w": "power"}), n), float(C0), n)
            out.append(_from_check(f"hopf-corollary-n{n}", "hopf-corollary", rep, consistency=True))
        elif check == "infinite-order":
            rep = hopf_lemma.infinite_order_barrier_check(w or _hopf_field(Scenario("", "hopf", {"w": "exp-flat"}), n))
            out.append(_from_check(f"hopf-infinite-n{n}", "hopf-infinite", rep, consistency=True))
        else:
            raise ScenarioError(f"unknown hopf check {check!r} (growth, corollary, infinite-order)")
    return out


DEFAULT_FREQUENCY = [
    {"type": "harmonic", "n": 2, "degree": 2},
    {"type": "harmonic", "n": 3, "degree": 3},
    {"type": "sum", "n": 2, "degrees": [1, 3]},
    {"type": "radial", "n": 3, "c": 2.0},
]


def build_instance(spec: dict) -> frequency.PDEInstance:
    kind, n = spec.get("type"), spec.get("n", 2)
    harm = frequency.harmonic_2d if n == 2 else frequency.harmonic_3d
    if kind == "harmonic":
        return harm(spec["degree"])
    if kind == "sum":
        return frequency.combine(*[harm(d) for d in spec["degrees"]])
    if kind == "radial":
        return frequency.radial_constant_potential(float(spec["c"]), n)
    if kind == "flat":
        return frequency.flat_radial(n)
    raise ScenarioError(f"unknown frequency instance {spec!r}")


def run_frequency(sc: Scenario) -> list[Verdict]:
    specs = sc.param("instances") or DEFAULT_FREQUENCY
    out, series = [], []
    for i, spec in enumerate(specs):
        inst = build_instance(spec)
        fs = frequency.frequency_series(inst, r_min=float(sc.param("r_min")), points=int(sc.param("points")))
        rep = frequency.frequency_convexity(fs, tol=sc.tol("convexity_tol"), pde_tol=sc.tol("pde_tol"))
        out.append(_from_check(f"frequency-{i}", "frequency", rep))
        series.append(fs)
    uniq = frequency.vanish_order_uniqueness(*series)
    out.append(_from_check("uniqueness", "uniqueness", uniq, consistency=True))
    return out


def run_taylor(sc: Scenario) -> list[Verdict]:
    cases = sc.param("cases") or [[1, 2], [2, 2], [3, 2], [2, 3]]
    extra, nodes = int(sc.param("extra")), int(sc.param("nodes"))
    out = []
    for k, n in cases:
        e = taylor.manufactured(k, n, extra=extra, nodes=nodes if n == 2 else max(4, nodes // 2), seed=sc.seed)
        f = taylor.SourceOracle(e)
        known = {1: e.values(1)} if k == 1 else None
        got = taylor.taylor_recursion(f, e, k, k + extra, known=known)
        errs = {m: float(np.max(np.abs(got[m] - e.values(m)))) for m in sorted(got)}
        worst = max(errs.values())
        ok = worst <= sc.tol("coeff_tol")
        out.append(Verdict(f"taylor-k{k}-n{n}", "taylor", ok, f"max coefficient error {worst:.3e}",
                           {"k": k, "n": n, "errors": {str(m): v for m, v in errs.items()}, "tolerance": sc.tol("coeff_tol"),
                            "y_nodes": e.grid.size}))
        rep = taylor.f_asymptotics_check(f, e, rtol=sc.tol("ratio_tol"))
        out.append(_from_check(f"asymptotics-k{k}-n{n}", "asymptotics", rep))
    return out


def run_appendix(sc: Scenario) -> list[Verdict]:
    Gs, ns = sc.param("G"), sc.param("n")
    out = []
    for G in Gs if isinstance(Gs, list) else [Gs]:
        for n in ns if isinstance(ns, list) else [ns]:
            _, rep = appendix.invariant_G_bound(G, n, seed=sc.seed, even_tol=sc.tol("even_tol"),
                                                slope_min=2.0 - sc.tol("slope_tol"))
            out.append(_from_check(f"appendix-{G}-n{n}", "appendix", rep))
    return out


def run_full(sc: Scenario) -> list[Verdict]:
    out = run_surface(sc)
    for kind, runner in (("hopf", run_hopf), ("frequency", run_frequency), ("taylor", run_taylor),
                         ("appendix", run_appendix)):
        sub = Scenario(sc.name, kind, {}, {k: v for k, v in sc.tolerances.items() if k in TOLERANCES[kind]}, seed=sc.seed)
        out.extend(runner(sub))
    return out


RUNNERS = {
    "surface-symmetry": run_surface,
    "hopf": run_hopf,
    "frequency": run_frequency,
    "taylor": run_taylor,
    "appendix": run_appendix,
    "full-suite": run_full,
}


@dataclass
class RunResult:
    scenario: Scenario
    verdicts: list
    seconds: float
    out_dir: Path

    @property
    def exit_code(self) -> int:
        return 0 if all(v.passed for v in self.verdicts) else 1

    def summary_lines(self) -> list[str]:
        return [f"[{'PASS' if v.passed else 'FAIL'}] {v.id}: {v.summary}" for v in self.verdicts]


def write_outputs(out_dir: Path, scenario: dict, verdicts: list, timings: dict) -> None:
    """report.json plus one CSV per series under plots/."""
    out_dir = Path(out_dir)
    for v in verdicts:
        for name, (header, rows) in sorted(v.series.items()):
            write_csv(out_dir / "plots" / f"{v.id}_{name}.csv", header, rows)
    report = {
        "scenario": scenario,
        "verdicts": [v.to_dict() for v in verdicts],
        "version": __version__,
        "exit_code": 0 if all(v.passed for v in verdicts) else 1,
        "timings": timings,
    }
    write_json(out_dir / "report.json", report)


def run_scenario(sc: Scenario, out_dir=None, seed: int | None = None) -> RunResult:
    if seed is not None:
        sc.seed = seed
    out = Path(out_dir or sc.output or Path("alexlab-out") / sc.name)
    t0 = time.perf_counter()
    verdicts, timings = [], {}
    try:
        tk = time.perf_counter()
        verdicts = RUNNERS[sc.kind](sc)
        timings[sc.kind] = time.perf_counter() - tk
    except TypeError as exc:
        raise ScenarioError(f"bad parameter value: {exc}") from None
    seconds = time.perf_counter() - t0
    timings["total"] = seconds
    write_outputs(out, sc.to_dict(), verdicts, {k: round(v, 6) for k, v in timings.items()})
    return RunResult(sc, verdicts, seconds, out)
