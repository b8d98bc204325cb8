"""The ten acceptance criteria, each a function returning a CriterionResult.

``alexlab suite`` runs criteria 1-9 and writes their results as a report; criterion 10
(determinism of that report) runs the suite twice and compares the bytes.
"""

from __future__ import annotations

import math
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import build_surface
from .conditions import check_all, check_condition_S, check_condition_T, check_main_assumption
from .hopf_lab import appendix, frequency, hopf_lemma, taylor
from .moving_planes import build_tau_field, check_prop1_dichotomy, manufactured_contact, run_moving_planes
from .profiles import patch_curvatures, revolution_curvatures
from .reports import strip_timings, write_json
from .scenarios import Scenario, run_scenario, write_outputs, Verdict
from .surface_core import mean_curvature_pN, second_fundamental_form_pN


@dataclass
class Check:
    name: str
    value: float
    bound: str
    ok: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "bound": self.bound, "ok": bool(self.ok)}


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    seconds: float = 0.0

    def check(self, name, value, ok, bound=""):
        self.checks.append(Check(name, float(value) if not isinstance(value, str) else value, bound, bool(ok)))

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.ok for c in self.checks)

    def line(self) -> str:
        bad = [c.name for c in self.checks if not c.ok]
        tail = "" if not bad else " | failing: " + ", ".join(bad)
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.title}{tail}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}

    def as_verdict(self) -> Verdict:
        bad = [c.name for c in self.checks if not c.ok]
        return Verdict(f"criterion-{self.number}", "acceptance", self.passed,
                       "all checks pass" if not bad else "failing: " + ", ".join(bad), self.to_dict(), self.series)


# --- 1 -----------------------------------------------------------------------------------

def random_state(rng, n: int):
    """|p| <= 3 and spectral norm of N <= 10."""
    d = rng.standard_normal(n)
    p = 3.0 * rng.uniform() ** (1 / n) * d / np.linalg.norm(d)
    N = rng.standard_normal((n, n))
    N = N + N.T
    N *= 10.0 * rng.uniform() / np.max(np.abs(np.linalg.eigvalsh(N)))
    return p, N


def criterion_1(seed: int = 0, states: int = 1000) -> CriterionResult:
    res = CriterionResult(1, "trace(A)/n equals the divergence-form mean curvature")
    rng = np.random.default_rng(seed)
    worst, rows = 0.0, []
    for i in range(states):
        n = int(rng.choice([2, 3]))
        p, N = random_state(rng, n)
        H_div = mean_curvature_pN(p, N)
        H_A = float(np.trace(second_fundamental_form_pN(p, N))) / n
        rel = abs(H_A - H_div) / max(abs(H_div), 1e-300)
        worst = max(worst, rel)
        rows.append((i, n, H_div, H_A, rel))
    res.check("max_relative_error", worst, worst <= 1e-9, "<= 1e-9")
    res.check("states", states, states == 1000, "== 1000")
    res.series["curvature_states"] = (("index", "n", "H_divergence", "H_trace_A", "relative_error"), rows)
    return res


# --- 2, 3 --------------------------------------------------------------------------------

def criterion_2(seed: int = 0) -> CriterionResult:
    res = CriterionResult(2, "unit sphere: curvatures, Main Assumption, S/T/LC, symmetric verdict")
    M = build_surface("sphere")
    worst_rev = max(float(np.max(np.abs(revolution_curvatures(M, z).k - 1.0)))
                    for z in np.linspace(-0.995, 0.995, 399))
    worst_patch = 0.0
    for branch, zs in (("top", np.linspace(0.05, 0.9999, 80)), ("bottom", np.linspace(-0.9999, -0.05, 80))):
        worst_patch = max(worst_patch, max(float(np.max(np.abs(patch_curvatures(M, z, branch).k - 1.0))) for z in zs))
    res.check("k_revolution_minus_1", worst_rev, worst_rev <= 1e-7, "<= 1e-7")
    res.check("k_patch_minus_1", worst_patch, worst_patch <= 1e-7, "<= 1e-7")
    conds = check_all(M)
    ma = conds["main_assumption"]
    res.check("main_assumption_holds", 0.0, ma.verdict == "holds", "holds")
    res.check("main_assumption_max_abs_dH", ma.details["max_abs_dH"], ma.details["max_abs_dH"] <= 1e-10, "<= 1e-10")
    for c in ("S", "T", "LC"):
        res.check(f"{c}_holds", 0.0, conds[c].verdict == "holds", "holds")
    orders = [o["order"] for o in conds["T"].details["orders"]]
    res.check("T_contact_order_2", orders[0] if orders else math.nan, orders != [] and all(o == 2 for o in orders), "== 2")
    sym = run_moving_planes(M)
    res.check("symmetric", 0.0, sym.symmetric, "symmetric")
    res.check("lambda0_minus_center", abs(sym.lambda0 - 0.0), abs(sym.lambda0) <= 1e-8, "<= 1e-8")
    res.check("deviation", sym.deviation, sym.deviation <= 1e-8, "<= 1e-8")
    return res


def criterion_3(seed: int = 0) -> CriterionResult:
    res = CriterionResult(3, "spheroid (0.6, 0.6, 1.0): symmetric about its center plane, all conditions hold")
    M = build_surface("ellipsoid", a=0.6, c=1.0)
    sym = run_moving_planes(M)
    res.check("symmetric", 0.0, sym.symmetric, "symmetric")
    res.check("lambda0_minus_center", abs(sym.lambda0 - M.center), abs(sym.lambda0 - M.center) <= 1e-6, "<= 1e-6")
    res.check("deviation", sym.deviation, sym.deviation <= 1e-6, "<= 1e-6")
    for c, r in check_all(M).items():
        res.check(f"{c}_holds", 0.0, r.verdict == "holds", "holds")
    return res


# --- 4 -----------------------------------------------------------------------------------

def _exit_code(surface: str, seed: int) -> int:
    with tempfile.TemporaryDirectory() as tmp:
        sc = Scenario(f"control-{surface}", "surface-symmetry", {"surface": surface}, seed=seed)
        return run_scenario(sc, tmp).exit_code


def criterion_4(seed: int = 0) -> CriterionResult:
    res = CriterionResult(4, "negative controls: dumbbell S, flat-tangent T, pear Main Assumption")
    S = check_condition_S(build_surface("dumbbell"))
    res.check("dumbbell_S_fails", 0.0, S.verdict == "fails", "fails")
    res.check("dumbbell_witness_stable", 0.0, bool(S.witnesses) and S.details.get("witness_stable", False), "re-verified at 10x")
    T = check_condition_T(build_surface("flat-tangent"))
    infinite = any(o.get("infinite") for o in T.details.get("orders", []))
    res.check("flat_tangent_T_fails", 0.0, T.verdict == "fails", "fails")
    res.check("flat_tangent_infinite_flag", 0.0, infinite, "infinite order")
    MA = check_main_assumption(build_surface("pear"))
    res.check("pear_main_assumption_fails", 0.0, MA.verdict == "fails", "fails")
    res.check("pear_witness_pair", len(MA.witnesses), len(MA.witnesses) >= 1, ">= 1 witness")
    for name in ("dumbbell", "flat-tangent", "pear"):
        code = _exit_code(name, seed)
        res.check(f"{name}_exit_code", code, code == 1, "== 1")
    return res


# --- 5 -----------------------------------------------------------------------------------

def criterion_5(seed: int = 0, c: float = 0.5, b: float = 0.25, delta: float = 0.1, nodes: int = 128) -> CriterionResult:
    res = CriterionResult(5, "manufactured d6 contact (k=2): slope bound, barrier, L tau sign, t/s limit")
    u, v = manufactured_contact(c, b, delta)
    tf = build_tau_field(u, v, delta, nodes)
    rep = check_prop1_dichotomy(u, v, tf)
    ratio = rep.ratio_limit["t_over_s"]
    res.check("tau_s_max", rep.tau_s_max, rep.tau_s_max < 1, "< 1")
    res.check("L_tauhat_min", rep.L_tauhat_min, rep.L_tauhat_min > 0, "> 0")
    # expected to fail on any asymmetric contact: L tau ~ 6c > 0 near y = 0 (see the decisions ledger)
    res.check("L_tau_max", rep.L_tau_max, rep.L_tau_max <= 1e-6, "<= 1e-6")
    res.check("t_over_s_at_1e-3", ratio, 0.95 <= ratio <= 1.05, "in [0.95, 1.05]")
    res.series["tau"] = (("s", "y", "tau", "tau_bar", "t"), tf.csv_rows())
    return res


# --- 6 -----------------------------------------------------------------------------------

def criterion_6(seed: int = 0) -> CriterionResult:
    res = CriterionResult(6, "Hopf barrier (R - r)^k on K with k(k - n) = C0")
    for n in (2, 3):
        for C0 in (1.0, 3.0):
            rep = hopf_lemma.hopf_growth_check(C0, n, grid=200)
            k = rep.fitted_constants["k"]
            tag = f"n{n}_C0{C0:g}"
            res.check(f"{tag}_k_residual", rep.fitted_constants["k_residual"],
                      rep.fitted_constants["k_residual"] <= 1e-12 and k > n, "<= 1e-12, k > n")
            m = next(h.margin for h in rep.hypotheses if h.id == "barrier_on_K")
            res.check(f"{tag}_barrier_min", m, m >= -1e-10, ">= -1e-10")
            e = abs(rep.fitted_constants["barrier_exponent"] - k)
            res.check(f"{tag}_exponent_error", e, e <= 0.01, "<= 0.01")
            res.series[f"barrier_{tag}"] = rep.series["barrier_profile"]
    return res


# --- 7 -----------------------------------------------------------------------------------

def criterion_7(seed: int = 0) -> CriterionResult:
    res = CriterionResult(7, "frequency function: log rho linear, strictly convex, convex under V = c")
    cases = [frequency.harmonic_2d(m) for m in (1, 2, 3, 4)] + [frequency.harmonic_3d(l) for l in (1, 2, 3)]
    for inst in cases:
        rep = frequency.frequency_convexity(frequency.frequency_series(inst))
        d2 = rep.fitted_constants["max_abs_d2_log_rho"]
        res.check(f"n{inst.n}_{inst.label}_abs_d2", d2, d2 <= 1e-8, "<= 1e-8")
    for parts in ([frequency.harmonic_2d(1), frequency.harmonic_2d(3)], [frequency.harmonic_3d(1), frequency.harmonic_3d(3)]):
        inst = frequency.combine(*parts)
        fs = frequency.frequency_series(inst)
        rep = frequency.frequency_convexity(fs)
        m = rep.fitted_constants["min_d2_log_rho"]
        res.check(f"n{inst.n}_two_term_min_d2", m, m > 0, "> 0")
        res.series[f"log_rho_two_term_n{inst.n}"] = rep.series["log_rho"]
    for n in (2, 3):
        rep = frequency.frequency_convexity(frequency.frequency_series(frequency.radial_constant_potential(2.0, n)))
        m = rep.fitted_constants["min_d2_log_rho"]
        res.check(f"n{n}_radial_V2_min_d2", m, m >= -1e-6 and not rep.broken, ">= -1e-6")
        res.series[f"log_rho_radial_n{n}"] = rep.series["log_rho"]
    return res


# --- 8 -----------------------------------------------------------------------------------

def criterion_8(seed: int = 0) -> CriterionResult:
    res = CriterionResult(8, "Taylor recursion round trip and asymptotic ratios")
    for k, n in ((1, 2), (2, 2), (3, 2), (2, 3)):
        e = taylor.manufactured(k, n, extra=3, nodes=16 if n == 2 else 8, seed=seed)
        f = taylor.SourceOracle(e)
        known = {1: e.values(1)} if k == 1 else None
        got = taylor.taylor_recursion(f, e, k, k + 3, known=known)
        err = max(float(np.max(np.abs(got[m] - e.values(m)))) for m in got)
        res.check(f"k{k}_n{n}_coefficient_error", err, err <= 1e-6, "<= 1e-6")
        rep = taylor.f_asymptotics_check(f, e, rtol=0.01)
        for h in rep.hypotheses:
            res.check(f"k{k}_n{n}_{h.id}", h.margin, h.status == "holds", "within 1%" if "bounded" not in h.id else "finite")
    return res


# --- 9 -----------------------------------------------------------------------------------

def criterion_9(seed: int = 0) -> CriterionResult:
    res = CriterionResult(9, "invariant-function lemma: h(0) = 0, evenness, quadratic decay")
    for G in ("trace", "trace2", "sigma2"):
        for n in (2, 3):
            _, rep = appendix.invariant_G_bound(G, n, seed=seed)
            tag = f"{G}_n{n}"
            for hid, bound in (("h_zero", "== 0"), ("evenness", "<= 1e-9"), ("quadratic_slope", ">= 1.95")):
                h = next(x for x in rep.hypotheses if x.id == hid)
                res.check(f"{tag}_{hid}", h.margin, h.status == "holds", bound)
    return res


# --- suite and 10 --------------------------------------------------------------------------

CRITERIA = {i: f for i, f in enumerate(
    [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9],
    start=1)}


def run_suite(out_dir, seed: int = 0, which=None, echo=None) -> tuple[list, int]:
    """Run criteria (default 1-9), write report.json and plots; return (results, exit code)."""
    results, timings = [], {}
    for i in which or CRITERIA:
        t0 = time.perf_counter()
        r = CRITERIA[i](seed)
        r.seconds = time.perf_counter() - t0
        timings[f"criterion_{i}"] = round(r.seconds, 6)
        results.append(r)
        if echo:
            echo(r.line())
    timings["total"] = round(sum(r.seconds for r in results), 6)
    scenario = {"name": "acceptance-suite", "kind": "suite", "seed": seed, "criteria": [r.number for r in results]}
    write_outputs(Path(out_dir), scenario, [r.as_verdict() for r in results], timings)
    return results, 0 if all(r.passed for r in results) else 1


def _snapshot(out_dir: Path) -> dict:
    snap = {"report.json": strip_timings((out_dir / "report.json").read_text(encoding="utf-8"))}
    for p in sorted((out_dir / "plots").glob("*.csv")):
        snap[f"plots/{p.name}"] = p.read_text(encoding="utf-8")
    return snap


def _suite_process(out_dir, seed: int, which, hash_seed: str) -> int:
    """``alexlab suite`` in a fresh interpreter."""
    cmd = [sys.executable, "-m", "alexlab.cli", "suite", "--seed", str(seed), "--out", str(out_dir)]
    if which:
        cmd += ["--criteria", ",".join(str(i) for i in which)]
    env = dict(os.environ, PYTHONHASHSEED=hash_seed)
    return subprocess.run(cmd, env=env, capture_output=True, text=True).returncode


def criterion_10(seed: int = 0, which=None) -> CriterionResult:
    """Two separate ``alexlab suite`` processes (different hash seeds) must write identical reports."""
    res = CriterionResult(10, "suite reports are byte-identical across runs (timings excluded)")
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        codes = (_suite_process(a, seed, which, "1"), _suite_process(b, seed, which, "2"))
        sa, sb = _snapshot(Path(a)), _snapshot(Path(b))
    differing = sorted(k for k in set(sa) | set(sb) if sa.get(k) != sb.get(k))
    res.check("exit_codes_agree", f"{codes[0]},{codes[1]}", codes[0] == codes[1] and codes[0] in (0, 1), "equal, in {0, 1}")
    res.check("files_compared", len(sa), len(sa) > 1, "> 1")
    res.check("differing_files", ",".join(differing) or "none", not differing, "== []")
    return res
