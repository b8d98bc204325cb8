"""Quantitative Hopf lemma with the power barrier (R - r)^k, its C0 < 2 corollary, and the infinite-order barrier."""

from __future__ import annotations

import math

import numpy as np

from ..errors import OrderError
from ..numerics import loglog_slope, windowed_slopes
from ..surface_core import ScalarField
from .report import CheckReport

LAPLACE_RTOL = 1e-6


def hopf_exponent(n: int, C0: float) -> float:
    """The root k > n of k(k - n) = C0 (for C0 >= 0)."""
    if C0 < 0:
        raise ValueError("C0 must be nonnegative")
    return 0.5 * (n + math.sqrt(n * n + 4 * C0))


def barrier(n: int, k: float, R: float = 1.0) -> ScalarField:
    """h = (R - |x|)^k with exact derivatives (away from the origin)."""
    def fn(x):
        return (R - math.sqrt(x @ x)) ** k

    def grad(x):
        r = math.sqrt(x @ x)
        return -k * (R - r) ** (k - 1) * x / r

    def hess(x):
        r = math.sqrt(x @ x)
        d = R - r
        e = x / r
        return (k * (k - 1) * d ** (k - 2) * np.outer(e, e)
                - k * d ** (k - 1) * (np.eye(n) - np.outer(e, e)) / r)

    lim = R
    return ScalarField(fn, n, lo=np.full(n, -lim), hi=np.full(n, lim), grad=grad, hess=hess)


def poisson_kernel(n: int, R: float = 1.0) -> ScalarField:
    """w = (R^2 - |x|^2) / |x - xi|^n with the pole xi = (R, 0, ...); harmonic and positive in the ball."""
    xi = np.zeros(n)
    xi[0] = R

    def fn(x):
        d = x - xi
        return (R * R - x @ x) / math.sqrt(d @ d) ** n

    return ScalarField(fn, n, lo=np.full(n, -R), hi=np.full(n, R), fd_step=1e-4)


def _laplacian(w: ScalarField, x):
    val, _, hess = w.evaluate(x)
    diag = np.diag(hess)
    return val, float(diag.sum()), float(np.abs(diag).sum())


def _slice_grid(R, nodes, x1_max=None):
    """2-D slice (x1, x2) of the ball; functions here are radial or symmetric about the x1-axis."""
    hi1 = R if x1_max is None else x1_max
    xs = np.linspace(-R, hi1, nodes + 2)[1:-1]
    ys = np.linspace(-R, R, nodes + 2)[1:-1]
    return xs, ys


def _embed(n, a, b):
    x = np.zeros(n)
    x[0] = a
    if n > 1:
        x[1] = b
    return x


def lap_bound_margin(w: ScalarField, C0: float, n: int, R: float, points) -> tuple[float, list]:
    """Worst margin of C0 w / d^2 - Lap w over the points (negative means Lap w <= C0 w / d^2 fails)."""
    worst, where = math.inf, None
    for x in points:
        d = R - math.sqrt(x @ x)
        val, lap, scale = _laplacian(w, x)
        tol = LAPLACE_RTOL * (abs(val) / d ** 2 + scale) if w.provenance != "analytic" else 1e-12 * (abs(val) / d ** 2 + scale)
        m = C0 * val / d ** 2 - lap + tol
        if m < worst:
            worst, where = m, x.tolist()
    return worst, where


def normal_profile(w: ScalarField, P, R: float, depths):
    P = np.asarray(P, dtype=float)
    nu = -P / np.linalg.norm(P)
    return [(float(d), float(w(P + d * nu))) for d in depths]


def hopf_growth_check(C0: float, n: int, w: ScalarField | None = None, R: float = 1.0, P=None,
                      grid: int = 200, depths=None, barrier_tol: float = 1e-10) -> CheckReport:
    """Barrier inequality on K = {x1 < -R/2} and growth of w along the inner normal at P."""
    rep = CheckReport("hopf_growth")
    k = hopf_exponent(n, C0)
    rep.fitted_constants["k"] = k
    rep.fitted_constants["k_residual"] = abs(k * (k - n) - C0)
    P = _embed(n, -R, 0.0) if P is None else np.asarray(P, dtype=float)
    depths = np.geomspace(1e-1, 1e-4, 16) if depths is None else depths

    # barrier: Lap h - C0 h / (R - r)^2 on K, in closed form for the radial h
    xs, ys = _slice_grid(R, grid, -R / 2)
    worst = math.inf
    count = 0
    for a in xs:
        for b in ys:
            r = math.hypot(a, b)
            if r >= R:
                continue
            d = R - r
            lap = k * (k - 1) * d ** (k - 2) - (n - 1) * k * d ** (k - 1) / r
            worst = min(worst, lap - C0 * d ** k / d ** 2)
            count += 1
    rep.add("barrier_on_K", worst >= -barrier_tol, worst)
    rep.samples = count
    h = barrier(n, k, R)
    hs = normal_profile(h, P, R, depths)
    slope_h, _ = loglog_slope(hs, window=None)
    rep.fitted_constants["barrier_exponent"] = slope_h

    if w is None:
        rep.conclusion = "barrier verified" if worst >= -barrier_tol else "barrier inequality fails"
        rep.series["barrier_profile"] = (("t", "h"), hs)
        return rep

    pts = []
    gx, gy = _slice_grid(R, 40)
    for a in gx:
        for b in gy:
            if math.hypot(a, b) < R * 0.995:
                pts.append(_embed(n, a, b))
    vals = [w(x) for x in pts]
    rep.add("w_positive", min(vals) > 0, min(vals))
    wP = w(P * (1 - 1e-15))
    rep.add("w_vanishes_at_P", abs(wP) <= 1e-8, abs(wP))
    margin, where = lap_bound_margin(w, C0, n, R, pts)
    rep.add("lap_bound", margin >= 0, margin, note=f"worst at {where}")
    prof = normal_profile(w, P, R, depths)
    a_fit = min(val / d ** k for d, val in prof)
    slope_w, r2 = loglog_slope(prof)
    rep.fitted_constants.update({"a": a_fit, "w_exponent": slope_w, "w_fit_r2": r2})
    rep.add("growth_bound", a_fit > 0, a_fit, note="w >= a |x-P|^k along the inner normal")
    rep.series["normal_profile"] = (("t", "w", "bound"), [(d, val, a_fit * d ** k) for d, val in prof])
    if rep.broken and "growth_bound" not in rep.broken:
        rep.conclusion = "hypothesis-failure: " + ", ".join(rep.broken)
    elif rep.broken:
        rep.conclusion = "growth bound violated"
    else:
        rep.conclusion = f"w >= {a_fit:.4g} |x-P|^{k:.4g} along the inner normal"
    return rep


def _normal_derivative_zero(prof):
    """Decide dw/dnu(P) = 0 from the decay of w(d)/d."""
    slope, _ = loglog_slope([(d, v) for d, v in prof if v > 0]) if sum(v > 0 for _, v in prof) >= 4 else (math.inf, 1)
    d_min, v_min = min(prof)
    return slope > 1.05, v_min / d_min, slope


def hopf_c0_lt2_corollary_check(w: ScalarField, C0: float, n: int = 2, R: float = 1.0, P=None,
                                layer: float = 0.1, grid: int = 60) -> CheckReport:
    """Nonzero w cannot satisfy every hypothesis of the C0 < 2 corollary; name the one that breaks."""
    if not C0 < 2:
        raise ValueError("the corollary is stated for C0 < 2")
    rep = CheckReport("hopf_c0_lt2_corollary")
    P = _embed(n, -R, 0.0) if P is None else np.asarray(P, dtype=float)
    xs, ys = _slice_grid(R, grid)
    inside, layer_pts = [], []
    for a in xs:
        for b in ys:
            r = math.hypot(a, b)
            if r < R * 0.999:
                x = _embed(n, a, b)
                inside.append(x)
                if r > R - layer:
                    layer_pts.append(x)
    vals = np.array([w(x) for x in inside])
    rep.samples = len(inside)
    if np.max(np.abs(vals)) <= 1e-8:
        rep.add("w_nonnegative", True, float(vals.min()))
        rep.conclusion = "consistent: w vanishes on the probe region"
        return rep
    rep.add("w_nonnegative", vals.min() >= -1e-12, float(vals.min()))
    margin, where = lap_bound_margin(w, C0, n, R, layer_pts)
    rep.add("lap_bound_layer", margin >= 0, margin, note=f"worst at {where}")
    wP = w(P * (1 - 1e-15))
    rep.add("w_vanishes_at_P", abs(wP) <= 1e-8, abs(wP))
    prof = normal_profile(w, P, R, np.geomspace(1e-2, 1e-6, 12))
    zero, quotient, slope = _normal_derivative_zero(prof)
    rep.add("normal_derivative_zero", zero, quotient)
    # second normal derivative probe: it must stay bounded for a C^2 function
    d2 = []
    for d in (1e-2, 1e-3, 1e-4):
        (_, a), (_, b), (_, c) = normal_profile(w, P, R, [d, 2 * d, 3 * d])
        d2.append(abs(a - 2 * b + c) / d ** 2)
    growing = d2[-1] > 3 * d2[0] and d2[-1] > 1.0
    rep.add("C2_up_to_boundary", not growing, d2[-1], note="second normal difference at depths 1e-2..1e-4")
    rep.fitted_constants.update({"normal_slope": slope, "second_normal_diff": d2[-1]})
    if rep.broken:
        rep.conclusion = "hypothesis-failure: " + ", ".join(rep.broken)
    else:
        rep.conclusion = "contradiction: nonzero w satisfies every sampled hypothesis"
    return rep


def infinite_order_barrier_check(w: ScalarField, C0: float | None = None, ts=None) -> CheckReport:
    """w >= 0 vanishing to infinite order at t = 0 with Lap w <= C0 w / t^2 forces w = 0.

    ``w`` is a field on (t, y) with t = x[0]; probes run along the t-axis.
    """
    rep = CheckReport("infinite_order_barrier")
    ts = np.geomspace(0.5, 1e-2, 24) if ts is None else np.asarray(ts, dtype=float)
    x = lambda t: _embed(w.dim, t, 0.0) if w.dim > 1 else np.array([t])
    vals = [(float(t), w(x(t))) for t in ts]
    rep.samples = len(vals)
    if all(abs(v) <= 1e-300 for _, v in vals):
        rep.add("w_nonnegative", True, 0.0)
        rep.conclusion = "consistent: w vanishes on the probes"
        return rep
    rep.add("w_nonnegative", min(v for _, v in vals) >= 0, min(v for _, v in vals))
    pos = [(t, v) for t, v in vals if v > 0]
    slope, _ = loglog_slope(pos)
    trend = windowed_slopes(pos)
    infinite = slope > 20 or trend[-1] - trend[0] > 2.0
    if not infinite:
        raise OrderError(f"w vanishes to finite order (log-log slope {slope:.3f}); the barrier needs infinite order")
    rep.add("infinite_order", True, slope)
    ratios = []
    for t, v in pos:
        _, lap, _ = _laplacian(w, x(t))
        ratios.append((t, v, lap * t * t / v))
    rs = [r for _, _, r in ratios]
    sup = max(rs)
    unbounded = rs[-1] > 10 * rs[0] and rs[-1] == sup
    if C0 is None:
        rep.add("lap_bound_some_C0", not unbounded, sup, note="Lap w t^2 / w")
    else:
        rep.add("lap_bound", sup <= C0, C0 - sup)
    rep.fitted_constants["sup_ratio"] = sup
    rep.series["ratio"] = (("t", "w", "ratio"), ratios)
    rep.conclusion = ("hypothesis-failure: " + ", ".join(rep.broken)) if rep.broken else \
        "contradiction: nonzero w satisfies every sampled hypothesis"
    return rep
