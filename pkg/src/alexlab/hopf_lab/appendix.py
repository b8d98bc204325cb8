"""Orthogonally invariant matrix functions, and the sqrt-gradient inequality for nonnegative functions."""

from __future__ import annotations

import math

import numpy as np

from ..errors import InstanceError, PreconditionError
from ..numerics import as_sym, eig_sym, loglog_slope
from ..surface_core import ScalarField
from .report import CheckReport


def _trace(N):
    return float(np.trace(N))


def _trace_of_square(N):
    return float(np.sum(N * N))


def _trace_squared(N):
    return float(np.trace(N)) ** 2


def _sigma2(N):
    lam, _ = eig_sym(N)
    return float(0.5 * (np.sum(lam) ** 2 - np.sum(lam ** 2)))


# "trace2" is tr(N^2); the square of the trace is "trace-squared"
BUILTIN_G = {
    "trace": _trace,
    "trace2": _trace_of_square,
    "trace-squared": _trace_squared,
    "sigma2": _sigma2,
}


def random_rotation(n: int, rng) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def _unit_offdiag(n: int, rng) -> np.ndarray:
    """Symmetric e with only e_{0a} = e_{a0} nonzero and |e| = 1."""
    e = np.zeros((n, n))
    v = rng.standard_normal(n - 1)
    e[0, 1:] = v
    e[1:, 0] = v
    return e / np.linalg.norm(e)


def _block_sample(n: int, rng, size: float) -> np.ndarray:
    """Random symmetric Nbar with Nbar_{0a} = 0 and Frobenius norm ``size``."""
    N = as_sym(rng.standard_normal((n, n)))
    N[0, 1:] = 0.0
    N[1:, 0] = 0.0
    return size * N / np.linalg.norm(N)


def h_of_e(G, Nbar, e, delta: float = 1e-3) -> float:
    """h(e) = d/dt G(Nbar + t e) at t = 1, by a central difference in t."""
    if not np.any(e):
        return 0.0
    return (G(Nbar + (1 + delta) * e) - G(Nbar + (1 - delta) * e)) / (2 * delta)


def invariant_G_bound(G, n: int = 3, samples: int = 6, directions: int = 3, eps=None, rotations: int = 8,
                      seed: int = 0, delta: float = 1e-3, even_tol: float = 1e-9, slope_min: float = 1.95):
    """Estimate C with |h(e)| <= C sum_b |N_{0b}|^2 on |N| <= 1, and check evenness of h.

    Returns ``(C_est, report)``. ``G`` may be a callable or a name from BUILTIN_G.
    """
    name = G if isinstance(G, str) else getattr(G, "__name__", "G")
    if isinstance(G, str):
        try:
            G = BUILTIN_G[G]
        except KeyError:
            raise InstanceError(f"unknown G {name!r}; known: {', '.join(BUILTIN_G)}") from None
    if n < 2:
        raise InstanceError("need n >= 2 for off-diagonal perturbations")
    rng = np.random.default_rng(seed)
    eps = np.geomspace(1e-4, 1e-1, 16) if eps is None else np.asarray(eps, dtype=float)
    rep = CheckReport("invariant_G_bound")

    worst = 0.0
    for _ in range(rotations):
        N = as_sym(rng.uniform(-1, 1, (n, n)))
        N /= max(1.0, np.linalg.norm(N))
        O = random_rotation(n, rng)
        g0 = G(N)
        worst = max(worst, abs(G(O.T @ N @ O) - g0) / max(1.0, abs(g0)))
    if worst > 1e-9:
        raise InstanceError(f"G is not orthogonally invariant (discrepancy {worst:.3e})")
    rep.add("invariance", True, worst, note="max relative |G(O^T N O) - G(N)| over random rotations")

    h0 = h_of_e(G, _block_sample(n, rng, 0.5), np.zeros((n, n)), delta)
    rep.add("h_zero", h0 == 0.0, abs(h0))

    even_res, ratios, slopes, rows = 0.0, [], [], []
    bound = 1.0 - eps.max()  # |Nbar + e| <= 1
    for i in range(samples):
        Nbar = _block_sample(n, rng, rng.uniform(0.2, bound))
        for j in range(directions):
            D = _unit_offdiag(n, rng)
            hs = []
            for ep in eps:
                e = ep * D
                hp, hm = h_of_e(G, Nbar, e, delta), h_of_e(G, Nbar, -e, delta)
                even_res = max(even_res, abs(hp - hm))
                off = float(np.sum(e[0, 1:] ** 2))
                hs.append(abs(hp))
                ratios.append((abs(hp), off))
                if i == 0 and j == 0:
                    rows.append((float(ep), float(hp), float(hm)))
            hs = np.array(hs)
            if np.all(hs > 0):
                slopes.append(loglog_slope(np.column_stack([eps, hs]), window=None)[0])
    rep.add("evenness", even_res <= even_tol, even_res, note="max |h(e) - h(-e)|")

    r = np.array(ratios)
    x, y = r[:, 1], r[:, 0]
    C_ls = float(np.sum(x * y) / np.sum(x * x))
    C_max = float(np.max(y / x))
    C_est = max(C_ls, C_max)
    if slopes:
        smin = float(min(slopes))
        rep.add("quadratic_slope", smin >= slope_min, smin, note="min log-log slope of |h| vs |e|")
    else:
        # h vanishes identically (e.g. trace): the quadratic bound holds with C = 0
        smin = math.nan
        rep.add("quadratic_slope", True, math.inf, note="h == 0 on all samples; slope vacuous")
    rep.add("quadratic_bound", bool(np.all(y <= C_est * x * (1 + 1e-12) + 1e-15)), C_est)
    rep.fitted_constants.update({"C_est": C_est, "C_lstsq": C_ls, "min_slope": smin})
    rep.samples = len(ratios)
    rep.details = {"G": name, "n": n, "delta": delta}
    rep.series["h_of_e"] = (("eps", "h_plus", "h_minus"), rows)
    rep.conclusion = f"|h(e)| <= {C_est:.6g} sum|N_0b|^2" if not rep.broken else "violated: " + ", ".join(rep.broken)
    return C_est, rep


def sqrt_gradient_bound_check(u_t: ScalarField, B: float, points=None, samples: int = 400, seed: int = 0,
                              floor: float = 1e-14) -> CheckReport:
    """sum_j |d_j u_t| <= C sqrt(u_t) with C = sqrt(2 d B) for u_t >= 0 and |D^2 u_t| <= B.

    The constant follows from the one-dimensional bound |f'|^2 <= 2 B f along the gradient
    direction, then Cauchy-Schwarz over the d coordinates.
    """
    if B <= 0:
        raise PreconditionError("B must be positive")
    d = u_t.dim
    if points is None:
        lo = np.where(np.isfinite(u_t.lo), u_t.lo, -1.0)
        hi = np.where(np.isfinite(u_t.hi), u_t.hi, 1.0)
        # the bound needs room around each point, so sample the middle half of the box
        mid, half = 0.5 * (lo + hi), 0.25 * (hi - lo)
        rng = np.random.default_rng(seed)
        points = mid + half * rng.uniform(-1, 1, (samples, d))
    C = math.sqrt(2 * d * B)
    rep = CheckReport("sqrt_gradient_bound")
    ratios, hess_max, neg = [], 0.0, 0.0
    for y in np.atleast_2d(points):
        val, g, H = u_t.evaluate(y)
        neg = min(neg, val)
        hess_max = max(hess_max, float(np.max(np.abs(np.linalg.eigvalsh(H)))))
        if val > floor:
            ratios.append(float(np.sum(np.abs(g)) / math.sqrt(val)))
    if neg < -floor:
        raise PreconditionError(f"u_t takes the negative value {neg:.3e}")
    rep.add("hessian_bound", hess_max <= B * (1 + 1e-9), B - hess_max, note="sampled |D^2 u_t| against B")
    top = max(ratios) if ratios else 0.0
    rep.add("sqrt_bound", top <= C * (1 + 1e-9), C - top)
    rep.fitted_constants.update({"C": C, "max_ratio": top})
    rep.samples = len(ratios)
    rep.conclusion = "holds" if not rep.broken else "violated: " + ", ".join(rep.broken)
    return rep
