"""Log-convexity of the spherical L^2 mass rho(s) for solutions of Lap u = V u.

With r = e^s and v = e^{(n-2)s/2} u, rho(s) is the integral of v^2 over the unit
sphere; (r^2 V)_r >= 0 makes log rho convex wherever rho > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import PreconditionError
from .report import CheckReport


# --- sphere quadrature -----------------------------------------------------------------

def sphere_rule(n: int):
    """(nodes, weights) on S^{n-1}: 256-point trapezoid for n = 2, Gauss x trapezoid (12 x 24) for n = 3."""
    if n == 2:
        th = 2 * np.pi * np.arange(256) / 256
        return np.column_stack([np.cos(th), np.sin(th)]), np.full(256, 2 * np.pi / 256)
    if n == 3:
        ct, wt = np.polynomial.legendre.leggauss(12)
        ph = 2 * np.pi * np.arange(24) / 24
        CT, PH = np.meshgrid(ct, ph, indexing="ij")
        st = np.sqrt(1 - CT ** 2)
        nodes = np.column_stack([(st * np.cos(PH)).ravel(), (st * np.sin(PH)).ravel(), CT.ravel()])
        weights = np.repeat(wt, 24) * (2 * np.pi / 24)
        return nodes, weights
    raise PreconditionError(f"sphere quadrature implemented for n = 2, 3 (got {n})")


# --- instances -------------------------------------------------------------------------

@dataclass
class PDEInstance:
    """u, its gradient and the potential V, all vectorized over an (M, n) array of points."""

    n: int
    u: Callable
    grad: Callable | None = None
    V: Callable | None = None
    label: str = ""

    def potential(self, X):
        X = np.atleast_2d(X)
        return np.zeros(len(X)) if self.V is None else self.V(X)

    def gradient(self, X, h: float = 1e-6):
        if self.grad is not None:
            return self.grad(X)
        X = np.atleast_2d(X)
        g = np.zeros_like(X)
        for i in range(self.n):
            E = np.zeros(self.n)
            E[i] = h
            g[:, i] = (self.u(X + E) - self.u(X - E)) / (2 * h)
        return g


def harmonic_2d(m: int, scale: float = 1.0) -> PDEInstance:
    def u(X):
        return scale * np.real((X[:, 0] + 1j * X[:, 1]) ** m)

    def grad(X):
        d = scale * m * (X[:, 0] + 1j * X[:, 1]) ** (m - 1) if m > 0 else np.zeros(len(X))
        return np.column_stack([np.real(d), -np.imag(d)])

    return PDEInstance(2, u, grad, None, f"Re z^{m}")


_H3 = {
    0: (lambda x, y, z: np.ones_like(x), lambda x, y, z: (0 * x, 0 * x, 0 * x)),
    1: (lambda x, y, z: z, lambda x, y, z: (0 * x, 0 * x, 1 + 0 * x)),
    2: (lambda x, y, z: 2 * z * z - x * x - y * y, lambda x, y, z: (-2 * x, -2 * y, 4 * z)),
    3: (lambda x, y, z: z * (2 * z * z - 3 * x * x - 3 * y * y),
        lambda x, y, z: (-6 * x * z, -6 * y * z, 6 * z * z - 3 * x * x - 3 * y * y)),
}


def harmonic_3d(l: int, scale: float = 1.0) -> PDEInstance:
    if l not in _H3:
        raise PreconditionError(f"3-d harmonic of degree {l} not tabulated (0..3)")
    f, g = _H3[l]
    return PDEInstance(3, lambda X: scale * f(*X.T), lambda X: scale * np.column_stack(g(*X.T)), None,
                       f"zonal harmonic degree {l}")


def combine(*parts: PDEInstance) -> PDEInstance:
    """Sum of solutions of the same equation (V taken from the first part)."""
    n = parts[0].n
    return PDEInstance(
        n,
        lambda X: sum(p.u(X) for p in parts),
        lambda X: sum(p.gradient(X) for p in parts),
        parts[0].V,
        " + ".join(p.label for p in parts),
    )


def radial_constant_potential(c: float, n: int) -> PDEInstance:
    """Radial solution of Lap u = c u, c > 0, regular at the origin."""
    if c <= 0:
        raise PreconditionError("c must be positive")
    k = math.sqrt(c)
    if n == 2:
        terms = np.arange(40)
        coef = (c / 4.0) ** terms / np.array([math.factorial(j) ** 2 for j in terms], dtype=float)

        def prof(r):
            return np.polyval(coef[::-1], r * r)

        def dprof(r):
            return 2 * r * np.polyval((terms[1:] * coef[1:])[::-1], r * r)
    elif n == 3:
        def prof(r):
            kr = k * r
            return np.where(kr > 1e-8, np.sinh(kr) / np.where(kr > 0, kr, 1), 1.0)

        def dprof(r):
            kr = k * r
            return np.where(kr > 1e-8, (kr * np.cosh(kr) - np.sinh(kr)) / (k * np.maximum(r, 1e-300) ** 2), 0.0)
    else:
        raise PreconditionError("radial instance implemented for n = 2, 3")

    def grad(X):
        r = np.linalg.norm(X, axis=1)
        return (dprof(r) / np.maximum(r, 1e-300))[:, None] * X

    return PDEInstance(n, lambda X: prof(np.linalg.norm(X, axis=1)), grad,
                       lambda X: np.full(len(X), c), f"radial V={c}")


def flat_radial(n: int) -> PDEInstance:
    """u = exp(-1/r^2): vanishes to infinite order at 0; V = 4 r^-6 + (2n - 8) r^-4 has (r^2 V)_r < 0."""
    def u(X):
        r2 = np.sum(X * X, axis=1)
        return np.exp(-1.0 / r2)

    def grad(X):
        r2 = np.sum(X * X, axis=1)
        return (2 * np.exp(-1.0 / r2) / r2 ** 2)[:, None] * X

    def V(X):
        r2 = np.sum(X * X, axis=1)
        return 4 / r2 ** 3 + (2 * n - 8) / r2 ** 2

    return PDEInstance(n, u, grad, V, "exp(-1/r^2)")


# --- the series ------------------------------------------------------------------------

@dataclass
class FrequencySeries:
    instance: PDEInstance
    s: np.ndarray
    rho: np.ndarray
    identity_rhs: np.ndarray  # 2 * int (v_s^2 + |grad_theta v|^2 + m v^2)
    n: int = field(init=False)

    def __post_init__(self):
        self.n = self.instance.n

    @property
    def ds(self) -> float:
        return float(self.s[1] - self.s[0])

    @property
    def log_rho(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.rho)


def frequency_series(inst: PDEInstance, r_min: float = 0.1, r_max: float = 1.0, points: int = 201) -> FrequencySeries:
    """rho(s) and the right side of the rho_ss identity on a uniform s-grid inside (log r_min, log r_max)."""
    n = inst.n
    nodes, w = sphere_rule(n)
    a = (n - 2) / 2
    # open window: stay strictly inside the annulus
    s = np.linspace(math.log(r_min), math.log(r_max), points + 2)[1:-1]
    rho = np.empty(points)
    rhs = np.empty(points)
    for i, si in enumerate(s):
        r = math.exp(si)
        X = r * nodes
        u = inst.u(X)
        g = inst.gradient(X)
        xg = np.sum(X * g, axis=1)
        e = math.exp(2 * a * si)
        v2 = e * u * u
        vs2 = e * (xg + a * u) ** 2
        vth2 = e * (r * r * np.sum(g * g, axis=1) - xg ** 2)
        m = a * a + r * r * inst.potential(X)
        rho[i] = w @ v2
        rhs[i] = 2 * (w @ (vs2 + vth2 + m * v2))
    return FrequencySeries(inst, s, rho, rhs)


# --- hypothesis checks -------------------------------------------------------------------

def _laplacian_fd(u, X, h):
    """Fourth-order central-difference Laplacian; h is per point."""
    n = X.shape[1]
    out = np.zeros(len(X))
    hh = h[:, None]
    for i in range(n):
        E = np.zeros(n)
        E[i] = 1.0
        out += (-u(X + 2 * hh * E) + 16 * u(X + hh * E) - 30 * u(X) + 16 * u(X - hh * E) - u(X - 2 * hh * E)) / (12 * h * h)
    return out


def pde_residual(fs: FrequencySeries, stride: int = 20) -> float:
    """max |Lap u - V u| / (max|u| / r^2 + max|V u|), sphere by sphere, on every ``stride``-th sphere."""
    inst = fs.instance
    nodes, _ = sphere_rule(fs.n)
    worst = 0.0
    for si in fs.s[::stride]:
        r = math.exp(si)
        X = r * nodes
        u = inst.u(X)
        Vu = inst.potential(X) * u
        lap = _laplacian_fd(inst.u, X, np.full(len(X), 1e-4 * r))
        scale = float(np.max(np.abs(u))) / r ** 2 + float(np.max(np.abs(Vu)))
        if scale > 0:
            worst = max(worst, float(np.max(np.abs(lap - Vu))) / scale)
    return worst


def r2V_monotonicity(fs: FrequencySeries, stride: int = 10) -> float:
    """min over samples of (r^2 V)_r (central difference in r); +inf when V is None."""
    inst = fs.instance
    if inst.V is None:
        return math.inf
    nodes, _ = sphere_rule(fs.n)
    worst = math.inf
    for si in fs.s[::stride]:
        r = math.exp(si)
        h = 1e-5 * r
        f = lambda rr: rr * rr * inst.V(rr * nodes)
        worst = min(worst, float(np.min((f(r + h) - f(r - h)) / (2 * h))))
    return worst


def _positive_window(rho: np.ndarray, floor: float = 0.0) -> slice | None:
    """Longest contiguous run with rho > floor."""
    pos = rho > floor
    best, start, cur = None, None, 0
    for i, p in enumerate(np.append(pos, False)):
        if p and start is None:
            start = i
        elif not p and start is not None:
            if best is None or i - start > best.stop - best.start:
                best = slice(start, i)
            start = None
    return best


def frequency_convexity(fs: FrequencySeries, tol: float = 1e-6, pde_tol: float = 1e-6) -> CheckReport:
    """Second differences of log rho against -tol_disc, plus the rho_ss identity and the hypotheses."""
    rep = CheckReport("frequency_convexity")
    res = pde_residual(fs)
    rep.add("pde_residual", res <= pde_tol, res, note="relative |Lap u - V u|")
    mono = r2V_monotonicity(fs)
    rep.add("r2V_monotone", mono >= -1e-12, mono, note="min (r^2 V)_r on samples")
    win = _positive_window(fs.rho, 1e-300)
    if win is None or win.stop - win.start < 5:
        rep.add("rho_positive", False, 0.0, note="rho vanishes on the window")
        rep.conclusion = "rho == 0: nothing to check"
        rep.details = {"label": fs.instance.label, "n": fs.n, "window": None}
        return rep
    shrunk = win.stop - win.start < len(fs.rho)
    rep.add("rho_positive", True, float(np.min(fs.rho[win])), note="window shrunk to positive run" if shrunk else "")

    s, L, ds = fs.s[win], fs.log_rho[win], fs.ds
    d2 = (L[2:] - 2 * L[1:-1] + L[:-2]) / ds ** 2
    # truncation of the 3-point rule is ds^2/12 |(log rho)''''|; estimate the fourth derivative by differences
    d4 = np.zeros_like(d2)
    if len(L) >= 5:
        q = np.abs(L[4:] - 4 * L[3:-1] + 6 * L[2:-2] - 4 * L[1:-3] + L[:-4]) / ds ** 4
        d4[1:-1] = q
        d4[0], d4[-1] = q[0], q[-1]
    tol_disc = tol + ds ** 2 / 12 * d4
    margin = float(np.min(d2 + tol_disc))
    rep.add("log_convex", margin >= 0, margin, note="min (second difference + tol_disc)")

    # rho_ss / rho = (log rho)'' + (log rho)'^2, with 5-point rules on log rho, which stays smooth
    # even where rho itself changes by orders of magnitude per step
    L1 = (-L[4:] + 8 * L[3:-1] - 8 * L[1:-3] + L[:-4]) / (12 * ds)
    L2 = (-L[4:] + 16 * L[3:-1] - 30 * L[2:-2] + 16 * L[1:-3] - L[:-4]) / (12 * ds ** 2)
    lhs = L2 + L1 ** 2
    rhs = fs.identity_rhs[win][2:-2] / fs.rho[win][2:-2]
    ident = float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1.0)))
    rep.add("rho_ss_identity", ident <= 1e-5, ident, note="relative, rho_ss / rho from 5-point rules on log rho")

    rep.fitted_constants.update({
        "min_d2_log_rho": float(np.min(d2)),
        "max_abs_d2_log_rho": float(np.max(np.abs(d2))),
        "max_tol_disc": float(np.max(tol_disc)),
    })
    rep.samples = len(s)
    rep.details = {"label": fs.instance.label, "n": fs.n, "window": [float(s[0]), float(s[-1])]}
    rho_w = fs.rho[win]
    rep.series["log_rho"] = (("s", "rho", "log_rho", "d2_log_rho"),
                             [(float(a), float(r), float(b), float(c)) for a, r, b, c in zip(s[1:-1], rho_w[1:-1], L[1:-1], d2)])
    rep.conclusion = "log rho convex" if not rep.broken else "broken: " + ", ".join(rep.broken)
    return rep


def vanish_order_uniqueness(*series: FrequencySeries, growth: float = 4.0) -> CheckReport:
    """Unique continuation on instances: each series is either zero, of finite vanishing order,
    or decays super-polynomially while some hypothesis fails.

    A series counts as decaying super-polynomially when d(log rho)/ds at the inner end of
    the window exceeds its value at the outer end by more than ``growth``.
    """
    rep = CheckReport("vanish_order_uniqueness")
    outcomes = []
    for idx, fs in enumerate(series):
        conv = frequency_convexity(fs)
        tag = fs.instance.label or f"series{idx}"
        if conv.status("rho_positive") == "fails":
            outcomes.append({"label": tag, "outcome": "consistent", "reason": "rho == 0"})
            rep.add(f"{tag}:consistent", True, 0.0)
            continue
        L, s, ds = fs.log_rho, fs.s, fs.ds
        slope = np.gradient(L, ds)
        inner, outer = float(slope[1]), float(slope[-2])
        # tangent line at sbar (outer end) gives the lower bound rho >= C1 exp(C2 s) for s < sbar
        sbar = float(s[-2])
        C2 = outer
        C1 = math.exp(float(L[-2]) - C2 * sbar)
        line = math.log(C1) + C2 * s
        gap = float(np.min(L - line))
        order = (inner - (fs.n - 2)) / 2
        entry = {
            "label": tag, "lower_bound": {"C1": C1, "C2": C2, "sbar": sbar},
            "decay_fit": {"slope_inner": inner, "slope_outer": outer}, "bound_gap": gap,
        }
        if inner - outer <= growth:
            entry.update(outcome="no-infinite-order", vanishing_order=order)
            rep.add(f"{tag}:consistent", True, growth - (inner - outer))
        else:
            broken = [b for b in conv.broken if b != "log_convex"]
            entry.update(outcome="hypothesis-broken" if broken else "contradiction", broken=broken,
                         convexity=conv.status("log_convex"))
            rep.add(f"{tag}:consistent", bool(broken), gap,
                    note="super-polynomial decay; lower bound from convexity " + ("is" if gap < 0 else "is not") + " violated")
        outcomes.append(entry)
    rep.details = {"outcomes": outcomes}
    rep.samples = len(series)
    rep.conclusion = "consistent" if not rep.broken else "contradiction: " + ", ".join(rep.broken)
    return rep
