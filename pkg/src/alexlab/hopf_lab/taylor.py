"""Degenerate expansions u = sum_j t^j a_j(y) of solutions of Lap u = f(y, u), and the recursion that recovers a_m from f.

The y-variables live on a periodic grid so that Lap_y of a coefficient is spectral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from ..errors import ConvergenceError, OrderError, PreconditionError
from .report import CheckReport


# --- y-side ---------------------------------------------------------------------------

@dataclass(frozen=True)
class YGrid:
    """Periodic grid on [0, 2 pi)^d with d = n - 1."""

    d: int
    nodes: int = 16

    @property
    def points(self) -> np.ndarray:
        ax = 2 * np.pi * np.arange(self.nodes) / self.nodes
        mesh = np.meshgrid(*[ax] * self.d, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @property
    def size(self) -> int:
        return self.nodes ** self.d

    def laplacian(self, values) -> np.ndarray:
        """Spectral Lap_y; exact for trigonometric polynomials of degree < nodes/2."""
        v = np.asarray(values, dtype=float).reshape((self.nodes,) * self.d)
        kk = np.fft.fftfreq(self.nodes, 1.0 / self.nodes)
        k2 = sum(np.meshgrid(*[kk ** 2] * self.d, indexing="ij"))
        return np.real(np.fft.ifftn(-k2 * np.fft.fftn(v))).ravel()


@dataclass(frozen=True)
class TrigPoly:
    """c0 + sum_i c_i cos(kappa_i . y + phase_i), with its exact Laplacian."""

    c0: float
    terms: tuple = ()

    def __call__(self, Y) -> np.ndarray:
        Y = np.atleast_2d(Y)
        out = np.full(len(Y), float(self.c0))
        for c, kv, ph in self.terms:
            out += c * np.cos(Y @ np.asarray(kv, dtype=float) + ph)
        return out

    def laplacian(self, Y) -> np.ndarray:
        Y = np.atleast_2d(Y)
        out = np.zeros(len(Y))
        for c, kv, ph in self.terms:
            kv = np.asarray(kv, dtype=float)
            out -= c * (kv @ kv) * np.cos(Y @ kv + ph)
        return out


# --- manufactured solutions -------------------------------------------------------------

@dataclass
class DegenerateExpansion:
    """u(t, y) = sum_{j=k}^{m} t^j a_j(y) with a_k > 0."""

    k: int
    n: int
    coeffs: dict  # j -> TrigPoly
    grid: YGrid = None

    def __post_init__(self):
        if self.k < 1:
            raise PreconditionError("expansion order k must be >= 1")
        if self.grid is None:
            self.grid = YGrid(self.n - 1)
        ak = self.coeffs[self.k](self.grid.points)
        if np.min(ak) <= 0:
            raise PreconditionError("a_k must be positive on the y-grid")

    @property
    def orders(self):
        return sorted(self.coeffs)

    def values(self, j, Y=None) -> np.ndarray:
        Y = self.grid.points if Y is None else Y
        return self.coeffs[j](Y) if j in self.coeffs else np.zeros(len(np.atleast_2d(Y)))

    def u(self, t, Y):
        return sum(t ** j * self.coeffs[j](Y) for j in self.orders)

    def u_t(self, t, Y):
        return sum(j * t ** (j - 1) * self.coeffs[j](Y) for j in self.orders)

    def lap(self, t, Y):
        return sum(j * (j - 1) * t ** (j - 2) * self.coeffs[j](Y) * (j >= 2) + t ** j * self.coeffs[j].laplacian(Y)
                   for j in self.orders)

    def lap_t(self, t, Y):
        return sum(j * (j - 1) * (j - 2) * t ** (j - 3) * self.coeffs[j](Y) * (j >= 3)
                   + j * t ** (j - 1) * self.coeffs[j].laplacian(Y) for j in self.orders)

    def solve_t(self, s, Y, guess=None):
        """t > 0 with u(t, y) = s, by Newton from (s / a_k)^(1/k)."""
        Y = np.atleast_2d(Y)
        s = np.asarray(s)
        s = np.broadcast_to(s.astype(complex if np.iscomplexobj(s) else float), (len(Y),))
        ak = self.coeffs[self.k](Y)
        t = (s / ak) ** (1.0 / self.k) if guess is None else np.array(guess, dtype=s.dtype)
        for _ in range(60):
            step = (self.u(t, Y) - s) / self.u_t(t, Y)
            t = t - step
            if np.all(np.abs(step) <= 1e-15 * np.maximum(np.abs(t), 1e-300)):
                return t
        if np.all(np.abs(self.u(t, Y) - s) <= 1e-13 * np.maximum(np.abs(s), 1e-300)):
            return t
        raise ConvergenceError("Newton inverse of u(., y) did not converge")

    def consistency(self, f, ts=None) -> list:
        """max_y |Lap u - f(y, u)| at each t; tiny when f was manufactured from this u."""
        ts = np.geomspace(1e-1, 1e-3, 6) if ts is None else ts
        Y = self.grid.points
        res = [float(np.max(np.abs(self.lap(t, Y) - f(Y, self.u(t, Y))))) for t in ts]
        return res


@dataclass
class SourceOracle:
    """f(y, s) = Lap u(t(s, y), y) for a manufactured expansion; ``ds`` is f_u."""

    expansion: DegenerateExpansion
    evaluations: int = field(default=0, repr=False)

    def __call__(self, Y, s, guess=None):
        e = self.expansion
        t = e.solve_t(s, Y, guess)
        self.evaluations += 1
        return e.lap(t, np.atleast_2d(Y))

    def ds(self, Y, s):
        e = self.expansion
        Y = np.atleast_2d(Y)
        t = e.solve_t(s, Y)
        return e.lap_t(t, Y) / e.u_t(t, Y)


def manufactured(k: int, n: int, extra: int = 3, nodes: int = 16, seed: int = 0) -> DegenerateExpansion:
    """a_k plus ``extra`` higher coefficients, smooth trigonometric functions of y with seeded amplitudes."""
    rng = np.random.default_rng(seed)
    d = n - 1
    coeffs = {}
    for j in range(k, k + extra + 1):
        kv1 = np.zeros(d)
        kv1[0] = 1
        kv2 = np.ones(d) * (2 if d == 1 else 1)
        c1, c2 = rng.uniform(-0.3, 0.3, 2)
        ph = rng.uniform(0, 2 * np.pi, 2)
        c0 = 1.0 if j == k else float(rng.uniform(-1, 1))
        coeffs[j] = TrigPoly(c0, ((float(c1), tuple(kv1), float(ph[0])), (float(c2), tuple(kv2), float(ph[1]))))
    return DegenerateExpansion(k, n, coeffs, YGrid(d, nodes))


# --- power-series helpers (ascending coefficients, truncated) ---------------------------------

def _mul(a, b, N):
    return np.convolve(a, b)[: N + 1] if len(a) and len(b) else np.zeros(N + 1)


def _pad(a, N):
    out = np.zeros(N + 1)
    out[: min(len(a), N + 1)] = a[: N + 1]
    return out


def _pow1(a, alpha, N):
    """(a)^alpha for a series with a[0] = 1 (J.C.P. Miller recurrence)."""
    a = _pad(a, N)
    b = np.zeros(N + 1)
    b[0] = 1.0
    for m in range(1, N + 1):
        j = np.arange(1, m + 1)
        b[m] = np.sum(((alpha + 1) * j - m) * a[j] * b[m - j]) / m
    return b


def _ipow(a, p, N):
    out = _pad([1.0], N)
    for _ in range(p):
        out = _mul(out, a, N)
    return _pad(out, N)


def reversion(c: dict, k: int, N: int) -> np.ndarray:
    """Series t(lam) = lam (1 + w(lam)) solving sum_j c_j t^j = c_k lam^k, up to lam^N."""
    ak = c[k]
    w1 = _pad([1.0], N)  # 1 + w
    for _ in range(N + 2):
        rhs = _pad([1.0], N)
        for j, cj in c.items():
            if j > k:
                shift = np.zeros(N + 1)
                term = _ipow(w1, j, N)
                shift[j - k:] = term[: N + 1 - (j - k)] if j - k <= N else 0
                rhs = rhs - (cj / ak) * shift
        w1 = _pow1(rhs, 1.0 / k, N)
    t = np.zeros(N + 1)
    t[1:] = w1[:N]
    return t


def lap_series(c: dict, lap: dict, k: int, N: int) -> np.ndarray:
    """lam-series of Lap(sum_j t^j a_j) along t = t(lam), up to lam^N."""
    t = reversion(c, k, N)
    out = np.zeros(N + 1)
    for j, cj in c.items():
        if j >= 2:
            out += j * (j - 1) * cj * _ipow(t, j - 2, N)
        out += lap.get(j, 0.0) * _ipow(t, j, N)
    return out


def _series_cauchy(f, Y_i, ak, k, N, r, M=64):
    """Taylor coefficients from samples on the circle |lam| = r (trapezoid rule = FFT)."""
    lam = r * np.exp(2j * np.pi * np.arange(M) / M)
    g = np.asarray(f(np.repeat(Y_i, M, axis=0), ak * lam ** k, guess=lam), dtype=complex)
    c = np.fft.fft(g) / M / r ** np.arange(M)
    if np.max(np.abs(c[: N + 1].imag)) > 1e-8 * max(1.0, np.max(np.abs(c[: N + 1]))):
        raise ValueError("g is not real on the real axis")
    return c[: N + 1].real


def _series_chebyshev(f, Y_i, ak, k, N, r, degree=12, M=60):
    """Least-squares Chebyshev fit on [0, r], converted to monomials."""
    x = np.cos(np.pi * (np.arange(M) + 0.5) / M)
    lam = 0.5 * r * (x + 1)
    g = np.array([f(Y_i, ak * l ** k)[0] for l in lam])
    cheb = C.Chebyshev.fit(lam, g, degree, domain=[0, r])
    return _pad(cheb.convert(kind=np.polynomial.Polynomial).coef, N)


def source_series(f, Y_i, ak: float, k: int, N: int, r: float = 0.1, method: str = "auto") -> np.ndarray:
    """Taylor coefficients in lam of g(lam) = f(y, a_k lam^k), up to lam^N.

    "cauchy" evaluates f at complex lam (f must continue analytically and accept a
    ``guess`` for the branch t ~ lam); "chebyshev" uses real samples on [0, r] only.
    "auto" tries the first and falls back to the second.
    """
    if method in ("auto", "cauchy"):
        try:
            with np.errstate(all="ignore"):
                return _series_cauchy(f, Y_i, ak, k, N, r)
        except (TypeError, ValueError, ArithmeticError, ConvergenceError):
            if method == "cauchy":
                raise
    return _series_chebyshev(f, Y_i, ak, k, N, r)


def taylor_recursion(f, expansion_or_ak, k: int, m_max: int, grid: YGrid | None = None, r: float = 0.1,
                     method: str = "auto", known: dict | None = None) -> dict:
    """Recover a_{k+1..m_max} on the y-grid from f and a_k (and a_1 when k = 1).

    Matching the lam^{m-2} coefficient of Lap u(t(lam), y) against that of
    f(y, a_k lam^k) is linear in a_m with slope m(m-1) - (k-1)(k-2).
    """
    if isinstance(expansion_or_ak, DegenerateExpansion):
        grid = expansion_or_ak.grid
        ak = expansion_or_ak.values(k)
    else:
        ak = np.asarray(expansion_or_ak, dtype=float)
    if grid is None:
        raise PreconditionError("a y-grid is needed")
    if np.min(ak) <= 0:
        raise PreconditionError("a_k must be positive (expansion order condition)")
    if k >= 2 and m_max >= k + 1 and (k + 1) * k <= (k - 1) * (k - 2):
        raise PreconditionError("degenerate recursion coefficient")
    Y = grid.points
    N = max(m_max - 2, 0)
    A = {k: ak}
    if known:
        A.update({j: np.asarray(v, dtype=float) for j, v in known.items()})
    lapA = {j: grid.laplacian(v) for j, v in A.items()}
    G = np.array([source_series(f, Y[i:i + 1], ak[i], k, N, r, method) for i in range(len(Y))])
    for m in range(k + 1, m_max + 1):
        if m in A:
            continue
        am = np.zeros(len(Y))
        for i in range(len(Y)):
            c = {j: A[j][i] for j in A if j < m}
            lp = {j: lapA[j][i] for j in A if j < m}
            E0 = lap_series({**c, m: 0.0}, lp, k, N)[m - 2]
            E1 = lap_series({**c, m: 1.0}, lp, k, N)[m - 2]
            am[i] = (G[i, m - 2] - E0) / (E1 - E0)
        A[m] = am
        lapA[m] = grid.laplacian(am)
    return {j: v for j, v in A.items() if j > k}


# --- asymptotics of f ---------------------------------------------------------------------------

def _limit_table(values, s):
    return [(float(si), float(v)) for si, v in zip(s, values)]


def f_asymptotics_check(f, expansion: DegenerateExpansion, k: int | None = None, s=None,
                        rtol: float = 0.01) -> CheckReport:
    """Ratios of f and f_u against their predicted s -> 0 limits, at every y-node.

    Errors are relative to the size of the limit field (max over y), so nodes
    where the limit happens to cross zero do not blow up the comparison.
    """
    e = expansion
    k = e.k if k is None else k
    rep = CheckReport("f_asymptotics")
    s = np.geomspace(1e-3, 1e-10, 15) if s is None else np.asarray(s, dtype=float)
    Y = e.grid.points
    ak = e.values(k)
    if np.min(ak) <= 0:
        raise PreconditionError(f"a_{k} must be positive on the y-grid")
    rep.samples = len(s) * len(Y)
    fs = np.array([f(Y, si) for si in s])  # (len(s), nodes)
    if k >= 2:
        ratio = fs * s[:, None] ** ((2 - k) / k) / ak ** (2 / k)
        drift = float(np.max(np.abs(ratio[-1] - ratio[-2]) / np.abs(ratio[-1])))
        if drift > 1e-2:
            raise OrderError(f"f s^((2-k)/k) does not settle for k={k}; expansion order mismatch")
        lim = k * (k - 1)
        err = float(np.max(np.abs(ratio[-1] - lim) / lim))
        rep.add("f_ratio_limit", err <= rtol, err, note=f"f s^((2-k)/k) / a_k^(2/k) -> {lim}")
        rep.fitted_constants["f_ratio_limit"] = float(np.mean(ratio[-1]))
        rep.series["f_ratio"] = (("s", "ratio"), _limit_table(ratio[:, 0], s))
    else:
        if not np.all(np.isfinite(fs)) or np.max(np.abs(fs[-1] - fs[-2])) > 1e-2 * max(1.0, np.max(np.abs(fs[-1]))):
            raise OrderError("f(y, s) does not settle as s -> 0 for k=1")
    fu = np.array([f.ds(Y, si) for si in s])
    if k == 1:
        q = np.abs(np.diff(fs, axis=0)) / np.abs(np.diff(s))[:, None]
        pred = (6 * e.values(3) + e.coeffs[1].laplacian(Y)) / e.values(1)
        err = float(np.max(np.abs(fu[-1] - pred)) / max(float(np.max(np.abs(pred))), 1e-12))
        rep.add("fs_quotient_bounded", bool(np.all(np.isfinite(q))), float(np.max(q)), note="sup of difference quotients in s")
        rep.add("fu_limit_k1", err <= rtol, err, note="f_u -> (6 a_3 + Lap_y a_1) / a_1")
        rep.fitted_constants["fs_sup_quotient"] = float(np.max(q))
        rep.series["f_u"] = (("s", "f_u"), _limit_table(fu[:, 0], s))
    elif k == 2:
        val = np.sqrt(s)[:, None] * fu
        pred = 3 * e.values(3) / np.sqrt(e.values(2))
        err = float(np.max(np.abs(val[-1] - pred)) / max(float(np.max(np.abs(pred))), 1e-12))
        rep.add("fu_limit_k2", err <= rtol, err, note="sqrt(s) f_u -> 3 a_3 / sqrt(a_2)")
        rep.fitted_constants["fu_limit"] = float(val[-1, 0])
        rep.series["fu_limit"] = (("s", "scaled_f_u"), _limit_table(val[:, 0], s))
    else:
        val = s[:, None] ** (2 / k) * fu / ak ** (2 / k)
        lim = (k - 1) * (k - 2)
        err = float(np.max(np.abs(val[-1] - lim) / lim))
        rep.add("fu_limit", err <= rtol, err, note=f"s^(2/k) f_u / a_k^(2/k) -> {lim}")
        rep.fitted_constants["fu_limit"] = float(np.mean(val[-1]))
        rep.series["fu_limit"] = (("s", "scaled_f_u"), _limit_table(val[:, 0], s))
    rep.conclusion = "limits match" if not rep.broken else "mismatch: " + ", ".join(rep.broken)
    return rep
