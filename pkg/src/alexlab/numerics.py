"""Shared numerical substrate: grids, stencils, a Jacobi eigensolver, bisection, log-log fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError

MAX_SYM_ORDER = 8


@dataclass(frozen=True)
class Grid:
    """Tensor grid; ``dims`` holds one ``(min, max, count)`` triple per axis."""

    dims: tuple[tuple[float, float, int], ...]

    def __post_init__(self):
        for lo, hi, count in self.dims:
            if count < 3:
                raise ValueError(f"grid axis needs at least 3 nodes, got {count}")
            if not hi > lo:
                raise ValueError(f"grid axis has nonpositive extent [{lo}, {hi}]")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / (count - 1) for lo, hi, count in self.dims)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(count for _, _, count in self.dims)

    def nodes(self, axis: int) -> np.ndarray:
        lo, hi, count = self.dims[axis]
        # lo + i*h rather than cumulative sums, so there is no drift
        return lo + np.arange(count) * ((hi - lo) / (count - 1))

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*[self.nodes(i) for i in range(self.ndim)], indexing="ij")


def as_sym(m) -> np.ndarray:
    """Validate a square matrix and return its exactly symmetric version (upper triangle wins)."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not 1 <= a.shape[0] <= MAX_SYM_ORDER:
        raise ValueError(f"matrix order must be in 1..{MAX_SYM_ORDER}, got {a.shape[0]}")
    upper = np.triu(a)
    out = upper + np.triu(a, 1).T
    if not np.all(np.isfinite(out)):
        raise ValueError("matrix has non-finite entries")
    return out


def sym_from_upper(values: Sequence[float], n: int) -> np.ndarray:
    """Build a symmetric matrix from its upper triangle listed row by row."""
    iu = np.triu_indices(n)
    if len(values) != len(iu[0]):
        raise ValueError(f"need {len(iu[0])} upper-triangle entries for order {n}")
    out = np.zeros((n, n))
    out[iu] = values
    return as_sym(out)


def eig_sym(m, tol: float = 1e-15, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for small symmetric matrices.

    Returns ascending eigenvalues and the matrix whose columns are the
    corresponding orthonormal eigenvectors.
    """
    a = as_sym(m)
    n = a.shape[0]
    q = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), q
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                # hypot avoids overflow of theta^2; for |theta| beyond ~1e154 t is 1/(2 theta)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[r, r] = c
                rot[p, r] = s
                rot[r, p] = -s
                a = rot.T @ a @ rot
                a[p, r] = a[r, p] = 0.0
                q = q @ rot
    else:
        raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], q[:, order]


def default_step(x: np.ndarray) -> np.ndarray:
    return np.maximum(1e-5, 1e-5 * np.abs(x))


def fd_gradient_hessian(f: Callable[[np.ndarray], float], x, h=None):
    """Central second-order differences for value, gradient and Hessian.

    ``h`` may be a scalar or a per-coordinate array; by default
    ``max(1e-5, 1e-5*|x_i|)``. Mixed second derivatives use the four-point
    stencil and the Hessian is symmetrized by averaging.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    hs = default_step(x) if h is None else np.broadcast_to(np.asarray(h, dtype=float), (n,)).copy()
    if np.any(hs <= 0):
        raise DomainError("finite-difference step must be positive")

    def sample(point):
        val = float(f(point))
        if not math.isfinite(val):
            raise DomainError(f"non-finite sample {val} at stencil point {point.tolist()}")
        return val

    f0 = sample(x)
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    e = np.eye(n)
    fp = np.zeros(n)
    fm = np.zeros(n)
    for i in range(n):
        fp[i] = sample(x + hs[i] * e[i])
        fm[i] = sample(x - hs[i] * e[i])
        grad[i] = (fp[i] - fm[i]) / (2 * hs[i])
        hess[i, i] = (fp[i] - 2 * f0 + fm[i]) / hs[i] ** 2
    for i in range(n):
        for j in range(i + 1, n):
            di, dj = hs[i] * e[i], hs[j] * e[j]
            mixed = (
                sample(x + di + dj) - sample(x + di - dj) - sample(x - di + dj) + sample(x - di - dj)
            ) / (4 * hs[i] * hs[j])
            hess[i, j] = hess[j, i] = mixed
    return f0, grad, 0.5 * (hess + hess.T)


def bisect_root(g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
                max_iter: int = 200, full_output: bool = False):
    """Bisection on a sign-changing bracket; returns the midpoint of the final bracket.

    With ``full_output`` the iteration count is returned as well.
    """
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise BracketError(f"g has the same sign at both ends: g({lo})={glo}, g({hi})={ghi}")
    if glo == 0:
        return (lo, 0) if full_output else lo
    if ghi == 0:
        return (hi, 0) if full_output else hi
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        it += 1
        if gm == 0:
            lo = hi = mid
            break
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return (root, it) if full_output else root


def loglog_slope(samples, window: int | None = 6) -> tuple[float, float]:
    """Least-squares slope of log w against log t and the fit's r^2.

    ``samples`` is a sequence of ``(t, w)`` pairs with t decreasing toward 0.
    Only the ``window`` smallest-t samples are used (all when ``None``).
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (t, w) pairs")
    if len(arr) < 4:
        raise ValueError("need at least 4 samples")
    if np.any(arr <= 0):
        raise DomainError("log-log fit needs strictly positive t and w")
    arr = arr[np.argsort(arr[:, 0])]
    if window is not None:
        arr = arr[: max(window, 4)]
    lt, lw = np.log(arr[:, 0]), np.log(arr[:, 1])
    A = np.vstack([lt, np.ones_like(lt)]).T
    coef, *_ = np.linalg.lstsq(A, lw, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((lw - pred) ** 2))
    ss_tot = float(np.sum((lw - lw.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2


def windowed_slopes(samples, window: int = 6) -> list[float]:
    """Local log-log slopes on successive windows, largest t first."""
    arr = np.asarray(samples, dtype=float)
    arr = arr[np.argsort(-arr[:, 0])]
    out = []
    for start in range(0, len(arr) - window + 1, max(1, window // 2)):
        out.append(loglog_slope(arr[start:start + window], window=None)[0])
    return out
