"""Graph-patch curvature algebra and symmetric functions of principal curvatures.

Sign convention: a graph ``x_{n+1} = u(x)`` is measured against its upward
normal ``(-grad u, 1)/w``. Callers orient patches so that "up" is the inner
normal of the enclosed body; the unit sphere then has all curvatures +1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConeMembershipError, DomainError
from .numerics import eig_sym, fd_gradient_hessian


@dataclass
class ScalarField:
    """A C^2 scalar function on an open box.

    ``fn`` returns the value. When ``grad`` and ``hess`` are supplied the
    field is *analytic*; otherwise derivatives come from central differences.
    """

    fn: Callable[[np.ndarray], float]
    dim: int
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    hess: Callable[[np.ndarray], np.ndarray] | None = None
    fd_step: float | None = None
    smoothness: str = "C2"

    def __post_init__(self):
        self.lo = np.full(self.dim, -np.inf) if self.lo is None else np.asarray(self.lo, float)
        self.hi = np.full(self.dim, np.inf) if self.hi is None else np.asarray(self.hi, float)

    @property
    def provenance(self) -> str:
        return "analytic" if self.grad is not None and self.hess is not None else "fd-sampled"

    def check_interior(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(self.dim)
        if np.any(x <= self.lo) or np.any(x >= self.hi):
            raise DomainError(f"point {x.tolist()} is not interior to the field's box")
        return x

    def __call__(self, x) -> float:
        return float(self.fn(np.asarray(x, dtype=float)))

    def evaluate(self, x) -> tuple[float, np.ndarray, np.ndarray]:
        x = self.check_interior(x)
        if self.provenance == "analytic":
            h = np.asarray(self.hess(x), dtype=float)
            return float(self.fn(x)), np.asarray(self.grad(x), dtype=float), 0.5 * (h + h.T)
        return fd_gradient_hessian(self.fn, x, self.fd_step)


def quadratic_field(hess, grad=None, c: float = 0.0) -> ScalarField:
    """u(x) = c + g.x + x^T H x / 2 with exact derivatives."""
    H = np.asarray(hess, dtype=float)
    n = H.shape[0]
    g = np.zeros(n) if grad is None else np.asarray(grad, dtype=float)
    return ScalarField(
        fn=lambda x: c + g @ x + 0.5 * x @ H @ x,
        dim=n,
        grad=lambda x: g + H @ x,
        hess=lambda x: H,
    )


def sphere_cap_field(n: int, radius: float = 1.0) -> ScalarField:
    """Lower cap of a sphere touching the origin: u = R - sqrt(R^2 - |x|^2)."""
    R = radius

    def fn(x):
        return R - math.sqrt(R * R - x @ x)

    def grad(x):
        return x / math.sqrt(R * R - x @ x)

    def hess(x):
        d = R * R - x @ x
        return np.eye(n) / math.sqrt(d) + np.outer(x, x) / d ** 1.5

    lim = R / math.sqrt(n)
    return ScalarField(fn, n, lo=np.full(n, -lim), hi=np.full(n, lim), grad=grad, hess=hess)


# --- curvature of graphs from (grad u, Hessian u) ---------------------------

def mean_curvature_pN(p, N) -> float:
    """(1/n) sum_ij (delta_ij/w - p_i p_j / w^3) N_ij, the expanded divergence form."""
    p = np.asarray(p, dtype=float)
    N = np.asarray(N, dtype=float)
    n = p.size
    w2 = 1.0 + p @ p
    w = math.sqrt(w2)
    return (np.trace(N) / w - p @ N @ p / (w2 * w)) / n


def mean_curvature_coefficients(p) -> np.ndarray:
    """dH/dN_ij at gradient p (H is linear in N)."""
    p = np.asarray(p, dtype=float)
    n = p.size
    w2 = 1.0 + p @ p
    w = math.sqrt(w2)
    return (np.eye(n) / w - np.outer(p, p) / (w2 * w)) / n


def mean_curvature_dp(p, N) -> np.ndarray:
    """Gradient of H(p, N) with respect to p."""
    p = np.asarray(p, dtype=float)
    N = np.asarray(N, dtype=float)
    n = p.size
    w2 = 1.0 + p @ p
    w = math.sqrt(w2)
    Np = N @ p
    return (-np.trace(N) * p / (w2 * w) - 2.0 * Np / (w2 * w) + 3.0 * (p @ Np) * p / (w2 * w2 * w)) / n


def second_fundamental_form_pN(p, N) -> np.ndarray:
    """A_il of a graph in the orthonormal frame adapted to its first fundamental form."""
    p = np.asarray(p, dtype=float)
    N = np.asarray(N, dtype=float)
    w = math.sqrt(1.0 + p @ p)
    Np = N @ p
    pNp = p @ Np
    d = w * (1.0 + w)
    A = N - np.outer(p, Np) / d - np.outer(Np, p) / d + np.outer(p, p) * pNp / d ** 2
    A = A / w
    return 0.5 * (A + A.T)


def mean_curvature_graph(u: ScalarField, x) -> float:
    _, p, N = u.evaluate(x)
    return mean_curvature_pN(p, N)


def second_fundamental_form(u: ScalarField, x) -> np.ndarray:
    _, p, N = u.evaluate(x)
    return second_fundamental_form_pN(p, N)


def principal_curvatures_graph(u: ScalarField, x) -> np.ndarray:
    return eig_sym(second_fundamental_form(u, x))[0]


def upward_normal(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.append(-p, 1.0) / math.sqrt(1.0 + p @ p)


@dataclass
class CurvatureData:
    point: np.ndarray
    normal: np.ndarray
    k: np.ndarray
    H: float
    A: np.ndarray
    source: str = "revolution"

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "normal": self.normal.tolist(),
            "k": self.k.tolist(),
            "H": self.H,
            "source": self.source,
        }


# --- symmetric functions -----------------------------------------------------

def elementary_symmetric(k: Sequence[float]) -> np.ndarray:
    """All of sigma_0..sigma_n via the product recurrence prod_i (1 + k_i x)."""
    e = np.zeros(len(k) + 1)
    e[0] = 1.0
    for j, ki in enumerate(k, start=1):
        e[1:j + 1] = e[1:j + 1] + ki * e[0:j]
    return e


def _check_m(k, m):
    if not 1 <= m <= len(k):
        raise DomainError(f"m must be in 1..{len(k)}, got {m}")


def sigma_m(k: Sequence[float], m: int) -> float:
    k = np.asarray(k, dtype=float)
    _check_m(k, m)
    return float(elementary_symmetric(k)[m])


def sigma_m_bruteforce(k: Sequence[float], m: int) -> float:
    """Subset enumeration; kept as an independent oracle."""
    return float(sum(math.prod(c) for c in itertools.combinations(list(k), m)))


def gamma_m_member(k: Sequence[float], m: int) -> bool:
    k = np.asarray(k, dtype=float)
    _check_m(k, m)
    e = elementary_symmetric(k)
    return bool(np.all(e[1:m + 1] > 0))


def g_m(k: Sequence[float], m: int) -> float:
    if not gamma_m_member(k, m):
        raise ConeMembershipError(f"k={list(k)} is not in Gamma_{m}")
    return sigma_m(k, m) ** (1.0 / m)


@dataclass
class GPropertyReport:
    samples: int
    violations: list = field(default_factory=list)
    max_hessian_eig: float = -math.inf
    min_gradient: float = math.inf

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "passed": self.passed,
            "violations": self.violations,
            "max_hessian_eig": self.max_hessian_eig,
            "min_gradient": self.min_gradient,
        }


def verify_g_properties(g: Callable[[np.ndarray], float], samples, h: float = 1e-4,
                        concavity_tol: float = 1e-6) -> GPropertyReport:
    """Check dg/dk_i > 0 and a negative semidefinite Hessian at each sample by central differences."""
    samples = [np.asarray(s, dtype=float) for s in samples]
    rep = GPropertyReport(samples=len(samples))
    for s in samples:
        try:
            _, grad, hess = fd_gradient_hessian(g, s, h)
        except (DomainError, ValueError) as exc:
            raise DomainError(f"sample {s.tolist()} outside the domain of g: {exc}") from exc
        top = float(np.linalg.eigvalsh(hess)[-1])
        rep.max_hessian_eig = max(rep.max_hessian_eig, top)
        rep.min_gradient = min(rep.min_gradient, float(grad.min()))
        if np.any(grad <= 0):
            rep.violations.append({"sample": s.tolist(), "kind": "gradient", "value": grad.tolist()})
        if top > concavity_tol:
            rep.violations.append({"sample": s.tolist(), "kind": "concavity", "value": top})
    return rep
