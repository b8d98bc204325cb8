"""Strong comparison on Omega = {0 < t < 1, |y| < 1}: either u > v throughout or u = v."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import BracketError, InstanceError
from ..numerics import bisect_root, fd_gradient_hessian
from ..surface_core import ScalarField, mean_curvature_pN
from .report import CheckReport

OPERATORS = ("mean-curvature", "laplacian", "custom")


@dataclass
class ComparisonInstance:
    u: ScalarField
    v: ScalarField
    operator: str = "mean-curvature"
    F: Callable[[np.ndarray, np.ndarray], float] | None = None
    nodes: int = 21

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise InstanceError(f"operator must be one of {OPERATORS}")
        if self.operator == "custom" and self.F is None:
            raise InstanceError("custom operator needs F(p, N)")
        if self.u.dim != self.v.dim:
            raise InstanceError("u and v live on different dimensions")

    @property
    def dim(self) -> int:
        return self.u.dim

    def apply(self, field: ScalarField, x) -> float:
        _, p, N = field.evaluate(x)
        if self.operator == "mean-curvature":
            return mean_curvature_pN(p, N)
        if self.operator == "laplacian":
            return float(np.trace(N))
        return float(self.F(p, N))

    def samples(self) -> list[np.ndarray]:
        """Interior grid of Omega; for n > 2 the extra y-coordinates are sampled on a coarser grid."""
        ts = np.linspace(0, 1, self.nodes + 2)[1:-1]
        ys = np.linspace(-1, 1, self.nodes + 2)[1:-1]
        extra = np.linspace(-0.5, 0.5, 3)
        pts = []
        for t in ts:
            for y in ys:
                for rest in np.array(np.meshgrid(*[extra] * (self.dim - 2), indexing="ij")).reshape(self.dim - 2, -1).T \
                        if self.dim > 2 else [np.zeros(0)]:
                    x = np.concatenate([[t, y], rest])
                    if x[1:] @ x[1:] < 1:
                        pts.append(x)
        return pts

    def pairing_partner(self, x) -> float | None:
        """s in (0, 1) with v(s, y) = u(t, y), if any."""
        y = x[1:]
        target = self.u(x)
        g = lambda s: self.v(np.concatenate([[s], y])) - target
        grid = np.linspace(1e-9, 1 - 1e-9, 65)
        vals = [g(s) for s in grid]
        for a, b, ga, gb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if ga == 0:
                return float(a)
            if ga * gb < 0:
                try:
                    return bisect_root(g, a, b, tol=1e-13)
                except BracketError:
                    return None
        return None


def _ellipticity(ci: ComparisonInstance, x) -> float:
    """Smallest eigenvalue of dF/dN at the state of u at x (custom operators only)."""
    _, p, N = ci.u.evaluate(x)
    n = ci.dim
    iu = np.triu_indices(n)

    def F_flat(vec):
        M = np.zeros((n, n))
        M[iu] = vec
        M = M + np.triu(M, 1).T
        return ci.F(p, M)

    _, g, _ = fd_gradient_hessian(F_flat, N[iu], 1e-5)
    D = np.zeros((n, n))
    D[iu] = g
    D = 0.5 * (D + D.T)  # off-diagonal upper entries carry both N_ij and N_ji
    return float(np.linalg.eigvalsh(D)[0])


def trichotomy_check(ci: ComparisonInstance, touch_tol: float = 1e-10, ball: float = 0.1) -> CheckReport:
    rep = CheckReport("trichotomy")
    pts = ci.samples()
    rep.samples = len(pts)
    diffs = np.array([ci.u(x) - ci.v(x) for x in pts])
    rep.add("u_ge_v", diffs.min() >= -touch_tol, float(diffs.min()))
    slopes = np.array([max(ci.u.evaluate(x)[1][0], ci.v.evaluate(x)[1][0]) for x in pts])
    rep.add("max_ut_vt_positive", slopes.min() > 0, float(slopes.min()))
    if ci.operator == "custom":
        ell = min(_ellipticity(ci, x) for x in pts[:: max(1, len(pts) // 50)])
        rep.add("elliptic", ell > 0, ell)
    worst, paired = math.inf, 0
    for x in pts:
        s = ci.pairing_partner(x)
        if s is None:
            continue
        paired += 1
        xs = np.concatenate([[s], x[1:]])
        m = ci.apply(ci.v, xs) - ci.apply(ci.u, x)
        worst = min(worst, m)
    if paired == 0:
        raise InstanceError("pairing condition never applies: no s solves v(s, y) = u(t, y)")
    rep.add("pairing", worst >= -1e-9, worst, note=f"{paired} paired samples")
    rep.details["paired"] = paired
    if rep.broken:
        rep.conclusion = "counterexample-witness"
        i = int(np.argmin(diffs))
        rep.details["witness"] = {"point": pts[i].tolist(), "u_minus_v": float(diffs[i]), "broken": rep.broken}
        return rep
    i = int(np.argmin(diffs))
    if diffs[i] <= touch_tol:
        x0 = pts[i]
        near = [x for x in pts if np.linalg.norm(x - x0) <= ball]
        rng = np.random.default_rng(0)
        for _ in range(64):
            d = rng.normal(size=ci.dim)
            x = x0 + ball * rng.uniform() * d / np.linalg.norm(d)
            if 0 < x[0] < 1 and x[1:] @ x[1:] < 1:
                near.append(x)
        residual = max(abs(ci.u(x) - ci.v(x)) for x in near)
        residual_all = float(np.max(np.abs(diffs)))
        rep.fitted_constants.update({"ball_residual": residual, "domain_residual": residual_all})
        if residual <= 1e-8 and residual_all <= 1e-8:
            rep.conclusion = "identical"
        else:
            rep.conclusion = "counterexample-witness"
            rep.details["witness"] = {"point": x0.tolist(), "u_minus_v": float(diffs[i]), "ball_residual": residual}
    else:
        rep.conclusion = "strictly-greater"
        rep.fitted_constants["min_gap"] = float(diffs[i])
    return rep


def reflection_instance(v: ScalarField, operator: str = "mean-curvature") -> ComparisonInstance:
    """u(t, y) = v(-t, y)."""
    flip = np.ones(v.dim)
    flip[0] = -1.0
    grad = hess = None
    if v.grad is not None:
        grad = lambda x: flip * v.grad(flip * x)
        hess = lambda x: np.outer(flip, flip) * v.hess(flip * x)
    u = ScalarField(lambda x: v.fn(flip * x), v.dim, grad=grad, hess=hess)
    return ComparisonInstance(u, v, operator)
