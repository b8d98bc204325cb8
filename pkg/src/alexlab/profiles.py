"""Axisymmetric closed hypersurfaces |X'| = rho(z) about the X_{n+1}-axis.

Profiles are described by the squared radius ``q(z) = rho(z)^2``. With simple
zeros of ``q`` at both ends this gives smooth caps, and all curvature formulas
below stay regular up to the poles. ``q`` is expected to be negative outside
``[z_min, z_max]`` so that "inside the body" is simply ``q(z) > |X'|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, PoleError
from .numerics import bisect_root
from .surface_core import (
    CurvatureData,
    ScalarField,
    mean_curvature_pN,
    principal_curvatures_graph,
    second_fundamental_form_pN,
    upward_normal,
)

POLE_DELEGATION = 1e-3


@dataclass
class RevolutionProfile:
    name: str
    q: Callable[[float], float]
    dq: Callable[[float], float]
    d2q: Callable[[float], float]
    z_min: float
    z_max: float
    n: int = 2
    params: dict = field(default_factory=dict)

    # --- basic geometry ---------------------------------------------------
    def rho(self, z: float) -> float:
        return math.sqrt(max(self.q(z), 0.0))

    def drho(self, z: float) -> float:
        r = self.rho(z)
        if r == 0.0:
            raise PoleError(f"rho' is unbounded at the pole z={z}")
        return self.dq(z) / (2 * r)

    def d2rho(self, z: float) -> float:
        r = self.rho(z)
        if r == 0.0:
            raise PoleError(f"rho'' is unbounded at the pole z={z}")
        return self.d2q(z) / (2 * r) - self.dq(z) ** 2 / (4 * r ** 3)

    @property
    def height(self) -> float:
        return self.z_max - self.z_min

    @property
    def center(self) -> float:
        return 0.5 * (self.z_min + self.z_max)

    def max_radius(self, samples: int = 4001) -> float:
        zs = np.linspace(self.z_min, self.z_max, samples)
        return max(self.rho(z) for z in zs)

    @property
    def diameter(self) -> float:
        return max(self.height, 2 * self.max_radius())

    def inside(self, r: float, z: float) -> bool:
        """Closed-body membership test for the point at distance ``r`` from the axis."""
        return self.q(z) >= r * r

    def nu_vertical(self, z: float) -> float:
        """nu_{n+1} of the inner unit normal; negative on the upper part of M."""
        qq, dq = self.q(z), self.dq(z)
        return dq / math.sqrt(4 * max(qq, 0.0) + dq * dq)

    def inner_normal(self, z: float) -> np.ndarray:
        """Inner normal at the meridian point (rho(z), 0, ..., 0, z)."""
        qq, dq = max(self.q(z), 0.0), self.dq(z)
        D = math.sqrt(4 * qq + dq * dq)
        nu = np.zeros(self.n + 1)
        nu[0] = -2 * math.sqrt(qq) / D
        nu[-1] = dq / D
        return nu

    def point(self, z: float, azimuth: float = 0.0) -> np.ndarray:
        X = np.zeros(self.n + 1)
        r = self.rho(z)
        X[0] = r * math.cos(azimuth)
        if self.n >= 2:
            X[1] = r * math.sin(azimuth)
        X[-1] = z
        return X

    def shifted(self, dz: float) -> "RevolutionProfile":
        q, dq, d2q = self.q, self.dq, self.d2q
        return RevolutionProfile(
            name=self.name,
            q=lambda z: q(z - dz),
            dq=lambda z: dq(z - dz),
            d2q=lambda z: d2q(z - dz),
            z_min=self.z_min + dz,
            z_max=self.z_max + dz,
            n=self.n,
            params={**self.params, "shift": self.params.get("shift", 0.0) + dz},
        )

    # --- curvature -----------------------------------------------------------
    def principal_curvatures(self, z: float) -> tuple[float, float]:
        """(meridian, parallel) curvatures with respect to the inner normal."""
        qq, dq, d2q = self.q(z), self.dq(z), self.d2q(z)
        D = 4 * qq + dq * dq
        if D <= 0:
            raise DomainError(f"degenerate profile at z={z}")
        k_mer = (2 * dq * dq - 4 * qq * d2q) / D ** 1.5
        k_par = 2 / math.sqrt(D)
        return k_mer, k_par

    def mean_curvature(self, z: float) -> float:
        k_mer, k_par = self.principal_curvatures(z)
        return (k_mer + (self.n - 1) * k_par) / self.n

    def near_pole(self, z: float) -> str | None:
        if z - self.z_min < POLE_DELEGATION:
            return "bottom"
        if self.z_max - z < POLE_DELEGATION:
            return "top"
        return None

    # --- graph patches over horizontal planes ---------------------------------
    def branch_limits(self, branch: str) -> tuple[float, float]:
        """z-range of the top or bottom branch, out to the first critical point of q."""
        zs = np.linspace(self.z_min, self.z_max, 2001)
        dqs = np.array([self.dq(z) for z in zs])
        if branch == "top":
            idx = len(zs) - 1
            while idx > 0 and dqs[idx - 1] < 0:
                idx -= 1
            return float(zs[idx]), self.z_max
        idx = 0
        while idx < len(zs) - 1 and dqs[idx + 1] > 0:
            idx += 1
        return self.z_min, float(zs[idx])

    def branch_height(self, sigma: float, branch: str) -> float:
        """Solve q(Z) = sigma on the given branch by bisection."""
        a, b = self.branch_limits(branch)
        return bisect_root(lambda z: self.q(z) - sigma, a, b, tol=1e-15)

    def branch_patch(self, branch: str = "top", mode: str = "analytic") -> ScalarField:
        """Graph patch of the top (or bottom) branch over the horizontal plane.

        The height is measured along the inner normal at the pole, so the
        patch's upward normal is the body's inner normal.
        """
        a, b = self.branch_limits(branch)
        edge = b if branch == "bottom" else a
        r_edge = self.rho(edge)
        sign = -1.0 if branch == "top" else 1.0
        pole = self.z_max if branch == "top" else self.z_min
        n = self.n
        lim = 0.999 * r_edge  # points outside the disk fail in the root solve
        Z = lambda sigma: self.branch_height(sigma, branch)

        def fn(x):
            return sign * (Z(float(x @ x)) - pole)

        if mode == "fd":
            return ScalarField(fn, n, lo=np.full(n, -lim), hi=np.full(n, lim), fd_step=3e-5)

        def derivs(x):
            z = Z(float(x @ x))
            dq = self.dq(z)
            z1 = 1.0 / dq
            z2 = -self.d2q(z) / dq ** 3
            return z1, z2

        def grad(x):
            z1, _ = derivs(x)
            return sign * 2 * x * z1

        def hess(x):
            z1, z2 = derivs(x)
            return sign * (2 * z1 * np.eye(n) + 4 * z2 * np.outer(x, x))

        return ScalarField(fn, n, lo=np.full(n, -lim), hi=np.full(n, lim), grad=grad, hess=hess)


def revolution_curvatures(p: RevolutionProfile, z: float, tol: float = 1e-12) -> CurvatureData:
    """Closed-form curvature data at the meridian point over height ``z``.

    The second fundamental form is reported in the tangent frame
    (meridian direction, then the n-1 parallel directions).
    """
    if not p.z_min < z < p.z_max or p.rho(z) <= tol:
        raise PoleError(f"z={z} is at or beyond a pole of {p.name}; use a graph patch")
    k_mer, k_par = p.principal_curvatures(z)
    k = np.array([k_mer] + [k_par] * (p.n - 1))
    A = np.diag(k)
    order = np.argsort(k, kind="stable")
    return CurvatureData(
        point=p.point(z),
        normal=p.inner_normal(z),
        k=k[order],
        H=float(np.mean(k)),
        A=A,
        source="revolution",
    )


def patch_curvatures(p: RevolutionProfile, z: float, branch: str, mode: str = "analytic") -> CurvatureData:
    patch = p.branch_patch(branch, mode)
    r = p.rho(z)
    x = np.zeros(p.n)
    x[0] = r
    _, grad, hess = patch.evaluate(x)
    A = second_fundamental_form_pN(grad, hess)
    k = principal_curvatures_graph(patch, x)
    nu_local = upward_normal(grad)
    # local height axis is -e_{n+1} on the top branch, +e_{n+1} on the bottom
    sign = -1.0 if branch == "top" else 1.0
    normal = np.zeros(p.n + 1)
    normal[: p.n] = nu_local[: p.n]
    normal[-1] = sign * nu_local[-1]
    return CurvatureData(
        point=p.point(z), normal=normal, k=k, H=mean_curvature_pN(grad, hess), A=A, source=f"patch-{branch}-{mode}"
    )


def curvatures_at(p: RevolutionProfile, z: float) -> CurvatureData:
    """Curvature data anywhere on M; within 1e-3 of a pole a graph patch is used."""
    pole = p.near_pole(z)
    if pole is not None:
        return patch_curvatures(p, min(max(z, p.z_min), p.z_max), pole)
    return revolution_curvatures(p, z)


def mean_curvature_at(p: RevolutionProfile, z: float) -> float:
    if p.near_pole(z) is not None:
        return curvatures_at(p, z).H
    return p.mean_curvature(z)
