"""Builtin surfaces. Entries are append-only: names are never repurposed."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ScenarioError
from .profiles import RevolutionProfile


def sphere(radius: float = 1.0, center: float = 0.0, n: int = 2) -> RevolutionProfile:
    R, c = radius, center
    return RevolutionProfile(
        name="sphere",
        q=lambda z: R * R - (z - c) ** 2,
        dq=lambda z: -2 * (z - c),
        d2q=lambda z: -2.0,
        z_min=c - R,
        z_max=c + R,
        n=n,
        params={"radius": R, "center": c},
    )


def ellipsoid(a: float = 0.6, c: float = 1.0, center: float = 0.0, n: int = 2) -> RevolutionProfile:
    """Spheroid with equatorial radius ``a`` and polar half-axis ``c``."""
    return RevolutionProfile(
        name="ellipsoid",
        q=lambda z: a * a * (1 - ((z - center) / c) ** 2),
        dq=lambda z: -2 * a * a * (z - center) / c ** 2,
        d2q=lambda z: -2 * a * a / c ** 2,
        z_min=center - c,
        z_max=center + c,
        n=n,
        params={"a": a, "c": c, "center": center},
    )


def cylinder_capped(r: float = 0.5, L: float = 1.0, n: int = 2) -> RevolutionProfile:
    """Cylinder of radius r and length L closed by hemispherical caps (C^{1,1} profile)."""
    half = 0.5 * L

    def q(z):
        e = abs(z) - half
        return r * r - e * e if e > 0 else r * r

    def dq(z):
        e = abs(z) - half
        return -2 * e * math.copysign(1.0, z) if e > 0 else 0.0

    def d2q(z):
        return -2.0 if abs(z) > half else 0.0

    return RevolutionProfile("cylinder-capped", q, dq, d2q, -half - r, half + r, n, {"r": r, "L": L})


def pear(coeffs=(0.3,), n: int = 2) -> RevolutionProfile:
    """Asymmetric egg: q(z) = (1 - z^2) * (1 + sum_i c_i z^i)."""
    cs = tuple(float(c) for c in coeffs)

    def P(z):
        return 1 + sum(c * z ** (i + 1) for i, c in enumerate(cs))

    def dP(z):
        return sum((i + 1) * c * z ** i for i, c in enumerate(cs))

    def d2P(z):
        return sum((i + 1) * i * c * z ** (i - 1) for i, c in enumerate(cs) if i >= 1)

    return RevolutionProfile(
        name="pear",
        q=lambda z: (1 - z * z) * P(z),
        dq=lambda z: -2 * z * P(z) + (1 - z * z) * dP(z),
        d2q=lambda z: -2 * P(z) - 4 * z * dP(z) + (1 - z * z) * d2P(z),
        z_min=-1.0,
        z_max=1.0,
        n=n,
        params={"coeffs": list(cs)},
    )


def flat_tangent(order="infinite", n: int = 2) -> RevolutionProfile:
    """q(z) = 1 - phi(z) with phi ~ z^k (k even) or exp(1 - 1/z^2) at the equator.

    The vertical tangent line at the equator has contact of order ``k``, or of
    infinite order for ``"infinite"``.
    """
    if order == "infinite":
        def phi(z):
            return 0.0 if z == 0 else math.exp(1 - 1 / (z * z))

        def dphi(z):
            return 0.0 if z == 0 else phi(z) * 2 / z ** 3

        def d2phi(z):
            return 0.0 if z == 0 else phi(z) * (4 / z ** 6 - 6 / z ** 4)
    else:
        k = int(order)
        if k < 2 or k % 2:
            raise ScenarioError(f"flat-tangent order must be an even integer >= 2, got {order}")
        phi = lambda z: z ** k
        dphi = lambda z: k * z ** (k - 1)
        d2phi = lambda z: k * (k - 1) * z ** (k - 2)
    return RevolutionProfile(
        name="flat-tangent",
        q=lambda z: 1 - phi(z),
        dq=lambda z: -dphi(z),
        d2q=lambda z: -d2phi(z),
        z_min=-1.0,
        z_max=1.0,
        n=n,
        params={"order": order},
    )


def dumbbell(n: int = 2) -> RevolutionProfile:
    """rho = 0.5 + 0.3 cos(2 pi z) on [-1, 1], closed by elliptic caps matched to C^2 at z = +-1."""
    A, B, w = 0.5, 0.3, 2 * math.pi
    top = A + B
    c = math.sqrt(top / (B * w * w))  # cap half-axis so rho'' matches at the junction

    def body(z):
        return A + B * math.cos(w * z), -B * w * math.sin(w * z), -B * w * w * math.cos(w * z)

    def q(z):
        if abs(z) <= 1:
            return body(z)[0] ** 2
        e = (abs(z) - 1) / c
        return top * top * (1 - e * e)

    def dq(z):
        if abs(z) <= 1:
            r, r1, _ = body(z)
            return 2 * r * r1
        e = (abs(z) - 1) / c
        return -2 * top * top * e / c * math.copysign(1.0, z)

    def d2q(z):
        if abs(z) <= 1:
            r, r1, r2 = body(z)
            return 2 * r1 * r1 + 2 * r * r2
        return -2 * top * top / c ** 2

    return RevolutionProfile("dumbbell", q, dq, d2q, -1 - c, 1 + c, n, {"cap": c})


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable[..., RevolutionProfile]
    defaults: dict
    designed: dict
    note: str


# order is stable and append-only
CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry("sphere", sphere, {"radius": 1.0, "center": 0.0},
                     {"main_assumption": "holds", "S": "holds", "T": "holds", "LC": "holds", "symmetric": True},
                     "round sphere; constant mean curvature"),
        CatalogEntry("ellipsoid", ellipsoid, {"a": 0.6, "c": 1.0},
                     {"main_assumption": "holds", "S": "holds", "T": "holds", "LC": "holds", "symmetric": True},
                     "spheroid elongated along the vertical axis"),
        CatalogEntry("cylinder-capped", cylinder_capped, {"r": 0.5, "L": 1.0},
                     {"main_assumption": "holds", "S": "holds", "T": "fails", "LC": "holds", "symmetric": True},
                     "vertical lines along the cylinder lie in M (infinite contact)"),
        CatalogEntry("pear", pear, {"coeffs": [0.3]},
                     {"main_assumption": "fails", "S": "holds", "T": "holds", "LC": "holds", "symmetric": False},
                     "asymmetric egg; must violate the monotone-curvature assumption"),
        CatalogEntry("flat-tangent", flat_tangent, {"order": "infinite"},
                     {"main_assumption": "holds", "S": "holds", "T": "fails", "LC": "holds", "symmetric": True},
                     "equatorial tangency of infinite order (order=k gives finite contact)"),
        CatalogEntry("dumbbell", dumbbell, {},
                     {"S": "fails", "LC": "fails", "T": "holds", "symmetric": True},
                     "bulge at z=0 with waists at z=+-0.5"),
    ]
}


def build_surface(name: str, **params) -> RevolutionProfile:
    try:
        entry = CATALOG[name]
    except KeyError:
        raise ScenarioError(f"unknown surface {name!r}; known: {', '.join(CATALOG)}") from None
    kwargs = {**entry.defaults, **params}
    try:
        return entry.builder(**kwargs)
    except TypeError as exc:
        raise ScenarioError(f"bad parameters for {name}: {exc}") from None


def list_catalog() -> list[dict]:
    return [
        {"name": e.name, "defaults": e.defaults, "designed": e.designed, "note": e.note}
        for e in CATALOG.values()
    ]
