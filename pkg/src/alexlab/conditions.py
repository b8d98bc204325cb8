"""Hypothesis checkers for closed revolution bodies.

Verdicts are ``holds``, ``fails`` or ``inconclusive``; sampling can only
under-approximate "holds", so every report carries its margin and resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDirectionError, GeometryError
from .numerics import bisect_root, loglog_slope, windowed_slopes
from .profiles import RevolutionProfile, mean_curvature_at
from .surface_core import ScalarField

TANGENCY_TOL = 1e-8
SNAP_WINDOW = 0.05
INFINITE_SLOPE = 20.0


@dataclass
class TangencyPoint:
    """A point of M with vertical tangent plane, with its adapted local frame.

    Frame rows are (y_1..y_{n-1}, t, y_{n+1}) expressed in ambient coordinates:
    y_{n+1} is the inner normal, t points down the X_{n+1}-axis.
    """

    z: float
    profile: RevolutionProfile
    nu: float
    band: tuple[float, float] | None = None
    order: int | None = None
    infinite: bool = False

    @property
    def point(self) -> np.ndarray:
        return self.profile.point(self.z)

    @property
    def radius(self) -> float:
        return self.profile.rho(self.z)

    @property
    def frame(self) -> np.ndarray:
        n = self.profile.n
        rows = []
        for a in range(1, n):
            e = np.zeros(n + 1)
            e[a] = 1.0
            rows.append(e)
        t = np.zeros(n + 1)
        t[-1] = -1.0
        normal = np.zeros(n + 1)
        normal[0] = -1.0
        return np.array(rows + [t, normal])

    def v_line(self, t: float) -> float:
        """v(t, 0), computed as a quotient to limit cancellation."""
        p = self.profile
        q0 = p.q(self.z)
        q1 = p.q(self.z - t)
        if q1 < 0:
            return math.nan
        return (q0 - q1) / (math.sqrt(q0) + math.sqrt(q1))

    def local_graph(self) -> ScalarField:
        """v(t, y) whose graph over the tangent plane is M near the point; variables (t, y)."""
        p, zs, r0 = self.profile, self.z, self.radius
        n = p.n

        def Q(x):
            return p.q(zs - x[0]) - x[1:] @ x[1:]

        def fn(x):
            return r0 - math.sqrt(Q(x))

        def grad(x):
            qq = Q(x)
            dQ = np.concatenate([[-p.dq(zs - x[0])], -2 * x[1:]])
            return -dQ / (2 * math.sqrt(qq))

        def hess(x):
            qq = Q(x)
            dQ = np.concatenate([[-p.dq(zs - x[0])], -2 * x[1:]])
            d2Q = -2 * np.eye(n)
            d2Q[0, 0] = p.d2q(zs - x[0])
            return -d2Q / (2 * math.sqrt(qq)) + np.outer(dQ, dQ) / (4 * qq ** 1.5)

        lo = np.concatenate([[zs - p.z_max], np.full(n - 1, -r0)])
        hi = np.concatenate([[zs - p.z_min], np.full(n - 1, r0)])
        return ScalarField(fn, n, lo=lo, hi=hi, grad=grad, hess=hess)

    def to_dict(self) -> dict:
        return {
            "z": self.z,
            "point": self.point.tolist(),
            "nu_vertical": self.nu,
            "band": list(self.band) if self.band else None,
            "order": self.order,
            "infinite": self.infinite,
        }


@dataclass
class ConditionReport:
    condition: str
    verdict: str
    witnesses: list = field(default_factory=list)
    resolution: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": self.verdict,
            "witnesses": sorted(self.witnesses, key=lambda w: json_key(w.get("point"))),
            "resolution": self.resolution,
            "details": self.details,
        }


def json_key(point):
    return tuple(point) if isinstance(point, (list, tuple)) else (point,)


# --- tangency set ---------------------------------------------------------------

def find_tangency_set(M: RevolutionProfile, tol: float = TANGENCY_TOL, samples: int = 4001) -> list[TangencyPoint]:
    """Locate T = {nu_{n+1} = 0} along the meridian.

    Isolated points come from sign changes of nu_{n+1} refined by bisection.
    Runs where the profile is exactly straight (q' = q'' = 0) are returned as
    bands, represented by their midpoint.
    """
    zs = np.linspace(M.z_min, M.z_max, samples)[1:-1]
    nus = np.array([M.nu_vertical(z) for z in zs])
    small = np.abs(nus) <= tol
    out: list[TangencyPoint] = []

    def refine(a, b):
        z = bisect_root(M.dq, a, b, tol=1e-14)
        return TangencyPoint(z=z, profile=M, nu=M.nu_vertical(z))

    i = 0
    while i < len(zs):
        if small[i]:
            j = i
            while j + 1 < len(zs) and small[j + 1]:
                j += 1
            straight = all(M.dq(z) == 0.0 and M.d2q(z) == 0.0 for z in zs[i:j + 1])
            if straight and j > i:
                mid = 0.5 * (zs[i] + zs[j])
                out.append(TangencyPoint(z=mid, profile=M, nu=M.nu_vertical(mid), band=(float(zs[i]), float(zs[j]))))
            elif i > 0 and j + 1 < len(zs) and nus[i - 1] * nus[j + 1] < 0:
                out.append(refine(zs[i - 1], zs[j + 1]))
            else:
                mid = 0.5 * (zs[i] + zs[j])
                out.append(TangencyPoint(z=mid, profile=M, nu=M.nu_vertical(mid)))
            i = j + 1
            continue
        if i + 1 < len(zs) and not small[i + 1] and nus[i] * nus[i + 1] < 0:
            out.append(refine(zs[i], zs[i + 1]))
        i += 1
    for tp in out:
        if abs(tp.nu) > tol:
            raise GeometryError(f"tangency refinement left |nu_(n+1)|={abs(tp.nu):.3e} at z={tp.z}")
    if not out:
        raise GeometryError(f"no vertical tangency found on closed surface {M.name}")
    return out


# --- Condition T ------------------------------------------------------------------

@dataclass
class ContactOrder:
    order: int | None
    infinite: bool
    slope: float
    r2: float
    status: str
    sides: dict = field(default_factory=dict)


ROUNDOFF_FLOOR = 2e-11  # below this v(t,0) is dominated by cancellation in q(z*) - q(z*-t)


def _one_side(v, t_samples, scale):
    vals = [(t, abs(v(t))) for t in t_samples]
    vals = [(t, w) for t, w in vals if math.isfinite(w)]
    if not vals or all(w == 0.0 for _, w in vals):
        raise DegenerateDirectionError("v(t,0) vanishes on every sample")
    usable = [(t, w) for t, w in vals if w > ROUNDOFF_FLOOR * scale]
    if len(usable) < 4:
        # nonzero somewhere yet below roundoff almost everywhere: faster than any power we can resolve
        return ContactOrder(None, True, math.inf, math.nan, "infinite")
    slope, r2 = loglog_slope(usable)
    trend = windowed_slopes(usable, window=min(6, len(usable)))
    growing = len(trend) >= 2 and trend[-1] - trend[0] > 2.0
    if slope > INFINITE_SLOPE or growing:
        return ContactOrder(None, True, slope, r2, "infinite")
    k = round(slope)
    if k >= 2 and abs(slope - k) <= SNAP_WINDOW and r2 >= 0.999:
        return ContactOrder(int(k), False, slope, r2, "finite")
    return ContactOrder(None, False, slope, r2, "inconclusive")


def contact_order(tp: TangencyPoint, t_samples=None) -> ContactOrder:
    """Order of contact of the vertical tangent line, from log-log slopes of |v(t,0)| as t -> 0.

    Samples where |v| sits under the roundoff floor are dropped, so the fit uses
    the smallest t at which v is still resolved.
    """
    if t_samples is None:
        t_samples = np.geomspace(0.3, 1e-3, 24)
    t_samples = [float(t) for t in t_samples]
    scale = max(tp.radius, 1.0)
    sides = {}
    for name, sgn in (("below", 1.0), ("above", -1.0)):
        sides[name] = _one_side(lambda t: tp.v_line(sgn * t), t_samples, scale)
    below, above = sides["below"], sides["above"]
    if below.infinite and above.infinite:
        res = ContactOrder(None, True, max(below.slope, above.slope), math.nan, "infinite")
    elif below.status == "finite" and above.status == "finite":
        k = min(below.order, above.order)
        res = ContactOrder(k, False, min(below.slope, above.slope), min(below.r2, above.r2), "finite")
    else:
        res = ContactOrder(None, False, min(below.slope, above.slope), math.nan, "inconclusive")
    res.sides = {k: {"order": s.order, "infinite": s.infinite, "slope": s.slope, "status": s.status}
                 for k, s in sides.items()}
    return res


def check_condition_T(M: RevolutionProfile, tangency=None) -> ConditionReport:
    tangency = find_tangency_set(M) if tangency is None else tangency
    rep = ConditionReport("T", "holds", resolution={"tangency_points": len(tangency)})
    orders = []
    inconclusive = False
    for tp in tangency:
        if tp.band is not None:
            tp.infinite = True
            rep.witnesses.append({"point": tp.point.tolist(), "margin": 0.0,
                                  "reason": "vertical segment contained in M", "band": list(tp.band)})
            continue
        try:
            co = contact_order(tp)
        except DegenerateDirectionError as exc:
            tp.infinite = True
            rep.witnesses.append({"point": tp.point.tolist(), "margin": 0.0, "reason": str(exc)})
            continue
        tp.order, tp.infinite = co.order, co.infinite
        orders.append({"z": tp.z, "order": co.order, "infinite": co.infinite, "slope": co.slope})
        if co.infinite:
            rep.witnesses.append({"point": tp.point.tolist(), "margin": co.slope,
                                  "reason": "contact of infinite order"})
        elif co.status != "finite":
            inconclusive = True
    rep.details["orders"] = orders
    if rep.witnesses:
        rep.verdict = "fails"
    elif inconclusive:
        rep.verdict = "inconclusive"
    return rep


# --- Condition S ------------------------------------------------------------------

def _s_margins(M, tangency, samples):
    zs = np.linspace(M.z_min, M.z_max, samples)
    rhos = np.array([M.rho(z) for z in zs])
    out = []
    for tp in tangency:
        # signed distance to the vertical tangent hyperplane X_1 = rho*, sampled at azimuth 0
        d = tp.radius - rhos
        i = int(np.argmin(d))
        out.append((tp, float(d[i]), float(zs[i])))
    return out


def check_condition_S(M: RevolutionProfile, samples: int = 2001, tangency=None, slack: float = 1e-9) -> ConditionReport:
    tangency = find_tangency_set(M) if tangency is None else tangency
    rep = ConditionReport("S", "holds", resolution={"meridian_samples": samples, "azimuths": 1})
    worst = math.inf
    for tp, margin, zw in _s_margins(M, tangency, samples):
        worst = min(worst, margin)
        if margin < -slack:
            rep.witnesses.append({"point": M.point(zw).tolist(), "margin": margin,
                                  "tangency_z": tp.z, "reason": "M crosses the vertical tangent hyperplane"})
    rep.details["worst_margin"] = worst
    if rep.witnesses:
        rep.verdict = "fails"
        fine = _s_margins(M, tangency, samples * 10)
        rep.details["witness_stable"] = all(
            any(abs(tp.z - w["tangency_z"]) < 1e-12 and m < -slack for tp, m, _ in fine) for w in rep.witnesses
        )
    return rep


# --- Condition LC -----------------------------------------------------------------

def _lc_scan(tp, radius, grid):
    v = tp.local_graph()
    worst = math.inf
    where = None
    for t in np.linspace(-radius, radius, grid):
        for y in np.linspace(0.0, radius, grid // 2 + 1):
            if t * t + y * y > radius * radius:
                continue
            x = np.zeros(tp.profile.n)
            x[0] = t
            if tp.profile.n > 1:
                x[1] = y
            try:
                vtt = v.evaluate(x)[2][0, 0]
            except Exception:
                return None, None
            if not math.isfinite(vtt):
                return None, None
            if vtt < worst:
                worst, where = vtt, (t, y)
    return worst, where


def check_condition_LC(M: RevolutionProfile, radius: float = 0.1, grid: int = 21, tangency=None,
                       slack: float = 1e-9) -> ConditionReport:
    """Sample v_tt on a neighborhood of each tangency point (y along one horizontal axis; v depends on |y|)."""
    tangency = find_tangency_set(M) if tangency is None else tangency
    rep = ConditionReport("LC", "holds", resolution={"radius": radius, "grid": grid})
    inconclusive = False
    worst_all = math.inf
    for tp in tangency:
        r = radius
        worst = where = None
        for _ in range(4):
            worst, where = _lc_scan(tp, r, grid)
            if worst is not None:
                break
            r *= 0.5
        if worst is None:
            inconclusive = True
            continue
        worst_all = min(worst_all, worst)
        if worst < -slack:
            fine, _ = _lc_scan(tp, r, grid * 10 + 1)
            rep.witnesses.append({"point": tp.point.tolist(), "margin": worst, "local": list(where),
                                  "radius": r, "stable": fine is not None and fine < -slack})
    rep.details["worst_vtt"] = worst_all
    if rep.witnesses:
        rep.verdict = "fails"
    elif inconclusive:
        rep.verdict = "inconclusive"
    return rep


# --- Main Assumption ------------------------------------------------------------------

def _roots_at_radius(M, r, zs, qs):
    target = r * r
    g = qs - target
    roots = []
    for i in range(len(zs) - 1):
        if g[i] == 0:
            roots.append(float(zs[i]))
        elif g[i] * g[i + 1] < 0:
            roots.append(bisect_root(lambda z: M.q(z) - target, zs[i], zs[i + 1], tol=1e-14))
    if g[-1] == 0:
        roots.append(float(zs[-1]))
    return roots


def _segment_inside(M, r, lo, hi, points):
    return all(M.q(z) >= r * r - 1e-12 for z in np.linspace(lo, hi, points)[1:-1])


def _vertical_pairs(M, levels, seg_points, z_samples):
    zs = np.linspace(M.z_min, M.z_max, z_samples)
    qs = np.array([M.q(z) for z in zs])
    r_max = math.sqrt(max(qs.max(), 0.0))
    pairs = []
    if _segment_inside(M, 0.0, M.z_min, M.z_max, seg_points):
        pairs.append((0.0, M.z_max, M.z_min))
    for j in range(1, levels + 1):
        r = r_max * j / (levels + 1)
        roots = _roots_at_radius(M, r, zs, qs)
        inside = [_segment_inside(M, r, roots[i], roots[i + 1], seg_points) for i in range(len(roots) - 1)]
        for a in range(len(roots)):
            for b in range(a + 1, len(roots)):
                if not inside[b - 1]:
                    break
                pairs.append((r, roots[b], roots[a]))
    return pairs


def check_main_assumption(M: RevolutionProfile, levels: int = 400, seg_points: int = 32,
                          slack: float = 1e-9, z_samples: int = 4001) -> ConditionReport:
    """Compare H at the upper and lower ends of vertical segments inside the body."""
    rep = ConditionReport("main_assumption", "holds",
                          resolution={"levels": levels, "azimuths": 1, "segment_points": seg_points})
    try:
        pairs = _vertical_pairs(M, levels, seg_points, z_samples)
    except Exception as exc:  # membership test failed
        rep.verdict = "inconclusive"
        rep.details["error"] = str(exc)
        return rep
    worst = -math.inf
    worst_abs = 0.0
    for r, zu, zl in pairs:
        dH = mean_curvature_at(M, zu) - mean_curvature_at(M, zl)
        worst = max(worst, dH)
        worst_abs = max(worst_abs, abs(dH))
        if dH > slack:
            rep.witnesses.append({"point": [r, zu], "lower": [r, zl], "margin": dH})
    rep.details.update({"pairs": len(pairs), "max_dH": worst, "max_abs_dH": worst_abs})
    if rep.witnesses:
        # re-verify at 10x resolution; only witnesses that survive count
        stable, dropped = [], []
        for w in rep.witnesses:
            r, zu = w["point"]
            zl = w["lower"][1]
            zs = np.linspace(zl, zu, seg_points * 10)
            ok = all(M.q(z) >= r * r - 1e-12 for z in zs[1:-1])
            (stable if ok else dropped).append(w)
        stable.sort(key=lambda w: -w["margin"])
        rep.details["unstable_witnesses"] = len(dropped)
        rep.witnesses = stable[:5]
        rep.verdict = "fails" if stable else "inconclusive"
    return rep


def check_all(M: RevolutionProfile) -> dict[str, ConditionReport]:
    tangency = find_tangency_set(M)
    return {
        "main_assumption": check_main_assumption(M),
        "S": check_condition_S(M, tangency=tangency),
        "T": check_condition_T(M, tangency=tangency),
        "LC": check_condition_LC(M, tangency=tangency),
    }
