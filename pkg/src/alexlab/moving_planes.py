"""Moving planes along the X_{n+1}-axis for revolution bodies, and the local tau machinery at a tangential contact.

Heights are in the body's own coordinates; translating the body so its top sits
at 0 would only shift lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conditions import TangencyPoint, check_condition_LC, check_main_assumption
from .errors import DomainError, GeometryError, PreconditionError
from .numerics import bisect_root
from .profiles import RevolutionProfile
from .surface_core import ScalarField, mean_curvature_coefficients, mean_curvature_dp, mean_curvature_pN

SCAN_STEPS = 2000
LAMBDA_TOL = 1e-10
THETAS = np.concatenate([np.geomspace(1e-3, 0.05, 40), np.linspace(0.05, 1.0, 400)[1:]])
TANGENT_NU = 1e-6


# --- reflection ------------------------------------------------------------------

@dataclass
class ReflectionState:
    lam: float
    min_gap: float
    theta_at_min: float
    cap_inside: bool  # reflected cap strictly inside
    transversal: bool  # plane not orthogonal to M at the cap boundary
    touching: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.cap_inside and self.transversal


def _relative_gaps(M, lam, thetas=THETAS):
    d = M.z_max - lam
    x = thetas * d
    return np.array([(M.q(lam - xi) - M.q(lam + xi)) / xi for xi in x])


def reflect_and_compare(M: RevolutionProfile, lam: float, thetas=THETAS) -> ReflectionState:
    """Reflect the cap above ``lam`` and compare it with the body.

    The gap at the reflected point of height lam + x is [q(lam - x) - q(lam + x)] / x,
    positive exactly when the mirror image lies strictly inside.
    """
    if not M.z_min < lam < M.z_max:
        raise DomainError(f"lambda={lam} outside ({M.z_min}, {M.z_max})")
    gaps = _relative_gaps(M, lam, thetas)
    i = int(np.argmin(gaps))
    d = M.z_max - lam
    scale = max(1.0, float(np.max(np.abs(gaps))))
    touching = [float(lam + th * d) for th, g in zip(thetas, gaps) if g <= 1e-9 * scale]
    return ReflectionState(lam=lam, min_gap=float(gaps[i]), theta_at_min=float(thetas[i]),
                           cap_inside=bool(gaps[i] > 0), transversal=bool(M.dq(lam) < 0), touching=touching)


def find_lambda0(M: RevolutionProfile, steps: int = SCAN_STEPS, tol: float = LAMBDA_TOL):
    """Lower the plane from the top while the reflected cap stays inside and the plane meets M transversally; returns (lambda0, case)."""
    h = M.height / steps
    holds = lambda lam: reflect_and_compare(M, lam).holds
    last_good = None
    lam = M.z_max - h
    for j in range(1, steps):
        lam = M.z_max - j * h
        if not holds(lam):
            break
        last_good = lam
    else:
        lam = M.z_min
    if last_good is None:
        raise GeometryError("reflection conditions fail immediately below the top")
    lo, hi = lam, last_good
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    lam0 = hi
    return lam0, classify_case(M, lam0)


def reflection_residual(M: RevolutionProfile, lam: float, samples: int = 4001) -> tuple[float, float]:
    """Max first-order distance from the mirror image of M to M; also returns the worst height."""
    worst, where = 0.0, M.z_max
    for z in np.linspace(M.z_min, M.z_max, samples):
        r2 = max(M.q(z), 0.0)
        zr = 2 * lam - z
        qr = M.q(zr)
        grad = math.sqrt(4 * r2 + M.dq(zr) ** 2)
        dist = abs(qr - r2) / grad if grad > 0 else math.inf
        if qr >= 0:
            # radial distance bounds the true distance where the first-order estimate degenerates
            dist = min(dist, abs(math.sqrt(qr) - math.sqrt(r2)))
        if dist > worst:
            worst, where = float(dist), float(z)
    return worst, where


def classify_case(M: RevolutionProfile, lam0: float, sym_tol: float = 1e-8) -> str:
    if reflection_residual(M, lam0)[0] <= sym_tol:
        return "none"
    if abs(M.nu_vertical(lam0)) <= TANGENT_NU:
        return "d6"
    return "d5"


# --- local frames at a tangential contact ---------------------------------------------

def reflected_graph(v: ScalarField, delta: float | None = None) -> ScalarField:
    """u(t, y) = v(-t, y)."""
    flip = np.ones(v.dim)
    flip[0] = -1.0
    lo, hi = v.lo.copy(), v.hi.copy()
    lo[0], hi[0] = -v.hi[0], -v.lo[0]
    if delta is not None:
        lo, hi = np.maximum(lo, -delta), np.minimum(hi, delta)
    grad = hess = None
    if v.grad is not None and v.hess is not None:
        grad = lambda x: flip * v.grad(flip * x)
        hess = lambda x: np.outer(flip, flip) * v.hess(flip * x)
    return ScalarField(lambda x: v.fn(flip * x), v.dim, lo=lo, hi=hi, grad=grad, hess=hess, fd_step=v.fd_step)


def local_frames_at_contact(M: RevolutionProfile, lam0: float, delta: float | None = None):
    """(u, v) at the point of M over height lam0, which must have a vertical tangent plane."""
    nu = M.nu_vertical(lam0)
    if abs(nu) > TANGENT_NU:
        raise PreconditionError(f"nu_(n+1)={nu:.3e} at lambda={lam0}: not a tangential contact")
    tp = TangencyPoint(z=lam0, profile=M, nu=nu)
    v = tp.local_graph()
    if delta is None:
        delta = 0.05 * M.diameter
    v.lo = np.maximum(v.lo, -delta)
    v.hi = np.minimum(v.hi, delta)
    return reflected_graph(v, delta), v


def manufactured_contact(c: float = 0.5, b: float = 0.25, delta: float = 0.1):
    """Order-2 contact pair in the plane: v = t^2/2 - c t^3 + (1/2 + b t^2) y^2 and u(t, y) = v(-t, y).

    For c > 0 the reflected graph lies above (u - v = 2 c t^3), as at a (d6) contact.
    """
    def make(sign):
        cc = sign * c

        def fn(x):
            t, y = x
            return t * t / 2 - cc * t ** 3 + (0.5 + b * t * t) * y * y

        def grad(x):
            t, y = x
            return np.array([t - 3 * cc * t * t + 2 * b * t * y * y, (1 + 2 * b * t * t) * y])

        def hess(x):
            t, y = x
            return np.array([[1 - 6 * cc * t + 2 * b * y * y, 4 * b * t * y],
                             [4 * b * t * y, 1 + 2 * b * t * t]])

        return ScalarField(fn, 2, lo=[-delta, -delta], hi=[delta, delta], grad=grad, hess=hess)

    return make(-1.0), make(1.0)


def implicit_t(u: ScalarField, v: ScalarField, s: float, y, tol: float = 1e-12) -> float:
    """The t in (0, s] with u(t, y) = v(s, y); t = s only when the two graphs agree there."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    target = v(np.concatenate([[s], y]))
    g = lambda t: u(np.concatenate([[t], y])) - target
    g0, gs = g(0.0), g(s)
    if not (g0 < 0 <= gs):
        raise DomainError(f"(s, y)=({s}, {y.tolist()}) is not in Omega+: u(0,y)-v={g0:.3e}, u(s,y)-v={gs:.3e}")
    return bisect_root(g, 0.0, s, tol=tol)


# --- the operator L ---------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1)
_GL_W = 0.5 * _GL_W


@dataclass
class LCoefficients:
    a: np.ndarray  # second-order block, index 0 is s
    drift: np.ndarray
    b: np.ndarray
    eta: np.ndarray
    u_t: float
    H_u: float
    H_v: float

    @property
    def identity_value(self) -> float:
        """(H(u)(t,y) - H(v)(s,y)) / u_t, which L tau equals exactly."""
        return (self.H_u - self.H_v) / self.u_t

    def apply(self, grad, hess) -> float:
        return float(np.sum(self.a * hess) + self.drift @ grad)

    def to_dict(self) -> dict:
        return {"H00": self.a[0, 0], "H0a": self.a[0, 1:].tolist(), "Hab": self.a[1:, 1:].tolist(),
                "drift": self.drift.tolist(), "b": self.b.tolist(), "eta": self.eta.tolist()}


def assemble_L(u: ScalarField, v: ScalarField, s: float, y, t: float, tau_grad) -> LCoefficients:
    """Coefficients of L at the node (s, y) paired with (t, y), given the first derivatives of tau there."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    _, gu, Nu = u.evaluate(np.concatenate([[t], y]))
    _, gv, Nv = v.evaluate(np.concatenate([[s], y]))
    u_t = gu[0]
    if not u_t > 0:
        raise PreconditionError(f"frame violation: u_t={u_t:.3e} <= 0 at t={t}, y={y.tolist()}")
    tau_s = tau_grad[0]
    tau_y = np.asarray(tau_grad[1:], dtype=float)
    a = mean_curvature_coefficients(gu)
    b = sum(w * mean_curvature_dp(x * gv + (1 - x) * gu, Nv) for x, w in zip(_GL_X, _GL_W))
    u_tt, u_ty = Nu[0, 0], Nu[0, 1:]
    a00, a0y, ayy = a[0, 0], a[0, 1:], a[1:, 1:]
    drift = np.empty_like(b)
    drift[0] = a00 * (2 - tau_s) * u_tt / u_t + b[0] + 2 * (a0y @ u_ty) / u_t
    eta = -2 * a0y * u_tt * (1 - tau_s) - 2 * ayy @ u_ty + u_tt * (ayy @ tau_y)
    drift[1:] = b[1:] - eta / u_t
    if np.linalg.eigvalsh(a)[0] <= 0:
        raise GeometryError("second-order block of L is not elliptic")
    return LCoefficients(a=a, drift=drift, b=b, eta=eta, u_t=u_t,
                         H_u=mean_curvature_pN(gu, Nu), H_v=mean_curvature_pN(gv, Nv))


def tau_hat_derivs(s: float):
    """tau_hat = s + s^{3/2}: gradient and Hessian in (s, y)."""
    r = math.sqrt(s)
    return np.array([1 + 1.5 * r, 0.0]), np.array([[0.75 / r, 0.0], [0.0, 0.0]])


# --- the tau field ----------------------------------------------------------------------

@dataclass
class TauField:
    s: np.ndarray
    y: np.ndarray
    t: np.ndarray  # NaN outside Omega+
    delta: float

    @property
    def tau(self) -> np.ndarray:
        return self.s[:, None] - self.t

    @property
    def tau_bar(self) -> np.ndarray:
        # distance below the plane of the paired point of M, in the local frame
        return np.broadcast_to(self.s[:, None], self.t.shape)

    @property
    def inside(self) -> np.ndarray:
        return np.isfinite(self.t)

    def derivatives(self):
        """Second-order finite differences of tau on the grid."""
        ds, dy = self.s[1] - self.s[0], self.y[1] - self.y[0]
        tau = self.tau
        ts, ty = np.gradient(tau, ds, dy, edge_order=2)
        tss, tsy = np.gradient(ts, ds, dy, edge_order=2)
        _, tyy = np.gradient(ty, ds, dy, edge_order=2)
        return ts, ty, tss, tsy, tyy

    def interior(self) -> np.ndarray:
        m = self.inside.copy()
        ok = np.zeros_like(m)
        ok[1:-1, 1:-1] = (m[1:-1, 1:-1] & m[:-2, 1:-1] & m[2:, 1:-1] & m[1:-1, :-2] & m[1:-1, 2:]
                          & m[:-2, :-2] & m[2:, 2:] & m[:-2, 2:] & m[2:, :-2])
        return ok

    def csv_rows(self):
        rows = []
        for i, s in enumerate(self.s):
            for j, y in enumerate(self.y):
                if self.inside[i, j]:
                    rows.append((float(s), float(y), float(s - self.t[i, j]), float(s), float(self.t[i, j])))
        return rows


def build_tau_field(u: ScalarField, v: ScalarField, delta: float, nodes: int = 128) -> TauField:
    if u.dim != 2:
        raise PreconditionError("the tau grid is implemented for surfaces in R^3 (one y variable)")
    s = delta * np.arange(1, nodes + 1) / nodes
    y = np.linspace(-delta, delta, nodes) * 0.999
    t = np.full((nodes, nodes), np.nan)
    for i, si in enumerate(s):
        for j, yj in enumerate(y):
            try:
                t[i, j] = implicit_t(u, v, si, yj)
            except DomainError:
                pass
    return TauField(s=s, y=y, t=t, delta=delta)


# --- dichotomy checks near a (d6) contact -----------------------------------------------

@dataclass
class Prop1Report:
    tau_s_max: float
    L_tauhat_min: float
    L_tau_max: float
    ratio_min: float
    c: float
    eps: float
    identity_residual: float
    ratio_limit: dict
    witnesses: list = field(default_factory=list)
    nodes: int = 0

    @property
    def slope_bound(self) -> bool:
        return self.tau_s_max < 1

    @property
    def barrier(self) -> bool:
        return self.L_tauhat_min > 0

    @property
    def w2(self) -> bool:
        return self.L_tau_max <= 1e-6

    @property
    def violation(self) -> bool:
        """True when tau >= c tau_bar fails on O_eps (the mechanism that rules out this contact)."""
        return self.ratio_min < self.c

    def to_dict(self) -> dict:
        return {
            "tau_s_max": self.tau_s_max,
            "L_tauhat_min": self.L_tauhat_min,
            "L_tau_max": self.L_tau_max,
            "ratio_min": self.ratio_min,
            "c": self.c,
            "eps": self.eps,
            "identity_residual": self.identity_residual,
            "ratio_limit": self.ratio_limit,
            "violation": self.violation,
            "witnesses": self.witnesses,
            "nodes": self.nodes,
        }


def check_prop1_dichotomy(u: ScalarField, v: ScalarField, field_: TauField, c: float = 0.1,
                          eps: float | None = None, s_probe: float = 1e-3) -> Prop1Report:
    """Slope bound tau_s < 1, barrier positivity, sign of L tau, and the ratio tau / tau_bar on O_eps."""
    eps = field_.delta / 4 if eps is None else eps
    ts, ty, tss, tsy, tyy = field_.derivatives()
    mask = field_.interior()
    if not mask.any():
        raise PreconditionError("Omega+ has no interior grid nodes")
    tau_s_max, Lhat_min, Ltau_max, resid = -math.inf, math.inf, -math.inf, 0.0
    where_hat = where_tau = None
    for i, j in zip(*np.nonzero(mask)):
        s, y, t = field_.s[i], field_.y[j], field_.t[i, j]
        if u.evaluate(np.array([t, y]))[2][0, 0] < 0:
            raise PreconditionError(f"u_tt < 0 at t={t}, y={y}: Condition LC is needed")
        g = np.array([ts[i, j], ty[i, j]])
        H = np.array([[tss[i, j], tsy[i, j]], [tsy[i, j], tyy[i, j]]])
        co = assemble_L(u, v, s, y, t, g)
        tau_s_max = max(tau_s_max, g[0])
        Ltau = co.apply(g, H)
        resid = max(resid, abs(Ltau - co.identity_value))
        if Ltau > Ltau_max:
            Ltau_max, where_tau = Ltau, (float(s), float(y))
        Lhat = co.apply(*tau_hat_derivs(s))
        if Lhat < Lhat_min:
            Lhat_min, where_hat = Lhat, (float(s), float(y))
    ratio = field_.tau / field_.tau_bar
    o_eps = field_.inside & (field_.s[:, None] <= eps)
    r = np.where(o_eps, ratio, np.inf)
    k = np.unravel_index(int(np.argmin(r)), r.shape)
    ratio_min = float(r[k])
    witnesses = []
    if ratio_min < c:
        witnesses.append({"kind": "tau_below_c_tau_bar", "point": [float(field_.s[k[0]]), float(field_.y[k[1]])],
                          "margin": ratio_min - c})
    if Ltau_max > 1e-6:
        witnesses.append({"kind": "L_tau_positive", "point": list(where_tau), "margin": Ltau_max})
    ts_probe = implicit_t(u, v, s_probe, np.zeros(u.dim - 1))
    return Prop1Report(
        tau_s_max=float(tau_s_max), L_tauhat_min=float(Lhat_min), L_tau_max=float(Ltau_max),
        ratio_min=ratio_min, c=c, eps=eps, identity_residual=float(resid),
        ratio_limit={"s": s_probe, "t_over_s": ts_probe / s_probe, "L_tauhat_argmin": where_hat},
        witnesses=witnesses, nodes=int(mask.sum()),
    )


# --- the whole procedure ---------------------------------------------------------------

@dataclass
class SymmetryVerdict:
    outcome: str
    lambda0: float
    deviation: float
    case: str
    failure: str | None = None
    witnesses: list = field(default_factory=list)
    prop1: dict | None = None
    tau_rows: list = field(default_factory=list)

    @property
    def symmetric(self) -> bool:
        return self.outcome == "symmetric"

    def to_dict(self) -> dict:
        p = self.prop1 or {}
        return {
            "outcome": self.outcome,
            "lambda0": self.lambda0,
            "deviation": self.deviation,
            "case": self.case,
            "failure": self.failure,
            "witnesses": self.witnesses,
            "prop1": {k: p.get(k) for k in ("tau_s_max", "L_tauhat_min", "ratio_min")} if p else None,
            "prop1_details": p or None,
        }


def run_moving_planes(M: RevolutionProfile, sym_tol: float = 1e-8, tau_nodes: int = 128) -> SymmetryVerdict:
    lam0, case = find_lambda0(M)
    dev, zdev = reflection_residual(M, lam0)
    if dev <= sym_tol:
        return SymmetryVerdict("symmetric", lam0, dev, "none")
    verdict = SymmetryVerdict("asymmetric", lam0, dev, case)
    ma = check_main_assumption(M)
    if ma.verdict == "fails":
        verdict.failure = "main-assumption-fails"
        verdict.witnesses = ma.witnesses[:1]
        return verdict
    if case == "d5":
        st = reflect_and_compare(M, lam0)
        verdict.failure = "d5-mismatch"
        verdict.witnesses = [{"point": [M.rho(z), 2 * lam0 - z], "margin": st.min_gap} for z in st.touching[:3]]
        return verdict
    if M.n != 2:
        verdict.failure = "d6-prop1-violation"
        verdict.witnesses = [{"point": M.point(lam0).tolist(), "margin": 0.0, "note": "tau grid needs n=2"}]
        return verdict
    if check_condition_LC(M).verdict != "holds":
        raise PreconditionError("Condition LC fails; the d6 analysis does not apply")
    delta = 0.05 * M.diameter
    u, v = local_frames_at_contact(M, lam0, delta)
    tf = build_tau_field(u, v, delta, tau_nodes)
    if not tf.interior().any():
        # without Condition T the pairing region can be empty; symmetry is not inferred from that
        verdict.outcome = "inconclusive"
        verdict.failure = "omega-plus-empty"
        verdict.witnesses = [{"point": M.point(lam0).tolist(), "margin": 0.0}]
        return verdict
    rep = check_prop1_dichotomy(u, v, tf)
    verdict.failure = "d6-prop1-violation"
    verdict.prop1 = rep.to_dict()
    verdict.witnesses = rep.witnesses
    verdict.tau_rows = tf.csv_rows()
    return verdict
