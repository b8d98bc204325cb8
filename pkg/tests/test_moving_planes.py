import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alexlab.catalog import build_surface, ellipsoid, pear, sphere
from alexlab.errors import DomainError, PreconditionError
from alexlab.moving_planes import (
    assemble_L,
    build_tau_field,
    check_prop1_dichotomy,
    find_lambda0,
    implicit_t,
    local_frames_at_contact,
    manufactured_contact,
    reflect_and_compare,
    reflected_graph,
    reflection_residual,
    run_moving_planes,
    tau_hat_derivs,
)
from alexlab.surface_core import ScalarField, mean_curvature_coefficients, quadratic_field


def line_field(fn, dfn, d2fn):
    """Field on (t, y) depending on t only."""
    return ScalarField(lambda x: fn(x[0]), 2, lo=[-1, -1], hi=[1, 1],
                       grad=lambda x: np.array([dfn(x[0]), 0.0]),
                       hess=lambda x: np.array([[d2fn(x[0]), 0.0], [0.0, 0.0]]))


def test_sphere_gap_closed_form():
    # q(lam - x) - q(lam + x) = 4 lam x for the unit sphere
    st_ = reflect_and_compare(sphere(1.0), 0.5)
    assert st_.holds and st_.min_gap == pytest.approx(2.0)


def test_sphere_at_center_touches_everywhere():
    st_ = reflect_and_compare(sphere(1.0), 1e-12)
    assert st_.min_gap == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("center", [0.0, -1.0, 2.5])
def test_sphere_lambda0_and_translation(center):
    lam0, case = find_lambda0(sphere(1.0, center))
    assert abs(lam0 - center) <= 1e-8 and case == "none"


def test_spheroid_symmetric():
    v = run_moving_planes(ellipsoid(0.6, 1.0, center=0.3))
    assert v.symmetric and abs(v.lambda0 - 0.3) < 1e-8 and v.deviation <= 1e-6


def test_pear_is_asymmetric_with_main_assumption_witness():
    v = run_moving_planes(pear((0.3,)))
    assert v.outcome == "asymmetric" and v.failure == "main-assumption-fails"
    assert v.witnesses and v.witnesses[0]["margin"] > 0
    # (d6): the plane stops at the widest section
    assert abs(pear((0.3,)).dq(v.lambda0)) < 1e-6


def test_pear_shift_moves_lambda0():
    a, _ = find_lambda0(pear((0.3,)))
    b, _ = find_lambda0(pear((0.3,)).shifted(0.7))
    assert b - a == pytest.approx(0.7, abs=1e-8)


def test_cylinder_reports_empty_pairing_region():
    v = run_moving_planes(build_surface("cylinder-capped"))
    assert v.outcome == "inconclusive" and v.failure == "omega-plus-empty"


def test_reflection_residual_zero_for_symmetric():
    assert reflection_residual(sphere(2.0), 0.0)[0] < 1e-12
    assert reflection_residual(sphere(2.0), 0.1)[0] == pytest.approx(0.2, rel=0.1)  # first-order distance estimate


def test_local_frames():
    M = sphere(1.0)
    u, v = local_frames_at_contact(M, 0.0, 0.1)
    x = np.array([0.05, 0.02])
    assert u(x) == pytest.approx(v(x), abs=1e-15)
    with pytest.raises(PreconditionError):
        local_frames_at_contact(M, 0.3)


def test_pear_contact_reflected_graph_above():
    M = pear((0.3,))
    lam0, _ = find_lambda0(M)
    u, v = local_frames_at_contact(M, lam0, 0.05)
    diffs = [u(np.array([t, y])) - v(np.array([t, y])) for t in np.linspace(0.001, 0.04, 20) for y in (0.0, 0.02)]
    assert min(diffs) >= -1e-12 and max(diffs) > 0


def test_reflected_graph_derivatives():
    v = quadratic_field([[2.0, 0.3], [0.3, 1.0]], grad=[0.5, -0.2])
    u = reflected_graph(v)
    x = np.array([0.1, 0.2])
    _, g, H = u.evaluate(x)
    fd = ScalarField(u.fn, 2)
    _, g2, H2 = fd.evaluate(x)
    assert np.allclose(g, g2, atol=1e-8) and np.allclose(H, H2, atol=1e-5)


def test_implicit_t_translation_and_quadratic():
    u = line_field(lambda t: t, lambda t: 1.0, lambda t: 0.0)
    v = line_field(lambda t: t - 0.1, lambda t: 1.0, lambda t: 0.0)
    assert implicit_t(u, v, 0.5, 0.0) == pytest.approx(0.4, abs=1e-12)
    u = line_field(lambda t: t * t, lambda t: 2 * t, lambda t: 2.0)
    v = line_field(lambda t: t * t / 4, lambda t: t / 2, lambda t: 0.5)
    assert implicit_t(u, v, 0.6, 0.0) == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(DomainError):
        implicit_t(v, u, 0.6, 0.0)


def cubic_root_oracle(c, b, s, y):
    # t^2 (1/2 + b y^2) + c t^3 = s^2 (1/2 + b y^2) - c s^3, smallest positive root
    k = 0.5 + b * y * y
    rhs = s * s * k - c * s ** 3
    roots = np.roots([c, k, 0.0, -rhs])
    real = [r.real for r in roots if abs(r.imag) < 1e-12 and 0 < r.real <= s]
    return min(real)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.09), st.floats(-0.09, 0.09))
def test_manufactured_t_matches_cubic(s, y):
    u, v = manufactured_contact(0.5, 0.25)
    assert implicit_t(u, v, s, y) == pytest.approx(cubic_root_oracle(0.5, 0.25, s, y), abs=1e-11)


def test_L_on_flat_data():
    flat = quadratic_field(np.zeros((2, 2)))
    assert np.allclose(mean_curvature_coefficients([0.0, 0.0]), np.eye(2) / 2)
    flat_u = ScalarField(lambda x: x[0], 2, grad=lambda x: np.array([1.0, 0.0]), hess=lambda x: np.zeros((2, 2)))
    co = assemble_L(flat_u, flat_u, 0.1, 0.0, 0.1, [0.0, 0.0])
    w = math.sqrt(2.0)
    assert co.a == pytest.approx(np.array([[1 / w - 1 / w ** 3, 0], [0, 1 / w]]) / 2)
    assert np.allclose(co.drift, 0.0)
    with pytest.raises(PreconditionError):
        assemble_L(flat, flat, 0.1, 0.0, 0.1, [0.0, 0.0])


def test_translation_pair_has_zero_L_tau():
    u = line_field(lambda t: t + t * t, lambda t: 1 + 2 * t, lambda t: 2.0)
    v = line_field(lambda t: (t - 0.01) + (t - 0.01) ** 2, lambda t: 1 + 2 * (t - 0.01), lambda t: 2.0)
    co = assemble_L(u, v, 0.2, 0.0, 0.19, [0.0, 0.0])
    assert co.apply(np.zeros(2), np.zeros((2, 2))) == 0.0
    assert co.identity_value == pytest.approx(0.0, abs=1e-15)


def implicit_tau_derivs(u, v, s, y, t):
    """Oracle: tau derivatives from implicit differentiation of u(s - tau, y) = v(s, y)."""
    _, gu, Nu = u.evaluate(np.array([t, y]))
    _, gv, Nv = v.evaluate(np.array([s, y]))
    ut = gu[0]
    ts = 1 - gv[0] / ut
    ty = (gu[1] - gv[1]) / ut
    tss = (Nu[0, 0] * (1 - ts) ** 2 - Nv[0, 0]) / ut
    tsy = (-Nu[0, 0] * (1 - ts) * ty + Nu[0, 1] * (1 - ts) - Nv[0, 1]) / ut
    tyy = (Nu[0, 0] * ty * ty - 2 * Nu[0, 1] * ty + Nu[1, 1] - Nv[1, 1]) / ut
    return np.array([ts, ty]), np.array([[tss, tsy], [tsy, tyy]])


def test_L_tau_identity_is_exact_with_implicit_derivatives():
    u, v = manufactured_contact(0.5, 0.25)
    for s, y in [(0.05, 0.03), (0.02, -0.07), (0.08, 0.0)]:
        t = implicit_t(u, v, s, y)
        g, H = implicit_tau_derivs(u, v, s, y, t)
        co = assemble_L(u, v, s, y, t, g)
        assert co.apply(g, H) == pytest.approx(co.identity_value, rel=1e-9, abs=1e-12)


def test_tau_field_fd_derivatives_track_implicit_ones():
    u, v = manufactured_contact(0.5, 0.25)
    tf = build_tau_field(u, v, 0.1, 48)
    ts, ty, tss, tsy, tyy = tf.derivatives()
    i, j = 30, 17
    g, H = implicit_tau_derivs(u, v, tf.s[i], tf.y[j], tf.t[i, j])
    assert ts[i, j] == pytest.approx(g[0], abs=1e-4) and ty[i, j] == pytest.approx(g[1], abs=1e-4)
    assert tss[i, j] == pytest.approx(H[0, 0], abs=1e-2)


def test_symmetric_pair_prop1():
    # u = v: tau vanishes, so tau_s = 0 and L tau = 0
    _, v = manufactured_contact(0.0, 0.25)
    tf = build_tau_field(v, v, 0.1, 32)
    rep = check_prop1_dichotomy(v, v, tf)
    assert rep.tau_s_max == 0.0 and rep.L_tau_max == pytest.approx(0.0, abs=1e-12) and rep.L_tauhat_min > 0
    assert rep.ratio_limit["t_over_s"] == 1.0


@pytest.mark.parametrize("c", [0.25, 0.5])
def test_manufactured_prop1_mechanism(c):
    u, v = manufactured_contact(c, 0.25)
    tf = build_tau_field(u, v, 0.1, 64)
    rep = check_prop1_dichotomy(u, v, tf)
    assert rep.slope_bound and rep.barrier and rep.violation
    assert 0.95 <= rep.ratio_limit["t_over_s"] <= 1.05
    # H(upper) - H(lower) ~ 12 c s / n near the contact, so max L tau ~ 6 c
    assert rep.L_tau_max == pytest.approx(6 * c, rel=0.05)


def test_tau_hat_derivatives():
    g, H = tau_hat_derivs(0.04)
    assert g[0] == pytest.approx(1.3) and H[0, 0] == pytest.approx(3.75)
