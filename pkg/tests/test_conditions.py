import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alexlab.catalog import build_surface, ellipsoid, flat_tangent, pear, sphere
from alexlab.conditions import (
    check_all,
    check_condition_LC,
    check_condition_S,
    check_condition_T,
    check_main_assumption,
    contact_order,
    find_tangency_set,
)
from alexlab.errors import DegenerateDirectionError


def test_sphere_tangency_frame():
    M = sphere(1.0, n=3)
    (tp,) = find_tangency_set(M)
    assert abs(tp.z) < 1e-12 and abs(tp.nu) < 1e-8
    F = tp.frame
    assert np.allclose(F @ F.T, np.eye(4))
    assert np.allclose(F[-1], M.inner_normal(tp.z))


def test_local_graph_matches_sphere():
    # oracle: M near the equator point of the unit sphere is v = 1 - sqrt(1 - t^2 - |y|^2)
    (tp,) = find_tangency_set(sphere(1.0))
    v = tp.local_graph()
    x = np.array([0.1, -0.2])
    assert v(x) == pytest.approx(1 - math.sqrt(1 - x @ x), abs=1e-14)
    _, g, H = v.evaluate(x)
    d = 1 - x @ x
    assert np.allclose(H, np.eye(2) / math.sqrt(d) + np.outer(x, x) / d ** 1.5, atol=1e-12)


@pytest.mark.parametrize("k", [2, 4, 6])
def test_contact_order_of_flat_profiles(k):
    (tp,) = find_tangency_set(flat_tangent(k))
    co = contact_order(tp)
    assert co.status == "finite" and co.order == k


def test_infinite_contact_flag():
    (tp,) = find_tangency_set(flat_tangent("infinite"))
    co = contact_order(tp)
    assert co.infinite and co.order is None


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0))
def test_contact_order_scale_invariant(lam):
    # v -> lam v leaves the order unchanged
    (tp,) = find_tangency_set(sphere(1.0))
    ts = np.geomspace(0.05, 1e-3, 12)
    base = contact_order(tp).order
    scaled = type(tp)(tp.z, tp.profile, tp.nu)
    scaled.v_line = lambda t: lam * tp.v_line(t)
    assert contact_order(scaled, ts).order == base == 2


def test_degenerate_direction():
    (tp,) = find_tangency_set(build_surface("cylinder-capped"))
    assert tp.band == pytest.approx((-0.5, 0.5), abs=1e-3)
    with pytest.raises(DegenerateDirectionError):
        contact_order(tp)


@pytest.mark.parametrize("name", ["sphere", "ellipsoid"])
def test_convex_bodies_satisfy_everything(name):
    reps = check_all(build_surface(name))
    assert {k: r.verdict for k, r in reps.items()} == dict.fromkeys(reps, "holds")
    assert reps["T"].details["orders"][0]["order"] == 2


def test_sphere_main_assumption_zero_margin():
    rep = check_main_assumption(sphere(1.0))
    assert rep.details["max_abs_dH"] <= 1e-10


def test_dumbbell_negative_controls():
    M = build_surface("dumbbell")
    s = check_condition_S(M)
    assert s.verdict == "fails" and s.details["witness_stable"]
    assert {round(w["tangency_z"], 6) for w in s.witnesses} == {-0.5, 0.5}
    lc = check_condition_LC(M)
    assert lc.verdict == "fails" and all(w["stable"] for w in lc.witnesses)
    assert check_condition_T(M).verdict == "holds"


def test_flat_tangent_fails_T_only():
    M = flat_tangent("infinite")
    t = check_condition_T(M)
    assert t.verdict == "fails" and "infinite" in t.witnesses[0]["reason"]
    assert check_condition_S(M).verdict == "holds"


def test_cylinder_band_fails_T():
    assert check_condition_T(build_surface("cylinder-capped")).verdict == "fails"


def test_pear_witness_pair():
    rep = check_main_assumption(pear((0.3,)))
    assert rep.verdict == "fails"
    w = rep.witnesses[0]
    M = pear((0.3,))
    # the witness is a genuine vertical segment inside the body with H increasing upward
    r, zu = w["point"]
    zl = w["lower"][1]
    assert zu > zl and abs(M.q(zu) - r * r) < 1e-9 and abs(M.q(zl) - r * r) < 1e-9
    assert all(M.q(z) >= r * r - 1e-12 for z in np.linspace(zl, zu, 1000))
    assert M.mean_curvature(zu) - M.mean_curvature(zl) == pytest.approx(w["margin"], abs=1e-12)


def test_symmetric_pear_coefficients_are_ellipsoid_like():
    # q = (1 - z^2)(1 + c z^2) is even; every vertical segment has matching ends
    rep = check_main_assumption(pear((0.0, 0.2)), levels=50)
    assert rep.details["max_abs_dH"] < 1e-12


def test_report_json_shape():
    d = check_condition_S(build_surface("dumbbell")).to_dict()
    assert set(d) == {"condition", "verdict", "witnesses", "resolution", "details"}
    assert all({"point", "margin"} <= set(w) for w in d["witnesses"])
