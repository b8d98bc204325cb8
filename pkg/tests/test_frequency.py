import math

import numpy as np
import pytest

from alexlab.hopf_lab.frequency import (
    PDEInstance,
    combine,
    flat_radial,
    frequency_convexity,
    frequency_series,
    harmonic_2d,
    harmonic_3d,
    radial_constant_potential,
    sphere_rule,
    vanish_order_uniqueness,
)


def test_sphere_rules_integrate_harmonics():
    X, w = sphere_rule(2)
    assert w.sum() == pytest.approx(2 * math.pi)
    assert w @ (X[:, 0] ** 6) == pytest.approx(2 * math.pi * 5 / 16)
    X, w = sphere_rule(3)
    assert w.sum() == pytest.approx(4 * math.pi)
    # int z^2 = 4 pi / 3, int (x y z)^2 = 4 pi / 105
    assert w @ X[:, 2] ** 2 == pytest.approx(4 * math.pi / 3)
    assert w @ np.prod(X, axis=1) ** 2 == pytest.approx(4 * math.pi / 105)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_rho_closed_form_2d(m):
    fs = frequency_series(harmonic_2d(m))
    assert np.allclose(fs.rho, math.pi * np.exp(2 * m * fs.s), rtol=1e-12)


@pytest.mark.parametrize("inst", [harmonic_2d(m) for m in (1, 2, 3, 4)] + [harmonic_3d(l) for l in (1, 2, 3)],
                         ids=lambda i: i.label)
def test_homogeneous_harmonic_log_linear(inst):
    rep = frequency_convexity(frequency_series(inst))
    assert not rep.broken
    assert rep.fitted_constants["max_abs_d2_log_rho"] <= 1e-8


@pytest.mark.parametrize("inst", [combine(harmonic_2d(1), harmonic_2d(3)), combine(harmonic_3d(1), harmonic_3d(3))],
                         ids=lambda i: i.label)
def test_two_term_strictly_convex(inst):
    rep = frequency_convexity(frequency_series(inst))
    assert not rep.broken
    assert rep.fitted_constants["min_d2_log_rho"] > 0


def test_two_term_matches_exponential_sum():
    # Re z + Re z^3: rho = pi (e^{2s} + e^{6s})
    fs = frequency_series(combine(harmonic_2d(1), harmonic_2d(3)))
    assert np.allclose(fs.rho, math.pi * (np.exp(2 * fs.s) + np.exp(6 * fs.s)), rtol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_constant_potential(n):
    rep = frequency_convexity(frequency_series(radial_constant_potential(2.0, n)))
    assert not rep.broken
    assert rep.status("r2V_monotone") == "holds"


def test_radial_solution_solves_ode():
    # n = 3: u = sinh(k r) / (k r)
    inst = radial_constant_potential(4.0, 3)
    X = np.array([[0.3, 0.0, 0.0]])
    assert inst.u(X)[0] == pytest.approx(math.sinh(0.6) / 0.6)


def test_flat_instance_breaks_monotonicity():
    rep = frequency_convexity(frequency_series(flat_radial(2)))
    assert "r2V_monotone" in rep.broken
    assert rep.status("pde_residual") == "holds"


def test_wrong_potential_is_caught():
    inst = harmonic_2d(2)
    bad = PDEInstance(2, inst.u, inst.grad, lambda X: np.ones(len(X)), "harmonic with V=1")
    assert "pde_residual" in frequency_convexity(frequency_series(bad)).broken


def test_uniqueness_outcomes():
    zero = PDEInstance(2, lambda X: np.zeros(len(X)), label="zero")
    rep = vanish_order_uniqueness(frequency_series(harmonic_2d(0)), frequency_series(flat_radial(3)),
                                  frequency_series(zero))
    out = {o["label"]: o for o in rep.details["outcomes"]}
    assert out["Re z^0"]["outcome"] == "no-infinite-order"
    assert out["exp(-1/r^2)"]["outcome"] == "hypothesis-broken"
    assert out["exp(-1/r^2)"]["broken"] == ["r2V_monotone"]
    assert out["zero"]["outcome"] == "consistent"
    assert rep.conclusion == "consistent"


def test_vanishing_order_estimate():
    rep = vanish_order_uniqueness(frequency_series(harmonic_3d(2)))
    assert rep.details["outcomes"][0]["vanishing_order"] == pytest.approx(2.0, abs=1e-6)
