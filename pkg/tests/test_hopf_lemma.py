import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alexlab.errors import OrderError
from alexlab.hopf_lab import (
    barrier,
    hopf_c0_lt2_corollary_check,
    hopf_exponent,
    hopf_growth_check,
    infinite_order_barrier_check,
    poisson_kernel,
)
from alexlab.surface_core import ScalarField


@given(st.integers(2, 5), st.floats(0, 50))
def test_exponent_solves_quadratic(n, C0):
    k = hopf_exponent(n, C0)
    assert k >= n
    assert abs(k * (k - n) - C0) <= 1e-12 * max(1.0, C0)


def test_barrier_derivatives_match_radial_formulas():
    h = barrier(3, 4.0)
    x = np.array([-0.6, 0.2, 0.1])
    r = np.linalg.norm(x)
    _, g, H = h.evaluate(x)
    assert np.allclose(g, -4 * (1 - r) ** 3 * x / r)
    lap = 4 * 3 * (1 - r) ** 2 - 2 * 4 * (1 - r) ** 3 / r
    assert np.trace(H) == pytest.approx(lap, rel=1e-12)


@pytest.mark.parametrize("n,C0", [(2, 1.0), (2, 3.0), (3, 1.0), (3, 3.0)])
def test_growth_check_barrier(n, C0):
    rep = hopf_growth_check(C0, n)
    k = rep.fitted_constants["k"]
    assert rep.status("barrier_on_K") == "holds"
    assert rep.fitted_constants["k_residual"] <= 1e-12
    assert abs(rep.fitted_constants["barrier_exponent"] - k) <= 0.01


def test_poisson_kernel_vanishes_linearly():
    # harmonic, positive, zero at P: the C0 = 0 bound |x - P|^n is weaker than the actual linear growth
    w = poisson_kernel(2)
    rep = hopf_growth_check(0.0, 2, w=w)  # P = (-1, 0), opposite the kernel pole
    assert rep.status("w_positive") == "holds"
    assert rep.status("lap_bound") == "holds"
    assert rep.status("growth_bound") == "holds"
    assert rep.fitted_constants["w_exponent"] == pytest.approx(1.0, abs=0.02)


def _power_field(p):
    """w = (1 - |x|)^p in the unit disk, via finite differences."""
    return ScalarField(lambda x: max(1 - math.sqrt(x @ x), 0.0) ** p, 2, lo=[-1, -1], hi=[1, 1], fd_step=1e-5)


def test_corollary_names_broken_hypothesis():
    rep = hopf_c0_lt2_corollary_check(_power_field(1.5), 1.0)
    assert rep.conclusion.startswith("hypothesis-failure")
    assert "C2_up_to_boundary" in rep.broken


def test_corollary_cubic_breaks_lap_bound():
    rep = hopf_c0_lt2_corollary_check(_power_field(3.0), 1.5)
    assert "lap_bound_layer" in rep.broken


def test_corollary_rejects_large_C0():
    with pytest.raises(ValueError):
        hopf_c0_lt2_corollary_check(_power_field(3.0), 2.5)


def test_infinite_order_barrier_exp():
    w = ScalarField(lambda x: math.exp(-1 / x[0]) if x[0] > 0 else 0.0, 2, lo=[0, -1], hi=[1, 1], fd_step=1e-5)
    rep = infinite_order_barrier_check(w)
    assert "lap_bound_some_C0" in rep.broken
    # Lap w t^2 / w = (1 - 2t) / t^2 is the oracle
    for t, _, ratio in rep.series["ratio"][1]:
        assert ratio == pytest.approx((1 - 2 * t) / t ** 2, rel=1e-3, abs=1e-5)


def test_infinite_order_barrier_rejects_polynomial():
    w = ScalarField(lambda x: x[0] ** 4, 2, lo=[0, -1], hi=[1, 1], fd_step=1e-5)
    with pytest.raises(OrderError):
        infinite_order_barrier_check(w)


def test_zero_field_is_consistent():
    w = ScalarField(lambda x: 0.0, 2, lo=[0, -1], hi=[1, 1])
    assert infinite_order_barrier_check(w).conclusion.startswith("consistent")
