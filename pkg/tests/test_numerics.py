import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alexlab.errors import BracketError, ConvergenceError, DomainError
from alexlab.numerics import (
    Grid,
    as_sym,
    bisect_root,
    eig_sym,
    fd_gradient_hessian,
    loglog_slope,
    sym_from_upper,
    windowed_slopes,
)


def test_grid_nodes_hit_endpoints_exactly():
    g = Grid(((-1.0, 1.0, 7), (0.0, 3.0, 4)))
    assert g.shape == (7, 4)
    assert g.nodes(0)[0] == -1.0 and g.nodes(0)[-1] == 1.0
    assert g.spacing == pytest.approx((1 / 3, 1.0))
    X, Y = g.mesh()
    assert X.shape == (7, 4) and Y[0, -1] == 3.0


def test_grid_rejects_tiny_axes():
    with pytest.raises(ValueError):
        Grid(((0.0, 1.0, 2),))


def test_as_sym_uses_upper_triangle():
    m = as_sym([[1.0, 2.0], [99.0, 3.0]])
    assert m[1, 0] == 2.0
    with pytest.raises(ValueError):
        as_sym(np.eye(9))
    assert np.array_equal(sym_from_upper([1, 2, 3], 2), [[1, 2], [2, 3]])


mats = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.floats(-10, 10, allow_nan=False), min_size=n * n, max_size=n * n).map(
        lambda v: np.array(v).reshape(n, n)
    )
)


@settings(max_examples=60, deadline=None)
@given(mats)
def test_jacobi_matches_lapack(a):
    a = a + a.T
    w, v = eig_sym(a)
    ref = np.linalg.eigvalsh(a)
    scale = max(1.0, np.abs(ref).max())
    assert np.allclose(w, ref, atol=1e-12 * scale)
    assert np.allclose(v.T @ v, np.eye(len(w)), atol=1e-12)
    assert np.allclose(a @ v, v * w, atol=1e-10 * scale)


def test_jacobi_reports_nonconvergence():
    a = np.array([[1.0, 1.0], [1.0, 2.0]])
    with pytest.raises(ConvergenceError):
        eig_sym(a, tol=0.0, max_sweeps=0)


def test_fd_on_quadratic_is_exact_to_roundoff():
    H = np.array([[2.0, 0.5, 0.0], [0.5, -1.0, 0.3], [0.0, 0.3, 4.0]])
    g = np.array([1.0, -2.0, 0.5])
    f = lambda x: g @ x + 0.5 * x @ H @ x
    x = np.array([0.2, -0.1, 0.3])
    _, grad, hess = fd_gradient_hessian(f, x, 1e-3)
    assert np.allclose(grad, g + H @ x, atol=1e-9)
    assert np.allclose(hess, H, atol=1e-6)


def test_fd_rejects_nonfinite_samples():
    with pytest.raises(DomainError), np.errstate(divide="ignore", invalid="ignore"):
        fd_gradient_hessian(lambda x: np.log(x[0]), np.array([0.0]), 1e-3)


def test_bisect_root():
    r, it = bisect_root(lambda x: x * x - 2, 0, 2, tol=1e-14, full_output=True)
    assert abs(r - math.sqrt(2)) < 1e-13 and it > 10
    with pytest.raises(BracketError):
        bisect_root(lambda x: x * x + 1, -1, 1)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 12.0), st.floats(1e-3, 1e3))
def test_loglog_slope_recovers_power(k, c):
    ts = np.geomspace(1e-1, 1e-3, 10)
    slope, r2 = loglog_slope([(t, c * t ** k) for t in ts])
    assert abs(slope - k) < 1e-8 and r2 > 0.999999


def test_windowed_slopes_ordered_large_t_first():
    pts = [(t, t ** 2 + t ** 4) for t in np.geomspace(1, 1e-3, 12)]
    s = windowed_slopes(pts)
    assert s[0] > s[-1] and abs(s[-1] - 2) < 1e-3
