import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alexlab.errors import OrderError, PreconditionError
from alexlab.hopf_lab.taylor import (
    DegenerateExpansion,
    SourceOracle,
    TrigPoly,
    YGrid,
    f_asymptotics_check,
    lap_series,
    manufactured,
    reversion,
    taylor_recursion,
)


def test_spectral_laplacian_exact_on_trig():
    g = YGrid(2, 8)
    p = TrigPoly(0.3, ((0.7, (1, 2), 0.4), (-0.2, (3, 0), 1.0)))
    Y = g.points
    assert np.allclose(g.laplacian(p(Y)), p.laplacian(Y), atol=1e-12)


def test_trig_laplacian_by_finite_differences():
    p = TrigPoly(0.0, ((1.1, (2,), 0.3),))
    y, h = np.array([[0.4]]), 1e-4
    fd = (p(y + h) - 2 * p(y) + p(y - h)) / h ** 2
    assert fd[0] == pytest.approx(p.laplacian(y)[0], rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_reversion_inverts_the_polynomial(k, higher):
    c = {k: 1.3}
    c.update({k + 1 + i: v for i, v in enumerate(higher)})
    N = 8
    t = reversion(c, k, N)
    lam = 1e-3
    tv = np.polyval(t[::-1], lam)
    U = sum(cj * tv ** j for j, cj in c.items())
    assert U == pytest.approx(1.3 * lam ** k, rel=1e-9)


def test_reversion_quadratic_closed_form():
    # a t + b t^2 = a lam  =>  t = (-a + sqrt(a^2 + 4 a b lam)) / (2 b)
    a, b, lam = 1.3, 0.7, 0.02
    t = np.polyval(reversion({1: a, 2: b}, 1, 20)[::-1], lam)
    assert t == pytest.approx((-a + np.sqrt(a * a + 4 * a * b * lam)) / (2 * b), rel=1e-13)


def test_lap_series_of_pure_power():
    # u = t^2 a: Lap u = 2a + t^2 Lap a, t = lam exactly
    s = lap_series({2: 1.5}, {2: -0.4}, 2, 4)
    assert np.allclose(s, [3.0, 0, -0.4, 0, 0])


@pytest.mark.parametrize("k,n", [(1, 2), (2, 2), (3, 2), (2, 3)])
def test_round_trip(k, n):
    e = manufactured(k, n, nodes=16 if n == 2 else 8)
    known = {1: e.values(1)} if k == 1 else None
    got = taylor_recursion(SourceOracle(e), e, k, k + 3, known=known)
    for m, vals in got.items():
        assert np.max(np.abs(vals - e.values(m))) <= 1e-6, m


def test_source_oracle_inverts_u():
    e = manufactured(2, 2, nodes=8)
    Y = e.grid.points
    t = np.full(len(Y), 0.05)
    s = e.u(t, Y)
    assert np.allclose(e.solve_t(s, Y), t, rtol=1e-13)
    assert np.allclose(SourceOracle(e)(Y, s), e.lap(t, Y), rtol=1e-12)


def test_expansion_consistency_small():
    e = manufactured(2, 2, nodes=8)
    res = e.consistency(SourceOracle(e))
    assert max(res) <= 1e-10


def test_nonpositive_leading_coefficient_rejected():
    with pytest.raises(PreconditionError):
        DegenerateExpansion(2, 2, {2: TrigPoly(-1.0)})
    e = manufactured(2, 2, nodes=8)
    with pytest.raises(PreconditionError):
        taylor_recursion(SourceOracle(e), -e.values(2), 2, 4, grid=e.grid)
    with pytest.raises(PreconditionError):
        f_asymptotics_check(SourceOracle(e), e, k=3)  # a_3 changes sign


@pytest.mark.parametrize("k,n", [(1, 2), (2, 2), (3, 2), (2, 3)])
def test_asymptotic_ratios(k, n):
    e = manufactured(k, n, nodes=8)
    rep = f_asymptotics_check(SourceOracle(e), e)
    assert not rep.broken, rep.to_dict()


def test_order_mismatch_detected():
    # claiming k = 3 for a k = 2 solution: f s^(-1/3) blows up
    e = DegenerateExpansion(2, 2, {2: TrigPoly(1.0), 3: TrigPoly(0.5, ((0.1, (1,), 0.0),))}, YGrid(1, 8))
    with pytest.raises(OrderError):
        f_asymptotics_check(SourceOracle(e), e, k=3)


def test_chebyshev_fallback_for_real_only_source():
    e = manufactured(2, 2, nodes=8)
    oracle = SourceOracle(e)

    def real_only(Y, s, guess=None):
        if np.iscomplexobj(s):
            raise TypeError("real arguments only")
        return oracle(Y, s)

    got = taylor_recursion(real_only, e, 2, 5)
    for m, vals in got.items():
        assert np.max(np.abs(vals - e.values(m))) <= 1e-6
