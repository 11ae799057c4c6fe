import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moderf.errors import InvalidInterval, NonConvergence
from moderf.quadrature import (WG, WK, XK, QuadratureResult, integrate_finite,
                               integrate_semi_infinite)

SQRT_PI_2 = math.sqrt(math.pi) / 2


def test_kronrod_tables_integrate_polynomials_exactly():
    # Gauss part is exact to degree 13, Kronrod to degree 22
    for k in range(0, 23, 2):
        exact = 2.0 / (k + 1)
        assert WK @ XK**k == pytest.approx(exact, abs=1e-14)
        if k <= 13:
            assert WG @ XK**k == pytest.approx(exact, abs=1e-14)


def test_gaussian_on_finite_interval():
    res = integrate_finite(lambda x: np.exp(-x * x), 0.0, 8.0, 1e-12)
    assert abs(res.value - SQRT_PI_2) <= max(res.error_estimate, 1e-12)
    assert res.value == pytest.approx(0.886226925452758, abs=1e-14)


def test_empty_interval_is_zero():
    res = integrate_finite(lambda x: np.ones_like(x), 2.0, 2.0, 1e-3)
    assert res.value == 0.0
    assert res.evaluations >= 1


def test_closed_form_antiderivative():
    res = integrate_finite(lambda x: x * np.exp(-x * x), 0.0, 3.0, 1e-12)
    assert res.value == pytest.approx((1 - math.exp(-9)) / 2, abs=1e-13)


def test_scalar_callable_is_accepted():
    res = integrate_finite(math.sin, 0.0, math.pi, 1e-12)
    assert res.value == pytest.approx(2.0, abs=1e-13)


@pytest.mark.parametrize("a,b", [(1.0, 0.0), (0.0, math.inf), (math.nan, 1.0)])
def test_bad_intervals(a, b):
    with pytest.raises(InvalidInterval):
        integrate_finite(np.exp, a, b, 1e-8)


def test_budget_exhaustion_raises():
    # sqrt has an endpoint singularity in its derivative; a tiny budget cannot cope
    with pytest.raises(NonConvergence):
        integrate_finite(np.sqrt, 0.0, 1.0, 1e-15, max_evaluations=200)


def test_breakpoints_handle_kinks():
    res = integrate_finite(lambda x: np.abs(x - 0.3), 0.0, 1.0, 1e-12, breakpoints=[0.3])
    assert res.value == pytest.approx(0.3**2 / 2 + 0.7**2 / 2, abs=1e-14)
    assert res.evaluations == 30


def test_result_invariants_enforced():
    with pytest.raises(ValueError):
        QuadratureResult(1.0, -1.0, 3)
    with pytest.raises(ValueError):
        QuadratureResult(1.0, 0.0, 0)


class TestSemiInfinite:
    def test_gaussian(self):
        res = integrate_semi_infinite(lambda x: np.exp(-x * x), 1e-10, 1.0)
        assert res.value == pytest.approx(SQRT_PI_2, abs=1e-10)

    def test_constant_coefficient(self):
        d = 0.1
        res = integrate_semi_infinite(lambda x: np.exp(-x * x / (1 + d)) / (1 + d), 1e-10, 1 + d)
        exact = math.sqrt(math.pi) / (2 * math.sqrt(1 + d))
        assert abs(res.value - exact) <= max(res.error_estimate, 1e-10)
        assert exact == pytest.approx(0.8449842190, abs=1e-10)

    def test_tail_bound_is_in_error_estimate(self):
        res = integrate_semi_infinite(lambda x: np.exp(-x * x), 1e-6, 1.0)
        assert res.error_estimate > 0
        assert abs(res.value - SQRT_PI_2) <= res.error_estimate


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-3, 3), w1=st.floats(0, 3), w2=st.floats(0, 3))
def test_interval_additivity(a, w1, w2):
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)
    b, c = a + w1, a + w1 + w2
    whole = integrate_finite(f, a, c, 1e-11)
    left = integrate_finite(f, a, b, 1e-11)
    right = integrate_finite(f, b, c, 1e-11)
    slack = whole.error_estimate + left.error_estimate + right.error_estimate + 1e-14
    assert abs(whole.value - left.value - right.value) <= slack


@settings(max_examples=30, deadline=None)
@given(lo=st.floats(0, 2), width=st.floats(0.01, 4), k=st.floats(0.5, 5))
def test_positivity(lo, width, k):
    res = integrate_finite(lambda x: np.exp(-k * x * x), lo, lo + width, 1e-10)
    assert res.value >= -res.error_estimate


def test_halving_tolerance_does_not_increase_error():
    exact = (1 - math.exp(-9)) / 2
    f = lambda x: x * np.exp(-x * x)
    errors = [abs(integrate_finite(f, 0, 3, 10.0**-k).value - exact) for k in range(2, 13)]
    for tighter, looser in zip(errors[1:], errors[:-1]):
        assert tighter <= max(looser, 1e-15)
