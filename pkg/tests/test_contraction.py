import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import g_exact
from moderf.contraction import (certify, check_C_lower_bound, check_lemma_a, check_lemma_b,
                                check_lemma_c, empirical_contraction_ratio, find_delta1, g_of,
                                lemma_a_constant, lemma_b_constant)
from moderf.errors import DegenerateInput, DomainError
from moderf.function_space import GridFunction, constant_grid, random_K_function
from moderf.tau_operator import OperatorParams

# mpmath root of g = 1 at 40 digits
DELTA1 = 0.20370191755737959


def test_g_values():
    assert g_of(0.0) == 0.0
    assert g_of(0.1) == pytest.approx(float(g_exact("0.1")), abs=1e-15)
    assert g_of(0.1) == pytest.approx(0.3851267, abs=1e-6)
    assert g_of(DELTA1) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DomainError):
        g_of(-1e-3)


@settings(max_examples=100)
@given(a=st.floats(0, 10), b=st.floats(0, 10))
def test_g_increasing(a, b):
    if a < b:
        assert g_of(a) < g_of(b)


def test_theorem_constant_composes_from_lemma_constants():
    # C bound times lemma a plus lemma b times lemma c reproduces g
    for d in (0.01, 0.1, 0.2, 0.5):
        composed = (2 * (1 + d) / math.sqrt(math.pi) * lemma_a_constant(d)
                    + lemma_b_constant(d) * math.sqrt(math.pi * (1 + d)) / 2)
        assert composed == pytest.approx(g_of(d), rel=1e-14)


class TestDelta1:
    def test_published_bracket(self):
        lo, hi = find_delta1(1e-6)
        assert 0.203701 <= lo < hi <= 0.203702
        assert hi - lo <= 1e-6

    def test_loose(self):
        lo, hi = find_delta1(0.5)
        assert hi - lo <= 0.5 and lo < DELTA1 < hi

    @pytest.mark.parametrize("tol", [1e-3, 1e-6, 1e-9, 1e-12, 1e-16, 1e-30])
    def test_root_consistency(self, tol):
        lo, hi = find_delta1(tol)
        assert g_of(lo) < 1 < g_of(hi)

    def test_tight_regression(self):
        lo, hi = find_delta1(1e-12)
        assert lo == pytest.approx(DELTA1, abs=1e-12) and hi == pytest.approx(DELTA1, abs=1e-12)


def test_certificate():
    c = certify(0.1)
    assert c.is_contractive and c.g_value == g_of(0.1)
    assert c.delta1_bracket[0] < c.delta1_bracket[1]
    assert not certify(0.25).is_contractive
    assert c.to_dict()["delta1_bracket"] == list(c.delta1_bracket)


class TestLemmaA:
    def test_identical_arguments(self, erf_h):
        bc = check_lemma_a(erf_h, erf_h, 0.1, 6.0)
        assert bc.lhs == 0.0 and bc.rhs == 0.0 and bc.holds

    def test_erf_vs_ramp(self, erf_h, ramp_h):
        bc = check_lemma_a(erf_h, ramp_h, 0.1, 6.0)
        assert bc.holds and bc.slack > 0

    def test_random_pairs(self, rng, wide_x_max):
        for _ in range(10):
            h1, h2 = random_K_function(rng, wide_x_max), random_K_function(rng, wide_x_max)
            assert check_lemma_a(h1, h2, 0.2, float(rng.uniform(0, 7))).holds


class TestLemmaB:
    def test_identical(self, erf_h):
        bc = check_lemma_b(erf_h, erf_h, 0.1)
        assert bc.lhs == 0 and bc.rhs == 0 and bc.holds

    def test_erf_vs_ramp(self, erf_h, ramp_h):
        assert check_lemma_b(erf_h, ramp_h, 0.1).holds

    def test_small_delta_limit(self, erf_h, ramp_h):
        bc = check_lemma_b(erf_h, ramp_h, 1e-9)
        assert bc.rhs < 1e-8 and bc.lhs < 1e-9 and bc.holds


class TestLemmaC:
    def test_zero_upper_limit(self, erf_h):
        bc = check_lemma_c(erf_h, 0.1, 0.0)
        assert bc.lhs == 0 and bc.holds

    def test_equality_limit_at_delta_zero(self, erf_h):
        bc = check_lemma_c(erf_h, 0.0, 50.0)
        assert bc.holds and abs(bc.slack) < 1e-13

    def test_erf(self, erf_h):
        assert check_lemma_c(erf_h, 0.2, 6.0).holds


class TestCLowerBound:
    def test_delta_zero_equality(self, erf_h):
        bc = check_C_lower_bound(erf_h, 0.0)
        assert bc.holds and bc.lhs == pytest.approx(bc.rhs, abs=1e-13)

    def test_erf(self, erf_h):
        assert check_C_lower_bound(erf_h, 0.1).holds

    @pytest.mark.parametrize("delta", [0.05, 0.2, 1.0])
    def test_constant_one(self, delta):
        bc = check_C_lower_bound(constant_grid(1.0), delta)
        assert bc.rhs == pytest.approx(math.sqrt(math.pi) / (2 * math.sqrt(1 + delta)), abs=1e-12)
        assert bc.holds and bc.slack > 0


class TestRatio:
    def test_delta_zero(self, erf_h, ramp_h):
        assert empirical_contraction_ratio(erf_h, ramp_h, OperatorParams(0.0)) < 1e-12

    def test_erf_ramp(self, erf_h, ramp_h):
        assert empirical_contraction_ratio(erf_h, ramp_h, OperatorParams(0.1)) <= g_of(0.1) + 1e-6

    def test_random_pair(self, rng, wide_x_max):
        h1, h2 = random_K_function(rng, wide_x_max), random_K_function(rng, wide_x_max)
        assert empirical_contraction_ratio(h1, h2, OperatorParams(0.2)) <= g_of(0.2)

    def test_degenerate(self, erf_h):
        with pytest.raises(DegenerateInput):
            empirical_contraction_ratio(erf_h, erf_h, OperatorParams(0.1))
