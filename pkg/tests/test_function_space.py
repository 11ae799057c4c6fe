import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import erf_by_quadrature
from moderf.errors import DomainError
from moderf.function_space import (GridFunction, check_K_membership, constant_grid,
                                   default_x_max, erf_grid, evaluate, random_K_function,
                                   sup_distance, uniform_nodes)


@pytest.fixture(scope="module")
def erf6():
    return erf_grid(6.0, 0.01)


def test_evaluate_examples(erf6):
    assert evaluate(erf6, 0.0) == 0.0
    assert evaluate(erf6, 100.0) == 1.0
    assert evaluate(erf6, 1.0) == pytest.approx(erf_by_quadrature(1.0), abs=1e-12)
    assert erf_by_quadrature(1.0) == pytest.approx(0.842700792949715, abs=1e-14)


def test_evaluate_rejects_bad_points(erf6):
    for bad in (-0.1, math.nan, math.inf):
        with pytest.raises(DomainError):
            evaluate(erf6, bad)


def test_evaluate_between_nodes_is_accurate(erf_h):
    xs = np.linspace(0, 5, 997)
    assert np.max(np.abs(evaluate(erf_h, xs) - np.array([math.erf(x) for x in xs]))) < 1e-8


def test_default_x_max():
    assert default_x_max(0.0) == pytest.approx(5.68, abs=0.01)
    assert math.exp(-default_x_max(0.2) ** 2 / 1.2) < 1e-14
    nodes = uniform_nodes(default_x_max(0.1))
    assert nodes[1] == 1 / 256 and nodes[-1] == default_x_max(0.1)


def test_constructor_validation():
    with pytest.raises(ValueError):
        GridFunction([0.0, 0.0, 1.0], [0, 1, 2])
    with pytest.raises(ValueError):
        GridFunction([0.1, 1.0], [0, 1])
    with pytest.raises(ValueError):
        GridFunction([0.0, 1.0], [0, math.nan])


def test_sup_distance_identity_and_ramp(erf_h):
    assert sup_distance(erf_h, erf_h) == 0.0
    x = np.linspace(0, 2, 9)
    zero = GridFunction(x, np.zeros_like(x), 0.0)
    ramp = GridFunction(x, np.minimum(x, 1.0), 1.0)
    assert sup_distance(zero, ramp) == 1.0


def test_sup_distance_across_grids():
    a = erf_grid(6.0, 0.01)
    b = erf_grid(5.0, 1 / 64)
    assert sup_distance(a, b) < 1e-6


def test_k_membership_examples(erf6):
    assert check_K_membership(erf6, 1e-9).in_K
    assert check_K_membership(erf6, 0.0).in_K

    zero = constant_grid(0.0)
    rep = check_K_membership(zero, 1e-9)
    assert not rep.in_K
    assert rep.max_violation == 1.0
    assert rep.violated_conditions == ["limit_value"]

    x = np.linspace(0, 3, 301)
    over = GridFunction(x, np.minimum(1.05, x), 1.0)
    rep = check_K_membership(over, 1e-9)
    assert not rep.in_K
    assert rep.max_violation == pytest.approx(0.05, abs=1e-12)
    assert rep.violated_conditions == ["bound_above"]


def test_csv_round_trip(erf6, tmp_path):
    text = erf6.to_csv()
    assert text.startswith("# x_max=6, tail=1\nx,value\n")
    back = GridFunction.from_csv(io.StringIO(text))
    assert np.array_equal(back.x, erf6.x) and np.array_equal(back.values, erf6.values)
    path = tmp_path / "h.csv"
    erf6.to_csv(path)
    assert GridFunction.from_csv(path).tail_value == 1.0


def test_random_members_are_in_K(rng):
    for _ in range(50):
        h = random_K_function(rng)
        assert check_K_membership(h, 0.0).in_K
        assert np.all(np.diff(h.values) >= 0)


@st.composite
def grid_functions(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_K_function(np.random.default_rng(seed), 4.0, 1 / 32)


@settings(max_examples=40, deadline=None)
@given(grid_functions(), grid_functions(), grid_functions())
def test_sup_distance_is_pseudometric(f, g, h):
    assert sup_distance(f, g) >= 0
    assert sup_distance(f, g) == sup_distance(g, f)
    assert sup_distance(f, h) <= sup_distance(f, g) + sup_distance(g, h) + 1e-15


@settings(max_examples=40, deadline=None)
@given(grid_functions())
def test_interpolation_never_overshoots(h):
    xs = np.linspace(0, h.x_max, 20001)
    v = evaluate(h, xs)
    assert np.all(np.diff(v) >= -1e-15)
    assert v.min() >= 0.0 and v.max() <= 1.0
