"""Contraction modulus, its threshold and executable forms of the bounds.

``g(x) = (x/2) (1+x)^(3/2) (3+x) [1 + (1+x)^(3/2)]`` bounds the Lipschitz
constant of ``tau`` on K; ``tau`` contracts while ``g(delta) < 1``, i.e.
below the unique positive root ``delta_1`` of ``g = 1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from .errors import DegenerateInput, DomainError
from .function_space import GridFunction, sup_distance
from .quadrature import gaussian_tail_bound, integrate_finite, semi_infinite_cutoff
from .tau_operator import OperatorParams, apply_tau, compute_C, integrands

SQRT_PI = math.sqrt(math.pi)


def g_of(x: float) -> float:
    """Contraction modulus as a function of delta.

    Raises:
        DomainError: For negative or non-finite ``x``.
    """
    if not (math.isfinite(x) and x >= 0):
        raise DomainError(f"g is defined for finite x >= 0, got {x}")
    s = (1.0 + x) ** 1.5
    return 0.5 * x * s * (3.0 + x) * (1.0 + s)


def find_delta1(tol: float = 1e-12) -> Tuple[float, float]:
    """Bracket ``(lo, hi)`` around the root of ``g = 1`` with ``hi - lo <= tol``.

    Plain bisection from ``[0, 1]``; ``g(0) = 0`` and ``g(1) > 1``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g_of(mid)
        if gm == 1.0:
            # root hit to double resolution; keep the strict bracket
            break
        if gm < 1.0:
            lo = mid
        else:
            hi = mid
    return lo, hi


@lru_cache(maxsize=None)
def delta1(tol: float = 1e-15) -> Tuple[float, float]:
    return find_delta1(tol)


@dataclass(frozen=True)
class ContractionCertificate:
    delta: float
    g_value: float
    delta1_bracket: Tuple[float, float]
    is_contractive: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta1_bracket"] = list(self.delta1_bracket)
        return d


def certify(delta: float, tol: float = 1e-12) -> ContractionCertificate:
    """Modulus at ``delta`` together with a bracket for ``delta_1``."""
    g = g_of(delta)
    return ContractionCertificate(delta, g, find_delta1(tol), g < 1.0)


@dataclass(frozen=True)
class BoundCheck:
    """One inequality ``lhs <= rhs`` evaluated numerically.

    ``holds`` allows ``lhs`` to exceed ``rhs`` by ``tolerance``.
    """

    name: str
    lhs: float
    rhs: float
    holds: bool
    slack: float
    tolerance: float

    @classmethod
    def build(cls, name: str, lhs: float, rhs: float, tolerance: float) -> "BoundCheck":
        return cls(name, float(lhs), float(rhs), bool(lhs <= rhs + tolerance), float(rhs - lhs), tolerance)

    def to_dict(self) -> dict:
        return asdict(self)


def lemma_a_constant(delta: float) -> float:
    return SQRT_PI / 4.0 * delta * math.sqrt(1.0 + delta) * (3.0 + delta)


def lemma_b_constant(delta: float) -> float:
    return delta * math.sqrt(1.0 + delta) * (1.0 + delta) ** 2 * (3.0 + delta) / SQRT_PI


def check_lemma_a(h1: GridFunction, h2: GridFunction, delta: float, x: float,
                  quad_tol: float = 1e-12) -> BoundCheck:
    """Integrated difference of the outer integrands against its Lipschitz bound.

    ``lhs = int_0^x |F_h1 - F_h2|`` where ``F_h = exp(-2 I_h) / psi_h``;
    ``rhs = (sqrt(pi)/4) delta sqrt(1+delta) (3+delta) ||h1 - h2||``.
    The integral is cut where the Gaussian envelope falls below ``quad_tol``
    and the envelope tail is added to ``lhs``.
    """
    if not x >= 0:
        raise DomainError("x must be non-negative")
    t1 = integrands(h1, delta, quad_tol)
    t2 = integrands(h2, delta, quad_tol)
    scale = 1.0 + delta
    cut = max(h1.x_max, h2.x_max, semi_infinite_cutoff(quad_tol, scale))
    upper = min(x, cut)
    edges = np.union1d(h1.x, h2.x)
    res = integrate_finite(lambda t: np.abs(t1.outer(t) - t2.outer(t)), 0.0, upper,
                           quad_tol, breakpoints=edges)
    lhs = res.value
    if x > cut:
        if h1.tail_value == h2.tail_value:
            # past both grids the integrands are scaled copies of one Gaussian tail
            p = 1.0 + delta * h1.tail_value
            amp = abs(float(t1.outer(cut)) - float(t2.outer(cut))) * math.exp(cut * cut / p)
            lhs += amp * (gaussian_tail_bound(cut, 1.0, p) - gaussian_tail_bound(x, 1.0, p))
        else:
            # both integrands lie under exp(-t^2 / (1 + delta))
            lhs += gaussian_tail_bound(cut, 1.0, scale)
    rhs = lemma_a_constant(delta) * sup_distance(h1, h2)
    return BoundCheck.build("lemma_a", lhs, rhs, 10.0 * quad_tol)


def check_lemma_b(h1: GridFunction, h2: GridFunction, delta: float,
                  quad_tol: float = 1e-12) -> BoundCheck:
    """``|C_h1 - C_h2|`` against its Lipschitz bound in ``||h1 - h2||``."""
    params = OperatorParams(delta, quad_tol)
    lhs = abs(compute_C(h1, params) - compute_C(h2, params)) if h1 is not h2 else 0.0
    rhs = lemma_b_constant(delta) * sup_distance(h1, h2)
    return BoundCheck.build("lemma_b", lhs, rhs, 10.0 * quad_tol)


def check_lemma_c(h: GridFunction, delta: float, x: float, quad_tol: float = 1e-12) -> BoundCheck:
    """Partial outer integral ``int_0^x F_h`` against ``sqrt(pi (1+delta)) / 2``."""
    if not x >= 0:
        raise DomainError("x must be non-negative")
    lhs = float(integrands(h, delta, quad_tol).outer_integral(x))
    rhs = math.sqrt(math.pi * (1.0 + delta)) / 2.0
    return BoundCheck.build("lemma_c", lhs, rhs, 10.0 * quad_tol)


def check_C_lower_bound(h: GridFunction, delta: float, quad_tol: float = 1e-12) -> BoundCheck:
    """``1 / C_h >= sqrt(pi) / (2 (1+delta))``, i.e. ``C_h`` is finite."""
    lhs = SQRT_PI / (2.0 * (1.0 + delta))
    rhs = 1.0 / compute_C(h, OperatorParams(delta, quad_tol))
    return BoundCheck.build("C_lower_bound", lhs, rhs, 10.0 * quad_tol)


def empirical_contraction_ratio(h1: GridFunction, h2: GridFunction, params: OperatorParams) -> float:
    """``||tau(h1) - tau(h2)|| / ||h1 - h2||`` on the sampled sup norm.

    Raises:
        DegenerateInput: If the inputs are closer than ``10 * quad_tol``.
    """
    d = sup_distance(h1, h2)
    if d < 10.0 * params.quad_tol:
        raise DegenerateInput(f"inputs are {d:.3g} apart; ratio is meaningless")
    return sup_distance(apply_tau(h1, params), apply_tau(h2, params)) / d
