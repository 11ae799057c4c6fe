"""Banach fixed-point iteration ``h_{n+1} = tau(h_n)`` with certified stopping."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from .contraction import g_of
from .errors import DeltaOutOfRange, KViolation, NonConvergence
from .function_space import GridFunction, check_K_membership, erf_grid, sup_distance
from .tau_operator import K_TOL, OperatorParams, apply_tau, tau_values

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 200


@dataclass
class IterationReport:
    """Trace of one Picard run.

    Attributes:
        iterations: Number of applications of ``tau``.
        residuals: ``||h_{n+1} - h_n||`` for every step.
        empirical_ratios: Ratios of consecutive residuals.
        a_posteriori_bound: ``gamma / (1 - gamma) * residuals[-1]`` with
            ``gamma = g(delta)``; bounds the distance of ``solution`` to the
            exact fixed point.
        converged: Whether the bound reached ``stop_tol``.
        solution: Last iterate.
        delta: Parameter of the run.
        gamma: Contraction modulus used for the bound.
        stop_tol: Requested tolerance.
        quad_tol: Quadrature tolerance actually used.
    """

    iterations: int
    residuals: List[float]
    empirical_ratios: List[float]
    a_posteriori_bound: float
    converged: bool
    solution: GridFunction
    delta: float
    gamma: float
    stop_tol: float
    quad_tol: float
    history: List[GridFunction] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "residuals": list(self.residuals),
            "empirical_ratios": list(self.empirical_ratios),
            "a_posteriori_bound": self.a_posteriori_bound,
            "converged": self.converged,
            "delta": self.delta,
            "gamma": self.gamma,
            "stop_tol": self.stop_tol,
            "quad_tol": self.quad_tol,
            "solution": self.solution.to_dict(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def check_delta(delta: float) -> float:
    """Return ``g(delta)`` or raise if the iteration is not a contraction there."""
    if not (math.isfinite(delta) and delta >= 0):
        raise DeltaOutOfRange(f"delta must be >= 0, got {delta}")
    gamma = g_of(delta)
    if gamma >= 1.0:
        raise DeltaOutOfRange(
            f"delta = {delta} is not below delta_1 (g(delta) = {gamma:.6f} >= 1); "
            "no contraction guarantee")
    return gamma


def solve(params: OperatorParams, initial: Optional[GridFunction] = None, stop_tol: float = 1e-10,
          max_iter: int = DEFAULT_MAX_ITER, keep_history: bool = False) -> IterationReport:
    """Iterate ``tau`` until the a-posteriori Banach bound drops below ``stop_tol``.

    ``quad_tol`` is capped at ``stop_tol / 100``. The default starting point
    is erf on the grid ``[0, params.x_max]``.

    Raises:
        DeltaOutOfRange: If ``g(delta) >= 1``.
        KViolation: If an iterate leaves K.
        NonConvergence: If ``max_iter`` steps do not suffice; the partial
            report is attached as ``.report``.
    """
    gamma = check_delta(params.delta)
    if not stop_tol > 0:
        raise ValueError("stop_tol must be positive")
    if params.quad_tol > stop_tol / 100.0:
        params = replace(params, quad_tol=stop_tol / 100.0)
    h = erf_grid(params.x_max) if initial is None else initial
    factor = gamma / (1.0 - gamma)

    residuals: List[float] = []
    ratios: List[float] = []
    history = [h] if keep_history else []
    bound = math.inf
    converged = False
    for n in range(1, max_iter + 1):
        h_next = apply_tau(h, params)
        membership = check_K_membership(h_next, K_TOL)
        if not membership.in_K:
            raise KViolation(f"iterate {n} left K", membership)
        r = sup_distance(h_next, h)
        if residuals and residuals[-1] > 0:
            ratios.append(r / residuals[-1])
        residuals.append(r)
        bound = factor * r
        h = h_next
        if keep_history:
            history.append(h)
        log.debug("iteration %d: residual %.3e, bound %.3e", n, r, bound)
        if bound <= stop_tol:
            converged = True
            break

    report = IterationReport(len(residuals), residuals, ratios, bound, converged, h,
                             params.delta, gamma, stop_tol, params.quad_tol, history)
    if not converged:
        raise NonConvergence(
            f"no convergence in {max_iter} iterations (bound {bound:.3g} > {stop_tol:.3g})", report)
    log.info("delta=%g converged in %d iterations, bound %.3e", params.delta, report.iterations, bound)
    return report


def continue_iteration(report: IterationReport, steps: int) -> List[GridFunction]:
    """Apply ``tau`` ``steps`` more times to the solution of ``report``."""
    params = OperatorParams(report.delta, report.quad_tol, report.solution.x_max)
    out = []
    h = report.solution
    for _ in range(steps):
        h = apply_tau(h, params)
        out.append(h)
    return out


def residual_of(candidate: GridFunction, params: OperatorParams) -> float:
    """Fixed-point defect ``||tau(candidate) - candidate||``."""
    return sup_distance(apply_tau(candidate, params), candidate)


def evaluate_solution(report: IterationReport, x) -> np.ndarray:
    """Modified error function at arbitrary ``x >= 0``.

    Returns ``tau(solution)(x)`` computed by quadrature rather than by
    interpolating the nodes; it is at least as close to the fixed point as
    ``report.a_posteriori_bound`` says.
    """
    params = OperatorParams(report.delta, report.quad_tol, report.solution.x_max)
    return tau_values(report.solution, params, x)
