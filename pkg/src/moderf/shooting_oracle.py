"""Shooting on the initial slope for the nonlinear problem.

The equation ``[(1 + delta y) y']' + 2 x y' = 0`` is integrated as the
first-order system

    y' = v,    v' = -(delta v**2 + 2 x v) / (1 + delta y)

from ``y(0) = 0, v(0) = slope0``, and ``slope0`` is bisected until
``y(x_far) = 1``. This path shares no code with the fixed-point solver
beyond the grid container.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BlowUp, BracketFailure, DomainError, NonConvergence, StiffnessFailure
from .function_space import DEFAULT_SPACING, GridFunction, default_x_max, sup_distance, uniform_nodes

log = logging.getLogger(__name__)

Y_BAND = (-0.5, 2.0)
SLOPE_BRACKET = (0.1, 5.0)

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order minus embedded fourth-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40


@dataclass
class ShootingResult:
    slope0: float
    far_field_residual: float
    trace: GridFunction
    bisection_steps: int
    delta: float
    x_far: float

    def to_dict(self) -> dict:
        return {
            "slope0": self.slope0,
            "far_field_residual": self.far_field_residual,
            "bisection_steps": self.bisection_steps,
            "delta": self.delta,
            "x_far": self.x_far,
            "trace": self.trace.to_dict(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def integrate_ivp(delta: float, slope0: float, x_far: Optional[float] = None, step_tol: float = 1e-11,
                  nodes: Optional[np.ndarray] = None, spacing: float = DEFAULT_SPACING) -> GridFunction:
    """Integrate from ``y(0) = 0, y'(0) = slope0`` and sample ``y`` on the nodes.

    Adaptive Dormand-Prince 5(4) with absolute local error ``<= step_tol``;
    steps never cross an output node. The returned trace's tail value is
    ``y(x_far)``.

    Raises:
        BlowUp: If ``y`` leaves ``[-0.5, 2]`` or ``1 + delta y < 0.5``.
        StiffnessFailure: If the step size underflows.
    """
    if not delta > -1:
        raise DomainError("delta must exceed -1")
    if not slope0 > 0:
        raise DomainError("slope0 must be positive")
    if nodes is None:
        if x_far is None:
            x_far = default_x_max(max(delta, 0.0), spacing)
        nodes = uniform_nodes(x_far, spacing)
    nodes = np.asarray(nodes, dtype=float)
    ylo, yhi = Y_BAND

    def rhs(x, y, v):
        d = 1.0 + delta * y
        if d < 0.5:
            raise BlowUp(f"1 + delta*y = {d:.3g} < 0.5 at x = {x:.6g}", x, y)
        return -(delta * v * v + 2.0 * x * v) / d

    out = np.empty(nodes.size)
    out[0] = 0.0
    x, y, v = 0.0, 0.0, float(slope0)
    k1y, k1v = v, rhs(x, y, v)
    h = min(0.01, nodes[1] - nodes[0])
    for j in range(1, nodes.size):
        target = nodes[j]
        while x < target:
            h = min(h, target - x)
            if h < 1e-14 * max(1.0, abs(x)):
                raise StiffnessFailure(f"step size underflow at x = {x:.6g}")
            y2, v2 = y + h * _A21 * k1y, v + h * _A21 * k1v
            k2y, k2v = v2, rhs(x + _C2 * h, y2, v2)
            y3 = y + h * (_A31 * k1y + _A32 * k2y)
            v3 = v + h * (_A31 * k1v + _A32 * k2v)
            k3y, k3v = v3, rhs(x + _C3 * h, y3, v3)
            y4 = y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
            v4 = v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v)
            k4y, k4v = v4, rhs(x + _C4 * h, y4, v4)
            y5 = y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
            v5 = v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v)
            k5y, k5v = v5, rhs(x + _C5 * h, y5, v5)
            y6 = y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
            v6 = v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v)
            k6y, k6v = v6, rhs(x + h, y6, v6)
            yn = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
            vn = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
            k7y, k7v = vn, rhs(x + h, yn, vn)
            ey = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
            ev = h * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v)
            err = max(abs(ey), abs(ev))
            if err <= step_tol:
                x, y, v = x + h, yn, vn
                k1y, k1v = k7y, k7v
                if not ylo <= y <= yhi:
                    raise BlowUp(f"y = {y:.6g} left [{ylo}, {yhi}] at x = {x:.6g}", x, y)
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (step_tol / err) ** 0.2))
            h *= fac
        x = target
        out[j] = y
    return GridFunction(nodes, out, float(out[-1]))


def _far_field(delta, slope, nodes, step_tol):
    """``(y(x_far) - 1, trace)``; overshooting blow-ups count as +inf."""
    try:
        trace = integrate_ivp(delta, slope, nodes=nodes, step_tol=step_tol)
    except BlowUp as exc:
        if exc.y > 1.0:
            return math.inf, None
        raise
    return trace.tail_value - 1.0, trace


def solve_shooting(delta: float, tol: float = 1e-10, x_far: Optional[float] = None,
                   step_tol: Optional[float] = None, nodes: Optional[np.ndarray] = None,
                   max_steps: int = 200) -> ShootingResult:
    """Bisect the initial slope until ``|y(x_far) - 1| <= tol``.

    The far-field value must increase with the slope; every bisection step
    re-checks this and fails loudly otherwise.

    Raises:
        DomainError: For ``delta < 0``.
        BracketFailure: If ``[0.1, 5]`` does not straddle the target, or
            monotonicity in the slope is violated.
        NonConvergence: If the bracket collapses before ``tol`` is met.
    """
    if not (math.isfinite(delta) and delta >= 0):
        raise DomainError(f"shooting is restricted to delta >= 0, got {delta}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if step_tol is None:
        step_tol = tol / 10.0
    if nodes is None:
        nodes = uniform_nodes(x_far if x_far is not None else default_x_max(delta))
    nodes = np.asarray(nodes, dtype=float)

    lo, hi = SLOPE_BRACKET
    f_lo, _ = _far_field(delta, lo, nodes, step_tol)
    f_hi, _ = _far_field(delta, hi, nodes, step_tol)
    if not (f_lo < 0 < f_hi):
        raise BracketFailure(
            f"far-field residual does not change sign on slopes [{lo}, {hi}]: {f_lo:.3g}, {f_hi:.3g}")
    for step in range(1, max_steps + 1):
        mid = 0.5 * (lo + hi)
        f_mid, trace = _far_field(delta, mid, nodes, step_tol)
        if not f_lo <= f_mid <= f_hi:
            raise BracketFailure(
                f"far-field value is not monotone in the slope near {mid:.12g}")
        if trace is not None and abs(f_mid) <= tol:
            log.info("shooting delta=%g: slope %.15g after %d steps", delta, mid, step)
            return ShootingResult(mid, abs(f_mid), trace, step, delta, float(nodes[-1]))
        if f_mid < 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    raise NonConvergence(f"slope bisection stalled at [{lo:.17g}, {hi:.17g}] before tol {tol:g}")


def compare_solutions(delta: float, picard: GridFunction, tol: float = 1e-10,
                      step_tol: Optional[float] = None) -> float:
    """Sup distance between a fixed-point solution and the shooting trace on its nodes."""
    shot = solve_shooting(delta, tol, step_tol=step_tol, nodes=picard.x)
    return sup_distance(picard, shot.trace)
