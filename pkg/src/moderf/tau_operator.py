"""The linearised solution operator and its normalising constant.

For a frozen coefficient ``psi_h = 1 + delta * h`` the linear problem

    [psi_h(x) y'(x)]' + 2 x y'(x) = 0,   y(0) = 0,   y(+inf) = 1

is solved by

    tau(h)(x) = C_h * int_0^x exp(-2 I_h(eta)) / psi_h(eta) d eta,
    I_h(eta)  = int_0^eta xi / psi_h(xi) d xi,

with ``1 / C_h`` the same integral taken to infinity. A fixed point of
``tau`` solves the nonlinear problem with diffusivity ``1 + delta * y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import erfcx

from .errors import DeltaOutOfRange, KViolation, NonConvergence
from .function_space import GridFunction, check_K_membership, default_x_max, evaluate
from .quadrature import XK, gauss_kronrod_panels, integrate_finite, integrate_semi_infinite

# Membership tolerance applied to inputs of apply_tau.
K_TOL = 1e-8
_MAX_REFINE = 8

# Gauss-Legendre rule for partial-panel integrals of the inner integrand.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class OperatorParams:
    """Parameters of ``tau``.

    Attributes:
        delta: Conductivity variation, ``>= 0`` (0 only as the erf collapse).
        quad_tol: Quadrature tolerance for every integral behind ``tau``.
        x_max: Grid truncation point; derived from ``delta`` when omitted.
    """

    delta: float
    quad_tol: float = 1e-12
    x_max: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise DeltaOutOfRange(f"delta must be >= 0, got {self.delta}")
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be positive")
        if self.x_max is None:
            object.__setattr__(self, "x_max", default_x_max(self.delta))
        elif not self.x_max > 0:
            raise ValueError("x_max must be positive")


def psi(h: GridFunction, delta: float, x):
    """Coefficient ``1 + delta * h(x)``."""
    return 1.0 + delta * evaluate(h, x)


class _Integrands:
    """Inner and outer integrands of ``tau`` for one ``(h, delta)`` pair.

    The inner integral is accumulated panel by panel along the grid; the
    outer integrand at any abscissa then needs only a partial-panel rule.
    """

    def __init__(self, h: GridFunction, delta: float, quad_tol: float):
        self.h = h
        self.delta = delta
        self.psi_tail = 1.0 + delta * h.tail_value
        self._build(quad_tol)

    def _psi(self, x):
        return 1.0 + self.delta * evaluate(self.h, x)

    def _build(self, quad_tol: float):
        x = self.h.x
        for level in range(_MAX_REFINE + 1):
            k = 2 ** level
            if k == 1:
                s = x
            else:
                frac = np.arange(k) / k
                s = np.append((x[:-1, None] + np.diff(x)[:, None] * frac[None, :]).ravel(), x[-1])
            a, b = s[:-1], s[1:]
            hw = (b - a) / 2.0
            eta = (a + b)[:, None] / 2.0 + hw[:, None] * XK[None, :]
            psi_eta = self._psi(eta)
            ival, ierr, _ = gauss_kronrod_panels(eta / psi_eta, hw)
            icum = np.concatenate([[0.0], np.cumsum(ival)])

            # inner integral from the panel start to each Kronrod abscissa
            sub_hw = (eta - a[:, None]) / 2.0
            t = a[:, None, None] + sub_hw[:, :, None] * (1.0 + _GL_X[None, None, :])
            sub = sub_hw * ((t / self._psi(t)) @ _GL_W)
            inner = icum[:-1, None] + sub
            outer = np.exp(-2.0 * inner) / psi_eta
            oval, oerr, _ = gauss_kronrod_panels(outer, hw)
            # partial-panel rule checked against the Kronrod value on the whole panel
            full = hw * ((((a + b)[:, None] / 2.0 + hw[:, None] * _GL_X[None, :])
                          / self._psi((a + b)[:, None] / 2.0 + hw[:, None] * _GL_X[None, :])) @ _GL_W)
            oerr = oerr + 2.0 * (ierr + np.abs(full - ival)) * np.abs(oval)
            ocum = np.concatenate([[0.0], np.cumsum(oval)])

            total = ocum[-1] + self._outer_tail(s[-1], icum[-1], math.inf)
            rel_err = 2.0 * oerr.sum() / total
            if rel_err <= quad_tol or level == _MAX_REFINE:
                break
        if rel_err > quad_tol:
            raise NonConvergence(
                f"nested quadrature reached relative error {rel_err:.3g} > {quad_tol:.3g}")
        # keep only the entries on the original nodes
        step = 2 ** level
        self.inner_cum = icum[::step]
        self.outer_cum = ocum[::step]
        self.total = total
        self.error_estimate = float(oerr.sum())

    def _outer_tail(self, x_m: float, inner_m: float, x):
        """Outer integral over ``[x_m, x]`` where ``psi`` is the constant tail."""
        p = self.psi_tail
        sp = math.sqrt(p)
        zm = x_m / sp
        z = np.asarray(x, dtype=float) / sp
        with np.errstate(over="ignore", invalid="ignore"):
            far = np.where(np.isinf(z), 0.0, erfcx(z) * np.exp(np.minimum(zm * zm - z * z, 0.0)))
        return math.exp(-2.0 * inner_m) * math.sqrt(math.pi) / (2.0 * sp) * (erfcx(zm) - far)

    def inner(self, eta):
        """Inner integral at arbitrary abscissae."""
        eta = np.asarray(eta, dtype=float)
        x = self.h.x
        i = np.clip(np.searchsorted(x, eta, side="right") - 1, 0, x.size - 2)
        a = x[i]
        e = np.minimum(eta, x[-1])
        hw = (e - a) / 2.0
        t = a[..., None] + hw[..., None] * (1.0 + _GL_X)
        val = self.inner_cum[i] + hw * ((t / self._psi(t)) @ _GL_W)
        beyond = eta > x[-1]
        if np.any(beyond):
            xm = x[-1]
            val = np.where(beyond, self.inner_cum[-1] + (eta ** 2 - xm * xm) / (2.0 * self.psi_tail), val)
        return val

    def outer(self, eta):
        """Integrand ``exp(-2 I_h(eta)) / psi_h(eta)``."""
        eta = np.asarray(eta, dtype=float)
        return np.exp(-2.0 * self.inner(eta)) / self._psi(eta)

    def outer_integral(self, x):
        """``int_0^x outer`` at arbitrary ``x >= 0`` (inf allowed)."""
        x = np.asarray(x, dtype=float)
        nodes = self.h.x
        xm = nodes[-1]
        i = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, nodes.size - 2)
        a = nodes[i]
        e = np.minimum(x, xm)
        hw = (e - a) / 2.0
        t = a[..., None] + hw[..., None] * (1.0 + _GL_X)
        val = self.outer_cum[i] + hw * (self.outer(t) @ _GL_W)
        beyond = x > xm
        if np.any(beyond):
            tail = self._outer_tail(xm, self.inner_cum[-1], np.where(beyond, x, xm))
            val = np.where(beyond, self.outer_cum[-1] + tail, val)
        return val


def integrands(h: GridFunction, delta: float, quad_tol: float) -> _Integrands:
    """Cached integrand tables of ``h`` for ``(delta, quad_tol)``."""
    key = (float(delta), float(quad_tol))
    tab = h._cache.get(key)
    if tab is None:
        tab = _Integrands(h, delta, quad_tol)
        h._cache[key] = tab
    return tab


def inner_integral(h: GridFunction, delta: float, eta: float, quad_tol: float = 1e-12) -> float:
    """``int_0^eta xi / psi_h(xi) d xi`` by adaptive quadrature over the grid panels."""
    if not eta >= 0:
        raise ValueError("eta must be non-negative")
    xm = h.x_max
    upper = min(eta, xm)
    res = integrate_finite(lambda t: t / psi(h, delta, t), 0.0, upper, quad_tol, breakpoints=h.x)
    value = res.value
    if eta > xm:
        value += (eta * eta - xm * xm) / (2.0 * (1.0 + delta * h.tail_value))
    return value


def compute_C(h: GridFunction, params: OperatorParams) -> float:
    """Normalising constant ``C_h``, the reciprocal of the full outer integral.

    The outer integral over ``[0, inf)`` is computed adaptively with the
    Gaussian envelope implied by the range of ``psi_h``.
    """
    delta = params.delta
    tab = integrands(h, delta, params.quad_tol)
    lo = min(float(h.values.min()), h.tail_value)
    hi = max(float(h.values.max()), h.tail_value)
    psi_min = 1.0 + delta * lo
    psi_max = 1.0 + delta * hi
    res = integrate_semi_infinite(tab.outer, abs_tol=params.quad_tol / 4.0,
                                  decay_scale=psi_max, bound=min(1.0 / psi_min, 2.0),
                                  breakpoints=h.x)
    return 1.0 / res.value


def apply_tau(h: GridFunction, params: OperatorParams, check: bool = True) -> GridFunction:
    """``tau(h)`` on the nodes of ``h``; tail value exactly 1.

    Raises:
        KViolation: If ``check`` and ``h`` is not in K within ``K_TOL``.
    """
    if check:
        report = check_K_membership(h, K_TOL)
        if not report.in_K:
            raise KViolation(
                f"input is not in K: {', '.join(report.violated_conditions)} "
                f"(max violation {report.max_violation:.3g})", report)
    tab = integrands(h, params.delta, params.quad_tol)
    values = tab.outer_cum / tab.total
    return GridFunction(h.x, values, 1.0)


def tau_values(h: GridFunction, params: OperatorParams, x) -> np.ndarray:
    """``tau(h)`` at arbitrary abscissae, without interpolation."""
    tab = integrands(h, params.delta, params.quad_tol)
    return tab.outer_integral(np.asarray(x, dtype=float)) / tab.total
