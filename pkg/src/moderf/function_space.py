"""Sampled functions on a truncated half line.

A :class:`GridFunction` stores node values on ``[0, x_max]``, interpolates
them with a shape-preserving (monotone) cubic and returns a constant tail
value beyond ``x_max``. This is how candidates ``h`` of the fixed-point
iteration, its iterates and the final solution are represented.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import erf

from .errors import DomainError

DEFAULT_SPACING = 1.0 / 256.0
# Truncation level for exp(-x**2 / (1 + delta)) that fixes the default x_max.
TRUNCATION_LEVEL = 1e-14


def default_x_max(delta: float = 0.0, spacing: float = DEFAULT_SPACING) -> float:
    """Smallest grid multiple of ``spacing`` with ``exp(-x**2/(1+delta)) < 1e-14``."""
    x = math.sqrt((1.0 + max(delta, 0.0)) * math.log(1.0 / TRUNCATION_LEVEL))
    return math.ceil(x / spacing) * spacing


def uniform_nodes(x_max: float, spacing: float = DEFAULT_SPACING) -> np.ndarray:
    """Nodes ``0, spacing, 2*spacing, ...`` ending exactly at ``x_max``."""
    if not (x_max > 0 and spacing > 0):
        raise DomainError("x_max and spacing must be positive")
    n = int(math.ceil(x_max / spacing - 1e-9))
    x = np.arange(n + 1) * spacing
    x[-1] = x_max
    return x


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Node values on ``[0, x_max]`` plus the value assumed beyond ``x_max``.

    Attributes:
        x: Strictly increasing nodes, ``x[0] == 0``.
        values: Finite node values.
        tail_value: Value returned for ``x > x_max`` (stands for ``h(+inf)``).
    """

    x: np.ndarray
    values: np.ndarray
    tail_value: float = 1.0
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        v = np.array(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise ValueError("x and values must be 1-d arrays of equal length >= 2")
        if x[0] != 0.0:
            raise ValueError("first node must be at x = 0")
        if not np.all(np.diff(x) > 0):
            raise ValueError("nodes must be strictly increasing")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v)) and math.isfinite(self.tail_value)):
            raise ValueError("nodes, values and tail_value must be finite")
        x.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "tail_value", float(self.tail_value))
        object.__setattr__(self, "_pchip", PchipInterpolator(x, v, extrapolate=False))

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    @property
    def tail_gap(self) -> float:
        """Mismatch between the last node value and the tail value."""
        return abs(float(self.values[-1]) - self.tail_value)

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    def __call__(self, x):
        return evaluate(self, x)

    @classmethod
    def from_callable(cls, f: Callable, x_max: float, spacing: float = DEFAULT_SPACING,
                      tail_value: float = 1.0) -> "GridFunction":
        x = uniform_nodes(x_max, spacing)
        return cls(x, np.asarray(f(x), dtype=float), tail_value)

    def with_values(self, values, tail_value: Optional[float] = None) -> "GridFunction":
        """Same nodes, new values."""
        tail = self.tail_value if tail_value is None else tail_value
        return GridFunction(self.x, values, tail)

    def to_dict(self) -> dict:
        return {
            "x_max": self.x_max,
            "tail_value": self.tail_value,
            "nodes": [[float(a), float(b)] for a, b in zip(self.x, self.values)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridFunction":
        nodes = np.asarray(data["nodes"], dtype=float)
        return cls(nodes[:, 0], nodes[:, 1], data["tail_value"])

    def to_csv(self, target: Union[str, os.PathLike, io.TextIOBase, None] = None) -> str:
        """Write ``x,value`` rows after a ``# x_max=..., tail=...`` comment line.

        Returns the CSV text; also writes it to ``target`` when given.
        """
        lines = [f"# x_max={self.x_max:.17g}, tail={self.tail_value:.17g}", "x,value"]
        lines += [f"{a:.17g},{b:.17g}" for a, b in zip(self.x, self.values)]
        text = "\n".join(lines) + "\n"
        if target is None:
            return text
        if hasattr(target, "write"):
            target.write(text)
        else:
            with open(target, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source: Union[str, os.PathLike, io.TextIOBase]) -> "GridFunction":
        if hasattr(source, "read"):
            text = source.read()
        else:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        tail = None
        xs, vs = [], []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for part in line[1:].split(","):
                    key, _, val = part.partition("=")
                    if key.strip() == "tail":
                        tail = float(val)
                continue
            if line.lower().startswith("x,"):
                continue
            a, b = line.split(",")
            xs.append(float(a))
            vs.append(float(b))
        if tail is None:
            raise ValueError("missing '# x_max=..., tail=...' comment line")
        return cls(np.array(xs), np.array(vs), tail)


def evaluate(h: GridFunction, x):
    """Value of ``h`` at ``x >= 0`` (scalar or array).

    Monotone cubic interpolation of the nodes up to ``x_max``, ``tail_value``
    beyond.

    Raises:
        DomainError: For negative or non-finite ``x``.
    """
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)) or np.any(xa < 0):
        raise DomainError("evaluation points must be finite and non-negative")
    out = np.full(xa.shape, h.tail_value)
    inside = xa <= h.x_max
    if np.any(inside):
        xi = xa[inside]
        # each monotone cubic segment stays between its end values; clamp off roundoff
        j = np.clip(np.searchsorted(h.x, xi, side="right") - 1, 0, h.x.size - 2)
        a, b = h.values[j], h.values[j + 1]
        out[inside] = np.clip(h._pchip(xi), np.minimum(a, b), np.maximum(a, b))
    if out.ndim == 0:
        return float(out)
    return out


def sample_points(*functions: GridFunction) -> np.ndarray:
    """Union of the node sets, refined by all midpoints."""
    nodes = np.unique(np.concatenate([f.x for f in functions]))
    mids = (nodes[:-1] + nodes[1:]) / 2.0
    return np.sort(np.concatenate([nodes, mids]))


def sup_distance(h1: GridFunction, h2: GridFunction) -> float:
    """Sampled sup-norm distance, including the tail values.

    Approximates ``sup |h1 - h2|`` on the union of both node sets refined by
    midpoints, and takes the tail difference into the maximum.
    """
    if h1 is h2:
        return 0.0
    s = sample_points(h1, h2)
    diff = np.max(np.abs(evaluate(h1, s) - evaluate(h2, s)))
    return float(max(diff, abs(h1.tail_value - h2.tail_value)))


@dataclass(frozen=True)
class KMembershipReport:
    """Outcome of testing the four defining conditions of K.

    Attributes:
        in_K: True when every violation is within the tolerance.
        max_violation: Largest violation, 0 when none.
        violated_conditions: Names among ``bound_below``, ``bound_above``,
            ``origin_value``, ``limit_value`` whose violation exceeds ``tol``.
        violations: Size of each violation (0 for satisfied conditions).
        tol: Tolerance used.
    """

    in_K: bool
    max_violation: float
    violated_conditions: List[str]
    violations: dict
    tol: float

    def to_dict(self) -> dict:
        return {
            "in_K": self.in_K,
            "max_violation": self.max_violation,
            "violated_conditions": list(self.violated_conditions),
            "violations": dict(self.violations),
            "tol": self.tol,
        }


def check_K_membership(h: GridFunction, tol: float = 1e-9) -> KMembershipReport:
    """Test ``0 <= h <= 1``, ``h(0) = 0`` and ``h(+inf) = 1`` within ``tol``.

    The bounds are checked on the nodes and their midpoints; the limit is
    read from ``tail_value``.
    """
    if not tol >= 0:
        raise ValueError("tol must be non-negative")
    s = sample_points(h)
    v = np.append(evaluate(h, s), h.tail_value)
    violations = {
        "bound_below": max(0.0, -float(v.min())),
        "bound_above": max(0.0, float(v.max()) - 1.0),
        "origin_value": abs(float(h.values[0])),
        "limit_value": abs(h.tail_value - 1.0),
    }
    worst = max(violations.values())
    failed = [k for k, val in violations.items() if val > tol]
    return KMembershipReport(worst <= tol, worst, failed, violations, tol)


# -- common members of K ----------------------------------------------------

def erf_grid(x_max: Optional[float] = None, spacing: float = DEFAULT_SPACING) -> GridFunction:
    """The error function sampled on a uniform grid, tail 1."""
    if x_max is None:
        x_max = default_x_max(0.0, spacing)
    return GridFunction.from_callable(erf, x_max, spacing, 1.0)


def ramp_grid(x_max: Optional[float] = None, spacing: float = DEFAULT_SPACING) -> GridFunction:
    """``min(x, 1)`` sampled on a uniform grid, tail 1."""
    if x_max is None:
        x_max = default_x_max(0.0, spacing)
    return GridFunction.from_callable(lambda x: np.minimum(x, 1.0), x_max, spacing, 1.0)


def constant_grid(value: float, x_max: Optional[float] = None,
                  spacing: float = DEFAULT_SPACING) -> GridFunction:
    """Constant function equal to ``value`` everywhere, tail included."""
    if x_max is None:
        x_max = default_x_max(0.0, spacing)
    return GridFunction.from_callable(lambda x: np.full_like(x, value), x_max, spacing, value)


def random_K_function(rng: np.random.Generator, x_max: Optional[float] = None,
                      spacing: float = DEFAULT_SPACING) -> GridFunction:
    """A random monotone member of K.

    Cumulative sums of non-negative random increments over a random set of
    knots, normalised to reach 1 at a random abscissa, then interpolated
    monotonically onto the uniform grid.
    """
    if x_max is None:
        x_max = default_x_max(0.0, spacing)
    n_knots = int(rng.integers(2, 25))
    reach = float(rng.uniform(0.05, x_max))
    knots = np.concatenate([[0.0], np.sort(rng.uniform(0.0, reach, n_knots - 1)), [reach]])
    knots = np.unique(knots)
    inc = rng.exponential(1.0, knots.size - 1) * (rng.uniform(size=knots.size - 1) < 0.85)
    if inc.sum() == 0:
        inc[-1] = 1.0
    vals = np.concatenate([[0.0], np.cumsum(inc)]) / inc.sum()
    shape = PchipInterpolator(knots, vals, extrapolate=False)
    x = uniform_nodes(x_max, spacing)
    y = np.where(x <= reach, np.nan_to_num(shape(np.minimum(x, reach)), nan=1.0), 1.0)
    y = np.clip(y, 0.0, 1.0)
    y[0] = 0.0
    return GridFunction(x, y, 1.0)
