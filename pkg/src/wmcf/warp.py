"""Warping functions r on an interval I, with exact first and second derivatives.

Two closed-form families are provided (``cosh`` on a symmetric interval and a
power law ``(a - z)**(-beta)`` on a half line) together with a tabulated
escape hatch taking user callables.  The sampling checkers below test the
pointwise hypotheses under which the graphical flow exists for all time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class DomainExitError(ValueError):
    """A point lies outside (or on the boundary of) the warping domain."""


class WarpFamily(enum.Enum):
    COSH = "cosh"
    POWER = "power"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class WarpingFunction:
    family: WarpFamily
    z_lo: float
    z_hi: float
    a: float = math.nan
    beta: float = math.nan
    funcs: tuple[Callable, Callable, Callable] | None = field(default=None, compare=False)

    def contains(self, z, margin: float = 0.0):
        z = np.asarray(z, dtype=float)
        return (z > self.z_lo + margin) & (z < self.z_hi - margin)

    def evaluate(self, z):
        """Return ``(r, r', r'')`` at ``z`` (scalar or array)."""
        scalar = np.ndim(z) == 0
        z = np.asarray(z, dtype=float)
        inside = self.contains(z)
        if not np.all(inside):
            bad = z if scalar else z[~inside][0]
            raise DomainExitError(
                f"z={float(bad)!r} outside warping domain ({self.z_lo}, {self.z_hi})"
            )
        r, r1, r2 = self._raw(z)
        if scalar:
            return float(r), float(r1), float(r2)
        return r, r1, r2

    def _raw(self, z):
        if self.family is WarpFamily.COSH:
            c = np.cosh(z)
            return c, np.sinh(z), c
        if self.family is WarpFamily.POWER:
            s = self.a - z
            r = s ** (-self.beta)
            r1 = self.beta * r / s
            return r, r1, (self.beta + 1.0) * r1 / s
        r, r1, r2 = self.funcs
        return (
            np.asarray(r(z), dtype=float),
            np.asarray(r1(z), dtype=float),
            np.asarray(r2(z), dtype=float),
        )

    def to_dict(self) -> dict:
        if self.family is WarpFamily.COSH:
            return {"family": "cosh", "a": self.a}
        if self.family is WarpFamily.POWER:
            return {"family": "power", "a": self.a, "beta": self.beta}
        raise TypeError("tabulated warping functions are not serializable")


def cosh_warp(a: float) -> WarpingFunction:
    """r(z) = cosh z on (-a, a)."""
    a = float(a)
    if not a > 0:
        raise ValueError(f"cosh warping needs a > 0, got {a}")
    return WarpingFunction(WarpFamily.COSH, -a, a, a=a)


def power_warp(a: float, beta: float) -> WarpingFunction:
    """r(z) = (a - z)**(-beta) on (-inf, a)."""
    a, beta = float(a), float(beta)
    if not beta > 0:
        raise ValueError(f"power warping needs beta > 0, got {beta}")
    return WarpingFunction(WarpFamily.POWER, -math.inf, a, a=a, beta=beta)


def tabulated_warp(r, r1, r2, z_lo: float = -math.inf, z_hi: float = math.inf) -> WarpingFunction:
    if not z_lo < z_hi:
        raise ValueError("empty domain")
    return WarpingFunction(WarpFamily.TABULATED, float(z_lo), float(z_hi), funcs=(r, r1, r2))


def warp_from_dict(d: dict) -> WarpingFunction:
    family = d.get("family")
    if family == "cosh":
        return cosh_warp(d.get("a", 1.0))
    if family == "power":
        return power_warp(d.get("a", 0.0), d.get("beta", 0.5))
    if family == "tabulated":
        raise ValueError("tabulated warping functions cannot be built from a config")
    raise ValueError(f"unknown warping family {family!r}")


@dataclass(frozen=True)
class ConditionReport:
    passed: bool
    worst_margin: float
    worst_point: float
    condition_name: str
    failures: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "condition_name": self.condition_name,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "worst_point": self.worst_point,
            "failures": list(self.failures),
        }


def _samples(lo: float, hi: float, num_samples: int) -> np.ndarray:
    # cell midpoints: endpoints excluded by half a step
    h = (hi - lo) / num_samples
    return lo + (np.arange(num_samples) + 0.5) * h


def _require_interval(w: WarpingFunction, lo: float, hi: float) -> None:
    if lo < w.z_lo or hi > w.z_hi:
        raise ValueError(
            f"domain mismatch: ({lo}, {hi}) is not contained in ({w.z_lo}, {w.z_hi})"
        )


def check_theorem_A(
    w: WarpingFunction, a: float, num_samples: int = 1001, tol: float = 1e-12
) -> ConditionReport:
    """Sample the symmetric-interval hypotheses on (-a, a).

    Checks r(0) = 1, r'(0) = 0, the sign of r' on either side of 0 and
    log-convexity r r'' - r'^2 >= 0.  The reported margin is that of the last
    inequality.
    """
    if num_samples < 3:
        raise ValueError(f"num_samples must be >= 3, got {num_samples}")
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    _require_interval(w, -a, a)

    failures = []
    r0, r10, _ = w.evaluate(0.0)
    if abs(r0 - 1.0) > tol or abs(r10) > tol:
        failures.append(f"normalization: r(0)={r0!r}, r'(0)={r10!r}")

    z = _samples(-a, a, num_samples)
    r, r1, r2 = w.evaluate(z)
    if np.any(r1[z > 0] <= 0) or np.any(r1[z < 0] >= 0):
        failures.append("sign of r' on (0, a) / (-a, 0)")

    margin = r * r2 - r1**2
    scale = np.maximum(1.0, np.abs(r * r2) + r1**2)
    if np.any(margin < -tol * scale):
        failures.append("r r'' - r'^2 >= 0")
    k = int(np.argmin(margin))
    return ConditionReport(
        passed=not failures,
        worst_margin=float(margin[k]),
        worst_point=float(z[k]),
        condition_name="theorem_a",
        failures=tuple(failures),
    )


def check_theorem_B(
    w: WarpingFunction,
    alpha: float,
    z_probe_lo: float,
    a: float,
    num_samples: int = 1001,
    tol: float = 1e-12,
) -> ConditionReport:
    """Sample r' > 0 and r r'' - (1 + alpha) r'^2 >= 0 on (z_probe_lo, a)."""
    if not alpha > 1:
        raise ValueError(f"alpha must be greater than one, got {alpha}")
    if num_samples < 3:
        raise ValueError(f"num_samples must be >= 3, got {num_samples}")
    if not z_probe_lo < a:
        raise ValueError(f"need z_probe_lo < a, got ({z_probe_lo}, {a})")
    _require_interval(w, z_probe_lo, a)

    failures = []
    z = _samples(z_probe_lo, a, num_samples)
    r, r1, r2 = w.evaluate(z)
    if np.any(r1 <= 0):
        failures.append("r' > 0")
    margin = r * r2 - (1.0 + alpha) * r1**2
    scale = np.maximum(1.0, np.abs(r * r2) + (1.0 + alpha) * r1**2)
    if np.any(margin < -tol * scale):
        failures.append("r r'' - (1 + alpha) r'^2 >= 0")
    k = int(np.argmin(margin))
    return ConditionReport(
        passed=not failures,
        worst_margin=float(margin[k]),
        worst_point=float(z[k]),
        condition_name="theorem_b",
        failures=tuple(failures),
    )
