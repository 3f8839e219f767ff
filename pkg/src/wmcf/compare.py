"""Slice barriers, gradient-bound certificates and trajectory verification.

A slice is a spatially constant solution ``Z(t)`` of the reduced flow.  Paired
with ``phibar`` it carries the conserved product ``phibar * r(Z)^2``; slices
started above and below the initial data sandwich the solution, and the
gradient bounds for the two long-time-existence scenarios are expressed
through them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .flow import Trajectory
from .ode import OutsideDomain, dopri5
from .space import SymmetricSpace
from .warp import WarpingFunction

COMPARISON_SLACK = 1e-10
BOUND_SLACK = 1e-10


class HypothesisViolation(ValueError):
    """The initial data lies outside the set where a bound is certified."""


class ScenarioMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SliceState:
    t: float
    Z: float
    phibar: float


@dataclass(frozen=True)
class SliceSolution:
    """Samples of a slice solution; ``domain_exit`` marks an early halt."""

    states: list[SliceState]
    domain_exit: bool = False

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def Z(self) -> np.ndarray:
        return np.array([s.Z for s in self.states])

    @property
    def phibar(self) -> np.ndarray:
        return np.array([s.phibar for s in self.states])

    def conserved_product(self, w: WarpingFunction) -> np.ndarray:
        return self.phibar * w.evaluate(self.Z)[0] ** 2


def _sample_times(t_end, output_every, times):
    if times is not None:
        ts = np.asarray(times, dtype=float)
        if ts.size == 0 or ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        return ts
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end!r}")
    if output_every is None:
        return np.array([0.0, float(t_end)])
    k_max = int(math.floor(t_end / output_every + 1e-9))
    ts = [k * output_every for k in range(k_max + 1) if k * output_every < t_end]
    return np.array(ts + [float(t_end)])


def solve_slice(
    w: WarpingFunction,
    n: int,
    z0: float,
    phibar0: float = 1.0,
    t_end: float = 1.0,
    rel_tol: float = 1e-10,
    output_every: float | None = None,
    times=None,
    margin: float = 1e-9,
) -> SliceSolution:
    """Solve dZ/dt = -n r'/r(Z), dphibar/dt = 2n phibar (r'/r)^2(Z).

    Sampled at multiples of ``output_every`` (plus ``t_end``) or at explicit
    ``times``.  If Z comes within ``margin`` of the warping domain boundary the
    solution stops there with ``domain_exit`` set.
    """
    if not 1e-14 < rel_tol < 1e-3:
        raise ValueError(f"rel_tol must lie in (1e-14, 1e-3), got {rel_tol!r}")
    if not phibar0 > 0:
        raise ValueError(f"phibar0 must be positive, got {phibar0!r}")
    if not w.contains(z0, margin):
        raise ValueError(f"z0={z0!r} is not inside the warping domain")
    ts = _sample_times(t_end, output_every, times)

    def f(y):
        z, ph = y
        if not w.contains(z, margin):
            raise OutsideDomain
        r, r1, _ = w.evaluate(z)
        g = r1 / r
        return np.array([-n * g, 2.0 * n * ph * g * g])

    # local tolerance tighter than the requested global one
    ys, completed = dopri5(f, [z0, phibar0], ts, rtol=0.01 * rel_tol, atol=0.01 * rel_tol)
    states = [SliceState(float(t), float(y[0]), float(y[1])) for t, y in zip(ts, ys)]
    return SliceSolution(states, domain_exit=not completed)


def bound_theorem_A(n: int, phi0: float, R0: float) -> float:
    """Uniform bound on max (u')^2 for the symmetric-interval scenario."""
    if not R0 > 1:
        raise ValueError(f"R0 must exceed 1, got {R0!r}")
    if phi0 < 0:
        raise ValueError(f"phi0 must be non-negative, got {phi0!r}")
    den = n - 2.0 * (n + 1) * phi0 * math.log(R0)
    # a denominator at rounding level is the boundary of the admissible set
    if not den > 1e-12 * n:
        raise HypothesisViolation(
            f"initial gradient too large: phi0={phi0!r} needs phi0 < "
            f"n/(2(n+1) log R0) = {n / (2.0 * (n + 1) * math.log(R0))!r}"
        )
    return n * phi0 / den


def bound_theorem_B(n: int, alpha: float, r_of_Z: float) -> float:
    """Bound on max |u'| along the slice: sqrt(n(alpha-1)/(n+1)) r(Z)."""
    if not alpha > 1:
        raise ValueError(f"alpha must be greater than one, got {alpha!r}")
    return math.sqrt(n * (alpha - 1.0) / (n + 1.0)) * r_of_Z


def max_initial_gradient_A(n: int, R0: float) -> float:
    """Largest admissible max |u_0'| for the symmetric-interval scenario."""
    return math.sqrt(n / (2.0 * (n + 1) * math.log(R0)))


# --- scenarios and verification -------------------------------------------


@dataclass(frozen=True)
class TheoremA:
    a0: float
    phi0: float | None = None  # declared phi(0); default: read from the trajectory

    name = "theorem_a"


@dataclass(frozen=True)
class TheoremB:
    alpha: float
    a1: float

    name = "theorem_b"


@dataclass
class CheckResult:
    ok: bool
    status: str  # "ok" | "violated" | "hypothesis_unverified"
    worst_margin: float
    worst_t: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "ok": self.ok,
            "status": self.status,
            "worst_margin": _json_float(self.worst_margin),
            "worst_t": _json_float(self.worst_t),
        }
        d.update({k: _json_float(v) for k, v in self.details.items()})
        return d


@dataclass
class ThetaResult:
    ok: bool
    min_theta: float
    floor: float

    def to_dict(self) -> dict:
        return {"ok": self.ok, "min_theta": _json_float(self.min_theta), "floor": self.floor}


@dataclass
class VerificationReport:
    scenario: str
    comparison: CheckResult
    bound: CheckResult
    theta: ThetaResult
    hypotheses: dict

    @property
    def ok(self) -> bool:
        return self.comparison.ok and self.bound.ok and self.theta.ok

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "comparison": self.comparison.to_dict(),
            "bound": self.bound.to_dict(),
            "theta": self.theta.to_dict(),
            "hypotheses": self.hypotheses,
            "ok": self.ok,
        }


def _json_float(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _worst(margins: np.ndarray, times: np.ndarray):
    k = int(np.argmin(margins))
    return float(margins[k]), float(times[k])


def _sandwich(traj: Trajectory, w, n, z_lo, z_hi, times):
    lo = solve_slice(w, n, z_lo, times=times)
    hi = solve_slice(w, n, z_hi, times=times)
    m = min(len(lo), len(hi))
    lower = traj.column("min_u")[:m] - lo.Z[:m]
    upper = hi.Z[:m] - traj.column("max_u")[:m]
    margins = np.minimum(lower, upper)
    return margins, times[:m], lo, hi


def _check_metadata(traj: Trajectory, w: WarpingFunction, space: SymmetricSpace, scenario):
    if traj.space != space:
        raise ScenarioMismatch(f"trajectory space {traj.space} differs from {space}")
    if traj.warping != w:
        raise ScenarioMismatch("trajectory was computed with a different warping function")
    if isinstance(scenario, TheoremA):
        if not (math.isfinite(w.z_hi) and w.z_lo == -w.z_hi):
            raise ScenarioMismatch("theorem_a needs a symmetric bounded warping domain (-a, a)")
        if not 0 < scenario.a0 < w.z_hi:
            raise ScenarioMismatch(f"theorem_a needs 0 < a0 < a, got a0={scenario.a0!r}")
    elif isinstance(scenario, TheoremB):
        if w.z_lo != -math.inf:
            raise ScenarioMismatch("theorem_b needs a warping domain (-inf, a)")
        if not scenario.alpha > 1:
            raise ScenarioMismatch(f"theorem_b needs alpha > 1, got {scenario.alpha!r}")
        if not scenario.a1 < w.z_hi:
            raise ScenarioMismatch(f"theorem_b needs a1 < a, got a1={scenario.a1!r}")
    else:
        raise ScenarioMismatch(f"unknown scenario {scenario!r}")
    if not np.all(w.contains(traj.initial.u)):
        raise ScenarioMismatch("initial data is not inside the warping domain")


def verify_trajectory(
    traj: Trajectory,
    w: WarpingFunction,
    space: SymmetricSpace,
    scenario: TheoremA | TheoremB,
    theta_floor: float = 0.0,
) -> VerificationReport:
    """Check a finished run against the slice sandwich, the gradient bound of
    its scenario and a floor on the graph angle."""
    _check_metadata(traj, w, space, scenario)
    n = space.n
    times = traj.times
    u0 = traj.initial.u
    phi = traj.column("phi")

    if isinstance(scenario, TheoremA):
        a0 = scenario.a0
        R0 = max(w.evaluate(a0)[0], w.evaluate(-a0)[0])
        amp_ok = bool(np.max(np.abs(u0)) < a0)
        grad_cap = max_initial_gradient_A(n, R0)
        hypotheses = {
            "amplitude": amp_ok,
            "gradient": bool(math.sqrt(phi[0]) < grad_cap),
            "max_gradient_allowed": grad_cap,
        }

        margins, mt, _, _ = _sandwich(traj, w, n, -a0, a0, times)
        worst, worst_t = _worst(margins, mt)
        tight, _, _, _ = _sandwich(traj, w, n, float(u0.min()), float(u0.max()), times)
        status = "ok" if worst > -COMPARISON_SLACK else "violated"
        if not amp_ok:
            status = "hypothesis_unverified"
        comparison = CheckResult(status == "ok", status, worst, worst_t,
                                 {"tight_worst_margin": float(tight.min())})

        phi0 = phi[0] if scenario.phi0 is None else scenario.phi0
        try:
            bound = bound_theorem_A(n, phi0, R0)
        except HypothesisViolation as exc:
            bound_res = CheckResult(False, "hypothesis_unverified", math.nan, math.nan,
                                    {"reason": str(exc)})
        else:
            bm, bt = _worst(bound - phi, times)
            status = "ok" if bm >= -BOUND_SLACK else "violated"
            bound_res = CheckResult(status == "ok", status, bm, bt, {"bound": bound})
    else:
        alpha, a1 = scenario.alpha, scenario.a1
        r_a1 = w.evaluate(a1)[0]
        cap0 = bound_theorem_B(n, alpha, r_a1)
        level_ok = bool(u0.min() > a1)
        hypotheses = {
            "level": level_ok,
            "gradient": bool(math.sqrt(phi[0]) < cap0),
            "max_gradient_allowed": cap0,
        }

        margins, mt, _, _ = _sandwich(traj, w, n, float(u0.min()), float(u0.max()), times)
        worst, worst_t = _worst(margins, mt)
        status = "ok" if worst > -COMPARISON_SLACK else "violated"
        comparison = CheckResult(status == "ok", status, worst, worst_t)

        Z = solve_slice(w, n, a1, times=times)
        m = len(Z)
        caps = np.array([bound_theorem_B(n, alpha, r) for r in w.evaluate(Z.Z)[0]])
        bm, bt = _worst(caps - np.sqrt(phi[:m]), times[:m])
        if not (level_ok and hypotheses["gradient"]):
            status = "hypothesis_unverified"
        else:
            status = "ok" if bm > -BOUND_SLACK else "violated"
        bound_res = CheckResult(status == "ok", status, bm, bt)

    th = traj.column("min_theta")
    th = th[np.isfinite(th)]
    # no finite angle at all means the data never lay inside the warping domain
    min_theta = float(th.min()) if th.size else math.nan
    theta = ThetaResult(bool(th.size) and min_theta >= theta_floor, min_theta, float(theta_floor))
    return VerificationReport(scenario.name, comparison, bound_res, theta, hypotheses)
