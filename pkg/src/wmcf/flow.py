"""Method-of-lines time integration of the reduced flow.

The spatial operator is :func:`wmcf.geometry.reduced_rhs`; time stepping is
classical RK4 under a parabolic step restriction built from the degenerate
diffusion coefficient ``1/(r(u)^2 + u'^2)``.  Loss of graphicality or of the
warping domain ends a run with an event rather than an exception.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import _kernels_py
from ._backend import NAME as BACKEND
from ._backend import kernels
from .geometry import NonFiniteError, Profile, derive, drift_coefficients, reduced_rhs, write_profile_csv
from .space import SymmetricSpace
from .warp import WarpFamily, WarpingFunction

log = logging.getLogger(__name__)

DT_MIN = _kernels_py.DT_MIN
# RK4 stability interval on the negative real axis
RK4_REAL_LIMIT = 2.78


@dataclass(frozen=True)
class SolverConfig:
    grid_n: int = 128
    t_end: float = 1.0
    safety: float = 0.2
    output_every: float = 0.05
    grad_blowup_threshold: float = 1e3
    domain_margin: float = 1e-9
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self):
        if isinstance(self.grid_n, bool) or int(self.grid_n) != self.grid_n or self.grid_n < 8:
            raise ValueError(f"grid_n must be an integer >= 8, got {self.grid_n!r}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if not 0 < self.safety < 1:
            raise ValueError(f"safety in (0,1), got {self.safety!r}")
        if not self.output_every > 0:
            raise ValueError(f"output_every must be positive, got {self.output_every!r}")
        if not self.grad_blowup_threshold > 0:
            raise ValueError(
                f"grad_blowup_threshold must be positive, got {self.grad_blowup_threshold!r}"
            )
        if not self.domain_margin >= 0:
            raise ValueError(f"domain_margin must be non-negative, got {self.domain_margin!r}")
        for s in self.snapshot_times:
            if not 0 <= s <= self.t_end:
                raise ValueError(f"snapshot time {s!r} outside [0, t_end]")
        object.__setattr__(self, "grid_n", int(self.grid_n))
        object.__setattr__(self, "snapshot_times", tuple(sorted(float(s) for s in self.snapshot_times)))


class EventKind(enum.Enum):
    REACHED_T_END = "ReachedTEnd"
    GRADIENT_BLOWUP = "GradientBlowup"
    DOMAIN_EXIT = "DomainExit"
    STEP_UNDERFLOW = "StepUnderflow"


_STATUS_EVENT = {
    _kernels_py.GRADIENT_BLOWUP: EventKind.GRADIENT_BLOWUP,
    _kernels_py.DOMAIN_EXIT: EventKind.DOMAIN_EXIT,
    _kernels_py.STEP_UNDERFLOW: EventKind.STEP_UNDERFLOW,
    # an overflowing RK4 update only happens once gradients have exploded
    _kernels_py.NON_FINITE: EventKind.GRADIENT_BLOWUP,
}


@dataclass(frozen=True)
class Event:
    kind: EventKind
    t: float

    def __str__(self):
        return self.kind.value


class SeriesRow(NamedTuple):
    t: float
    min_u: float
    max_u: float
    phi: float
    min_theta: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    snapshots: list[tuple[float, Profile]]
    series: list[SeriesRow]
    event: Event
    space: SymmetricSpace
    warping: WarpingFunction
    steps: int = 0
    backend: str = BACKEND

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.series])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    @property
    def initial(self) -> Profile:
        return self.snapshots[0][1]

    @property
    def final(self) -> Profile:
        return self.snapshots[-1][1]


def initial_cosine(space: SymmetricSpace, c0: float, c1: float, mode: int, grid_n: int) -> Profile:
    """u(x) = c0 + c1 cos(mode pi x / L); every mode meets the Neumann condition."""
    if grid_n < 8:
        raise ValueError(f"grid_n must be >= 8, got {grid_n}")
    if mode < 1 or int(mode) != mode:
        raise ValueError(f"mode must be a positive integer, got {mode!r}")
    x = np.arange(grid_n + 1) * (space.L / grid_n)
    u = c0 + c1 * np.cos(mode * np.pi * x / space.L)
    return Profile(grid_n, u, space)


def constant_profile(space: SymmetricSpace, z0: float, grid_n: int) -> Profile:
    return Profile(grid_n, np.full(grid_n + 1, float(z0)), space)


def stable_dt(p: Profile, w: WarpingFunction, cfg: SolverConfig) -> float:
    d = derive(p, w)
    return cfg.safety * p.dx**2 * float(np.min(d.r * d.r + d.mu))


def step(p: Profile, w: WarpingFunction, dt: float) -> Profile:
    """One classical RK4 step of du/dt = reduced_rhs(u)."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    u = p.u
    k1 = reduced_rhs(p, w)
    k2 = reduced_rhs(p.with_values(u + 0.5 * dt * k1), w)
    k3 = reduced_rhs(p.with_values(u + 0.5 * dt * k2), w)
    k4 = reduced_rhs(p.with_values(u + dt * k3), w)
    new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(new)):
        raise NonFiniteError("RK4 update produced a non-finite state")
    return p.with_values(new)


def _row(t: float, p: Profile, w: WarpingFunction) -> SeriesRow:
    du, _ = _kernels_py.derivatives(p.u, 1.0 / p.dx)
    mu = du * du
    if np.all(w.contains(p.u)):
        r = w.evaluate(p.u)[0]
        min_theta = float(np.min(r / np.sqrt(r * r + mu)))
    else:
        # state already outside the warping domain: no angle to report
        min_theta = math.nan
    return SeriesRow(float(t), float(p.u.min()), float(p.u.max()), float(mu.max()), min_theta)


def _targets(cfg: SolverConfig) -> list[tuple[float, bool, bool]]:
    """(time, is_output, is_snapshot) stops after t = 0, in increasing order."""
    k_max = int(math.floor(cfg.t_end / cfg.output_every + 1e-9))
    outs = {k * cfg.output_every for k in range(1, k_max + 1) if k * cfg.output_every < cfg.t_end}
    outs.add(cfg.t_end)
    snaps = {s for s in cfg.snapshot_times if s > 0}
    return [(s, s in outs, s in snaps) for s in sorted(outs | snaps)]


def _advance(u, w, coef, c0, cL, dx, n, cfg, t, t_target):
    args = (coef, c0, cL, dx, float(n), cfg.safety, t, t_target,
            w.z_lo, w.z_hi, cfg.domain_margin, cfg.grad_blowup_threshold)
    if w.family is WarpFamily.COSH:
        return kernels.advance(u, _kernels_py.FAMILY_COSH, 0.0, 0.0, *args)
    if w.family is WarpFamily.POWER:
        return kernels.advance(u, _kernels_py.FAMILY_POWER, w.a, w.beta, *args)

    def ev(z):
        r, r1, _ = w.evaluate(z)
        return r, r1

    return _kernels_py.advance_generic(u, ev, *args)


def run(p0: Profile, w: WarpingFunction, cfg: SolverConfig) -> Trajectory:
    if p0.grid_n != cfg.grid_n:
        raise ValueError(f"profile has grid_n={p0.grid_n}, config says {cfg.grid_n}")
    space = p0.space
    # empirical spectral radius of the linearised operator, in units of 1/(r dx)^2
    if cfg.safety * (1.3 * space.n + 2.0) > RK4_REAL_LIMIT:
        log.warning("safety=%g is likely unstable for n=%d; try safety <= %.3g",
                    cfg.safety, space.n, RK4_REAL_LIMIT / (1.3 * space.n + 2.0))
    coef, c0, cL = drift_coefficients(space, p0.grid_n)
    dx = p0.dx
    u = np.array(p0.u, dtype=float)

    snapshots = [(0.0, p0)]
    series: list[SeriesRow] = []
    steps = 0

    # t = 0 pre-check: advance with an empty interval only tests for events
    t, status, _ = _advance(u, w, coef, c0, cL, dx, space.n, cfg, 0.0, 0.0)
    series.append(_row(0.0, p0, w))
    event = None
    if status:
        event = Event(_STATUS_EVENT[status], 0.0)
    else:
        for target, is_output, is_snap in _targets(cfg):
            t, status, k = _advance(u, w, coef, c0, cL, dx, space.n, cfg, t, target)
            steps += k
            p = Profile(p0.grid_n, u.copy(), space)
            if status:
                if t > series[-1].t:
                    series.append(_row(t, p, w))
                if t > snapshots[-1][0]:
                    snapshots.append((t, p))
                event = Event(_STATUS_EVENT[status], t)
                break
            if is_output:
                series.append(_row(t, p, w))
            if is_snap or target == cfg.t_end:
                snapshots.append((t, p))
        else:
            event = Event(EventKind.REACHED_T_END, t)

    log.info("run finished: %s at t=%.6g after %d steps (%s kernels)",
             event.kind.value, event.t, steps, BACKEND)
    return Trajectory(snapshots, series, event, space, w, steps, BACKEND)


def write_series_csv(path, traj: Trajectory) -> None:
    lines = ["t,min_u,max_u,phi,min_theta,event"]
    last = len(traj.series) - 1
    for i, row in enumerate(traj.series):
        ev = traj.event.kind.value if i == last else ""
        lines.append(",".join(repr(float(v)) for v in row) + "," + ev)
    Path(path).write_text("\n".join(lines) + "\n")


def snapshot_filename(t: float) -> str:
    return f"profile_t{float(t)!r}.csv"


def write_snapshots(directory, traj: Trajectory) -> list[Path]:
    directory = Path(directory)
    paths = []
    for t, p in traj.snapshots:
        path = directory / snapshot_filename(t)
        if np.all(traj.warping.contains(p.u)):
            write_profile_csv(path, p, traj.warping)
            paths.append(path)
    return paths


__all__ = [
    "Event",
    "EventKind",
    "SeriesRow",
    "SolverConfig",
    "Trajectory",
    "constant_profile",
    "initial_cosine",
    "run",
    "stable_dt",
    "step",
    "write_series_csv",
    "write_snapshots",
]
