"""Discrete profile calculus on the reduced interval [0, L].

A K-invariant graph over a rank-one space is described by a single profile
``u(x)``; everything here works on its nodal values.  Derivatives are second
order central differences with ghost reflection, which makes the discrete
Neumann condition exact.

The cotangent drift ``u' * (m_l l1 cot(l1 x) + 2 m_2l l1 cot(2 l1 x))`` is a
0/0 limit at the ends of the interval; there it is replaced by the closed form
``c * u''`` with ``c`` given by :func:`drift_coefficients`.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._backend import kernels
from ._kernels_py import derivatives
from .space import SymmetricSpace
from .warp import DomainExitError, WarpingFunction


class NonFiniteError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class Profile:
    grid_n: int
    u: np.ndarray
    space: SymmetricSpace

    def __post_init__(self):
        if self.grid_n < 8:
            raise ValueError(f"grid_n must be >= 8, got {self.grid_n}")
        u = np.ascontiguousarray(self.u, dtype=float)
        if u.shape != (self.grid_n + 1,):
            raise ValueError(f"u must have length grid_n+1={self.grid_n + 1}, got {u.shape}")
        object.__setattr__(self, "u", u)

    @property
    def dx(self) -> float:
        return self.space.L / self.grid_n

    @property
    def x(self) -> np.ndarray:
        return grid(self.space, self.grid_n)

    def with_values(self, u) -> "Profile":
        return Profile(self.grid_n, u, self.space)


@dataclass(frozen=True, eq=False)
class ProfileDerived:
    du: np.ndarray
    ddu: np.ndarray
    mu: np.ndarray
    w: np.ndarray
    theta: np.ndarray
    H: np.ndarray
    r: np.ndarray
    r1: np.ndarray


def grid(space: SymmetricSpace, grid_n: int) -> np.ndarray:
    return np.arange(grid_n + 1) * (space.L / grid_n)


@functools.lru_cache(maxsize=64)
def _drift_cached(space: SymmetricSpace, grid_n: int):
    x = grid(space, grid_n)
    l1 = space.lambda1
    coef = np.zeros(grid_n + 1)
    xi = x[1:-1]
    coef[1:-1] = space.m_lambda * l1 / np.tan(l1 * xi)
    if space.m_2lambda:
        coef[1:-1] += 2.0 * space.m_2lambda * l1 / np.tan(2.0 * l1 * xi)
    coef.flags.writeable = False
    c0 = float(space.m_lambda + space.m_2lambda)
    cL = float(space.m_2lambda if space.m_2lambda else space.m_lambda)
    return coef, c0, cL


def drift_coefficients(space: SymmetricSpace, grid_n: int):
    """Return ``(coef, c0, cL)``.

    ``coef[i]`` multiplies ``u'`` at interior nodes.  At ``x = 0`` both
    cotangents blow up like ``1/x`` and the drift tends to
    ``(m_l + m_2l) u''(0)``.  At ``x = L`` only the cotangent that vanishes
    contributes: ``m_2l u''(L)`` when L = pi/(2 l1), ``m_l u''(L)`` when
    L = pi/l1 (the sphere).
    """
    return _drift_cached(space, grid_n)


def _warp_values(p: Profile, w: WarpingFunction):
    inside = w.contains(p.u)
    if not np.all(inside):
        i = int(np.argmin(inside))
        raise DomainExitError(
            f"node {i} (x={p.x[i]!r}) has u={p.u[i]!r} outside warping domain "
            f"({w.z_lo}, {w.z_hi})"
        )
    r, r1, _ = w.evaluate(p.u)
    return r, r1


def _finite(a: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        i = int(np.argmin(np.isfinite(a)))
        raise NonFiniteError(f"{what} is not finite at node {i}")
    return a


def derive(p: Profile, w: WarpingFunction) -> ProfileDerived:
    r, r1 = _warp_values(p, w)
    du, ddu = derivatives(p.u, 1.0 / p.dx)
    mu = du * du
    ww = np.sqrt(r * r + mu)
    theta = r / ww
    coef, c0, cL = drift_coefficients(p.space, p.grid_n)
    H = np.asarray(kernels.curvature(p.u, r, r1, coef, c0, cL, 1.0 / p.dx, float(p.space.n)))
    return ProfileDerived(du, ddu, mu, ww, theta, H, r, r1)


def mean_curvature(p: Profile, w: WarpingFunction) -> np.ndarray:
    """Mean curvature of the graph with respect to the downward normal."""
    r, r1 = _warp_values(p, w)
    coef, c0, cL = drift_coefficients(p.space, p.grid_n)
    H = np.asarray(kernels.curvature(p.u, r, r1, coef, c0, cL, 1.0 / p.dx, float(p.space.n)))
    return _finite(H, "mean curvature")


def reduced_rhs(p: Profile, w: WarpingFunction) -> np.ndarray:
    """Time derivative of the profile under the reduced flow."""
    r, r1 = _warp_values(p, w)
    coef, c0, cL = drift_coefficients(p.space, p.grid_n)
    out = np.asarray(kernels.rhs(p.u, r, r1, coef, c0, cL, 1.0 / p.dx, float(p.space.n)))
    return _finite(out, "reduced right-hand side")


def rhs_curvature_consistency(p: Profile, w: WarpingFunction) -> float:
    """max over interior nodes of |du/dt + (w/r) H|; zero up to rounding."""
    d = derive(p, w)
    _finite(d.H, "mean curvature")
    rhs = reduced_rhs(p, w)
    gap = np.abs(rhs + d.w / d.r * d.H)[1:-1]
    return float(gap.max()) if gap.size else 0.0


def write_profile_csv(path, p: Profile, w: WarpingFunction) -> None:
    d = derive(p, w)
    cols = (p.x, p.u, d.du, d.ddu, d.mu, d.w, d.theta, d.H)
    lines = ["x,u,du,ddu,mu,w,theta,H"]
    for row in zip(*cols):
        lines.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


__all__ = [
    "Profile",
    "ProfileDerived",
    "NonFiniteError",
    "derive",
    "drift_coefficients",
    "grid",
    "mean_curvature",
    "reduced_rhs",
    "rhs_curvature_consistency",
    "write_profile_csv",
]
