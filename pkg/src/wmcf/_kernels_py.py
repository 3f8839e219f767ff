"""Pure NumPy implementation of the hot loops.

Mirrors ``_kernels.pyx`` function for function; ``wmcf._backend`` picks one of
the two at import.  Array conventions shared by both backends:

* ``u`` holds the nodal values on ``x_i = i*dx``, ``i = 0..N``;
* ``coef[i]`` is the cotangent drift coefficient at interior node ``i``
  (entries 0 and N are ignored);
* ``c0``, ``cL`` multiply ``u''`` at the two ends, where the drift term
  ``u' * coef`` is a 0/0 limit.
"""

from __future__ import annotations

import numpy as np

# advance() status codes
OK = 0
GRADIENT_BLOWUP = 1
DOMAIN_EXIT = 2
STEP_UNDERFLOW = 3
NON_FINITE = 4

FAMILY_COSH = 0
FAMILY_POWER = 1

DT_MIN = 1e-14


def derivatives(u, inv_dx):
    """Central first/second differences with ghost reflection u[-1] = u[1]."""
    N = u.shape[0] - 1
    du = np.empty_like(u)
    ddu = np.empty_like(u)
    du[0] = 0.0
    du[N] = 0.0
    du[1:N] = (u[2:] - u[:-2]) * (0.5 * inv_dx)
    inv_dx2 = inv_dx * inv_dx
    ddu[1:N] = (u[2:] - 2.0 * u[1:N] + u[:-2]) * inv_dx2
    ddu[0] = 2.0 * (u[1] - u[0]) * inv_dx2
    ddu[N] = 2.0 * (u[N - 1] - u[N]) * inv_dx2
    return du, ddu


def _drift(du, ddu, coef, c0, cL):
    drift = du * coef
    drift[0] = c0 * ddu[0]
    drift[-1] = cL * ddu[-1]
    return drift


# overflow is reported through non-finite results, as in the compiled kernels
@np.errstate(over="ignore", invalid="ignore")
def rhs(u, r, r1, coef, c0, cL, inv_dx, n):
    du, ddu = derivatives(u, inv_dx)
    mu = du * du
    r2 = r * r
    g = r1 / r
    den = r2 + mu
    return ddu / den - g * mu / den + _drift(du, ddu, coef, c0, cL) / r2 - n * g


@np.errstate(over="ignore", invalid="ignore")
def curvature(u, r, r1, coef, c0, cL, inv_dx, n):
    du, ddu = derivatives(u, inv_dx)
    mu = du * du
    w = np.sqrt(r * r + mu)
    w3 = w * w * w
    return (
        -r * ddu / w3
        + r1 * mu / w3
        - _drift(du, ddu, coef, c0, cL) / (r * w)
        + n * r1 / w
    )


def _family_eval(family, pa, pbeta):
    if family == FAMILY_COSH:
        def ev(z):
            return np.cosh(z), np.sinh(z)
    elif family == FAMILY_POWER:
        def ev(z):
            s = pa - z
            r = s ** (-pbeta)
            return r, pbeta * r / s
    else:
        raise ValueError(f"unknown family code {family}")
    return ev


def advance(u, family, pa, pbeta, coef, c0, cL, dx, n, safety,
            t, t_target, lo, hi, margin, blowup):
    """RK4-integrate ``u`` in place from ``t`` to ``t_target``.

    Returns ``(t, status, steps)``; on a nonzero status ``u`` holds the last
    accepted state and ``t`` its time.
    """
    return advance_generic(u, _family_eval(family, pa, pbeta), coef, c0, cL, dx, n,
                           safety, t, t_target, lo, hi, margin, blowup)


def advance_generic(u, ev, coef, c0, cL, dx, n, safety,
                    t, t_target, lo, hi, margin, blowup):
    inv_dx = 1.0 / dx
    steps = 0

    def inside(v):
        return bool(np.all(v > lo + margin) and np.all(v < hi - margin))

    def f(v):
        r, r1 = ev(v)
        return rhs(v, r, r1, coef, c0, cL, inv_dx, n)

    while True:
        if not inside(u):
            return t, DOMAIN_EXIT, steps
        r, r1 = ev(u)
        du, _ = derivatives(u, inv_dx)
        mu = du * du
        if mu.max() > blowup:
            return t, GRADIENT_BLOWUP, steps
        if t >= t_target:
            return t, OK, steps
        dt = safety * dx * dx * float(np.min(r * r + mu))
        if dt < DT_MIN:
            return t, STEP_UNDERFLOW, steps
        remaining = t_target - t
        last = dt >= remaining
        if last:
            dt = remaining

        k1 = rhs(u, r, r1, coef, c0, cL, inv_dx, n)
        v = u + 0.5 * dt * k1
        if not inside(v):
            return t, DOMAIN_EXIT, steps
        k2 = f(v)
        v = u + 0.5 * dt * k2
        if not inside(v):
            return t, DOMAIN_EXIT, steps
        k3 = f(v)
        v = u + dt * k3
        if not inside(v):
            return t, DOMAIN_EXIT, steps
        k4 = f(v)
        new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(new)):
            return t, NON_FINITE, steps
        u[:] = new
        t = t_target if last else t + dt
        steps += 1
