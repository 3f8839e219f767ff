"""Dormand-Prince 5(4) with step-size control, sampling at requested times."""

from __future__ import annotations

import numpy as np

# Butcher tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class OutsideDomain(Exception):
    """Raised by a right-hand side when a trial state is not admissible."""


def dopri5(f, y0, times, rtol, atol, h0=None, max_steps=10_000_000):
    """Integrate y' = f(y) (autonomous) and return y at each of ``times``.

    ``times`` must be increasing and start at 0.  If ``f`` raises
    :class:`OutsideDomain` the step is shrunk; when the step size collapses
    the integration stops and only the states reached so far are returned.
    Returns ``(list_of_states, completed)``.
    """
    times = np.asarray(times, dtype=float)
    y = np.array(y0, dtype=float)
    out = [y.copy()]
    t = float(times[0])
    T = float(times[-1])
    h = h0 if h0 is not None else 1e-3 * max(T - t, 1e-12)
    k = np.empty((7, y.size))
    k[0] = f(y)
    idx = 1
    steps = 0
    while idx < len(times):
        target = float(times[idx])
        if steps >= max_steps:
            return out, False
        h = min(h, target - t)
        if h <= 1e-15 * max(1.0, abs(t)):
            if target - t <= 1e-15 * max(1.0, abs(t)):
                t = target
                out.append(y.copy())
                idx += 1
                continue
            return out, False
        try:
            for s in range(1, 7):
                ys = y + h * np.dot(_A[s], k[:s])
                k[s] = f(ys)
        except OutsideDomain:
            h *= 0.25
            continue
        y_new = y + h * np.dot(_B5, k)
        err_vec = h * np.dot(_E, k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        steps += 1
        if err <= 1.0:
            landed = h == target - t
            t = target if landed else t + h
            y = y_new
            k[0] = k[6]  # FSAL
            if landed:
                out.append(y.copy())
                idx += 1
            fac = 5.0 if err == 0 else min(5.0, 0.9 * err ** (-0.2))
            h_next = h * fac
            # do not let a short landing step shrink the next one
            h = max(h_next, h) if landed else h_next
        else:
            h *= max(0.2, 0.9 * err ** (-0.2))
    return out, True
