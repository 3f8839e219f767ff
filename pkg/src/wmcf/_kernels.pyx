# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops; same contract as ``wmcf._kernels_py``."""

import numpy as np
from libc.math cimport cosh, sinh, pow, sqrt, isfinite

cdef enum:
    OK = 0
    GRADIENT_BLOWUP = 1
    DOMAIN_EXIT = 2
    STEP_UNDERFLOW = 3
    NON_FINITE = 4

cdef double DT_MIN = 1e-14


cdef inline void _eval(int family, double pa, double pbeta, double z,
                       double* r, double* r1) noexcept nogil:
    cdef double s
    if family == 0:
        r[0] = cosh(z)
        r1[0] = sinh(z)
    else:
        s = pa - z
        r[0] = pow(s, -pbeta)
        r1[0] = pbeta * r[0] / s


cdef void _rhs(const double[::1] u, const double[::1] r, const double[::1] r1,
               const double[::1] coef, double c0, double cL, double inv_dx, double n,
               double[::1] out) noexcept nogil:
    cdef Py_ssize_t N = u.shape[0] - 1
    cdef Py_ssize_t i
    cdef double du, ddu, mu, r2, g, den, drift
    cdef double half = 0.5 * inv_dx
    cdef double inv_dx2 = inv_dx * inv_dx
    for i in range(N + 1):
        if i == 0:
            du = 0.0
            ddu = 2.0 * (u[1] - u[0]) * inv_dx2
            drift = c0 * ddu
        elif i == N:
            du = 0.0
            ddu = 2.0 * (u[N - 1] - u[N]) * inv_dx2
            drift = cL * ddu
        else:
            du = (u[i + 1] - u[i - 1]) * half
            ddu = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2
            drift = du * coef[i]
        mu = du * du
        r2 = r[i] * r[i]
        g = r1[i] / r[i]
        den = r2 + mu
        out[i] = ddu / den - g * mu / den + drift / r2 - n * g


def rhs(const double[::1] u, const double[::1] r, const double[::1] r1, const double[::1] coef,
        double c0, double cL, double inv_dx, double n):
    out = np.empty(u.shape[0])
    cdef double[::1] o = out
    _rhs(u, r, r1, coef, c0, cL, inv_dx, n, o)
    return out


def curvature(const double[::1] u, const double[::1] r, const double[::1] r1,
              const double[::1] coef,
              double c0, double cL, double inv_dx, double n):
    cdef Py_ssize_t N = u.shape[0] - 1
    cdef Py_ssize_t i
    cdef double du, ddu, mu, w, w3, drift
    cdef double inv_dx2 = inv_dx * inv_dx
    out = np.empty(N + 1)
    cdef double[::1] o = out
    for i in range(N + 1):
        if i == 0:
            du = 0.0
            ddu = 2.0 * (u[1] - u[0]) * inv_dx2
            drift = c0 * ddu
        elif i == N:
            du = 0.0
            ddu = 2.0 * (u[N - 1] - u[N]) * inv_dx2
            drift = cL * ddu
        else:
            du = (u[i + 1] - u[i - 1]) * (0.5 * inv_dx)
            ddu = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2
            drift = du * coef[i]
        mu = du * du
        w = sqrt(r[i] * r[i] + mu)
        w3 = w * w * w
        o[i] = -r[i] * ddu / w3 + r1[i] * mu / w3 - drift / (r[i] * w) + n * r1[i] / w
    return out


cdef inline bint _inside(const double[::1] v, double lo, double hi) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        if not (v[i] > lo and v[i] < hi):
            return False
    return True


cdef inline void _fill(int family, double pa, double pbeta, const double[::1] v,
                       double[::1] r, double[::1] r1) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        _eval(family, pa, pbeta, v[i], &r[i], &r1[i])


def advance(double[::1] u, int family, double pa, double pbeta, const double[::1] coef,
            double c0, double cL, double dx, double n, double safety,
            double t, double t_target, double lo, double hi, double margin,
            double blowup):
    cdef Py_ssize_t N1 = u.shape[0]
    cdef Py_ssize_t i
    cdef long steps = 0
    cdef int status = OK
    cdef double inv_dx = 1.0 / dx
    cdef double lo_m = lo + margin
    cdef double hi_m = hi - margin
    cdef double dt, remaining, du, mu, mumax, dmin, val
    cdef bint last

    cdef double[::1] r = np.empty(N1)
    cdef double[::1] r1 = np.empty(N1)
    cdef double[::1] v = np.empty(N1)
    cdef double[::1] k1 = np.empty(N1)
    cdef double[::1] k2 = np.empty(N1)
    cdef double[::1] k3 = np.empty(N1)
    cdef double[::1] k4 = np.empty(N1)
    cdef double[::1] new = np.empty(N1)

    with nogil:
        while True:
            if not _inside(u, lo_m, hi_m):
                status = DOMAIN_EXIT
                break
            _fill(family, pa, pbeta, u, r, r1)
            mumax = 0.0
            dmin = r[0] * r[0]
            for i in range(N1):
                if i == 0 or i == N1 - 1:
                    mu = 0.0
                else:
                    du = (u[i + 1] - u[i - 1]) * (0.5 * inv_dx)
                    mu = du * du
                if mu > mumax:
                    mumax = mu
                val = r[i] * r[i] + mu
                if val < dmin:
                    dmin = val
            if mumax > blowup:
                status = GRADIENT_BLOWUP
                break
            if t >= t_target:
                break
            dt = safety * dx * dx * dmin
            if dt < DT_MIN:
                status = STEP_UNDERFLOW
                break
            remaining = t_target - t
            last = dt >= remaining
            if last:
                dt = remaining

            _rhs(u, r, r1, coef, c0, cL, inv_dx, n, k1)
            for i in range(N1):
                v[i] = u[i] + 0.5 * dt * k1[i]
            if not _inside(v, lo_m, hi_m):
                status = DOMAIN_EXIT
                break
            _fill(family, pa, pbeta, v, r, r1)
            _rhs(v, r, r1, coef, c0, cL, inv_dx, n, k2)
            for i in range(N1):
                v[i] = u[i] + 0.5 * dt * k2[i]
            if not _inside(v, lo_m, hi_m):
                status = DOMAIN_EXIT
                break
            _fill(family, pa, pbeta, v, r, r1)
            _rhs(v, r, r1, coef, c0, cL, inv_dx, n, k3)
            for i in range(N1):
                v[i] = u[i] + dt * k3[i]
            if not _inside(v, lo_m, hi_m):
                status = DOMAIN_EXIT
                break
            _fill(family, pa, pbeta, v, r, r1)
            _rhs(v, r, r1, coef, c0, cL, inv_dx, n, k4)
            for i in range(N1):
                new[i] = u[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if not isfinite(new[i]):
                    status = NON_FINITE
            if status != OK:
                break
            for i in range(N1):
                u[i] = new[i]
            if last:
                t = t_target
            else:
                t = t + dt
            steps += 1

    return t, status, steps
