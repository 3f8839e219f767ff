"""Compare the compiled and NumPy kernels on the reduced-flow hot loop.

    python3 benchmarks/bench_kernels.py [--grid 64 128 256] [--t-end 0.5]
"""

import argparse
import time

import numpy as np

from wmcf import _kernels_py
from wmcf._backend import compiled_available
from wmcf.flow import initial_cosine
from wmcf.geometry import drift_coefficients
from wmcf.space import make_space


def _time_advance(mod, u0, space, t_end, repeat):
    coef, c0, cL = drift_coefficients(space, u0.size - 1)
    dx = space.L / (u0.size - 1)
    best = np.inf
    for _ in range(repeat):
        u = u0.copy()
        t0 = time.perf_counter()
        _, status, steps = mod.advance(u, _kernels_py.FAMILY_COSH, 0.0, 0.0, coef, c0, cL, dx,
                                       float(space.n), 0.2, 0.0, t_end, -1.0, 1.0, 1e-9, 1e3)
        best = min(best, time.perf_counter() - t0)
        assert status == 0
    return best, steps, u


def _time_rhs(mod, u0, space, repeat):
    coef, c0, cL = drift_coefficients(space, u0.size - 1)
    inv_dx = (u0.size - 1) / space.L
    r, r1 = np.cosh(u0), np.sinh(u0)
    reps = 2000
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(reps):
            mod.rhs(u0, r, r1, coef, c0, cL, inv_dx, float(space.n))
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--t-end", type=float, default=0.5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = {"python": _kernels_py}
    if compiled_available():
        from wmcf import _kernels

        backends["cython"] = _kernels
    else:
        print("compiled kernels not built; timing the NumPy fallback only")

    space = make_space("sphere", 3)
    print(f"{'grid':>6} {'backend':>8} {'rhs [us]':>10} {'advance [s]':>12} {'steps':>8} {'speedup':>8}")
    for n in args.grid:
        u0 = initial_cosine(space, 0.0, 0.2, 1, n).u
        base = None
        finals = {}
        for name, mod in backends.items():
            t_rhs = _time_rhs(mod, u0, space, args.repeat)
            t_adv, steps, u = _time_advance(mod, u0, space, args.t_end, args.repeat)
            finals[name] = u
            base = base or t_adv
            print(f"{n:>6} {name:>8} {t_rhs * 1e6:>10.2f} {t_adv:>12.4f} {steps:>8d} {base / t_adv:>7.1f}x")
        if len(finals) == 2:
            diff = np.max(np.abs(finals["python"] - finals["cython"]))
            print(f"{'':>6} max |u_python - u_cython| = {diff:.2e}")


if __name__ == "__main__":
    main()
