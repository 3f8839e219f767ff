import math

import numpy as np
import pytest

from wmcf.flow import (
    EventKind,
    SolverConfig,
    constant_profile,
    initial_cosine,
    run,
    snapshot_filename,
    stable_dt,
    step,
    write_series_csv,
    write_snapshots,
)
from wmcf.geometry import NonFiniteError, Profile
from wmcf.space import make_space
from wmcf.warp import cosh_warp, power_warp, tabulated_warp


def slice_cosh(z0, n, t):
    """Closed-form slice for r = cosh: sinh Z(t) = sinh(z0) exp(-n t)."""
    return np.arcsinh(np.sinh(z0) * np.exp(-n * t))


def test_initial_cosine_endpoints(s3):
    p = initial_cosine(s3, 0.0, 0.2, 1, 128)
    assert p.u[0] == 0.2 and p.u[-1] == pytest.approx(-0.2, abs=1e-16)
    assert np.max(np.abs(p.u)) == 0.2


def test_initial_cosine_constant(cp2):
    assert np.all(initial_cosine(cp2, 0.3, 0.0, 1, 16).u == 0.3)


def test_initial_cosine_gradient(s3, cosh1):
    from wmcf.geometry import derive

    # analytic max |u'| = c1 * mode * pi / L = 0.2; central differences undershoot by O(dx^2)
    d = derive(initial_cosine(s3, 0.0, 0.2, 1, 1024), cosh1)
    assert np.sqrt(d.mu.max()) == pytest.approx(0.2, rel=1e-5)


def test_solver_config_validation():
    with pytest.raises(ValueError, match="safety in"):
        SolverConfig(safety=1.5)
    with pytest.raises(ValueError, match="grid_n"):
        SolverConfig(grid_n=4)
    with pytest.raises(ValueError):
        SolverConfig(t_end=0.0)
    with pytest.raises(ValueError):
        SolverConfig(t_end=1.0, snapshot_times=(2.0,))


def test_stable_dt(s3, cosh1):
    cfg = SolverConfig(grid_n=128)
    dt = stable_dt(constant_profile(s3, 0.0, 128), cosh1, cfg)
    assert dt == pytest.approx(0.2 * (math.pi / 128) ** 2, rel=1e-15)
    assert dt == pytest.approx(1.20479e-4, rel=1e-5)
    # dt scales with r^2 for flat profiles
    dt2 = stable_dt(constant_profile(s3, 0.8, 128), cosh1, cfg)
    assert dt2 / dt == pytest.approx(math.cosh(0.8) ** 2, rel=1e-14)


def test_step_constant_profile_tracks_slice(s3, cosh1):
    z0 = 0.5
    p = constant_profile(s3, z0, 32)
    errs = []
    for dt in (0.02, 0.01):
        q = step(p, cosh1, dt)
        assert np.ptp(q.u) == 0.0
        errs.append(abs(q.u[0] - slice_cosh(z0, 3, dt)))
    # fourth-order method: local error O(dt^5)
    assert errs[0] / errs[1] > 25
    assert errs[1] < 1e-10
    first_order = z0 - 0.01 * 3 * math.tanh(z0)
    assert abs(step(p, cosh1, 0.01).u[0] - first_order) < 1e-3


def test_step_fixed_point(s3, cosh1):
    p = constant_profile(s3, 0.0, 32)
    assert np.all(step(p, cosh1, 1e-3).u == 0.0)


@pytest.mark.parametrize("dt", [0.0, -1e-3])
def test_step_rejects_nonpositive_dt(s3, cosh1, dt):
    with pytest.raises(ValueError):
        step(constant_profile(s3, 0.0, 16), cosh1, dt)


def test_step_non_finite(s3):
    w = tabulated_warp(np.ones_like, lambda z: np.full_like(z, 1e308), np.zeros_like)
    with pytest.raises(NonFiniteError):
        step(constant_profile(s3, 0.0, 16), w, 1e10)


def test_run_constant_tracks_slice(s3, cosh1):
    traj = run(constant_profile(s3, 0.5, 128), cosh1, SolverConfig(128, 1.0))
    assert traj.event.kind is EventKind.REACHED_T_END
    target = slice_cosh(0.5, 3, 1.0)
    assert target == pytest.approx(0.0259409, abs=1e-7)
    assert np.max(np.abs(traj.final.u - target)) <= 1e-5
    for row in traj.series:
        assert row.max_u - row.min_u <= 1e-12
        assert abs(row.max_u - slice_cosh(0.5, 3, row.t)) <= 1e-9


def test_run_fixed_point(s3, cosh1):
    traj = run(constant_profile(s3, 0.0, 64), cosh1, SolverConfig(64, 10.0, output_every=0.5))
    assert traj.event.kind is EventKind.REACHED_T_END
    assert traj.event.t == 10.0
    assert np.max(np.abs(traj.final.u)) <= 1e-12


def test_domain_exit_precheck(s3):
    w = power_warp(0.0, 0.5)
    p = initial_cosine(s3, -0.3, 0.3, 1, 32)  # reaches z = 0 at x = 0
    traj = run(p, w, SolverConfig(32, 1.0))
    assert traj.event.kind is EventKind.DOMAIN_EXIT and traj.event.t == 0.0
    assert traj.steps == 0 and len(traj.series) == 1


def test_domain_exit_precheck_within_margin(s3):
    w = power_warp(0.0, 0.5)
    traj = run(constant_profile(s3, -1e-10, 16), w, SolverConfig(16, 1.0))
    assert traj.event.kind is EventKind.DOMAIN_EXIT and traj.event.t == 0.0


def test_domain_exit_during_run(s3):
    # r = exp(-z): slices rise at speed n and leave (-1, 1) near t = 1/3
    w = tabulated_warp(lambda z: np.exp(-z), lambda z: -np.exp(-z), np.exp, -1.0, 1.0)
    traj = run(constant_profile(s3, 0.0, 16), w, SolverConfig(16, 1.0, output_every=0.01))
    assert traj.event.kind is EventKind.DOMAIN_EXIT
    assert traj.event.t == pytest.approx(1 / 3, abs=1e-3)
    assert traj.series[-1].t == traj.event.t


def test_gradient_blowup_event(s3, cosh1):
    cfg = SolverConfig(64, 1.0, grad_blowup_threshold=0.01)
    traj = run(initial_cosine(s3, 0.0, 0.2, 1, 64), cosh1, cfg)
    assert traj.event.kind is EventKind.GRADIENT_BLOWUP
    assert traj.event.t == 0.0


def test_step_underflow_event(s3):
    w = tabulated_warp(lambda z: np.full_like(z, 1e-6), np.zeros_like, np.zeros_like)
    traj = run(initial_cosine(s3, 0.0, 1e-3, 1, 16), w, SolverConfig(16, 1.0))
    assert traj.event.kind is EventKind.STEP_UNDERFLOW


def test_series_invariants(cp2, cosh1):
    traj = run(initial_cosine(cp2, 0.1, 0.1, 2, 64), cosh1, SolverConfig(64, 0.5, output_every=0.1))
    t = traj.times
    assert t[0] == 0.0 and np.all(np.diff(t) > 0)
    np.testing.assert_allclose(t, [0, 0.1, 0.2, 0.3, 0.4, 0.5], atol=1e-15)
    assert np.all(traj.column("phi") >= 0)
    th = traj.column("min_theta")
    assert np.all((th > 0) & (th <= 1))


def test_snapshot_times(s3, cosh1):
    cfg = SolverConfig(32, 0.3, output_every=0.1, snapshot_times=(0.15, 0.2))
    traj = run(initial_cosine(s3, 0.0, 0.2, 1, 32), cosh1, cfg)
    assert [t for t, _ in traj.snapshots] == [0.0, 0.15, 0.2, 0.3]
    # a snapshot off the output cadence is not a series row
    assert 0.15 not in traj.times


def test_tabulated_cosh_matches_builtin(s3, cosh1):
    tab = tabulated_warp(np.cosh, np.sinh, np.cosh, -1.0, 1.0)
    cfg = SolverConfig(32, 0.2)
    p = initial_cosine(s3, 0.1, 0.2, 1, 32)
    a = run(p, cosh1, cfg)
    b = run(p, tab, cfg)
    assert a.steps == b.steps
    np.testing.assert_allclose(a.final.u, b.final.u, rtol=0, atol=1e-14)


def test_reflection_symmetry_sphere():
    s = make_space("sphere", 4)
    cfg = SolverConfig(64, 0.5, output_every=0.05, snapshot_times=(0.1, 0.2, 0.3, 0.4))
    traj = run(initial_cosine(s, 0.2, 0.3, 2, 64), cosh_warp(1.0), cfg)
    assert traj.event.kind is EventKind.REACHED_T_END
    for _, p in traj.snapshots:
        assert np.max(np.abs(p.u - p.u[::-1])) <= 1e-10


def test_comparison_sandwich(s3, cosh1):
    p = initial_cosine(s3, 0.1, 0.25, 3, 64)
    traj = run(p, cosh1, SolverConfig(64, 1.0, output_every=0.05))
    t = traj.times
    lo = slice_cosh(p.u.min(), 3, t)
    hi = slice_cosh(p.u.max(), 3, t)
    assert np.all(traj.column("min_u")[1:] > lo[1:])
    assert np.all(traj.column("max_u")[1:] < hi[1:])


def test_spatial_convergence(s3, cosh1):
    sols = {}
    for N in (32, 64, 128, 256):
        traj = run(initial_cosine(s3, 0.0, 0.2, 1, N), cosh1, SolverConfig(N, 0.1))
        sols[N] = traj.final.u
    errs = [np.max(np.abs(sols[N] - sols[256][:: 256 // N])) for N in (32, 64, 128)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.8)


def test_series_csv(tmp_path, s3, cosh1):
    traj = run(initial_cosine(s3, 0.0, 0.2, 1, 16), cosh1, SolverConfig(16, 0.1))
    path = tmp_path / "series.csv"
    write_series_csv(path, traj)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,min_u,max_u,phi,min_theta,event"
    assert all(line.endswith(",") for line in lines[1:-1])
    assert lines[-1].endswith(",ReachedTEnd")
    assert float(lines[-1].split(",")[2]) == traj.series[-1].max_u


def test_snapshot_files(tmp_path, s3, cosh1):
    traj = run(initial_cosine(s3, 0.0, 0.2, 1, 16), cosh1, SolverConfig(16, 0.1))
    paths = write_snapshots(tmp_path, traj)
    assert [p.name for p in paths] == ["profile_t0.0.csv", "profile_t0.1.csv"]
    assert snapshot_filename(2.5) == "profile_t2.5.csv"


def test_grid_mismatch(s3, cosh1):
    with pytest.raises(ValueError):
        run(initial_cosine(s3, 0.0, 0.2, 1, 16), cosh1, SolverConfig(32, 0.1))


def test_profile_is_not_mutated(s3, cosh1):
    p = initial_cosine(s3, 0.0, 0.2, 1, 16)
    before = p.u.copy()
    run(p, cosh1, SolverConfig(16, 0.1))
    assert np.array_equal(p.u, before)
    assert isinstance(p, Profile)
