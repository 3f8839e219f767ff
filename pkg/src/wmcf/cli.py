"""Command-line front end.

    wmcf simulate      --config run.json --out results/
    wmcf check-warping --preset theorem_b
    wmcf slice         --config slice.json

Exit statuses
-------------
simulate:       0 reached t_end and all verifications passed, 2 run ended by
                an event, 3 verification failed, 4 I/O error
check-warping:  0 conditions hold, 1 they fail
slice:          0 conservation drift <= 1e-8, 1 otherwise
all commands:   64 invalid configuration or command line
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .compare import ScenarioMismatch, TheoremA, solve_slice, verify_trajectory
from .config import ConfigError, ConstantInit, CosineInit, RunConfig, load_preset, parse_config
from .flow import (
    EventKind,
    constant_profile,
    initial_cosine,
    run,
    write_series_csv,
    write_snapshots,
)
from .warp import check_theorem_A, check_theorem_B

log = logging.getLogger("wmcf")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_EVENT = 2
EXIT_VERIFY = 3
EXIT_IO = 4
EXIT_USAGE = 64

SLICE_DRIFT_TOL = 1e-8


def _setup_logging() -> None:
    level = os.environ.get("WMCF_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")


def _initial_profile(cfg: RunConfig):
    n = cfg.solver.grid_n
    if isinstance(cfg.initial, CosineInit):
        i = cfg.initial
        return initial_cosine(cfg.space, i.c0, i.c1, i.mode, n)
    return constant_profile(cfg.space, cfg.initial.z0, n)


def _fmt(v) -> str:
    return repr(float(v))


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    traj = run(_initial_profile(cfg), cfg.warping, cfg.solver)
    report = None
    if cfg.scenario is not None:
        try:
            report = verify_trajectory(traj, cfg.warping, cfg.space, cfg.scenario,
                                       cfg.theta_floor)
        except ScenarioMismatch as exc:
            if traj.event.kind is EventKind.REACHED_T_END:
                raise ConfigError("$.scenario", str(exc)) from None
            # the run stopped early; there is nothing meaningful to verify
            log.info("verification skipped: %s", exc)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_series_csv(out / "series.csv", traj)
        write_snapshots(out, traj)
        (out / "config.json").write_text(json.dumps(cfg.source, indent=2, sort_keys=True) + "\n")
        if report is not None:
            (out / "verification.json").write_text(
                json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"error: cannot write results to {out}: {exc}", file=sys.stderr)
        return EXIT_IO

    last = traj.series[-1]
    print(f"event: {traj.event.kind.value} at t={traj.event.t!r} "
          f"({traj.steps} steps, {traj.backend} kernels)")
    print(f"final: min_u={last.min_u!r} max_u={last.max_u!r} phi={last.phi!r}")
    if traj.event.kind is not EventKind.REACHED_T_END:
        return EXIT_EVENT
    if report is not None:
        for name in ("comparison", "bound"):
            res = getattr(report, name)
            print(f"{name}: {res.status} (worst margin {res.worst_margin!r} at t={res.worst_t!r})")
        print(f"theta: {'ok' if report.theta.ok else 'below floor'} "
              f"(min {report.theta.min_theta!r}, floor {report.theta.floor!r})")
        if not report.ok:
            return EXIT_VERIFY
    return EXIT_OK


def cmd_check_warping(cfg: RunConfig) -> int:
    sc = cfg.scenario
    if sc is None:
        raise ConfigError("$.scenario", "check-warping needs a theorem_a or theorem_b scenario")
    w = cfg.warping
    if isinstance(sc, TheoremA):
        if not np.isfinite(w.z_hi) or w.z_lo != -w.z_hi:
            raise ConfigError("$.warping", "theorem_a needs a warping domain (-a, a)")
        rep = check_theorem_A(w, w.z_hi, cfg.check.num_samples)
    else:
        lo = cfg.check.z_probe_lo
        if lo is None:
            lo = min(sc.a1, w.z_hi) - 10.0
        rep = check_theorem_B(w, sc.alpha, lo, w.z_hi, cfg.check.num_samples)
    print(json.dumps(rep.to_dict(), indent=2))
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_slice(cfg: RunConfig, out: Path) -> int:
    if not isinstance(cfg.initial, ConstantInit):
        raise ConfigError("$.initial.type", "slice needs constant initial data")
    w = cfg.warping
    sol = solve_slice(w, cfg.space.n, cfg.initial.z0, cfg.slice.phibar0, cfg.solver.t_end,
                      cfg.slice.rel_tol, output_every=cfg.solver.output_every)
    prod = sol.conserved_product(w)
    drift = float(np.max(np.abs(prod / prod[0] - 1.0)))
    lines = ["t,Z,phibar,conserved_product"]
    for s, c in zip(sol, prod):
        lines.append(",".join(_fmt(v) for v in (s.t, s.Z, s.phibar, c)))
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "slice.csv").write_text("\n".join(lines) + "\n")
    except OSError as exc:
        print(f"error: cannot write results to {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    if sol.domain_exit:
        print(f"slice left the warping domain at t={sol[-1].t!r}")
    print(f"Z({sol[-1].t!r}) = {sol[-1].Z!r}")
    print(f"max relative conservation drift: {drift:.3e}")
    return EXIT_OK if drift <= SLICE_DRIFT_TOL else EXIT_FAILED


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wmcf", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("simulate", "check-warping", "slice"):
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path, help="JSON run configuration")
        src.add_argument("--preset", choices=["theorem_a", "theorem_b"],
                         help="bundled acceptance scenario")
        p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        text = load_preset(args.preset) if args.preset else args.config.read_text()
    except OSError as exc:
        print(f"error: cannot read configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = parse_config(text)
        out = args.out if args.out is not None else Path(cfg.output_dir)
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        if args.command == "check-warping":
            return cmd_check_warping(cfg)
        return cmd_slice(cfg, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
