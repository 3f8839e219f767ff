"""JSON run configuration: parsing, validation and defaults.

Every section is optional; omitted sections fall back to the symmetric
scenario (S^3, cosh warping on (-1, 1), u0 = 0.2 cos x).  Unknown keys are
rejected at every level.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .compare import TheoremA, TheoremB
from .flow import SolverConfig
from .space import SpaceError, SymmetricSpace, make_space
from .warp import WarpingFunction, cosh_warp, power_warp


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class CosineInit:
    c0: float = 0.0
    c1: float = 0.2
    mode: int = 1


@dataclass(frozen=True)
class ConstantInit:
    z0: float = 0.0


@dataclass(frozen=True)
class SliceOptions:
    phibar0: float = 1.0
    rel_tol: float = 1e-10


@dataclass(frozen=True)
class CheckOptions:
    num_samples: int = 1001
    z_probe_lo: float | None = None


@dataclass(frozen=True)
class RunConfig:
    space: SymmetricSpace
    warping: WarpingFunction
    initial: CosineInit | ConstantInit
    solver: SolverConfig
    scenario: TheoremA | TheoremB | None = None
    theta_floor: float = 0.0
    output_dir: str = "wmcf_out"
    slice: SliceOptions = field(default_factory=SliceOptions)
    check: CheckOptions = field(default_factory=CheckOptions)
    source: dict = field(default_factory=dict, compare=False)


# --- field readers ---------------------------------------------------------


def _section(doc, key, path) -> dict:
    v = doc.get(key, {})
    if not isinstance(v, dict):
        raise ConfigError(f"{path}.{key}", "expected an object")
    return v


def _no_extra(d: dict, allowed: set, path: str) -> None:
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigError(f"{path}.{extra[0]}", "unknown key")


def _num(d, key, path, default):
    v = d.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"{path}.{key}", "must be finite")
    return float(v)


def _int(d, key, path, default):
    v = d.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {v!r}")
    return int(v)


def _str(d, key, path, default):
    v = d.get(key, default)
    if not isinstance(v, str):
        raise ConfigError(f"{path}.{key}", f"expected a string, got {v!r}")
    return v


# --- sections --------------------------------------------------------------


def _space(d, path) -> SymmetricSpace:
    _no_extra(d, {"kind", "n", "lambda1"}, path)
    kind = _str(d, "kind", path, "sphere")
    n = _int(d, "n", path, 3)
    lambda1 = _num(d, "lambda1", path, 1.0)
    try:
        return make_space(kind, n, lambda1)
    except SpaceError as exc:
        raise ConfigError(path, str(exc)) from None


def _warping(d, path) -> WarpingFunction:
    family = _str(d, "family", path, "cosh")
    if family == "cosh":
        _no_extra(d, {"family", "a"}, path)
        a = _num(d, "a", path, 1.0)
        if not a > 0:
            raise ConfigError(f"{path}.a", "a > 0 required for cosh warping")
        return cosh_warp(a)
    if family == "power":
        _no_extra(d, {"family", "a", "beta"}, path)
        a = _num(d, "a", path, 0.0)
        beta = _num(d, "beta", path, 0.5)
        if not beta > 0:
            raise ConfigError(f"{path}.beta", "beta > 0 required")
        return power_warp(a, beta)
    if family == "tabulated":
        raise ConfigError(f"{path}.family", "tabulated warping is library-only")
    raise ConfigError(f"{path}.family", f"unknown family {family!r} (cosh | power)")


def _initial(d, path):
    kind = _str(d, "type", path, "cosine")
    if kind == "cosine":
        _no_extra(d, {"type", "c0", "c1", "mode"}, path)
        mode = _int(d, "mode", path, 1)
        if mode < 1:
            raise ConfigError(f"{path}.mode", "mode >= 1 required")
        return CosineInit(_num(d, "c0", path, 0.0), _num(d, "c1", path, 0.2), mode)
    if kind == "constant":
        _no_extra(d, {"type", "z0"}, path)
        return ConstantInit(_num(d, "z0", path, 0.0))
    raise ConfigError(f"{path}.type", f"unknown initial data {kind!r} (cosine | constant)")


_SOLVER_MSG = {
    "grid_n": "grid_n integer >= 8",
    "t_end": "t_end > 0",
    "safety": "safety in (0,1)",
    "output_every": "output_every > 0",
    "grad_blowup_threshold": "grad_blowup_threshold > 0",
    "domain_margin": "domain_margin >= 0",
}


def _solver(d, path) -> SolverConfig:
    _no_extra(d, set(_SOLVER_MSG) | {"snapshot_times"}, path)
    defaults = SolverConfig()
    values = {
        "grid_n": _int(d, "grid_n", path, defaults.grid_n),
        "t_end": _num(d, "t_end", path, defaults.t_end),
        "safety": _num(d, "safety", path, defaults.safety),
        "output_every": _num(d, "output_every", path, defaults.output_every),
        "grad_blowup_threshold": _num(d, "grad_blowup_threshold", path,
                                      defaults.grad_blowup_threshold),
        "domain_margin": _num(d, "domain_margin", path, defaults.domain_margin),
    }
    checks = {
        "grid_n": values["grid_n"] >= 8,
        "t_end": values["t_end"] > 0,
        "safety": 0 < values["safety"] < 1,
        "output_every": values["output_every"] > 0,
        "grad_blowup_threshold": values["grad_blowup_threshold"] > 0,
        "domain_margin": values["domain_margin"] >= 0,
    }
    for key, good in checks.items():
        if not good:
            raise ConfigError(f"{path}.{key}", _SOLVER_MSG[key])
    snaps = d.get("snapshot_times", [])
    if not isinstance(snaps, list):
        raise ConfigError(f"{path}.snapshot_times", "expected a list of times")
    times = []
    for i, s in enumerate(snaps):
        if isinstance(s, bool) or not isinstance(s, (int, float)):
            raise ConfigError(f"{path}.snapshot_times[{i}]", "expected a number")
        if not 0 <= s <= values["t_end"]:
            raise ConfigError(f"{path}.snapshot_times[{i}]", "snapshot time in [0, t_end]")
        times.append(float(s))
    return SolverConfig(snapshot_times=tuple(times), **values)


def _scenario(d, path):
    kind = _str(d, "type", path, "none")
    if kind == "none":
        _no_extra(d, {"type"}, path)
        return None
    if kind == "theorem_a":
        _no_extra(d, {"type", "a0", "phi0"}, path)
        a0 = _num(d, "a0", path, 0.5)
        if not a0 > 0:
            raise ConfigError(f"{path}.a0", "a0 > 0 required")
        phi0 = None
        if "phi0" in d:
            phi0 = _num(d, "phi0", path, 0.0)
            if phi0 < 0:
                raise ConfigError(f"{path}.phi0", "phi0 >= 0 required")
        return TheoremA(a0, phi0)
    if kind == "theorem_b":
        _no_extra(d, {"type", "alpha", "a1"}, path)
        alpha = _num(d, "alpha", path, 2.0)
        if not alpha > 1:
            raise ConfigError(f"{path}.alpha", "alpha > 1 required")
        return TheoremB(alpha, _num(d, "a1", path, -1.0))
    raise ConfigError(f"{path}.type", f"unknown scenario {kind!r} (none | theorem_a | theorem_b)")


def parse_config(text: str) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("$", "top level must be an object")
    _no_extra(doc, {"space", "warping", "initial", "solver", "scenario",
                    "theta_floor", "output_dir", "slice", "check"}, "$")

    space = _space(_section(doc, "space", "$"), "$.space")
    warping = _warping(_section(doc, "warping", "$"), "$.warping")
    initial = _initial(_section(doc, "initial", "$"), "$.initial")
    solver = _solver(_section(doc, "solver", "$"), "$.solver")
    scenario = _scenario(_section(doc, "scenario", "$"), "$.scenario")

    theta_floor = _num(doc, "theta_floor", "$", 0.0)
    if not 0 <= theta_floor:
        raise ConfigError("$.theta_floor", "theta_floor >= 0 required")
    output_dir = _str(doc, "output_dir", "$", "wmcf_out")

    sl = _section(doc, "slice", "$")
    _no_extra(sl, {"phibar0", "rel_tol"}, "$.slice")
    slice_opts = SliceOptions(_num(sl, "phibar0", "$.slice", 1.0), _num(sl, "rel_tol", "$.slice", 1e-10))
    if not slice_opts.phibar0 > 0:
        raise ConfigError("$.slice.phibar0", "phibar0 > 0 required")
    if not 1e-14 < slice_opts.rel_tol < 1e-3:
        raise ConfigError("$.slice.rel_tol", "rel_tol in (1e-14, 1e-3)")

    ch = _section(doc, "check", "$")
    _no_extra(ch, {"num_samples", "z_probe_lo"}, "$.check")
    num_samples = _int(ch, "num_samples", "$.check", 1001)
    if num_samples < 3:
        raise ConfigError("$.check.num_samples", "num_samples >= 3")
    z_probe_lo = _num(ch, "z_probe_lo", "$.check", 0.0) if "z_probe_lo" in ch else None

    return RunConfig(space, warping, initial, solver, scenario, theta_floor, output_dir,
                     slice_opts, CheckOptions(num_samples, z_probe_lo), doc)


def load_preset(name: str) -> str:
    """Text of a bundled preset (``theorem_a`` or ``theorem_b``)."""
    fname = name if name.endswith(".json") else f"{name}.json"
    return resources.files("wmcf").joinpath("presets", fname).read_text()
