"""Reduced isotropy-invariant graphical mean curvature flow in warped products
over rank-one compact symmetric spaces."""

from ._backend import NAME as backend
from .space import SpaceError, SpaceKind, SymmetricSpace, make_space
from .warp import (
    ConditionReport,
    DomainExitError,
    WarpingFunction,
    check_theorem_A,
    check_theorem_B,
    cosh_warp,
    power_warp,
    tabulated_warp,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionReport",
    "DomainExitError",
    "SpaceError",
    "SpaceKind",
    "SymmetricSpace",
    "WarpingFunction",
    "backend",
    "check_theorem_A",
    "check_theorem_B",
    "cosh_warp",
    "make_space",
    "power_warp",
    "tabulated_warp",
]
