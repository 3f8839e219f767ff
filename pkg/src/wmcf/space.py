"""Rank-one compact symmetric spaces entering the reduced flow equation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class SpaceError(ValueError):
    """Raised for incompatible dimension / root-scale combinations."""


class SpaceKind(enum.Enum):
    SPHERE = "sphere"
    COMPLEX_PROJECTIVE = "cp"
    QUATERNIONIC_PROJECTIVE = "qp"
    CAYLEY_PLANE = "op2"


# kind -> (m_2lambda, offset such that m_lambda = n - offset); Cayley plane is fixed
_M2 = {
    SpaceKind.SPHERE: 0,
    SpaceKind.COMPLEX_PROJECTIVE: 1,
    SpaceKind.QUATERNIONIC_PROJECTIVE: 3,
    SpaceKind.CAYLEY_PLANE: 7,
}


@dataclass(frozen=True)
class SymmetricSpace:
    """Root data of a rank-one space G/K.

    ``L`` is the length of the reduced interval on which the K-invariant
    profile lives; Neumann conditions hold at both of its ends.
    """

    kind: SpaceKind
    n: int
    m_lambda: int
    m_2lambda: int
    lambda1: float
    L: float

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "n": self.n, "lambda1": self.lambda1}

    @classmethod
    def from_dict(cls, d: dict) -> "SymmetricSpace":
        return make_space(d["kind"], d["n"], d.get("lambda1", 1.0))


def _check_dimension(kind: SpaceKind, n: int) -> None:
    if kind is SpaceKind.SPHERE:
        if n < 2:
            raise SpaceError(f"sphere requires n >= 2, got n={n}")
    elif kind is SpaceKind.COMPLEX_PROJECTIVE:
        if n % 2 != 0:
            raise SpaceError(f"complex projective space requires n even, got n={n}")
        if n < 4:
            raise SpaceError(f"complex projective space requires n >= 4, got n={n}")
    elif kind is SpaceKind.QUATERNIONIC_PROJECTIVE:
        if n % 4 != 0:
            raise SpaceError(
                f"quaternionic projective space requires n divisible by 4, got n={n}"
            )
        if n < 8:
            raise SpaceError(f"quaternionic projective space requires n >= 8, got n={n}")
    elif n != 16:
        raise SpaceError(f"Cayley plane requires n = 16, got n={n}")


def make_space(kind: SpaceKind | str, n: int, lambda1: float = 1.0) -> SymmetricSpace:
    """Build the root data for ``kind`` in dimension ``n``.

    >>> make_space("cp", 4).m_2lambda
    1
    """
    if isinstance(kind, str):
        try:
            kind = SpaceKind(kind)
        except ValueError:
            names = ", ".join(k.value for k in SpaceKind)
            raise SpaceError(f"unknown space kind {kind!r} (expected one of {names})") from None
    if isinstance(n, bool) or int(n) != n:
        raise SpaceError(f"n must be an integer, got {n!r}")
    n = int(n)
    _check_dimension(kind, n)
    lambda1 = float(lambda1)
    if not (lambda1 > 0.0) or not math.isfinite(lambda1):
        raise SpaceError(f"lambda1 must be positive and finite, got {lambda1}")

    m2 = _M2[kind]
    m1 = 8 if kind is SpaceKind.CAYLEY_PLANE else n - 1 - m2
    L = math.pi / (2.0 * lambda1) if m2 > 0 else math.pi / lambda1
    return SymmetricSpace(kind, n, m1, m2, lambda1, L)
