"""The deformation parameter q = e^h and q-number kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Real

from .errors import ZeroDenominatorOrder


class QKind(Enum):
    ZERO = "zero"
    ONE = "one"
    GENERIC = "generic"


@dataclass(frozen=True)
class QParam:
    """A real deformation parameter q >= 0.

    ``h`` is ln q for generic values, 0.0 at q = 1 and ``-inf`` at q = 0.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"q must be a finite real >= 0, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def kind(self) -> QKind:
        if self.value == 0.0:
            return QKind.ZERO
        if self.value == 1.0:
            return QKind.ONE
        return QKind.GENERIC

    @property
    def h(self) -> float:
        if self.value == 0.0:
            return -math.inf
        return math.log(self.value)

    @property
    def is_zero(self) -> bool:
        return self.kind is QKind.ZERO

    @property
    def is_one(self) -> bool:
        return self.kind is QKind.ONE

    @property
    def is_generic(self) -> bool:
        return self.kind is QKind.GENERIC

    def inverse(self) -> "QParam":
        if self.is_zero:
            raise ZeroDivisionError("q = 0 has no inverse")
        return QParam(1.0 / self.value)

    def phi(self) -> float:
        """The angle with q = tan(phi), in [0, pi/2)."""
        return math.atan(self.value)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return repr(self.value)


def as_q(q) -> QParam:
    if isinstance(q, QParam):
        return q
    if isinstance(q, (Real, Fraction)):
        return QParam(float(q))
    raise TypeError(f"cannot interpret {q!r} as a q parameter")


def qnumber(x, q) -> float:
    """{x} = q^x - q^-x."""
    q = as_q(q)
    if q.is_zero:
        raise ZeroDenominatorOrder("{x} diverges at q = 0")
    return 2.0 * math.sinh(float(x) * q.h)


def bracket(x, q) -> float:
    """[x] = q^x + q^-x."""
    q = as_q(q)
    if q.is_zero:
        raise ZeroDenominatorOrder("[x] diverges at q = 0")
    return 2.0 * math.cosh(float(x) * q.h)


def qnumber_ratio(k, m, q, allow_zero: bool = False) -> float:
    """{k}/{m}, continuous through q = 1 where it equals k/m.

    At q = 0 the ratio behaves like -sign(k)/-sign(m) * q^(|m|-|k|); equal
    orders give the sign ratio, a vanishing limit is returned only when
    ``allow_zero`` is set and a divergent one always raises.
    """
    k, m = Fraction(k), Fraction(m)
    if m == 0:
        raise ZeroDivisionError("{m} with m = 0 is identically zero")
    q = as_q(q)
    if q.is_one:
        return float(k / m)
    if q.is_zero:
        if k == 0:
            if allow_zero:
                return 0.0
            raise ZeroDenominatorOrder(f"{{0}}/{{{m}}} vanishes identically")
        order = abs(m) - abs(k)
        sign = (1 if k > 0 else -1) * (1 if m > 0 else -1)
        if order == 0:
            return float(sign)
        if order > 0 and allow_zero:
            return 0.0
        raise ZeroDenominatorOrder(
            f"{{{k}}}/{{{m}}} at q = 0 has leading order q^{order}")
    h = q.h
    return math.sinh(float(k) * h) / math.sinh(float(m) * h)
