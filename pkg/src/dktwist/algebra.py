"""Classical series data for the defining representations of A, B, C, D.

Basis indices are 1-based throughout, matching the usual e_1, ..., e_n
notation; conversion to array offsets happens at the numpy boundary.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

Weight = tuple[Fraction, ...]

_SPEC_RE = re.compile(r"^\s*([ABCDabcd])\s*(\d+)\s*$")


@dataclass(frozen=True)
class SeriesSpec:
    """A classical Lie series and its rank.

    ``n`` is the dimension of the defining representation and ``s`` the
    half-integer used to index the zero-weight pair sector (n/2 for B and D,
    n/2 + 1 for C).
    """

    series: str
    rank: int

    def __post_init__(self):
        series = self.series.upper()
        object.__setattr__(self, "series", series)
        if series not in "ABCD" or len(series) != 1:
            raise ValueError(f"unknown series {self.series!r}")
        if not isinstance(self.rank, int) or self.rank < 1:
            raise ValueError(f"rank must be a positive integer, got {self.rank!r}")
        if series == "D" and self.rank < 2:
            raise ValueError("series D needs rank >= 2")

    @property
    def n(self) -> int:
        if self.series == "A":
            return self.rank + 1
        if self.series == "B":
            return 2 * self.rank + 1
        return 2 * self.rank

    @property
    def s(self) -> Fraction | None:
        if self.series in "BD":
            return Fraction(self.n, 2)
        if self.series == "C":
            return Fraction(self.n, 2) + 1
        return None

    @property
    def orthogonal(self) -> bool:
        return self.series in "BD"

    @property
    def symplectic(self) -> bool:
        return self.series == "C"

    def __str__(self) -> str:
        return f"{self.series}{self.rank}"

    @cached_property
    def weights(self) -> tuple[Weight, ...]:
        return tuple(weight_of(self, i) for i in range(1, self.n + 1))


def parse_spec(text: str) -> SeriesSpec:
    """Parse strings such as ``"A1"`` or ``"D3"``."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse series spec {text!r} (expected e.g. 'A1', 'C2')")
    return SeriesSpec(m.group(1), int(m.group(2)))


def conjugate_index(i: int, n: int) -> int:
    if not 1 <= i <= n:
        raise IndexError(f"basis index {i} out of range 1..{n}")
    return n + 1 - i


def _cartan_diagonals(spec: SeriesSpec) -> list[list[int]]:
    n = spec.n
    diags = []
    for r in range(1, spec.rank + 1):
        d = [0] * n
        if spec.series == "A":
            d[r - 1], d[r] = 1, -1
        else:
            d[r - 1] = 1
            d[conjugate_index(r, n) - 1] = -1
        diags.append(d)
    return diags


def cartan_generators(spec: SeriesSpec) -> list[np.ndarray]:
    """Diagonal Cartan generators on the defining representation.

    A uses Chevalley differences E_ii - E_{i+1,i+1}; B, C, D use
    E_ii - E_{ibar,ibar} for i = 1..rank.
    """
    return [np.diag(np.array(d, dtype=float)) for d in _cartan_diagonals(spec)]


def weight_of(spec: SeriesSpec, i: int) -> Weight:
    """Exact joint eigenvalues of the Cartan generators on e_i."""
    if not 1 <= i <= spec.n:
        raise IndexError(f"basis index {i} out of range 1..{spec.n}")
    return tuple(Fraction(d[i - 1]) for d in _cartan_diagonals(spec))


def add_weights(*ws: Weight) -> Weight:
    return tuple(sum(parts, Fraction(0)) for parts in zip(*ws))


def format_weight(w: Weight) -> str:
    return "(" + ",".join(str(x) for x in w) + ")"
