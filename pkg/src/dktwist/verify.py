"""Identity suite for the twist: residuals, tolerances and a report."""

from __future__ import annotations

import os
from fractions import Fraction
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from .algebra import SeriesSpec, conjugate_index
from .linops import leg_permute, orthogonality_defect, residual
from .qparam import QParam, as_q
from .rmatrices import (
    QbarOperator,
    _pair_partition,
    classical_r,
    deformed_projectors,
    delta_cartan,
    exponent_model,
    r_bar,
    swap_pair,
    ybe_residual,
)
from .twist import FMatrix, compose, crystal_basis, f_interval

TOL_ALGEBRAIC = 1e-10
TOL_SPECTRAL = 1e-9
TOL_TRIPLE = 1e-8
COMPOSITION_MIDPOINTS = (0.0, 0.2, 5.0)
ENV_TOL = "DKTWIST_TOL"


def tolerance_scale() -> float:
    """Multiplier from DKTWIST_TOL (default 1); values below 1 are rejected."""
    raw = os.environ.get(ENV_TOL, "").strip()
    if not raw:
        return 1.0
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{ENV_TOL} must be a number, got {raw!r}") from None
    if not value >= 1.0:
        raise ValueError(f"{ENV_TOL} is a multiplier >= 1, got {raw!r}")
    return value


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    q: float | None = None

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


@dataclass(frozen=True)
class VerificationReport:
    spec: SeriesSpec
    q_grid: tuple[float, ...]
    checks: tuple[Check, ...]

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = [f"{self.spec}: {'PASS' if self.overall else 'FAIL'}"]
        for c in self.checks:
            where = "" if c.q is None else f" q={c.q!r}"
            lines.append(f"  {'ok  ' if c.passed else 'FAIL'} {c.name}{where}: "
                         f"{c.residual:.3e} <= {c.tolerance:.1e}")
        return "\n".join(lines)


def _matrix(f) -> np.ndarray:
    return f.matrix if isinstance(f, FMatrix) else np.asarray(f, dtype=float)


def check_orthogonality(f) -> float:
    """||F^T F - I||_inf (max-abs entry)."""
    return orthogonality_defect(_matrix(f))


def check_twist_r(spec: SeriesSpec, q, r_matrix: np.ndarray | None = None) -> float:
    """|F_21 R F_12^-1 - R-bar| with R = sum q^(l_k/2) P_k and F = F^[q1]."""
    q = as_q(q)
    if r_matrix is None:
        r_matrix = r_bar(spec, q).matrix
    f = f_interval(spec, q, 1.0).matrix
    r = classical_r(exponent_model(spec), q)
    return residual(swap_pair(f, spec.n) @ r @ f.T, r_matrix)


def check_cartan_commute(f, spec: SeriesSpec) -> float:
    """max_i ||[F, Delta(H_i)]||."""
    m = _matrix(f)
    legs = int(round(np.log(m.shape[0]) / np.log(spec.n)))
    return max(residual(m @ h, h @ m) for h in delta_cartan(spec, legs))


def check_intertwine(f, spec: SeriesSpec, q) -> float:
    """max_k ||Pbar_k F - F P_k|| with Pbar_k clustered from Q-bar."""
    q = as_q(q)
    m = _matrix(f)
    deformed = deformed_projectors(spec, q)
    classical = exponent_model(spec).projectors
    return max(residual(pb @ m, m @ p) for pb, p in zip(deformed, classical))


def crystal_table(spec: SeriesSpec, c_sign: float = -1.0) -> dict[str, np.ndarray]:
    """Signed product vectors of the q = 0 table, keyed by closed-form tag.

    ``c_sign`` is the sign of n-(k) in the C series. The table uses -1;
    other values serve as a negative control.
    """
    n = spec.n
    d = n * n

    def e(i, j):
        v = np.zeros(d)
        v[(i - 1) * n + j - 1] = 1.0
        return v

    out = {}
    paired = spec.series != "A"
    for i in range(1, n + 1):
        if not (paired and i == conjugate_index(i, n)):
            out[f"ii({i})"] = e(i, i)
        for j in range(i + 1, n + 1):
            if paired and j == conjugate_index(i, n):
                continue
            out[f"ij+({i},{j})"] = e(j, i)
            out[f"ij-({i},{j})"] = e(i, j)
    if not paired:
        return out
    s = spec.s
    bar = lambda i: conjugate_index(i, n)  # noqa: E731
    if spec.series == "B":
        plus = minus = [Fraction(2 * t + 1, 2) for t in range(int(s))]
    elif spec.series == "D":
        plus = list(range(1, int(s)))
        minus = list(range(0, int(s)))
    else:
        plus = list(range(1, int(s)))
        minus = list(range(2, int(s)))
    sign = c_sign if spec.series == "C" else 1.0
    for k in plus:
        out[f"n+({k})"] = e(bar(int(s - k)), int(s - k))
    for k in minus:
        out[f"n-({k})"] = sign * e(int(s - k + 1), bar(int(s - k + 1)))
    out["nTr"] = e(1, n)
    return out


def check_crystal(spec: SeriesSpec, c_sign: float = -1.0) -> float:
    """Max distance between crystal_basis and the transcribed q = 0 table."""
    table = crystal_table(spec, c_sign)
    basis = crystal_basis(spec)
    tags = {lab.tag: vec for lab, vec in basis.items()}
    if set(tags) != set(table):
        return float("inf")
    return max(float(np.max(np.abs(tags[t] - table[t]))) for t in table)


def check_ybe(r: np.ndarray, n: int) -> float:
    return ybe_residual(r, n)


def check_spectrum(spec: SeriesSpec, q) -> float:
    """Max |h| * |l_bar - l| over matched exponent multisets of Q-bar and Q.

    This is the relative error of the eigenvalues q^l, computed per weight
    block so that strongly graded blocks stay accurate.
    """
    q = as_q(q)
    model = exponent_model(spec)
    op = QbarOperator(spec, q)
    found = []
    for idx in _pair_partition(spec):
        for key, vecs in op.clusters(idx):
            found.extend([key] * vecs.shape[1])
    expected = []
    for l, rank in zip(model.exponents, model.ranks):
        expected.extend([l] * rank)
    if len(found) != len(expected):
        return float("inf")
    return abs(q.h) * float(np.max(np.abs(np.sort(found) - np.sort(expected))))


def check_composition(spec: SeriesSpec, q, midpoints: Iterable[float] = COMPOSITION_MIDPOINTS) -> float:
    """max over q' of ||F^[q q'] F^[q' 1] - F^[q 1]||."""
    direct = f_interval(spec, q, 1.0)
    worst = 0.0
    for mid in midpoints:
        path = compose(f_interval(spec, q, mid), f_interval(spec, mid, 1.0))
        worst = max(worst, residual(path.matrix, direct.matrix))
    return worst


def check_swap(spec: SeriesSpec, q) -> float:
    """||F(1/q) - F(q) with both tensor legs exchanged||."""
    q = as_q(q)
    f = f_interval(spec, q, 1.0).matrix
    fi = f_interval(spec, q.inverse(), 1.0).matrix
    return residual(fi, leg_permute(f, (spec.n, spec.n), (1, 0)))


def run_suite(
    spec: SeriesSpec,
    q_grid: Iterable[float],
    tamper: Callable[[np.ndarray], np.ndarray] | None = None,
) -> VerificationReport:
    """Run every pair identity over ``q_grid``.

    ``tamper`` may replace the normalized R-bar before it enters the
    Yang-Baxter and twist checks, for negative controls. R-bar based
    tolerances scale with max(1, max|R-bar|) because the entries grow like
    q^-(n-1) at small q.
    """
    scale = tolerance_scale()
    grid = tuple(float(as_q(q).value) for q in q_grid)
    checks = [Check("crystal_table", check_crystal(spec), 0.0)]
    for qv in grid:
        q = QParam(qv)
        f = f_interval(spec, q, 1.0)
        checks.append(Check("orthogonality", check_orthogonality(f), TOL_ALGEBRAIC * scale, qv))
        checks.append(Check("cartan_commute", check_cartan_commute(f, spec), TOL_ALGEBRAIC * scale, qv))
        if not q.is_zero:
            checks.append(Check("composition", check_composition(spec, q), TOL_ALGEBRAIC * scale, qv))
            checks.append(Check("leg_swap", check_swap(spec, q), TOL_ALGEBRAIC * scale, qv))
        if not q.is_generic:
            continue
        r = r_bar(spec, q).matrix
        if tamper is not None:
            r = tamper(r.copy())
        size = max(1.0, float(np.max(np.abs(r))))
        checks.append(Check("yang_baxter", check_ybe(r, spec.n), TOL_ALGEBRAIC * scale * size ** 3, qv))
        checks.append(Check("twist_r", check_twist_r(spec, q, r), TOL_ALGEBRAIC * scale * size, qv))
        checks.append(Check("intertwine", check_intertwine(f, spec, q), TOL_SPECTRAL * scale, qv))
        checks.append(Check("spectrum", check_spectrum(spec, q), TOL_SPECTRAL * scale, qv))
    return VerificationReport(spec, grid, tuple(checks))
