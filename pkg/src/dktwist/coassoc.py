"""Triple tensor products: fused Q-operators, G = F_23 (id x Delta)(F), Phi.

For V x V x V write tau_ij for the classical generator sum_k l_k P_k acting
on legs (i, j). The matrix G23 = F_23 (id x Delta)(F) is orthogonal,
commutes with the triple Cartan action and conjugates

    tau_12 + tau_13  ->  log_q of R_21 R_31 R_13 R_12   (leg 1 around legs 2,3)
    tau_23           ->  log_q of R_32 R_23               (the inner pair)

so it is the unique continuity-normalized map between the joint eigenbases
of these commuting pairs. G12 = F_12 (Delta x id)(F) is the mirror image
with legs (3 | 1 2), and Phi = G23^-1 G12.

Two constructions of the deformed operators are used. While the fused
eigenvalues q^l span at most EXP_ROUTE_DECADES decades the R-products are
formed directly. Beyond that double precision cannot resolve the
eigenvectors of the small eigenvalues, and for the A series
the bounded generator sum l(k, lambda) Pbar_lambda Pbar_k is used instead,
with Pbar_lambda the isotypic projectors (read off from the q-symmetrizers
of legs 12 and 23) and Pbar_k the deformed pair projectors. Eigenvector
signs are carried from q = 1 by continuation in h = ln q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import SeriesSpec
from .errors import InternalConsistency, LimitNotConverged, UnsupportedAtZero, UnsupportedSector
from .linops import eigenclusters, embed
from .qparam import QParam, as_q
from .rmatrices import delta_cartan, exponent_model, qbar, r_bar
from .twist import BasisLabel, FMatrix, LabeledBasis, assemble_f, natural_basis, spectral_basis, weight_partition

EXP_ROUTE_DECADES = 8.0
PATH_STEP = 0.25
LIMIT_PROBES = (1e-5, 1e-6)
LIMIT_TOL = 1e-4

RIGHT, LEFT = "right", "left"
_LEGS = {
    # (fused legs for the classical generator, inner pair, R-product order)
    RIGHT: (((0, 1), (0, 2)), (1, 2), ((1, 0), (2, 0), (0, 2), (0, 1))),
    LEFT: (((0, 2), (1, 2)), (0, 1), ((2, 1), (2, 0), (0, 2), (1, 2))),
}


@dataclass(frozen=True, eq=False)
class TripleOperators:
    """Classical and deformed commuting pairs on the triple product.

    With ``route == "exp"`` the deformed matrices are the Q-operators
    themselves (eigenvalues q^l); with ``route == "log"`` they are bounded
    generators whose eigenvalues are the exponents l.
    """

    spec: SeriesSpec
    q: QParam
    side: str
    qbar_fused: np.ndarray
    qbar_inner: np.ndarray
    q_fused: np.ndarray
    q_inner: np.ndarray
    route: str = "exp"


def _classical_generators(spec: SeriesSpec, side: str):
    tau = exponent_model(spec).tau()
    n = spec.n
    fused_legs, inner, _ = _LEGS[side]
    t_fused = sum(embed(tau, n, legs, 3) for legs in fused_legs)
    t_inner = embed(tau, n, inner, 3)
    return t_fused, t_inner


def _power(gen: np.ndarray, q: QParam) -> np.ndarray:
    w, v = np.linalg.eigh(gen)
    return (v * q.value ** w) @ v.T


def _fused_exp(spec: SeriesSpec, q: QParam, side: str) -> TripleOperators:
    n = spec.n
    _, inner, order = _LEGS[side]
    t_fused, t_inner = _classical_generators(spec, side)
    r = r_bar(spec, q).matrix
    prod = np.eye(n ** 3)
    for legs in order:
        prod = prod @ embed(r, n, legs, 3)
    qb_inner = embed(qbar(spec, q), n, inner, 3)
    return TripleOperators(spec, q, side, 0.5 * (prod + prod.T), qb_inner,
                           _power(t_fused, q), _power(t_inner, q), "exp")


def _pair_projector(spec: SeriesSpec, q: QParam, sector: str) -> np.ndarray:
    basis = natural_basis(spec, q)
    ell = exponent_model(spec).exponent_of(sector)
    cols = [c for c, lab in enumerate(basis.labels) if abs(lab.exponents[0] - ell) < 1e-9]
    v = basis.vectors[:, cols]
    return v @ v.T


def _isotypic_projectors(spec: SeriesSpec, q: QParam) -> list[np.ndarray]:
    """Projectors onto the (3), (21), (111) components of the A-series cube."""
    n = spec.n
    ps = _pair_projector(spec, q, "sym")
    m = embed(ps, n, (0, 1), 3) + embed(ps, n, (1, 2), 3)
    groups = {"3": [], "21": [], "111": []}
    for lam, vecs in eigenclusters(m, 1e-8):
        # (21) eigenvalues are 1 +- 1/[2]_q, inside [1/2, 3/2]
        name = "3" if lam > 1.75 else ("111" if lam < 0.25 else "21")
        groups[name].append(vecs)
    out = []
    for name in ("3", "21", "111"):
        if groups[name]:
            v = np.hstack(groups[name])
            out.append(v @ v.T)
    return out


def _fused_log(spec: SeriesSpec, q: QParam, side: str) -> TripleOperators:
    if spec.series != "A":
        raise UnsupportedSector(
            f"{spec} at q={q}: fused Q-operators are too ill-conditioned and no bounded "
            "isotypic route is available outside the A series")
    n = spec.n
    model = exponent_model(spec)
    _, inner, _ = _LEGS[side]
    t_fused, t_inner = _classical_generators(spec, side)
    one = QParam(1.0)
    iso_c = _isotypic_projectors(spec, one)
    iso_q = _isotypic_projectors(spec, q)
    if len(iso_c) != len(iso_q):
        raise InternalConsistency("isotypic decompositions differ between q = 1 and q")
    lbar_fused = np.zeros((n ** 3, n ** 3))
    tbar_inner = np.zeros((n ** 3, n ** 3))
    for name, ell in zip(model.names, model.exponents):
        pk_c = embed(_pair_projector(spec, one, name), n, inner, 3)
        pk_q = embed(_pair_projector(spec, q, name), n, inner, 3)
        tbar_inner += ell * pk_q
        for pl_c, pl_q in zip(iso_c, iso_q):
            joint = pl_c @ pk_c
            rank = np.trace(joint)
            if rank < 0.5:
                continue
            value = float(np.trace(t_fused @ joint) / rank)
            if np.max(np.abs(t_fused @ joint - value * joint)) > 1e-9:
                raise InternalConsistency("fused generator is not scalar on an isotypic sector")
            lbar_fused += value * (pl_q @ pk_q)
    lbar_fused = 0.5 * (lbar_fused + lbar_fused.T)
    return TripleOperators(spec, q, side, lbar_fused, tbar_inner, t_fused, t_inner, "log")


@lru_cache(maxsize=None)
def _fused_span(spec: SeriesSpec, side: str) -> float:
    w = np.linalg.eigvalsh(_classical_generators(spec, side)[0])
    return float(w[-1] - w[0])


def _route(spec: SeriesSpec, q: QParam, side: str) -> str:
    decades = abs(q.h) * _fused_span(spec, side) / math.log(10)
    return "exp" if decades <= EXP_ROUTE_DECADES else "log"


def fused_operators(spec: SeriesSpec, q, side: str = RIGHT) -> TripleOperators:
    q = as_q(q)
    if q.is_zero:
        raise UnsupportedAtZero("fused operators diverge at q = 0; use racah_coboundary for the limit")
    if side not in _LEGS:
        raise ValueError(f"side must be {RIGHT!r} or {LEFT!r}")
    if q.is_one:
        eye = np.eye(spec.n ** 3)
        return TripleOperators(spec, q, side, eye, eye.copy(), eye.copy(), eye.copy())
    if _route(spec, q, side) == "exp":
        return _fused_exp(spec, q, side)
    return _fused_log(spec, q, side)


def fused_operators_right(spec: SeriesSpec, q) -> TripleOperators:
    """Operators for G23: leg 1 fused around the pair (2, 3)."""
    return fused_operators(spec, q, RIGHT)


def fused_operators_left(spec: SeriesSpec, q) -> TripleOperators:
    """Operators for G12: leg 3 fused around the pair (1, 2)."""
    return fused_operators(spec, q, LEFT)


@lru_cache(maxsize=None)
def _triple_partition(spec: SeriesSpec):
    return weight_partition(spec, 3)


@lru_cache(maxsize=None)
def classical_triple_basis(spec: SeriesSpec, side: str) -> LabeledBasis:
    """Joint eigenbasis of the classical fused and inner generators at q = 1.

    Each vector's largest entry is made positive; G does not depend on this
    choice since the deformed vectors inherit it by continuation.
    """
    t_fused, t_inner = _classical_generators(spec, side)
    basis = spectral_basis([t_fused, t_inner], _triple_partition(spec), QParam(1.0), key=lambda x: x)
    labels = tuple(BasisLabel(l.weight, tuple(_clean(e) for e in l.exponents), side, l.tiebreak)
                   for l in basis.labels)
    return LabeledBasis(QParam(1.0), labels, basis.vectors)


def _clean(x: float) -> float:
    r = round(x * 36) / 36
    return r if abs(r - x) < 1e-9 else x


def _deformed_basis(spec: SeriesSpec, q: QParam, side: str, reference: LabeledBasis) -> LabeledBasis:
    ops = fused_operators(spec, q, side)
    if ops.route == "exp":
        key = None
    else:
        key = lambda x: x  # noqa: E731
    return spectral_basis([ops.qbar_fused, ops.qbar_inner], _triple_partition(spec), q, reference, key=key)


@lru_cache(maxsize=64)
def _continued_basis(spec: SeriesSpec, qv: float, side: str) -> LabeledBasis:
    """Deformed triple basis, signs carried from q = 1 in steps of h <= PATH_STEP."""
    ref = classical_triple_basis(spec, side)
    q = QParam(qv)
    if q.is_one:
        return ref
    h = q.h
    steps = max(1, math.ceil(abs(h) / PATH_STEP))
    current = ref
    for j in range(1, steps + 1):
        qj = QParam(math.exp(h * j / steps)) if j < steps else q
        try:
            current = _deformed_basis(spec, qj, side, current)
        except UnsupportedSector as exc:
            raise UnsupportedSector(f"{exc} (reached while continuing towards q={q})") from None
    return current


def triple_basis(spec: SeriesSpec, q, side: str = RIGHT) -> LabeledBasis:
    q = as_q(q)
    if q.is_zero:
        raise UnsupportedAtZero("use triple_crystal_basis for q = 0")
    return _continued_basis(spec, q.value, side)


def _g(spec: SeriesSpec, q, side: str) -> FMatrix:
    q = as_q(q)
    return assemble_f(triple_basis(spec, q, side), classical_triple_basis(spec, side), spec, legs=3)


def g_right(spec: SeriesSpec, q) -> FMatrix:
    """G23 = F_23 (id x Delta)(F)."""
    return _g(spec, q, RIGHT)


def g_left(spec: SeriesSpec, q) -> FMatrix:
    """G12 = F_12 (Delta x id)(F)."""
    return _g(spec, q, LEFT)


@dataclass(frozen=True, eq=False)
class Associator:
    spec: SeriesSpec
    q: QParam
    matrix: np.ndarray


def phi(spec: SeriesSpec, q) -> Associator:
    """Phi = [F_23 (id x Delta)(F)]^-1 F_12 (Delta x id)(F)."""
    q = as_q(q)
    gr = g_right(spec, q).matrix
    gl = g_left(spec, q).matrix
    return Associator(spec, q, gr.T @ gl)


def _extrapolate(values: dict[float, np.ndarray]) -> np.ndarray:
    (q1, g1), (q2, g2) = sorted(values.items(), reverse=True)
    gap = float(np.max(np.abs(g1 - g2)))
    if gap > LIMIT_TOL:
        raise LimitNotConverged(f"q -> 0 probes q={q1:g} and q={q2:g} differ by {gap:.2e}")
    return g2 - q2 * (g1 - g2) / (q1 - q2)


@lru_cache(maxsize=None)
def g_limit(spec: SeriesSpec, side: str) -> np.ndarray:
    """lim_{q -> 0} G by linear extrapolation from LIMIT_PROBES."""
    return _extrapolate({p: _g(spec, p, side).matrix for p in LIMIT_PROBES})


def triple_crystal_basis(spec: SeriesSpec, side: str = RIGHT) -> LabeledBasis:
    """The q -> 0 limit of the triple basis, with columns labelled as at q = 1."""
    ref = classical_triple_basis(spec, side)
    order = tuple(sorted(ref.labels, key=BasisLabel.sort_key))
    g0 = g_limit(spec, side)
    vecs = g0 @ ref.ordered(order)
    u, _, vt = np.linalg.svd(vecs)
    return LabeledBasis(QParam(0.0), order, u @ vt)


def racah_coboundary(spec: SeriesSpec) -> np.ndarray:
    """dF^[01] = G23(0) G12(0)^-1."""
    return g_limit(spec, RIGHT) @ np.linalg.inv(g_limit(spec, LEFT))


@dataclass(frozen=True)
class RecouplingBlock:
    """A multiplicity block of dF^[01] read in the crystal product basis.

    Rows follow the right (1(23)) labels, columns the left ((12)3) labels,
    both ordered by descending inner-pair exponent.
    """

    total_exponent: float
    rows: tuple[BasisLabel, ...]
    cols: tuple[BasisLabel, ...]
    row_offsets: tuple[int, ...]
    col_offsets: tuple[int, ...]
    matrix: np.ndarray


def _product_offset(vec: np.ndarray, tol: float = 1e-4) -> int:
    j = int(np.argmax(np.abs(vec)))
    if abs(abs(vec[j]) - 1.0) > tol:
        raise InternalConsistency(f"limit vector is not a product vector (max entry {vec[j]:.6f})")
    return j


def recoupling_blocks(spec: SeriesSpec, weight=None) -> list[RecouplingBlock]:
    """Blocks of dF^[01] between crystal vectors of equal weight and total Casimir.

    The total Casimir exponent of a label is l_fused + l_inner, equal to the
    eigenvalue of tau_12 + tau_13 + tau_23.
    """
    df = racah_coboundary(spec)
    right = triple_crystal_basis(spec, RIGHT)
    left = triple_crystal_basis(spec, LEFT)
    groups: dict = {}
    for side, basis in ((RIGHT, right), (LEFT, left)):
        for lab, vec in basis.items():
            if weight is not None and lab.weight != tuple(weight):
                continue
            tot = _clean(sum(lab.exponents))
            groups.setdefault((lab.weight, tot), {RIGHT: [], LEFT: []})[side].append(
                (lab, _product_offset(vec)))
    out = []
    for (w, tot), members in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1]), reverse=True):
        rows = sorted(members[RIGHT], key=lambda m: -m[0].exponents[1])
        cols = sorted(members[LEFT], key=lambda m: -m[0].exponents[1])
        block = df[np.ix_([o for _, o in rows], [o for _, o in cols])]
        out.append(RecouplingBlock(tot, tuple(l for l, _ in rows), tuple(l for l, _ in cols),
                                   tuple(o for _, o in rows), tuple(o for _, o in cols), block))
    return out


def triple_cartan(spec: SeriesSpec) -> list[np.ndarray]:
    return delta_cartan(spec, 3)
