"""Natural bases |a;q> of a pair of defining representations and the twist F.

The twist relating parameter values q and q' is

    F^[q'q] = sum_a |a;q'><a;q|,

where |a;q> runs over an orthonormal basis labelled by total weight and the
exponent of the Q-operator eigenvalue, refined by a closed-form tag when the
Q-operator alone leaves a degeneracy. Bases at q = 0 and q = 1 come from
closed forms; at generic q the weight-block spectral decomposition of Q-bar
is used wherever it is non-degenerate and cross-checked against the closed
forms.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import SeriesSpec, Weight, add_weights, conjugate_index, format_weight
from .errors import (
    ChainMismatch,
    DegenerateSector,
    InternalConsistency,
    LabelMismatch,
    SignAmbiguity,
)
from .linops import eigenclusters, orthogonality_defect
from .qparam import QParam, as_q, bracket, qnumber, qnumber_ratio
from .rmatrices import QbarOperator, exponent_model

ORTHONORMAL_TOL = 1e-10
SIGN_TOL = 1e-6
VALIDATION_TOL = 1e-9
KEY_TOL = 1e-6


@dataclass(frozen=True)
class BasisLabel:
    """Label a of a basis vector |a;q>.

    ``exponents`` holds the exponent(s) l with operator eigenvalue q^l;
    ``tag`` is the closed-form name such as ``ij+(1,2)`` or ``n-(0)``.
    """

    weight: Weight
    exponents: tuple[float, ...]
    tag: str = ""
    tiebreak: int = 0

    def sort_key(self):
        return (tuple(-w for w in self.weight), tuple(-e for e in self.exponents), self.tiebreak, self.tag)

    def __str__(self) -> str:
        ex = ",".join(_fmt_exponent(e) for e in self.exponents)
        core = f"w={format_weight(self.weight)} l={ex}"
        return f"{self.tag} {core}" if self.tag else core


def _fmt_exponent(e: float) -> str:
    fr = Fraction(e).limit_denominator(64)
    return str(fr) if abs(float(fr) - e) < 1e-9 else repr(e)


@dataclass(frozen=True, eq=False)
class LabeledBasis:
    """Orthonormal basis; column ``c`` of ``vectors`` is labelled ``labels[c]``."""

    q: QParam
    labels: tuple[BasisLabel, ...]
    vectors: np.ndarray
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 2 or v.shape[1] != len(self.labels):
            raise ValueError("vectors must have one column per label")
        if v.shape[0] != v.shape[1]:
            raise InternalConsistency(f"basis is incomplete: {v.shape[1]} vectors in dimension {v.shape[0]}")
        index = {lab: c for c, lab in enumerate(self.labels)}
        if len(index) != len(self.labels):
            raise InternalConsistency("basis labels are not unique")
        defect = orthogonality_defect(v)
        if defect > ORTHONORMAL_TOL:
            raise InternalConsistency(f"basis at q={self.q} has Gram defect {defect:.3e}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "_index", index)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def vector(self, label: BasisLabel) -> np.ndarray:
        return self.vectors[:, self._index[label]]

    def ordered(self, labels: Sequence[BasisLabel]) -> np.ndarray:
        try:
            cols = [self._index[lab] for lab in labels]
        except KeyError as exc:
            raise LabelMismatch(f"label {exc.args[0]} not present in basis at q={self.q}") from None
        return self.vectors[:, cols]

    def items(self):
        return [(lab, self.vectors[:, c]) for c, lab in enumerate(self.labels)]


@dataclass(frozen=True, eq=False)
class FMatrix:
    """The orthogonal map F^[q_to q_from] = sum_a |a;q_to><a;q_from|."""

    spec: SeriesSpec
    q_from: QParam
    q_to: QParam
    matrix: np.ndarray
    label_order: tuple[BasisLabel, ...]
    legs: int = 2

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


# ---------------------------------------------------------------------------
# weights

def weight_partition(spec: SeriesSpec, legs: int = 2) -> dict[Weight, list[int]]:
    """Product-basis offsets grouped by total weight, weights in descending order."""
    n = spec.n
    groups: dict[Weight, list[int]] = {}
    for flat, idx in enumerate(np.ndindex(*(n,) * legs)):
        w = add_weights(*(spec.weights[i] for i in idx))
        groups.setdefault(w, []).append(flat)
    return {w: groups[w] for w in sorted(groups, reverse=True)}


def product_weight(spec: SeriesSpec, flat: int, legs: int = 2) -> Weight:
    idx = np.unravel_index(flat, (spec.n,) * legs)
    return add_weights(*(spec.weights[int(i)] for i in idx))


# ---------------------------------------------------------------------------
# spectral algorithm

def _default_key(q: QParam) -> Callable[[float], float]:
    h = q.h

    def key(lam: float) -> float:
        if lam <= 0:
            raise InternalConsistency(f"non-positive eigenvalue {lam} of a Q-operator")
        return math.log(lam) / h

    return key


def _joint_blocks(ops, idx, key, weight, rel_tol):
    """Jointly diagonalize restrictions of ``ops`` to the index set ``idx``.

    An operator object with a ``clusters`` method supplies its own block
    solver (already keyed); it must come first in ``ops``.
    """
    spaces = [(np.eye(len(idx)), ())]
    for pos, op in enumerate(ops):
        if hasattr(op, "clusters"):
            if pos != 0:
                raise ValueError("an operator with its own block solver must come first")
            spaces = [(vecs, (k,)) for k, vecs in op.clusters(idx, rel_tol)]
            continue
        sub = op[np.ix_(idx, idx)]
        refined = []
        for basis, keys in spaces:
            if basis.shape[1] == 1:
                lam = float(basis[:, 0] @ sub @ basis[:, 0])
                refined.append((basis, keys + (key(lam),)))
                continue
            restricted = basis.T @ sub @ basis
            for lam, vecs in eigenclusters(restricted, rel_tol):
                refined.append((basis @ vecs, keys + (key(lam),)))
        spaces = refined
    for basis, keys in spaces:
        if basis.shape[1] > 1:
            raise DegenerateSector(weight, keys, basis.shape[1])
    return [(b[:, 0], k) for b, k in spaces]


def _check_block_diagonal(op, partition, tol):
    for w, idx in partition.items():
        mask = np.ones(op.shape[0], dtype=bool)
        mask[idx] = False
        leak = np.max(np.abs(op[np.ix_(idx, np.flatnonzero(mask))]), initial=0.0)
        if leak > tol * max(1.0, np.max(np.abs(op))):
            raise InternalConsistency(f"operator mixes weight {format_weight(w)} with other weights ({leak:.2e})")


def _sign_fix(vec: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(vec) > np.max(np.abs(vec)) - 1e-9))
    return vec if vec[j] > 0 else -vec


def spectral_basis(
    ops: Sequence[np.ndarray],
    partition: dict[Weight, list[int]],
    q,
    reference: LabeledBasis | None = None,
    key: Callable[[float], float] | None = None,
    weights: Sequence[Weight] | None = None,
    rel_tol: float = 1e-8,
) -> LabeledBasis | list[tuple[BasisLabel, np.ndarray]]:
    """Joint eigenvectors of commuting operators inside each weight block.

    Each vector is labelled by its weight and the exponents ``key(lambda)``
    (default ``log(lambda)/h``). With a ``reference`` basis, each vector takes
    the reference label with the same weight and exponents and the sign
    making its overlap with that reference vector positive. When ``weights``
    restricts the blocks, the partial list of (label, vector) pairs is
    returned instead of a complete basis.
    """
    q = as_q(q)
    if key is None:
        key = _default_key(q)
    dim = sum(len(v) for v in partition.values())
    for op in ops:
        _check_block_diagonal(getattr(op, "matrix", op), partition, 1e-10)
    ref_by_weight: dict[Weight, list[tuple[BasisLabel, np.ndarray]]] = {}
    if reference is not None:
        for lab, vec in reference.items():
            ref_by_weight.setdefault(lab.weight, []).append((lab, vec))
    out = []
    for w, idx in partition.items():
        if weights is not None and w not in weights:
            continue
        for sub, keys in _joint_blocks(ops, idx, key, w, rel_tol):
            vec = np.zeros(dim)
            vec[idx] = sub
            if reference is None:
                label = BasisLabel(w, tuple(keys), "", idx[int(np.argmax(np.abs(sub)))])
                out.append((label, _sign_fix(vec)))
                continue
            matches = [(lab, r) for lab, r in ref_by_weight.get(w, [])
                       if len(lab.exponents) == len(keys)
                       and all(abs(a - b) < KEY_TOL for a, b in zip(lab.exponents, keys))]
            if len(matches) != 1:
                raise LabelMismatch(
                    f"{len(matches)} reference vectors at weight {format_weight(w)} "
                    f"match exponents {tuple(round(k, 6) for k in keys)}")
            label, r = matches[0]
            overlap = float(r @ vec)
            if abs(overlap) < SIGN_TOL:
                raise SignAmbiguity(f"overlap {overlap:.2e} with reference vector {label}")
            out.append((label, vec if overlap > 0 else -vec))
    if weights is not None:
        return out
    out.sort(key=lambda item: item[0].sort_key())
    return LabeledBasis(q, tuple(l for l, _ in out), np.column_stack([v for _, v in out]))


def assemble_f(to: LabeledBasis, from_: LabeledBasis, spec: SeriesSpec, legs: int = 2) -> FMatrix:
    """F = sum_a |a; to.q><a; from_.q| over the common label set."""
    if set(to.labels) != set(from_.labels):
        missing = set(to.labels) ^ set(from_.labels)
        raise LabelMismatch(f"label sets differ in {len(missing)} labels, e.g. {next(iter(missing))}")
    order = tuple(sorted(to.labels, key=BasisLabel.sort_key))
    m = to.ordered(order) @ from_.ordered(order).T
    return FMatrix(spec, from_.q, to.q, m, order, legs)


def compose(f2: FMatrix, f1: FMatrix) -> FMatrix:
    """F^[q'' q] = F^[q'' q'] F^[q' q]."""
    if f2.spec != f1.spec or f2.legs != f1.legs:
        raise ChainMismatch("cannot compose twists of different representations")
    if f2.q_from.value != f1.q_to.value:
        raise ChainMismatch(f"chain break: {f2.q_from} != {f1.q_to}")
    if f2.label_order != f1.label_order:
        raise ChainMismatch("label orders differ")
    return FMatrix(f1.spec, f1.q_from, f2.q_to, f2.matrix @ f1.matrix, f1.label_order, f1.legs)


def inverse(f: FMatrix) -> FMatrix:
    return FMatrix(f.spec, f.q_to, f.q_from, f.matrix.T.copy(), f.label_order, f.legs)


# ---------------------------------------------------------------------------
# closed forms

class _Builder:
    """Collects labelled vectors on C^n x C^n."""

    def __init__(self, spec: SeriesSpec):
        self.spec = spec
        self.n = spec.n
        self.model = exponent_model(spec)
        self.items: list[tuple[str, int, str, np.ndarray]] = []

    def e(self, i: int, j: int) -> np.ndarray:
        v = np.zeros(self.n * self.n)
        v[(i - 1) * self.n + (j - 1)] = 1.0
        return v

    def flat(self, i: int, j: int) -> int:
        return (i - 1) * self.n + (j - 1)

    def add(self, tag: str, sector: str, vec: np.ndarray, tiebreak: int):
        self.items.append((tag, tiebreak, sector, vec))

    def build(self, q: QParam) -> LabeledBasis:
        out = []
        for tag, tiebreak, sector, vec in self.items:
            nz = np.flatnonzero(np.abs(vec) > 1e-300)
            w = product_weight(self.spec, int(nz[0])) if len(nz) else None
            lab = BasisLabel(w, (self.model.exponent_of(sector),), tag, tiebreak)
            out.append((lab, vec))
        out.sort(key=lambda item: item[0].sort_key())
        return LabeledBasis(q, tuple(l for l, _ in out), np.column_stack([v for _, v in out]))


def _pair_vectors(b: _Builder, q: QParam, skip: Callable[[int, int], bool]):
    """Diagonal and two-dimensional sectors: |ii>, |ij+>, |ij->."""
    n = b.n
    if q.is_zero:
        cp, cm = 0.0, 1.0
    else:
        # sqrt(q)/sqrt(q + 1/q) and its partner, written to avoid overflow
        phi = math.atan(q.value)
        cp, cm = math.sin(phi), math.cos(phi)
    for i in range(1, n + 1):
        if not skip(i, i):
            b.add(f"ii({i})", "sym", b.e(i, i), b.flat(i, i))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if skip(i, j):
                continue
            tb = b.flat(i, j)
            b.add(f"ij+({i},{j})", "sym", cp * b.e(i, j) + cm * b.e(j, i), tb)
            b.add(f"ij-({i},{j})", "anti", cm * b.e(i, j) - cp * b.e(j, i), tb)


def su_closed_basis(n: int, q) -> LabeledBasis:
    """Closed-form basis of C^n x C^n for the A series (n >= 2)."""
    q = as_q(q)
    if n < 2:
        raise ValueError("n must be at least 2")
    b = _Builder(SeriesSpec("A", n - 1))
    _pair_vectors(b, q, lambda i, j: False)
    return b.build(q)


def _qpow(x, q: QParam) -> float:
    return math.exp(float(x) * q.h)


def _zero_weight_vectors(b: _Builder, q: QParam):
    """The n-dimensional zero-weight sector of B, C, D at q > 0."""
    spec, n = b.spec, b.n
    s = spec.s
    bar = lambda i: conjugate_index(i, n)  # noqa: E731
    r = lambda a, c: qnumber_ratio(a, c, q)  # noqa: E731
    br = lambda x: bracket(x, q)  # noqa: E731
    one = qnumber(1, q)

    def idx(x) -> int:
        return int(s - x)

    def x_vec(k):
        a = idx(k)
        return _qpow(1, q) * b.e(a, bar(a)) + _qpow(-1, q) * b.e(bar(a), a)

    def y_vec(i, sign=1.0):
        a = idx(i)
        return _qpow(-i, q) * b.e(a, bar(a)) + sign * _qpow(i, q) * b.e(bar(a), a)

    def a_vec(k):
        a = idx(k)
        return b.e(a, bar(a)) - b.e(bar(a), a)

    def y_sum(lo, hi, sign=1.0):
        tot = np.zeros(n * n)
        i = Fraction(lo)
        while i <= hi:
            tot = tot + y_vec(i, sign)
            i += 1
        return tot

    if spec.series == "C":
        for k in range(1, int(s)):
            v = (br(k) * x_vec(k) + one * y_sum(1, k - 1, -1.0)) / math.sqrt(br(1) * br(k) * br(k + 1))
            b.add(f"n+({k})", "sym", v, b.flat(idx(k), bar(idx(k))))
        for k in range(2, int(s)):
            v = (math.sqrt(r(k - 1, k) / br(1)) * a_vec(k)
                 - math.sqrt(r(1, k - 1) * r(1, k) / br(1)) * y_sum(1, k - 1, -1.0))
            b.add(f"n-({k})", "anti", v, b.flat(idx(k), bar(idx(k))))
        v = math.sqrt(r(1, s - 1) / br(s)) * y_sum(1, s - 1, -1.0)
        b.add("nTr", "trace", v, b.flat(1, n))
        return

    if spec.series == "D":
        first, mid = Fraction(0), np.zeros(n * n)
        ks_plus = [Fraction(k) for k in range(1, int(s))]
        ks_minus = [Fraction(k) for k in range(0, int(s))]
    else:
        m = (n + 1) // 2
        first, mid = Fraction(1, 2), b.e(m, m)
        ks_plus = ks_minus = [Fraction(2 * t + 1, 2) for t in range(int(s - Fraction(1, 2)))]

    def inner(k):
        return mid + y_sum(first, k - 1)

    for k in ks_plus:
        v = (math.sqrt(r(k, k + 1) / br(1)) * x_vec(k)
             - math.sqrt(r(1, k) * r(1, k + 1) / br(1)) * inner(k))
        b.add(f"n+({k})", "sym", v, b.flat(idx(k), bar(idx(k))))
    for k in ks_minus:
        v = (br(k - 1) * a_vec(k) + one * inner(k)) / math.sqrt(br(1) * br(k - 1) * br(k))
        b.add(f"n-({k})", "anti", v, b.flat(idx(k), bar(idx(k))))
    v = math.sqrt(r(1, s) / br(s - 1)) * (mid + y_sum(first, s - 1))
    b.add("nTr", "trace", v, b.flat(1, n))


def _crystal_zero_weight(b: _Builder):
    spec, n = b.spec, b.n
    s = spec.s
    bar = lambda i: conjugate_index(i, n)  # noqa: E731
    sign = -1.0 if spec.symplectic else 1.0
    if spec.series == "C":
        ks_plus = [Fraction(k) for k in range(1, int(s))]
        ks_minus = [Fraction(k) for k in range(2, int(s))]
    elif spec.series == "D":
        ks_plus = [Fraction(k) for k in range(1, int(s))]
        ks_minus = [Fraction(k) for k in range(0, int(s))]
    else:
        ks_plus = ks_minus = [Fraction(2 * t + 1, 2) for t in range(int(s - Fraction(1, 2)))]
    for k in ks_plus:
        a = int(s - k)
        b.add(f"n+({k})", "sym", b.e(bar(a), a), b.flat(a, bar(a)))
    for k in ks_minus:
        a = int(s - k)
        c = int(s - k + 1)
        b.add(f"n-({k})", "anti", sign * b.e(c, bar(c)), b.flat(a, bar(a)))
    b.add("nTr", "trace", b.e(1, n), b.flat(1, n))


def _bcd_skip(n: int):
    return lambda i, j: i + j == n + 1


def bcd_closed_basis(spec: SeriesSpec, q) -> LabeledBasis:
    """Closed-form basis of the B, C, D pair.

    Off the zero-weight sector the vectors have the su(n) form; the
    zero-weight sector uses the inductive n+(k), n-(k), nTr vectors, written
    with q-number ratios so they are continuous through q = 1. At q = 0 the
    crystal table is returned.
    """
    q = as_q(q)
    if spec.series == "A":
        raise ValueError("bcd_closed_basis needs a B, C or D spec")
    if q.is_zero:
        return crystal_basis(spec)
    b = _Builder(spec)
    _pair_vectors(b, q, _bcd_skip(spec.n))
    _zero_weight_vectors(b, q)
    return b.build(q)


def closed_basis(spec: SeriesSpec, q) -> LabeledBasis:
    q = as_q(q)
    if spec.series == "A":
        return su_closed_basis(spec.n, q)
    return bcd_closed_basis(spec, q)


@lru_cache(maxsize=None)
def crystal_basis(spec: SeriesSpec) -> LabeledBasis:
    """Signed product vectors forming the q = 0 basis."""
    b = _Builder(spec)
    q0 = QParam(0.0)
    if spec.series == "A":
        _pair_vectors(b, q0, lambda i, j: False)
    else:
        _pair_vectors(b, q0, _bcd_skip(spec.n))
        _crystal_zero_weight(b)
    return b.build(q0)


# ---------------------------------------------------------------------------
# routing

@lru_cache(maxsize=256)
def _natural_basis(spec: SeriesSpec, qv: float) -> LabeledBasis:
    q = QParam(qv)
    if q.is_zero:
        return crystal_basis(spec)
    closed = closed_basis(spec, q)
    if q.is_one:
        return closed
    reference = closed_basis(spec, QParam(1.0))
    partition = weight_partition(spec)
    ops = [QbarOperator(spec, q)]
    vectors = dict(closed.items())
    for w in partition:
        try:
            found = spectral_basis(ops, partition, q, reference, weights=[w])
        except DegenerateSector:
            if spec.series == "A":
                raise
            continue
        for label, vec in found:
            dev = float(np.max(np.abs(vec - vectors[label])))
            if dev > VALIDATION_TOL:
                raise InternalConsistency(
                    f"spectral and closed-form vectors for {label} differ by {dev:.2e} at q={q}")
            vectors[label] = vec
    labels = closed.labels
    return LabeledBasis(q, labels, np.column_stack([vectors[l] for l in labels]))


def natural_basis(spec: SeriesSpec, q) -> LabeledBasis:
    """|a;q> for all labels a; spectral where possible, closed forms otherwise."""
    return _natural_basis(spec, as_q(q).value)


def f_interval(spec: SeriesSpec, q_to, q_from=1.0) -> FMatrix:
    """F^[q_to q_from]."""
    return assemble_f(natural_basis(spec, q_to), natural_basis(spec, q_from), spec)


def twist(spec: SeriesSpec, q) -> FMatrix:
    """F = F^[q1]."""
    return f_interval(spec, q, 1.0)
