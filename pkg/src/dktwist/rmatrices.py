"""Deformed R-matrices of the defining representations and their spectra.

The raw matrices are the standard Faddeev-Reshetikhin-Takhtajan solutions.
With E_ij the matrix units and ibar = n + 1 - i:

    R = sum_{i != ibar} q E_ii x E_ii + sum_{i = ibar} E_ii x E_ii
        + sum_{i != j, j != ibar} E_ii x E_jj + q^-1 sum_{i != ibar} E_ii x E_ibar,ibar
        + (q - q^-1) sum_{i > j} [E_ij x E_ji - q^(rho_i - rho_j) eps_i eps_j E_ij x E_ibar,jbar]

where the last term is absent for the A series. The leg-swapped matrix
sigma R is symmetric and has eigenvalue q on symmetric tensors, -q^-1 on
antisymmetric ones and q^(1-n) (orthogonal) or -q^(-n-1) (symplectic) on
the invariant of the bilinear form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import SeriesSpec, cartan_generators, conjugate_index
from .errors import SpectrumMismatch, UnsupportedAtZero
from .linops import eigenclusters, leg_permute, permutation_operator
from .qparam import QParam, as_q

PROBE_Q0 = 2.0
PROBE_Q1 = 3.0
EXPONENT_TOL = 1e-8

# Power p of the scalar c(q) = q^p multiplying the raw matrix.  Fitted by
# requiring det Q = 1 (exponents weighted by rank sum to zero) and asserted
# against the fit in exponent_model.
NORMALIZATION_POWER = {
    "A": lambda n: Fraction(-1, n),
    "B": lambda n: Fraction(0),
    "C": lambda n: Fraction(0),
    "D": lambda n: Fraction(0),
}


@dataclass(frozen=True)
class RData:
    spec: SeriesSpec
    q: QParam
    matrix: np.ndarray
    scale: float


@dataclass(frozen=True)
class SpectralModel:
    """Classical projectors with exponents so that Q(q) = sum q^l_k P_k.

    Projectors are ordered symmetric(-traceless), antisymmetric(-traceless),
    and, for B, C, D, the trace projector last.
    """

    spec: SeriesSpec
    names: tuple[str, ...]
    projectors: tuple[np.ndarray, ...]
    exponents: tuple[float, ...]
    exact_exponents: tuple[Fraction, ...]
    normalization_power: Fraction

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(int(round(np.trace(p))) for p in self.projectors)

    def exponent_of(self, name: str) -> float:
        return self.exponents[self.names.index(name)]

    def tau(self) -> np.ndarray:
        """The classical generator sum_k l_k P_k, so that Q = q^tau."""
        return sum(l * p for l, p in zip(self.exponents, self.projectors))


def _rho_eps(spec: SeriesSpec) -> tuple[dict[int, float], dict[int, int]]:
    n = spec.n
    rho, eps = {}, {}
    for i in range(1, n + 1):
        ib = conjugate_index(i, n)
        if spec.symplectic:
            base = n / 2 - min(i, ib) + 1
            eps[i] = 1 if i <= n // 2 else -1
        else:
            base = n / 2 - min(i, ib)
            eps[i] = 1
        rho[i] = 0.0 if i == ib else (base if i < ib else -base)
    return rho, eps


def _frt_entries(spec: SeriesSpec, qv, one):
    """Nonzero entries ((i, j), (k, l), value) of the raw R-matrix, 1-based.

    ``one`` fixes the number type so the same table serves float and
    extended-precision builds.
    """
    n = spec.n
    qv = one * qv
    d = qv - one / qv
    bcd = spec.series != "A"
    rho, eps = _rho_eps(spec) if bcd else ({}, {})
    for i in range(1, n + 1):
        ib = conjugate_index(i, n)
        for j in range(1, n + 1):
            if i == j:
                c = one if (bcd and i == ib) else qv
            elif bcd and j == ib:
                c = one / qv
            else:
                c = one
            yield (i, j), (i, j), c
            if i > j and d != 0:
                yield (i, j), (j, i), d
                if bcd:
                    jb = conjugate_index(j, n)
                    e = 2 * (rho[i] - rho[j])
                    yield (i, ib), (j, jb), -d * qv ** (one * int(round(e)) / 2) * eps[i] * eps[j]


def frt_r(spec: SeriesSpec, q) -> np.ndarray:
    """Raw defining-representation R-matrix on C^n x C^n."""
    q = as_q(q)
    if q.is_zero:
        raise UnsupportedAtZero("the R-matrix diverges at q = 0; use the crystal basis")
    n = spec.n
    r = np.zeros((n * n, n * n))
    for (i, j), (k, l), c in _frt_entries(spec, q.value, 1.0):
        r[(i - 1) * n + j - 1, (k - 1) * n + l - 1] += c
    return r


def swap_pair(m: np.ndarray, n: int) -> np.ndarray:
    """X_21 from X_12 on C^n x C^n."""
    return leg_permute(m, (n, n), (1, 0))


def swap_operator(n: int) -> np.ndarray:
    return permutation_operator((n, n), (1, 0))


def normalization_scale(spec: SeriesSpec, q) -> float:
    q = as_q(q)
    p = NORMALIZATION_POWER[spec.series](spec.n)
    return q.value ** float(p)


def r_bar(spec: SeriesSpec, q) -> RData:
    q = as_q(q)
    c = normalization_scale(spec, q) if not q.is_zero else math.nan
    return RData(spec, q, c * frt_r(spec, q), c)


def ybe_residual(r: np.ndarray, n: int) -> float:
    """max |R12 R13 R23 - R23 R13 R12| on the triple product."""
    eye = np.eye(n)
    r12 = np.kron(r, eye)
    r23 = np.kron(eye, r)
    r13 = leg_permute(r12, (n, n, n), (0, 2, 1))
    return float(np.max(np.abs(r12 @ r13 @ r23 - r23 @ r13 @ r12)))


@lru_cache(maxsize=None)
def _classical_projectors(spec: SeriesSpec) -> tuple[tuple[str, ...], tuple[np.ndarray, ...]]:
    n = spec.n
    eye = np.eye(n * n)
    sigma = swap_operator(n)
    sym = 0.5 * (eye + sigma)
    anti = 0.5 * (eye - sigma)
    if spec.series == "A":
        return ("sym", "anti"), (sym, anti)
    _, eps = _rho_eps(spec)
    kappa = np.zeros(n * n)
    for i in range(1, n + 1):
        kappa[(i - 1) * n + conjugate_index(i, n) - 1] = eps[i]
    tr = np.outer(kappa, kappa) / (kappa @ kappa)
    if spec.symplectic:
        anti = anti - tr
    else:
        sym = sym - tr
    return ("sym", "anti", "trace"), (sym, anti, tr)


def classical_projector_set(spec: SeriesSpec) -> list[np.ndarray]:
    """Complete orthogonal family: sym(-traceless), anti(-traceless), trace."""
    return [p.copy() for p in _classical_projectors(spec)[1]]


def invariant_vector(spec: SeriesSpec) -> np.ndarray:
    """Unit vector spanning the trace sector (B, C, D only)."""
    if spec.series == "A":
        raise ValueError("the A series has no invariant bilinear form on the defining representation")
    tr = _classical_projectors(spec)[1][2]
    w, v = np.linalg.eigh(tr)
    vec = v[:, -1]
    return vec * np.sign(vec[np.argmax(np.abs(vec))])


def _raw_exponents(spec: SeriesSpec, q0: float) -> list[tuple[float, int]]:
    q = QParam(q0)
    out = []
    for idx in _pair_partition(spec):
        for key, vecs in _block_clusters(spec, q, idx, Fraction(0)):
            out.append((key, vecs.shape[1]))
    merged: list[list] = []
    for key, mult in sorted(out, reverse=True):
        if merged and abs(merged[-1][0] - key) < 1e-6:
            merged[-1][1] += mult
        else:
            merged.append([key, mult])
    return [(k, m) for k, m in merged]


def _snap(x: float, n: int) -> Fraction:
    fr = Fraction(x).limit_denominator(2 * n)
    if abs(float(fr) - x) > EXPONENT_TOL:
        raise SpectrumMismatch(f"exponent {x!r} is not a small rational")
    return fr


@lru_cache(maxsize=None)
def exponent_model(spec: SeriesSpec) -> SpectralModel:
    """Fit exponents l_k with spec(c^2 sigmaR R) = {q^l_k} and pair them to projectors."""
    names, projectors = _classical_projectors(spec)
    ranks = [int(round(np.trace(p))) for p in projectors]
    if len(set(ranks)) != len(ranks):
        raise SpectrumMismatch(f"projector ranks {ranks} of {spec} cannot be paired by multiplicity")
    n2 = spec.n ** 2
    fits = []
    for q0 in (PROBE_Q0, PROBE_Q1):
        raw = _raw_exponents(spec, q0)
        p = -sum(l * m for l, m in raw) / (2 * n2)
        fits.append((p, {m: l + 2 * p for l, m in raw}, sorted(m for _, m in raw)))
    (p0, ex0, mult0), (p1, ex1, mult1) = fits
    if mult0 != sorted(ranks) or mult1 != sorted(ranks):
        raise SpectrumMismatch(f"Q multiplicities {mult0} / {mult1} do not match projector ranks {ranks}")
    if abs(p0 - p1) > EXPONENT_TOL or any(abs(ex0[m] - ex1[m]) > EXPONENT_TOL for m in ranks):
        raise SpectrumMismatch(f"exponents of {spec} differ between probes q={PROBE_Q0} and q={PROBE_Q1}")
    frozen = NORMALIZATION_POWER[spec.series](spec.n)
    if abs(float(frozen) - p0) > EXPONENT_TOL:
        raise SpectrumMismatch(f"fitted normalization power {p0} differs from frozen {frozen}")
    exact = tuple(_snap(ex0[m], spec.n) for m in ranks)
    return SpectralModel(spec, names, projectors, tuple(float(e) for e in exact), exact, frozen)


def classical_q(model: SpectralModel, q, power: float = 1.0) -> np.ndarray:
    """sum_k q^(power * l_k) P_k; power = 1/2 gives the classical R."""
    q = as_q(q)
    if q.is_zero:
        raise UnsupportedAtZero("q^l with negative l diverges at q = 0")
    return sum(q.value ** (power * l) * p for l, p in zip(model.exponents, model.projectors))


def classical_r(model: SpectralModel, q) -> np.ndarray:
    return classical_q(model, q, 0.5)


def qbar(spec: SeriesSpec, q) -> np.ndarray:
    """Q-bar = R-bar_21 R-bar_12 with the normalized R-bar."""
    r = r_bar(spec, q).matrix
    m = swap_pair(r, spec.n) @ r
    return 0.5 * (m + m.T)


# Weight blocks whose Q-bar eigenvalues span more than this ratio are
# diagonalized in extended precision: double precision resolves eigenvectors
# of the small eigenvalues only to eps * lambda_max / gap.
GRADED_RANGE = 1e6


class QbarOperator:
    """Q-bar at fixed q with a weight-block spectral solver.

    ``clusters(idx)`` returns (exponent, orthonormal vectors) for the block on
    product-basis offsets ``idx``; the exponent l labels the eigenvalue q^l.
    """

    def __init__(self, spec: SeriesSpec, q):
        q = as_q(q)
        if not q.is_generic:
            raise ValueError("QbarOperator needs a generic q")
        self.spec = spec
        self.q = q
        self.matrix = qbar(spec, q)

    def clusters(self, idx, rel_tol: float = 1e-8):
        power = NORMALIZATION_POWER[self.spec.series](self.spec.n)
        return _block_clusters(self.spec, self.q, list(idx), power, rel_tol, self.matrix)


def _block_clusters(spec, q, idx, power, rel_tol=1e-8, full=None, exp_tol=1e-6):
    """Eigen-clusters of the block of c^2 Q_raw (c = q^power) as (exponent, vectors).

    Blocks whose eigenvalues span more than GRADED_RANGE, or whose smallest
    eigenvalue is lost to rounding, are redone in extended precision.
    """
    if full is None:
        raw = frt_r(spec, q)
        full = q.value ** (2 * float(power)) * (raw.T @ raw)
    block = full[np.ix_(idx, idx)]
    h = q.h
    clusters = eigenclusters(block, rel_tol)
    lams = [lam for lam, _ in clusters]
    if min(lams) > 0 and max(lams) / min(lams) <= GRADED_RANGE:
        return [(math.log(lam) / h, vecs) for lam, vecs in clusters]
    return _graded_clusters(spec, q, tuple(idx), power, float(np.max(np.abs(block))), exp_tol)


def _graded_clusters(spec, q, idx, power, norm, exp_tol):
    import mpmath

    n = spec.n
    pos = {f: a for a, f in enumerate(idx)}
    ctx = mpmath.mp.clone()
    decades = abs(math.log10(max(norm, 1e-300)))
    ctx.dps = 40 + 6 * int(math.ceil(decades))
    one = ctx.mpf(1)
    qv = ctx.mpf(q.value)
    r = ctx.zeros(len(idx), len(idx))
    for (i, j), (k, l), c in _frt_entries(spec, qv, one):
        a = pos.get((i - 1) * n + j - 1)
        b = pos.get((k - 1) * n + l - 1)
        if a is not None and b is not None:
            r[a, b] += c
    qb = qv ** (2 * ctx.mpf(power.numerator) / power.denominator) * (r.T * r)
    w, v = ctx.eigsy(qb)
    h = ctx.log(qv)
    if min(w) <= 0:
        raise SpectrumMismatch(f"non-positive Q eigenvalue for {spec} at q={q} in extended precision")
    keys = [float(ctx.log(w[a]) / h) for a in range(len(idx))]
    vecs = np.array(v.tolist(), dtype=float)
    order = sorted(range(len(idx)), key=lambda a: -keys[a])
    out = []
    for a in order:
        if out and abs(out[-1][0] - keys[a]) < exp_tol:
            out[-1][1].append(a)
        else:
            out.append((keys[a], [a]))
    result = []
    for _, cols in out:
        # re-orthonormalize in double precision after rounding
        qmat, _ = np.linalg.qr(vecs[:, cols])
        sub = qmat * np.sign(np.sum(qmat * vecs[:, cols], axis=0))
        result.append((float(np.mean([keys[a] for a in cols])), sub))
    return result


def deformed_projectors(spec: SeriesSpec, q, partition=None) -> list[np.ndarray]:
    """Spectral projectors of Q-bar, ordered like the classical family.

    Clustering is done per weight block (Q-bar commutes with the Cartan
    action), which keeps badly graded blocks tractable at extreme q.
    """
    q = as_q(q)
    model = exponent_model(spec)
    if q.is_one:
        return [p.copy() for p in model.projectors]
    if partition is None:
        partition = _pair_partition(spec)
    op = QbarOperator(spec, q)
    dim = spec.n ** 2
    out = [np.zeros((dim, dim)) for _ in model.exponents]
    for idx in partition:
        for key, vecs in op.clusters(idx):
            diffs = [abs(key - l) for l in model.exponents]
            k = int(np.argmin(diffs))
            if not diffs[k] < 1e-6:
                raise SpectrumMismatch(f"Q-bar exponent {key} at q={q} matches no classical exponent")
            full = np.zeros((dim, vecs.shape[1]))
            full[idx] = vecs
            out[k] += full @ full.T
    for p, pc in zip(out, model.projectors):
        if abs(np.trace(p) - np.trace(pc)) > 1e-6:
            raise SpectrumMismatch("deformed projector rank differs from the classical rank")
    return out


def _pair_partition(spec: SeriesSpec) -> list[list[int]]:
    n = spec.n
    groups: dict = {}
    for i in range(n):
        for j in range(n):
            w = tuple(a + b for a, b in zip(spec.weights[i], spec.weights[j]))
            groups.setdefault(w, []).append(i * n + j)
    return [groups[w] for w in sorted(groups, reverse=True)]


def delta_cartan(spec: SeriesSpec, legs: int = 2) -> list[np.ndarray]:
    """Coproduct images H x 1 x .. + .. + 1 x .. x H of the Cartan generators."""
    n = spec.n
    out = []
    for h in cartan_generators(spec):
        d = np.diag(h)
        tot = np.zeros(n ** legs)
        for leg in range(legs):
            shape = [1] * legs
            shape[leg] = n
            tot = tot + np.broadcast_to(d.reshape(shape), (n,) * legs).reshape(-1)
        out.append(np.diag(tot))
    return out
