"""Dense real linear algebra on tensor products of equal or unequal legs.

Composite indices follow numpy's ``kron``: for legs of dimensions
(d_0, ..., d_{k-1}) the product vector e_{i_0} x ... x e_{i_{k-1}} sits at
offset ``np.ravel_multi_index((i_0, ..., i_{k-1}), dims)``.
"""

from __future__ import annotations

from collections.abc import Sequence
from math import prod

import numpy as np

from .errors import NotSymmetric

DEFAULT_REL_TOL = 1e-8


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def leg_permute(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Conjugate ``m`` by the operator that reorders tensor legs.

    Output leg ``i`` carries input leg ``perm[i]``, so with two legs and
    ``perm = (1, 0)`` this maps ``kron(a, b)`` to ``kron(b, a)``.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    k = len(dims)
    if prod(dims) != m.shape[0]:
        raise ValueError(f"leg dims {dims} inconsistent with matrix of size {m.shape[0]}")
    if sorted(perm) != list(range(k)):
        raise ValueError(f"{perm} is not a permutation of {k} legs")
    axes = list(perm) + [k + p for p in perm]
    t = m.reshape(dims + dims).transpose(axes)
    return np.ascontiguousarray(t).reshape(m.shape)


def permutation_operator(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Matrix P with ``leg_permute(m, dims, perm) == P @ m @ P.T``."""
    k = len(dims)
    n = prod(dims)
    idx = np.arange(n).reshape(dims).transpose(perm).reshape(-1)
    p = np.zeros((n, n))
    p[np.arange(n), idx] = 1.0
    return p


def embed(op, n: int, legs: Sequence[int], nlegs: int) -> np.ndarray:
    """Place a two-leg operator on ``legs`` of an ``nlegs``-fold product of C^n.

    The first factor of ``op`` acts on ``legs[0]`` and the second on ``legs[1]``.
    """
    op = as_matrix(op)
    a, b = legs
    full = np.kron(op, np.eye(n ** (nlegs - 2)))
    rest = [leg for leg in range(nlegs) if leg not in (a, b)]
    perm = [0] * nlegs
    perm[a], perm[b] = 0, 1
    for j, leg in enumerate(rest):
        perm[leg] = 2 + j
    return leg_permute(full, [n] * nlegs, perm)


def residual(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def orthogonality_defect(f) -> float:
    f = as_matrix(f)
    return residual(f.T @ f, np.eye(f.shape[0]))


def commutator_norm(a, b) -> float:
    return residual(a @ b, b @ a)


def symmetry_defect(m) -> float:
    m = np.asarray(m, dtype=float)
    return residual(m, m.T)


def eigenclusters(m, rel_tol: float = DEFAULT_REL_TOL) -> list[tuple[float, np.ndarray]]:
    """Clustered eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalue, vectors)`` pairs in descending eigenvalue order,
    where ``vectors`` holds an orthonormal basis of the eigenspace as columns.
    Neighbouring eigenvalues closer than ``rel_tol * max(spread, max|lambda|)``
    are merged; the reported eigenvalue is the cluster mean.
    """
    m = as_matrix(m)
    if m.shape[0] == 0:
        return []
    scale = float(np.max(np.abs(m))) or 1.0
    if symmetry_defect(m) > rel_tol * scale:
        raise NotSymmetric(f"symmetry defect {symmetry_defect(m):.3e} exceeds "
                           f"{rel_tol:.1e} * {scale:.3e}")
    w, v = np.linalg.eigh(0.5 * (m + m.T))
    w, v = w[::-1], v[:, ::-1]
    spread = float(w[0] - w[-1])
    tol = rel_tol * max(spread, float(np.max(np.abs(w))))
    clusters = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i - 1] - w[i] > tol:
            clusters.append((float(np.mean(w[start:i])), v[:, start:i]))
            start = i
    return clusters


def sym_eigencluster(m, rel_tol: float = DEFAULT_REL_TOL) -> list[tuple[float, np.ndarray]]:
    """Like :func:`eigenclusters` but returns orthogonal projectors."""
    return [(lam, vecs @ vecs.T) for lam, vecs in eigenclusters(m, rel_tol)]
