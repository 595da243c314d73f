import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dktwist.errors import NotSymmetric
from dktwist.linops import (
    eigenclusters,
    embed,
    kron,
    leg_permute,
    orthogonality_defect,
    permutation_operator,
    residual,
    sym_eigencluster,
)


def test_swap_of_kron():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(2, 2)), rng.normal(size=(3, 3))
    assert residual(leg_permute(kron(a, b), (2, 3), (1, 0)), kron(b, a)) == 0.0


def test_three_leg_permutation_places_factors():
    rng = np.random.default_rng(1)
    a, b, c = (rng.normal(size=(2, 2)) for _ in range(3))
    m = np.kron(np.kron(a, b), c)
    # output leg i carries input leg perm[i]
    assert residual(leg_permute(m, (2, 2, 2), (2, 0, 1)), np.kron(np.kron(c, a), b)) < 1e-15


@settings(max_examples=30, deadline=None)
@given(dims=st.lists(st.integers(1, 3), min_size=3, max_size=3),
       p1=st.permutations(range(3)), p2=st.permutations(range(3)),
       seed=st.integers(0, 2**16))
def test_leg_permute_is_group_action(dims, p1, p2, seed):
    m = np.random.default_rng(seed).normal(size=(int(np.prod(dims)),) * 2)
    step = leg_permute(m, dims, p1)
    dims1 = [dims[p] for p in p1]
    twice = leg_permute(step, dims1, p2)
    composed = [p1[p] for p in p2]
    assert residual(twice, leg_permute(m, dims, composed)) == 0.0


@pytest.mark.parametrize("perm", list(itertools.permutations(range(3))))
def test_permutation_operator_matches(perm):
    m = np.random.default_rng(2).normal(size=(8, 8))
    p = permutation_operator((2, 2, 2), perm)
    assert orthogonality_defect(p) == 0.0
    assert residual(p @ m @ p.T, leg_permute(m, (2, 2, 2), perm)) < 1e-15


def test_leg_permute_rejects():
    with pytest.raises(ValueError):
        leg_permute(np.eye(4), (2, 3), (1, 0))
    with pytest.raises(ValueError):
        leg_permute(np.eye(4), (2, 2), (0, 0))


def test_embed_on_outer_legs():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
    e = embed(np.kron(a, b), 2, (0, 2), 3)
    assert residual(e, np.kron(np.kron(a, np.eye(2)), b)) < 1e-15


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        residual(kron([[np.nan]], [[1.0]]), [[0.0]])


@settings(max_examples=40, deadline=None)
@given(mults=st.lists(st.integers(1, 3), min_size=1, max_size=4), seed=st.integers(0, 2**16))
def test_eigencluster_reconstructs(mults, seed):
    rng = np.random.default_rng(seed)
    values = np.arange(len(mults), dtype=float) * 1.7 - 2.0
    diag = np.repeat(values, mults)
    qmat, _ = np.linalg.qr(rng.normal(size=(len(diag), len(diag))))
    m = qmat @ np.diag(diag) @ qmat.T
    clusters = sym_eigencluster(m)
    assert [round(lam, 8) for lam, _ in clusters] == [round(v, 8) for v in values[::-1]]
    assert [int(round(np.trace(p))) for _, p in clusters] == mults[::-1]
    assert residual(sum(lam * p for lam, p in clusters), m) < 1e-12
    assert residual(sum(p for _, p in clusters), np.eye(len(diag))) < 1e-12


def test_eigenclusters_reject_asymmetric():
    with pytest.raises(NotSymmetric):
        eigenclusters(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigenclusters_empty():
    assert eigenclusters(np.zeros((0, 0))) == []
