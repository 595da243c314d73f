"""Classical su(2) coupling oracles built from first principles.

Spin-j states |j m> are indexed by m = j, j-1, ..., -j, so that for spin
1/2 offset 0 is e_1 (weight +1) and offset 1 is e_2. Product states of
spins (j1, j2) use the numpy ``kron`` offset convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_SPIN = Fraction(3)


def _spin(j) -> Fraction:
    j = Fraction(j)
    if j < 0 or (2 * j).denominator != 1:
        raise ValueError(f"spin must be a non-negative half-integer, got {j}")
    return j


def spin_dim(j) -> int:
    return int(2 * _spin(j)) + 1


def lowering(j) -> np.ndarray:
    """J- on spin j: J-|j m> = sqrt((j+m)(j-m+1)) |j m-1>."""
    j = _spin(j)
    d = spin_dim(j)
    m = np.zeros((d, d))
    for a in range(d - 1):
        mj = j - a
        m[a + 1, a] = float((j + mj) * (j - mj + 1)) ** 0.5
    return m


def cg_oracle(j1, j2) -> dict[tuple[Fraction, Fraction], np.ndarray]:
    """Coupled states |J M> of spins j1 x j2 in the product basis.

    Highest-weight states are taken orthogonal to all higher-J states at the
    same M, with the Condon-Shortley sign (coefficient of m1 = j1 positive);
    the rest of each multiplet follows by applying the total lowering
    operator and normalizing.
    """
    j1, j2 = _spin(j1), _spin(j2)
    if j1 > MAX_SPIN or j2 > MAX_SPIN:
        raise ValueError("cg_oracle supports spins up to 3")
    d1, d2 = spin_dim(j1), spin_dim(j2)
    lower = np.kron(lowering(j1), np.eye(d2)) + np.kron(np.eye(d1), lowering(j2))
    m_of = np.array([float(j1 - a) + float(j2 - b) for a in range(d1) for b in range(d2)])
    out: dict[tuple[Fraction, Fraction], np.ndarray] = {}
    big_j = j1 + j2
    while big_j >= abs(j1 - j2):
        mask = np.isclose(m_of, float(big_j))
        space = np.eye(d1 * d2)[:, mask]
        for (jj, mm), v in out.items():
            if mm == big_j:
                space = space - np.outer(v, v @ space)
        u, sv, _ = np.linalg.svd(space)
        top = u[:, 0]
        # Condon-Shortley: <j1 j1; j2 (J - j1) | J J> > 0
        pivot = int(round(float(j2 - (big_j - j1)))) if abs(big_j - j1) <= j2 else None
        if pivot is None:
            raise AssertionError("highest weight state lacks an m1 = j1 component")
        if top[pivot] < 0:
            top = -top
        vec = top
        mm = big_j
        while True:
            out[(big_j, mm)] = vec
            if mm == -big_j:
                break
            vec = lower @ vec
            vec = vec / np.linalg.norm(vec)
            mm -= 1
        big_j -= 1
    return out


@dataclass(frozen=True)
class Recoupling:
    """Blocks <(j1 (j2 j3) j23) J | ((j1 j2) j12 j3) J> per total spin J.

    ``blocks[J]`` has rows indexed by ``j23_values[J]`` and columns by
    ``j12_values[J]``, both in descending order.
    """

    spins: tuple[Fraction, Fraction, Fraction]
    blocks: dict[Fraction, np.ndarray]
    j12_values: dict[Fraction, tuple[Fraction, ...]]
    j23_values: dict[Fraction, tuple[Fraction, ...]]


def _couple_three(ja, jb, jc, left: bool):
    """|(..) J M> states of ja x jb x jc with the inner pair on the left or right."""
    out = {}
    if left:
        inner = cg_oracle(ja, jb)
        ji_values = sorted({k[0] for k in inner}, reverse=True)
        for ji in ji_values:
            outer = cg_oracle(ji, jc)
            # embed |ji mi> of the inner pair into ja x jb
            emb = np.column_stack([inner[(ji, ji - a)] for a in range(spin_dim(ji))])
            lift = np.kron(emb, np.eye(spin_dim(jc)))
            for (big_j, mm), v in outer.items():
                out[(ji, big_j, mm)] = lift @ v
    else:
        inner = cg_oracle(jb, jc)
        ji_values = sorted({k[0] for k in inner}, reverse=True)
        for ji in ji_values:
            outer = cg_oracle(ja, ji)
            emb = np.column_stack([inner[(ji, ji - a)] for a in range(spin_dim(ji))])
            lift = np.kron(np.eye(spin_dim(ja)), emb)
            for (big_j, mm), v in outer.items():
                out[(ji, big_j, mm)] = lift @ v
    return out


def racah_oracle(j1, j2, j3) -> Recoupling:
    """Recoupling matrices by brute-force double CG contraction."""
    spins = tuple(_spin(j) for j in (j1, j2, j3))
    if any(j > Fraction(3, 2) for j in spins):
        raise ValueError("racah_oracle supports spins up to 3/2")
    left = _couple_three(*spins, left=True)
    right = _couple_three(*spins, left=False)
    totals = sorted({k[1] for k in left}, reverse=True)
    blocks, j12s, j23s = {}, {}, {}
    for big_j in totals:
        cols = sorted({k[0] for k in left if k[1] == big_j}, reverse=True)
        rows = sorted({k[0] for k in right if k[1] == big_j}, reverse=True)
        w = np.array([[right[(r, big_j, big_j)] @ left[(c, big_j, big_j)] for c in cols] for r in rows])
        blocks[big_j] = w
        j12s[big_j] = tuple(cols)
        j23s[big_j] = tuple(rows)
    return Recoupling(spins, blocks, j12s, j23s)
