from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from sympy import Rational, sqrt
from sympy.physics.quantum.cg import CG
from sympy.physics.wigner import wigner_6j

from dktwist.oracles import cg_oracle, lowering, racah_oracle, spin_dim

HALF = Fraction(1, 2)
SPINS = [HALF, Fraction(1), Fraction(3, 2)]


def _r(x):
    return Rational(x.numerator, x.denominator)


def test_spin_dim_and_lowering():
    assert spin_dim(Fraction(3, 2)) == 4
    lm = lowering(HALF)
    assert np.allclose(lm, [[0, 0], [1, 0]])
    with pytest.raises(ValueError):
        spin_dim(Fraction(1, 3))


@pytest.mark.parametrize("j1,j2", list(product(SPINS, SPINS)))
def test_cg_against_sympy(j1, j2):
    table = cg_oracle(j1, j2)
    d1, d2 = spin_dim(j1), spin_dim(j2)
    assert len(table) == d1 * d2
    for (big_j, mm), vec in table.items():
        want = np.zeros(d1 * d2)
        for a in range(d1):
            for b in range(d2):
                m1, m2 = j1 - a, j2 - b
                if m1 + m2 == mm:
                    want[a * d2 + b] = float(CG(_r(j1), _r(m1), _r(j2), _r(m2), _r(big_j), _r(mm)).doit())
        assert np.max(np.abs(vec - want)) < 1e-14


def test_cg_spin_half_pair():
    table = cg_oracle(HALF, HALF)
    r = 1 / np.sqrt(2)
    assert np.allclose(table[(Fraction(0), Fraction(0))], [0, r, -r, 0])
    assert np.allclose(table[(Fraction(1), Fraction(0))], [0, r, r, 0])


@pytest.mark.parametrize("spins", [(HALF, HALF, HALF), (HALF, Fraction(1), HALF), (Fraction(1), HALF, Fraction(1))])
def test_racah_against_six_j(spins):
    j1, j2, j3 = spins
    rec = racah_oracle(*spins)
    for big_j, block in rec.blocks.items():
        for r, j23 in enumerate(rec.j23_values[big_j]):
            for c, j12 in enumerate(rec.j12_values[big_j]):
                sign = (-1) ** int(j1 + j2 + j3 + big_j)
                six = wigner_6j(_r(j1), _r(j2), _r(j12), _r(j3), _r(big_j), _r(j23))
                want = sign * sqrt((2 * _r(j12) + 1) * (2 * _r(j23) + 1)) * six
                assert block[r, c] == pytest.approx(float(want), abs=1e-13)
        assert np.allclose(block @ block.T, np.eye(block.shape[0]), atol=1e-13)


def test_racah_half_cube_values():
    rec = racah_oracle(HALF, HALF, HALF)
    block = rec.blocks[HALF]
    assert np.allclose(block, [[0.5, np.sqrt(3) / 2], [np.sqrt(3) / 2, -0.5]], atol=1e-14)
    assert rec.blocks[Fraction(3, 2)].shape == (1, 1)


def test_racah_rejects_large_spin():
    with pytest.raises(ValueError):
        racah_oracle(2, HALF, HALF)
