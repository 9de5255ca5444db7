import numpy as np
import pytest

from oracle_helpers import kronecker_factor
from toralab import factor, intpoly
from toralab.errors import DegreeTooLarge


def test_irreducible_quadratic():
    assert factor.factor_over_q([1, -3, 1]) == [([1, -3, 1], 1)]


def test_perfect_square():
    p = intpoly.mul([1, -3, 1], [1, -3, 1])
    assert factor.factor_over_q(p) == [([1, -3, 1], 2)]


def test_block_charpoly_splits():
    p = intpoly.mul([1, -3, 1], [1, -4, 1])
    facs = factor.factor_over_q(p)
    assert facs == [([1, -4, 1], 1), ([1, -3, 1], 1)]
    # oracle agreement
    assert sorted(g for g, _ in facs) == kronecker_factor(p)


def test_reconstitution_exact():
    rng = np.random.default_rng(1)
    for _ in range(20):
        # random product of small monic polynomials with unit constant term
        parts = []
        for _ in range(rng.integers(1, 4)):
            deg = int(rng.integers(1, 4))
            coeffs = [int(x) for x in rng.integers(-3, 4, size=deg)]
            coeffs[0] = int(rng.choice([-1, 1]))
            parts.append(coeffs + [1])
        p = [1]
        for part in parts:
            p = intpoly.mul(p, part)
        facs = factor.factor_over_q(p)
        recon = [1]
        for g, mult in facs:
            recon = intpoly.mul(recon, intpoly.poly_pow(g, mult))
        assert recon == p


def test_kronecker_oracle_agreement():
    rng = np.random.default_rng(7)
    for _ in range(12):
        parts = []
        for _ in range(rng.integers(1, 3)):
            deg = int(rng.integers(1, 4))
            coeffs = [int(x) for x in rng.integers(-2, 3, size=deg)]
            coeffs[0] = int(rng.choice([-1, 1]))
            parts.append(coeffs + [1])
        p = [1]
        for part in parts:
            p = intpoly.mul(p, part)
        if intpoly.degree(p) > 8:
            continue
        mine = []
        for g, mult in factor.factor_over_q(p):
            mine.extend([g] * mult)
        assert sorted(mine) == kronecker_factor(p)


def test_degree_cap():
    with pytest.raises(DegreeTooLarge):
        factor.factor_over_q([1] + [0] * 24 + [1])


def test_cyclotomic_product():
    # x^4 - 1 = (x-1)(x+1)(x^2+1)
    facs = factor.factor_over_q([-1, 0, 0, 0, 1])
    degs = sorted(intpoly.degree(g) for g, _ in facs)
    assert degs == [1, 1, 2]
