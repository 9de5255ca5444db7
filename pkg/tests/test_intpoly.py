import numpy as np
import pytest

from toralab import intpoly
from toralab.exactalg import charpoly, det_bareiss, inverse_unimodular, \
    lll_reduce, minimal_poly_of_vector


def test_charpoly_cat_map():
    assert charpoly([[2, 1], [1, 1]]) == [1, -3, 1]


def test_charpoly_identity():
    assert charpoly([[1, 0], [0, 1]]) == [1, -2, 1]


def test_charpoly_block_product():
    # diag(A, B) charpoly = product of block charpolys, exactly
    m = [[2, 1, 0, 0], [1, 1, 0, 0], [0, 0, 3, 1], [0, 0, 2, 1]]
    assert charpoly(m) == intpoly.mul([1, -3, 1], [1, -4, 1])


def test_cayley_hamilton_exact():
    rng = np.random.default_rng(0)
    for _ in range(10):
        m = [[int(x) for x in row] for row in rng.integers(-4, 5, size=(4, 4))]
        p = charpoly(m)
        val = intpoly.eval_matrix(p, m)
        assert all(x == 0 for row in val for x in row)


def test_det_and_inverse():
    m = [[2, 1], [1, 1]]
    assert det_bareiss(m) == 1
    inv = inverse_unimodular(m)
    assert inv == [[1, -1], [-1, 2]]
    with pytest.raises(ValueError):
        inverse_unimodular([[2, 0], [0, 2]])


def test_squarefree_decomposition():
    p = intpoly.mul(intpoly.poly_pow([1, -3, 1], 2), [-1, 1])
    parts = dict()
    for fac, mult in intpoly.squarefree_decomposition(p):
        parts[tuple(fac)] = mult
    assert parts[(1, -3, 1)] == 2
    assert parts[(-1, 1)] == 1


def test_sturm_real_root_count():
    assert intpoly.count_real_roots([1, -3, 1]) == 2        # golden pair
    assert intpoly.count_real_roots([1, 0, 1]) == 0         # x^2 + 1
    assert intpoly.count_real_roots([0, -1, 0, 1]) == 3     # x^3 - x


def test_plus_minus_pair_detection():
    # x^2 - 4 has the pair 2, -2
    assert intpoly.has_real_plus_minus_pair([-4, 0, 1])
    # golden-mean polynomial has roots lam, 1/lam: no pair
    assert not intpoly.has_real_plus_minus_pair([1, -3, 1])
    # x^2 + 4 has the pair 2i, -2i
    assert intpoly.has_imaginary_pair([4, 0, 1])
    assert not intpoly.has_imaginary_pair([1, -3, 1])


def test_cyclotomic_detection():
    assert intpoly.is_cyclotomic([1, 1, 1, 1, 1])       # Phi_5
    assert intpoly.is_cyclotomic([-1, 1])               # x - 1
    assert intpoly.is_cyclotomic([1, -1, 1])            # Phi_6
    assert not intpoly.is_cyclotomic([1, -3, 1])
    # Lehmer's polynomial is reciprocal but not cyclotomic
    lehmer = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]
    assert not intpoly.is_cyclotomic(lehmer)


def test_minimal_poly_of_vector():
    m = [[2, 1, 0, 0], [1, 1, 0, 0], [0, 0, 3, 1], [0, 0, 2, 1]]
    assert minimal_poly_of_vector(m, [1, 0, 0, 0]) == [1, -3, 1]
    assert minimal_poly_of_vector(m, [0, 0, 1, 0]) == [1, -4, 1]
    assert minimal_poly_of_vector(m, [1, 0, 1, 0]) == \
        intpoly.mul([1, -3, 1], [1, -4, 1])


def test_lll_finds_short_vector():
    # lattice with a hidden short vector (3, 1, 0) + noise dimensions
    rows = [[3, 1, 0], [4, 7, 1], [9, 8, 5]]
    red = lll_reduce(rows)
    norms = [sum(x * x for x in r) for r in red]
    assert min(norms) <= 10
