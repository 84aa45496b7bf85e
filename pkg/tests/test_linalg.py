from fractions import Fraction

import sympy

from superloops.linalg import from_sympy, matrices_equal, rank, stack, to_domain, to_sympy


def test_rank_of_sparse_rows():
    rows = {0: {0: Fraction(1), 1: Fraction(2)}, 1: {0: Fraction(2), 1: Fraction(4)}}

    assert rank(rows, (2, 2)) == 1
    assert rank({0: {0: Fraction(1, 3)}, 2: {1: Fraction(-1)}}, (3, 2)) == 2


def test_rank_of_empty_matrices():
    assert rank({}, (0, 4)) == 0
    assert rank({0: {}}, (3, 3)) == 0


def test_stack_offsets_blocks():
    top = {0: {0: Fraction(1)}}
    bottom = {1: {2: Fraction(3)}}

    stacked, height = stack([(top, 2), (bottom, 2)])

    assert height == 4
    assert stacked == {0: {0: Fraction(1)}, 3: {2: Fraction(3)}}


def test_matrices_equal():
    left = to_domain({0: {0: Fraction(1, 2)}}, (2, 2))
    right = to_domain({0: {0: Fraction(2, 4)}}, (2, 2))

    assert matrices_equal(left, right)
    assert not matrices_equal(left, to_domain({}, (2, 2)))
    assert not matrices_equal(left, to_domain({}, (2, 3)))


def test_sympy_conversions():
    matrix = to_sympy([[Fraction(1, 2), Fraction(0)], [Fraction(3), Fraction(-1, 5)]])

    assert matrix[0, 0] == sympy.Rational(1, 2)
    assert from_sympy(matrix[1, 1]) == Fraction(-1, 5)
