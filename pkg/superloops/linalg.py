"""Exact linear algebra over QQ for operator matrices.

Matrices are built from ``{row: {col: Fraction}}`` dictionaries and handed to
sympy's sparse ``DomainMatrix`` for rank and products.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, Mapping, Sequence, Tuple

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

SparseRows = Dict[int, Dict[int, Fraction]]


def to_domain(rows: Mapping[int, Mapping[int, Fraction]], shape: Tuple[int, int]) -> DomainMatrix:
    data = {
        r: {c: QQ(v.numerator, v.denominator) for c, v in cols.items() if v}
        for r, cols in rows.items()
    }
    return DomainMatrix({r: cols for r, cols in data.items() if cols}, shape, QQ)


def rank(rows: Mapping[int, Mapping[int, Fraction]], shape: Tuple[int, int]) -> int:
    if 0 in shape or not any(rows.values()):
        return 0
    value = to_domain(rows, shape).rank()
    logging.debug(f"rank {value} of {shape[0]}x{shape[1]} matrix")
    return value


def matrices_equal(left: DomainMatrix, right: DomainMatrix) -> bool:
    if left.shape != right.shape:
        return False
    if 0 in left.shape:
        return True
    return (left - right).rank() == 0


def stack(blocks: Sequence[Tuple[SparseRows, int]]) -> Tuple[SparseRows, int]:
    """Stack sparse row blocks vertically; each block is ``(rows, height)``."""
    stacked: SparseRows = {}
    offset = 0
    for rows, height in blocks:
        for r, cols in rows.items():
            stacked[offset + r] = dict(cols)
        offset += height
    return stacked, offset


def to_sympy(rows: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(v.numerator, v.denominator) for v in row] for row in rows]
    )


def from_sympy(value: sympy.Expr) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))
