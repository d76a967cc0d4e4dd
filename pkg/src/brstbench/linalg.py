"""Exact rational linear algebra on sparse row systems.

Rows are dictionaries ``column -> Fraction``. Elimination is delegated to
sympy's ``DomainMatrix`` over ``QQ``; pivoting is the deterministic
reduced row echelon form, so bases come out identical run to run.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Rational
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

Row = Dict[int, Fraction]


def _to_fraction(value: Rational) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def _domain_matrix(rows: Sequence[Row], ncols: int) -> DomainMatrix:
    dense = []
    for row in rows:
        line = [QQ(0)] * ncols
        for column, value in row.items():
            line[column] = QQ(value.numerator, value.denominator)
        dense.append(line)
    return DomainMatrix(dense, (len(rows), ncols), QQ)


def rref(rows: Sequence[Row], ncols: int) -> Tuple[List[List[Fraction]], Tuple[int, ...]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    rows = [row for row in rows if any(row.values())]
    if not rows or ncols == 0:
        return [], ()
    reduced, pivots = _domain_matrix(rows, ncols).rref()
    matrix = reduced.to_Matrix()
    echelon = [
        [_to_fraction(matrix[i, j]) for j in range(ncols)] for i in range(len(pivots))
    ]
    logger.debug("rref of %dx%d system: rank %d", len(rows), ncols, len(pivots))
    return echelon, tuple(pivots)


def rank(rows: Sequence[Row], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Row], ncols: int) -> List[List[Fraction]]:
    """Basis of the kernel, one vector per free column in increasing order."""
    echelon, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis: List[List[Fraction]] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = [Fraction(0)] * ncols
        vector[free] = Fraction(1)
        for line, pivot in zip(echelon, pivots):
            vector[pivot] = -line[free]
        basis.append(vector)
    return basis


def solve(rows: Sequence[Row], ncols: int, rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """One solution of ``A x = b`` with free unknowns set to zero, or None."""
    augmented = []
    for row, value in zip(rows, rhs):
        line = dict(row)
        if value:
            line[ncols] = Fraction(value)
        augmented.append(line)
    echelon, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    solution = [Fraction(0)] * ncols
    for line, pivot in zip(echelon, pivots):
        solution[pivot] = line[ncols]
    return solution
