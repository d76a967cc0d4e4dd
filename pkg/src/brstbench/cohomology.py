"""Bounded-degree linear solvers for physical observables, the stabilizer
cohomology H^p(J) and the classes behind conservation laws, symmetries and
Lagrange structures.

Every solver is exact linear algebra over Q: an ansatz with undetermined
coefficients up to a coefficient degree bound, a homogeneous system for the
unknowns and their membership witnesses, and a quotient of the solution
space by the ideal part reachable inside the same bound. Dimensions are
honest lower bounds; they may grow with the bound.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from . import linalg
from .algebra import Monomial, SuPoly
from .config import get_config
from .errors import InvalidDegree
from .expressions import format_canonical
from .polyvectors import (
    InvolutiveSystem,
    PolyvectorSpace,
    ideal_membership_solve,
    schouten_bracket,
)
from .reports import DimensionRow, Report

logger = logging.getLogger(__name__)


class SolveRequest(BaseModel):
    """Which polyvector degree to solve for, and how far to look."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    system: InvolutiveSystem
    p: int = 0
    degree_bound: int = Field(default_factory=lambda: get_config().degree_bound, ge=0)


class CohomologyBasis(BaseModel):
    """Representatives of a bounded cohomology computation."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: int
    degree_bound: int
    representatives: List[SuPoly] = Field(default_factory=list)
    witnesses: List[list] = Field(default_factory=list)
    raw_dimension: int = 0
    ideal_dimension: int = 0
    modded_out: List[str] = Field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.representatives)

    def row(self) -> DimensionRow:
        return DimensionRow(
            p=self.p,
            degree_bound=self.degree_bound,
            raw_dimension=self.raw_dimension,
            dimension=self.dimension,
        )

    def to_report(self, command: str) -> Report:
        report = Report(command=command)
        report.dimensions.append(self.row())
        report.representatives = [format_canonical(r) for r in self.representatives]
        if self.modded_out:
            report.notes.append("modulo " + " and ".join(self.modded_out))
        report.notes.append(f"lower bound at coefficient degree {self.degree_bound}")
        return report


class _Ansatz:
    """Columns of a homogeneous linear system, one per unknown coefficient."""

    def __init__(self) -> None:
        self.blocks: List[Tuple[str, List[SuPoly]]] = []
        self.size = 0

    def add(self, label: str, polys: List[SuPoly]) -> int:
        start = self.size
        self.blocks.append((label, polys))
        self.size += len(polys)
        return start


class _Equations:
    """Rows keyed by (condition, monomial)."""

    def __init__(self) -> None:
        self.index: Dict[Tuple[int, Monomial], int] = {}
        self.rows: List[Dict[int, Fraction]] = []

    def add(self, condition: int, column: int, poly: SuPoly, sign: int = 1) -> None:
        for mono, coeff in poly.terms.items():
            key = (condition, mono)
            row = self.index.get(key)
            if row is None:
                row = self.index[key] = len(self.rows)
                self.rows.append({})
            self.rows[row][column] = self.rows[row].get(column, Fraction(0)) + sign * coeff


def _combine(polys: Sequence[SuPoly], vector: Sequence[Fraction], start: int, zero: SuPoly) -> SuPoly:
    total = zero
    for offset, poly in enumerate(polys):
        value = vector[start + offset]
        if value:
            total = total + poly.scale(value)
    return total


def coefficient_degree(mono: Monomial) -> int:
    """Polynomial degree of a monomial in the coordinates."""
    return sum(e for name, e in mono if not name.startswith("etab_"))


def ideal_subspace(
    space: PolyvectorSpace,
    generators_even: Sequence[SuPoly],
    generators_odd: Sequence[SuPoly],
    p: int,
    degree_bound: int,
) -> List[SuPoly]:
    """Spanning set of the p-vectors of coefficient degree <= bound in J.

    Products of generators with bounded multipliers are combined so that
    every coefficient of degree above the bound cancels.
    """
    products: List[SuPoly] = []
    for gen in generators_even:
        products += [mono * gen for mono in space.basis(p, degree_bound)]
    if p >= 1:
        for gen in generators_odd:
            products += [mono * gen for mono in space.basis(p - 1, degree_bound)]
    products = [q for q in products if not q.is_zero()]
    if not products:
        return []
    high = _Equations()
    for column, product in enumerate(products):
        tail = SuPoly(
            product.roster,
            {m: c for m, c in product.terms.items() if coefficient_degree(m) > degree_bound},
        )
        high.add(0, column, tail)
    if not high.rows:
        return products
    zero = space.zero()
    return [
        _combine(products, vector, 0, zero)
        for vector in linalg.nullspace(high.rows, len(products))
    ]


def _quotient(
    candidates: Sequence[SuPoly], modulus: Sequence[SuPoly]
) -> List[int]:
    """Indices of candidates independent modulo the span of ``modulus``."""
    index: Dict[Monomial, int] = {}

    def vector(poly: SuPoly) -> Dict[int, Fraction]:
        row = {}
        for mono, coeff in poly.terms.items():
            row[index.setdefault(mono, len(index))] = coeff
        return row

    base_rows = [vector(q) for q in modulus]
    cand_rows = [vector(q) for q in candidates]
    ncols = len(index)
    chosen: List[int] = []
    rows = list(base_rows)
    current = linalg.rank(rows, ncols)
    for i, row in enumerate(cand_rows):
        trial = linalg.rank(rows + [row], ncols)
        if trial > current:
            chosen.append(i)
            rows.append(row)
            current = trial
    return chosen


def solve_observables(sys: InvolutiveSystem, degree_bound: Optional[int] = None) -> CohomologyBasis:
    """Functions a(x) with R_k(a) = U[k][a] T_a, modulo the ideal (T)."""
    d = get_config().degree_bound if degree_bound is None else degree_bound
    space = sys.space
    unknowns = space.coefficient_monomials(d)
    ansatz = _Ansatz()
    ansatz.add("a", unknowns)
    equations = _Equations()
    witness_columns: Dict[Tuple[int, int], Tuple[int, List[SuPoly]]] = {}
    for k, r in enumerate(sys.R):
        for column, mono in enumerate(unknowns):
            equations.add(k, column, schouten_bracket(r, mono))
        for a, t in enumerate(sys.T):
            multipliers = space.coefficient_monomials(d)
            start = ansatz.add(f"U{k}{a}", multipliers)
            witness_columns[(k, a)] = (start, multipliers)
            for offset, mono in enumerate(multipliers):
                equations.add(k, start + offset, mono * t, sign=-1)
    solutions = linalg.nullspace(equations.rows, ansatz.size)
    zero = space.zero()
    values = [_combine(unknowns, v, 0, zero) for v in solutions]
    raw = _nonzero_span(values)
    ideal = ideal_subspace(space, sys.T, [], 0, d)
    chosen = _quotient([values[i] for i in raw], ideal)
    logger.info("observables at d=%d: raw %d, classes %d", d, len(raw), len(chosen))
    representatives, witnesses = [], []
    for i in chosen:
        vector = solutions[raw[i]]
        representatives.append(values[raw[i]])
        witnesses.append([
            [_combine(witness_columns[(k, a)][1], vector, witness_columns[(k, a)][0], zero)
             for a in range(sys.l)]
            for k in range(sys.m)
        ])
    return CohomologyBasis(
        p=0, degree_bound=d, representatives=representatives, witnesses=witnesses,
        raw_dimension=len(raw), ideal_dimension=_span_rank(ideal),
        modded_out=["the constraint ideal"] if sys.l else [],
    )


def _nonzero_span(values: Sequence[SuPoly]) -> List[int]:
    """Indices of a basis of the span of ``values``."""
    return _quotient(values, [])


def _span_rank(polys: Sequence[SuPoly]) -> int:
    return len(_quotient(polys, []))


def solve_stabilizer_classes(request: SolveRequest) -> CohomologyBasis:
    """p-vectors f with [V,f], [T_a,f], [R_k,f] in J, modulo J (and constants at p = 0)."""
    sys, p, d = request.system, request.p, request.degree_bound
    space = sys.space
    if p < 0 or p > sys.n:
        raise InvalidDegree(f"Polyvector degree {p} outside 0..{sys.n}")
    unknowns = space.basis(p, d)
    ansatz = _Ansatz()
    ansatz.add("f", unknowns)
    equations = _Equations()
    conditions: List[Tuple[SuPoly, int]] = [(sys.V, p)]
    conditions += [(t, p - 1) for t in sys.T]
    conditions += [(r, p) for r in sys.R]
    for condition, (generator, q) in enumerate(conditions):
        for column, mono in enumerate(unknowns):
            equations.add(condition, column, schouten_bracket(generator, mono))
        for t in sys.T:
            multipliers = space.basis(q, d)
            start = ansatz.add(f"f{condition}", multipliers)
            for offset, mono in enumerate(multipliers):
                equations.add(condition, start + offset, mono * t, sign=-1)
        for r in sys.R:
            multipliers = space.basis(q - 1, d)
            start = ansatz.add(f"g{condition}", multipliers)
            for offset, mono in enumerate(multipliers):
                equations.add(condition, start + offset, mono * r, sign=-1)
    solutions = linalg.nullspace(equations.rows, ansatz.size)
    zero = space.zero()
    values = [_combine(unknowns, v, 0, zero) for v in solutions]
    raw = _nonzero_span(values)
    modulus = ideal_subspace(space, sys.T, sys.R, p, d)
    modded = []
    if modulus:
        modded.append("the ideal J")
    if p == 0:
        modulus = modulus + [SuPoly.constant(space.roster, 1)]
        modded.append("constants")
    chosen = _quotient([values[i] for i in raw], modulus)
    logger.info(
        "stabilizer classes p=%d d=%d: raw %d, classes %d", p, d, len(raw), len(chosen)
    )
    return CohomologyBasis(
        p=p, degree_bound=d,
        representatives=[values[raw[i]] for i in chosen],
        raw_dimension=len(raw), ideal_dimension=_span_rank(modulus),
        modded_out=modded,
    )


def solve_conservation_laws(sys: InvolutiveSystem, degree_bound: Optional[int] = None) -> CohomologyBasis:
    """Conserved charges: stabilizer classes of degree 0."""
    return solve_stabilizer_classes(_request(sys, 0, degree_bound))


def solve_symmetries(sys: InvolutiveSystem, degree_bound: Optional[int] = None) -> CohomologyBasis:
    """Characteristic symmetries: stabilizer classes of degree 1."""
    return solve_stabilizer_classes(_request(sys, 1, degree_bound))


def solve_lagrange_structures(sys: InvolutiveSystem, degree_bound: Optional[int] = None) -> CohomologyBasis:
    """Candidate weak Poisson bivectors: stabilizer classes of degree 2."""
    return solve_stabilizer_classes(_request(sys, 2, degree_bound))


def _request(sys: InvolutiveSystem, p: int, degree_bound: Optional[int]) -> SolveRequest:
    if degree_bound is None:
        return SolveRequest(system=sys, p=p)
    return SolveRequest(system=sys, p=p, degree_bound=degree_bound)


def massey_square_check(sys: InvolutiveSystem, P: SuPoly, degree_bound: Optional[int] = None) -> Report:
    """Whether [P, P] lies in J, so the bivector extends to a weak Poisson structure."""
    d = get_config().degree_bound if degree_bound is None else degree_bound
    report = Report(command="massey")
    square = schouten_bracket(P, P)
    witness = ideal_membership_solve(square, sys.ideal(), d, sys.space)
    if witness is None:
        report.add_residual("[P,P]", square)
        report.mark_not_found("membership of [P,P] in J")
        return report
    for k, g in enumerate(witness.g):
        if not g.is_zero():
            report.notes.append(f"U[{k}] = {format_canonical(g)}")
    for a, f in enumerate(witness.f):
        if not f.is_zero():
            report.notes.append(f"S[{a}] = {format_canonical(-f)}")
    return report


def dimension_table(
    sys: InvolutiveSystem, degrees: Sequence[int], degree_bounds: Sequence[int]
) -> Report:
    """Stabilizer-class dimensions for every (p, degree bound) pair."""
    report = Report(command="solve")
    for p in degrees:
        for d in degree_bounds:
            basis = solve_stabilizer_classes(SolveRequest(system=sys, p=p, degree_bound=d))
            report.dimensions.append(basis.row())
    return report
