"""Polyvector fields on R^n as polynomials in (x, etab), and the Schouten bracket."""

import itertools
import logging
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from . import linalg
from .algebra import Monomial, SuPoly, VariableRoster, derive_left, derive_right
from .errors import InvolutivityViolation, PointNotOnSurface, ShapeError
from .jets import JetRoster
from .reports import Report
from .variables import (
    Kind,
    base_spec,
    eps,
    etabar,
    jet_name,
    lam,
    polyvector_specs,
)

logger = logging.getLogger(__name__)

Point = Dict[str, Any]


def odd_bracket(f: SuPoly, g: SuPoly, pairs: Sequence[Tuple[str, str]]) -> SuPoly:
    """(f, g) = sum  d_R f/d dual . d_L g/d pos  -  d_R f/d pos . d_L g/d dual."""
    roster = f.roster.merge(g.roster)
    result = SuPoly(roster)
    for position, dual in pairs:
        left = derive_right(f, dual)
        if not left.is_zero():
            right = derive_left(g, position)
            if not right.is_zero():
                result = result + left * right
        left = derive_right(f, position)
        if not left.is_zero():
            right = derive_left(g, dual)
            if not right.is_zero():
                result = result - left * right
    return result


def coordinates_of(roster: VariableRoster) -> List[str]:
    return [
        s.name for s in roster
        if s.role == Kind.COORDINATE.value and s.jet_order == 0
    ]


def schouten_pairs(roster: VariableRoster) -> List[Tuple[str, str]]:
    """(x^i, etab_i) for every coordinate whose shadow is in the roster."""
    return [(x, etabar(x)) for x in coordinates_of(roster) if etabar(x) in roster]


def schouten_bracket(a: SuPoly, b: SuPoly) -> SuPoly:
    """Schouten bracket of polyvectors written in the odd frame etab_i."""
    roster = a.roster.merge(b.roster)
    return odd_bracket(a, b, schouten_pairs(roster))


def eta_degree(p: SuPoly) -> int:
    """Degree in the etab variables of a homogeneous polyvector (-1 for zero)."""
    degrees = {p.monomial_grading(m)[3] for m in p.terms}
    if len(degrees) > 1:
        raise ShapeError(f"Polyvector mixes degrees {sorted(degrees)}")
    return degrees.pop() if degrees else -1


class PolyvectorSpace:
    """Coordinates x^1..x^n and the odd frame etab_1..etab_n."""

    def __init__(self, coords: Sequence[str]):
        self.coords: Tuple[str, ...] = tuple(coords)
        self.roster = VariableRoster(polyvector_specs(self.coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    def x(self, name: str) -> SuPoly:
        return SuPoly.var(self.roster, name)

    def frame(self, name: str) -> SuPoly:
        return SuPoly.var(self.roster, etabar(name))

    def zero(self) -> SuPoly:
        return SuPoly(self.roster)

    def vector(self, components: Mapping[str, SuPoly]) -> SuPoly:
        """sum_i v^i etab_i."""
        result = self.zero()
        for name in self.coords:
            if name in components:
                result = result + components[name] * self.frame(name)
        return result

    def components(self, vector: SuPoly) -> Dict[str, SuPoly]:
        return {name: derive_left(vector, etabar(name)) for name in self.coords}

    def coefficient_monomials(self, degree_bound: int) -> List[SuPoly]:
        result = []
        for degree in range(degree_bound + 1):
            for combo in itertools.combinations_with_replacement(self.coords, degree):
                result.append(SuPoly.monomial(self.roster, [(c, 1) for c in combo]))
        return result

    def frame_monomials(self, p: int) -> List[SuPoly]:
        return [
            SuPoly.monomial(self.roster, [(etabar(c), 1) for c in combo])
            for combo in itertools.combinations(self.coords, p)
        ]

    def basis(self, p: int, degree_bound: int) -> List[SuPoly]:
        """All p-vector monomials with coefficient degree <= degree_bound."""
        if p < 0 or p > self.n or degree_bound < 0:
            return []
        return [
            c * f for f in self.frame_monomials(p) for c in self.coefficient_monomials(degree_bound)
        ]


def lie_derivative(space: PolyvectorSpace, v: SuPoly, f: SuPoly) -> SuPoly:
    """v(f) computed from components, independent of the bracket."""
    result = space.zero()
    for name, component in space.components(v).items():
        result = result + component * derive_left(f, name)
    return result


def vector_commutator(space: PolyvectorSpace, u: SuPoly, v: SuPoly) -> SuPoly:
    """[u, v]^j = u(v^j) - v(u^j), assembled component-wise."""
    u_comp = space.components(u)
    v_comp = space.components(v)
    return space.vector({
        name: lie_derivative(space, u, v_comp[name]) - lie_derivative(space, v, u_comp[name])
        for name in space.coords
    })


def _zeros(space: PolyvectorSpace, *shape: int) -> list:
    if len(shape) == 1:
        return [space.zero() for _ in range(shape[0])]
    return [_zeros(space, *shape[1:]) for _ in range(shape[0])]


class InvolutiveSystem(BaseModel):
    """x' + V + lam^k R_k = 0, T_a = 0, with structure-function witnesses.

    Index conventions (Python indices from 0):
      A[k][a][b]: [R_k, T_a] = A[k][a][b] T_b
      B[k][j][g]: [R_k, R_j] = B[k][j][g] R_g - T_a C[a][k][j]
      D[a][b]:    [V, T_a] = D[a][b] T_b
      E[k][j]:    [V, R_k] = E[k][j] R_j - T_a F[a][k]
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    coords: List[str]
    V: SuPoly
    R: List[SuPoly] = Field(default_factory=list)
    T: List[SuPoly] = Field(default_factory=list)
    A: list = Field(default_factory=list)
    B: list = Field(default_factory=list)
    C: list = Field(default_factory=list)
    D: list = Field(default_factory=list)
    E: list = Field(default_factory=list)
    F: list = Field(default_factory=list)
    sigma_points: List[Point] = Field(default_factory=list)
    name: str = "system"

    _space: Optional[PolyvectorSpace] = PrivateAttr(default=None)
    _cache: dict = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _fill_and_check(self) -> "InvolutiveSystem":
        space = self.space
        n, m, l = self.n, self.m, self.l
        defaults = {
            "A": (m, l, l), "B": (m, m, m), "C": (l, m, m),
            "D": (l, l), "E": (m, m), "F": (l, m),
        }
        for field, shape in defaults.items():
            value = getattr(self, field)
            if not value and all(shape):
                object.__setattr__(self, field, _zeros(space, *shape))
            elif not all(shape):
                object.__setattr__(self, field, _zeros(space, *shape) if shape[0] else [])
            else:
                _check_shape(field, value, shape)
        roster = space.roster
        self.V = self.V.with_roster(roster.merge(self.V.roster))
        if eta_degree(self.V) not in (-1, 1):
            raise ShapeError("Drift V must be a 1-vector")
        for k, r in enumerate(self.R):
            if eta_degree(r) not in (-1, 1):
                raise ShapeError(f"Gauge generator R[{k}] must be a 1-vector")
        for a, t in enumerate(self.T):
            if eta_degree(t) not in (-1, 0):
                raise ShapeError(f"Constraint T[{a}] must be a 0-vector")
        for k in range(m):
            for j in range(m):
                for g in range(m):
                    if self.B[k][j][g] != -self.B[j][k][g]:
                        raise ShapeError(f"B[{k}][{j}][{g}] is not antisymmetric in its lower pair")
                for a in range(l):
                    if self.C[a][k][j] != -self.C[a][j][k]:
                        raise ShapeError(f"C[{a}][{k}][{j}] is not antisymmetric in its lower pair")
        if n == 0 and (m or l):
            raise ShapeError("A system without coordinates cannot carry gauge data")
        return self

    @property
    def space(self) -> PolyvectorSpace:
        if self._space is None:
            self._space = PolyvectorSpace(self.coords)
        return self._space

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def m(self) -> int:
        return len(self.R)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.T)

    def R_components(self, k: int) -> Dict[str, SuPoly]:
        return self.space.components(self.R[k])

    def V_components(self) -> Dict[str, SuPoly]:
        return self.space.components(self.V)

    def ideal(self) -> "IdealSpec":
        return IdealSpec(generators_even=list(self.T), generators_odd=list(self.R))

    def cached(self, key: str, factory):  # type: ignore[no-untyped-def]
        if key not in self._cache:
            self._cache[key] = factory()
        return self._cache[key]


def _check_shape(field: str, value: list, shape: Tuple[int, ...]) -> None:
    if len(value) != shape[0]:
        raise ShapeError(f"Witness {field} has length {len(value)}, expected {shape[0]}")
    if len(shape) > 1:
        for item in value:
            _check_shape(field, item, shape[1:])


class IdealSpec(BaseModel):
    """The ideal J generated by 0-vectors T_a and 1-vectors R_k."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    generators_even: List[SuPoly] = Field(default_factory=list)
    generators_odd: List[SuPoly] = Field(default_factory=list)


class Witness(BaseModel):
    """a = sum f[a] T_a + sum g[k] R_k."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    f: List[SuPoly]
    g: List[SuPoly]

    def combine(self, ideal: IdealSpec, roster: VariableRoster) -> SuPoly:
        total = SuPoly(roster)
        for coeff, gen in zip(self.f, ideal.generators_even):
            total = total + coeff * gen
        for coeff, gen in zip(self.g, ideal.generators_odd):
            total = total + coeff * gen
        return total


def _coefficient_rows(
    columns: Sequence[SuPoly], target: SuPoly
) -> Tuple[List[Dict[int, Fraction]], List[Fraction]]:
    """Linear system sum_k u_k columns[k] = target, one row per monomial."""
    index: Dict[Monomial, int] = {}
    rows: List[Dict[int, Fraction]] = []
    rhs: List[Fraction] = []

    def row_for(mono: Monomial) -> int:
        if mono not in index:
            index[mono] = len(rows)
            rows.append({})
            rhs.append(Fraction(0))
        return index[mono]

    for k, column in enumerate(columns):
        for mono, coeff in column.terms.items():
            rows[row_for(mono)][k] = coeff
    for mono, coeff in target.terms.items():
        rhs[row_for(mono)] = coeff
    return rows, rhs


def ideal_membership_solve(
    a: SuPoly, ideal: IdealSpec, degree_bound: int, space: Optional[PolyvectorSpace] = None
) -> Optional[Witness]:
    """Find f, g of coefficient degree <= degree_bound with a = f.T + g.R.

    None means nothing was found inside the bound, not that a lies outside J.
    """
    space = space or PolyvectorSpace(coordinates_of(a.roster))
    if a.is_zero():
        return Witness(
            f=[space.zero() for _ in ideal.generators_even],
            g=[space.zero() for _ in ideal.generators_odd],
        )
    degrees = sorted({a.monomial_grading(m)[3] for m in a.terms})
    columns: List[SuPoly] = []
    owners: List[Tuple[str, int, SuPoly]] = []
    for p in degrees:
        for index, gen in enumerate(ideal.generators_even):
            for mono in space.basis(p, degree_bound):
                columns.append(mono * gen)
                owners.append(("f", index, mono))
        if p >= 1:
            for index, gen in enumerate(ideal.generators_odd):
                for mono in space.basis(p - 1, degree_bound):
                    columns.append(mono * gen)
                    owners.append(("g", index, mono))
    rows, rhs = _coefficient_rows(columns, a)
    logger.debug("membership ansatz: %d unknowns, %d equations", len(columns), len(rows))
    solution = linalg.solve(rows, len(columns), rhs) if columns else None
    if solution is None:
        return None
    f = [space.zero() for _ in ideal.generators_even]
    g = [space.zero() for _ in ideal.generators_odd]
    for value, (kind, index, mono) in zip(solution, owners):
        if value:
            target = f if kind == "f" else g
            target[index] = target[index] + mono.scale(value)
    witness = Witness(f=f, g=g)
    if witness.combine(ideal, a.roster) != a:
        raise ArithmeticError("membership witness failed verification")
    return witness


def involutivity_residuals(sys: InvolutiveSystem) -> List[Tuple[str, SuPoly]]:
    """Left minus right side of each structure relation, named by the bracket it checks."""
    residuals: List[Tuple[str, SuPoly]] = []
    m, l = sys.m, sys.l
    for k in range(m):
        for a in range(l):
            value = schouten_bracket(sys.R[k], sys.T[a])
            for b in range(l):
                value = value - sys.A[k][a][b] * sys.T[b]
            residuals.append((f"[R{k + 1},T{a + 1}]", value))
    for k in range(m):
        for j in range(m):
            value = schouten_bracket(sys.R[k], sys.R[j])
            for g in range(m):
                value = value - sys.B[k][j][g] * sys.R[g]
            for a in range(l):
                value = value + sys.T[a] * sys.C[a][k][j]
            residuals.append((f"[R{k + 1},R{j + 1}]", value))
    for a in range(l):
        value = schouten_bracket(sys.V, sys.T[a])
        for b in range(l):
            value = value - sys.D[a][b] * sys.T[b]
        residuals.append((f"[V,T{a + 1}]", value))
    for k in range(m):
        value = schouten_bracket(sys.V, sys.R[k])
        for j in range(m):
            value = value - sys.E[k][j] * sys.R[j]
        for a in range(l):
            value = value + sys.T[a] * sys.F[a][k]
        residuals.append((f"[V,R{k + 1}]", value))
    return residuals


def check_involutivity(sys: InvolutiveSystem) -> Report:
    """Report every nonzero involutivity residual of the system."""
    report = Report(command="involutivity")
    for name, value in involutivity_residuals(sys):
        report.add_residual(name, value)
    return report


def _evaluate_number(poly: SuPoly, point: Point) -> Fraction:
    value = poly.evaluate(point)
    if value.variables():
        raise PointNotOnSurface(f"Point {point} does not fix every coordinate")
    return value.constant_term()


def check_rank(sys: InvolutiveSystem) -> Report:
    """Full-rank conditions at every sample point of the constraint surface."""
    report = Report(command="rank")
    if not sys.sigma_points:
        report.fail("no sample points on the constraint surface")
        return report
    space = sys.space
    for point in sys.sigma_points:
        missing = [c for c in sys.coords if c not in point]
        if missing:
            raise ShapeError(f"Sample point {point} leaves {', '.join(missing)} unset")
        label = "(" + ", ".join(f"{c}={point[c]}" for c in sys.coords) + ")"
        full_point = {c: Fraction(point[c]) for c in sys.coords}
        for a, t in enumerate(sys.T):
            if _evaluate_number(t, full_point):
                raise PointNotOnSurface(f"T{a + 1} does not vanish at {label}")
        jacobian = [
            {i: _evaluate_number(derive_left(t, c), full_point) for i, c in enumerate(sys.coords)}
            for t in sys.T
        ]
        gauge = [
            {
                i: _evaluate_number(comp[c], full_point)
                for i, c in enumerate(sys.coords)
            }
            for comp in (space.components(r) for r in sys.R)
        ]
        dT = linalg.rank(jacobian, sys.n)
        dR = linalg.rank(gauge, sys.n)
        if dT != sys.l:
            report.fail(f"rank(dT) = {dT} != {sys.l} at {label}")
        if dR != sys.m:
            report.fail(f"rank(R) = {dR} != {sys.m} at {label}")
    return report


check_irreducibility = check_rank


def gauge_variation(sys: InvolutiveSystem) -> Tuple[List[SuPoly], List[SuPoly]]:
    """delta x^i = -eps^k R^i_k and delta lam^k = eps'^k + eps^j (E^k_j + lam^g B^k_jg)."""
    bases = [base_spec(Kind.COORDINATE, c, i) for i, c in enumerate(sys.coords)]
    bases += [base_spec(Kind.MULTIPLIER, str(k + 1), k) for k in range(sys.m)]
    bases += [base_spec(Kind.PARAMETER, str(k + 1), k) for k in range(sys.m)]
    roster = JetRoster(bases, max_order=1)

    def embed(p: SuPoly) -> SuPoly:
        return SuPoly(roster, p.terms)

    def var(name: str) -> SuPoly:
        return SuPoly.var(roster, name)

    delta_x: List[SuPoly] = []
    if sys.m:
        for c in sys.coords:
            total = SuPoly(roster)
            for k in range(sys.m):
                total = total - var(eps(k)) * embed(sys.R_components(k)[c])
            delta_x.append(total)
    delta_lambda: List[SuPoly] = []
    for k in range(sys.m):
        total = var(jet_name(eps(k), 1))
        for j in range(sys.m):
            inner = embed(sys.E[j][k])
            for g in range(sys.m):
                inner = inner + var(lam(g)) * embed(sys.B[j][g][k])
            total = total + var(eps(j)) * inner
        delta_lambda.append(total)
    return delta_x, delta_lambda


def discover_structure_functions(
    coords: Sequence[str],
    V: SuPoly,
    R: Sequence[SuPoly],
    T: Sequence[SuPoly],
    degree_bound: int,
    name: str = "system",
) -> InvolutiveSystem:
    """Fill in A..F by bounded ideal membership, or raise InvolutivityViolation."""
    space = PolyvectorSpace(coords)
    m, l = len(R), len(T)
    even_only = IdealSpec(generators_even=list(T))
    full = IdealSpec(generators_even=list(T), generators_odd=list(R))

    def solve(label: str, target: SuPoly, ideal: IdealSpec) -> Witness:
        witness = ideal_membership_solve(target, ideal, degree_bound, space)
        if witness is None:
            raise InvolutivityViolation(f"{label} not found within degree bound {degree_bound}")
        return witness

    A = _zeros(space, m, l, l)
    B = _zeros(space, m, m, m)
    C = _zeros(space, l, m, m)
    D = _zeros(space, l, l)
    E = _zeros(space, m, m)
    F = _zeros(space, l, m)
    for k in range(m):
        for a in range(l):
            A[k][a] = solve(f"[R{k + 1},T{a + 1}]", schouten_bracket(R[k], T[a]), even_only).f
    for k in range(m):
        for j in range(k + 1, m):
            w = solve(f"[R{k + 1},R{j + 1}]", schouten_bracket(R[k], R[j]), full)
            for g in range(m):
                B[k][j][g] = w.g[g]
                B[j][k][g] = -w.g[g]
            for a in range(l):
                C[a][k][j] = -w.f[a]
                C[a][j][k] = w.f[a]
    for a in range(l):
        D[a] = solve(f"[V,T{a + 1}]", schouten_bracket(V, T[a]), even_only).f
    for k in range(m):
        w = solve(f"[V,R{k + 1}]", schouten_bracket(V, R[k]), full)
        E[k] = w.g
        for a in range(l):
            F[a][k] = -w.f[a]
    return InvolutiveSystem(
        coords=list(coords), V=V, R=list(R), T=list(T),
        A=A, B=B, C=C, D=D, E=E, F=F, name=name,
    )
