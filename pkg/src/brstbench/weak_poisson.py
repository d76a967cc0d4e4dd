"""Weak Hamiltonian structures (V, R, T, P) and their Lagrange-structure cocycle.

Bivectors are stored as full sums P = P^ij etab_i etab_j, so the
components are half the coefficients of the ordered monomials.
"""

import logging
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .algebra import SuPoly
from .brst import koszul_tate_apply, phase
from .config import get_config
from .errors import InvolutivityViolation, ShapeError
from .jets import equals_mod_totald
from .polyvectors import (
    IdealSpec,
    InvolutiveSystem,
    PolyvectorSpace,
    Witness,
    eta_degree,
    ideal_membership_solve,
    schouten_bracket,
)
from .reports import Report
from .variables import eta_con, etabar_con, lam, lambar

logger = logging.getLogger(__name__)


def _zeros(space: PolyvectorSpace, rows: int, cols: Optional[int] = None) -> list:
    if cols is None:
        return [space.zero() for _ in range(rows)]
    return [[space.zero() for _ in range(cols)] for _ in range(rows)]


def _require_degree(label: str, value: SuPoly, p: int) -> None:
    if eta_degree(value) not in (-1, p):
        raise ShapeError(f"{label} must be a {p}-vector")


class WeakHamiltonianStructure(BaseModel):
    """An involutive system with a bivector P and the witnesses of its weak relations.

    [T_a, P] = -Y[a][k] R_k - T_b G[a][b]
    [R_k, P] = W[k][j] R_j - T_a M[k][a]
    [V, P]   = Z[k] R_k - T_a N[a]
    [P, P]   = U[k] R_k - T_a S[a]
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    core: InvolutiveSystem
    P: SuPoly
    Y: list = Field(default_factory=list)
    G: list = Field(default_factory=list)
    W: list = Field(default_factory=list)
    M: list = Field(default_factory=list)
    Z: list = Field(default_factory=list)
    N: list = Field(default_factory=list)
    U: list = Field(default_factory=list)
    S: list = Field(default_factory=list)

    @model_validator(mode="after")
    def _fill_and_check(self) -> "WeakHamiltonianStructure":
        space = self.core.space
        m, l = self.core.m, self.core.l  # noqa: E741
        shapes = {
            "Y": (l, m), "G": (l, l), "W": (m, m), "M": (m, l),
            "Z": (m, None), "N": (l, None), "U": (m, None), "S": (l, None),
        }
        for field, (rows, cols) in shapes.items():
            value = getattr(self, field)
            if not value:
                object.__setattr__(self, field, _zeros(space, rows, cols))
                continue
            if len(value) != rows or (
                cols is not None and any(len(row) != cols for row in value)
            ):
                raise ShapeError(f"Witness {field} does not match (m, l) = ({m}, {l})")
        _require_degree("P", self.P, 2)
        degrees = {"Y": 0, "G": 1, "W": 1, "M": 2}
        for field, p in degrees.items():
            for i, row in enumerate(getattr(self, field)):
                for j, entry in enumerate(row):
                    _require_degree(f"{field}[{i}][{j}]", entry, p)
        for field, p in {"Z": 1, "N": 2, "U": 2, "S": 3}.items():
            for i, entry in enumerate(getattr(self, field)):
                _require_degree(f"{field}[{i}]", entry, p)
        return self


def compatibility_residuals(whs: WeakHamiltonianStructure) -> List[tuple]:
    """Named residuals of the weak relations for T, R and V against P."""
    sys, P = whs.core, whs.P
    residuals = []
    for a in range(sys.l):
        value = schouten_bracket(sys.T[a], P)
        for k in range(sys.m):
            value = value + whs.Y[a][k] * sys.R[k]
        for b in range(sys.l):
            value = value + sys.T[b] * whs.G[a][b]
        residuals.append((f"[T{a + 1},P]", value))
    for k in range(sys.m):
        value = schouten_bracket(sys.R[k], P)
        for j in range(sys.m):
            value = value - whs.W[k][j] * sys.R[j]
        for a in range(sys.l):
            value = value + sys.T[a] * whs.M[k][a]
        residuals.append((f"[R{k + 1},P]", value))
    value = schouten_bracket(sys.V, P)
    for k in range(sys.m):
        value = value - whs.Z[k] * sys.R[k]
    for a in range(sys.l):
        value = value + sys.T[a] * whs.N[a]
    residuals.append(("[V,P]", value))
    return residuals


def weak_jacobi_identity_residual(whs: WeakHamiltonianStructure) -> SuPoly:
    """[P, P] minus its witnessed combination of R and T."""
    sys = whs.core
    value = schouten_bracket(whs.P, whs.P)
    for k in range(sys.m):
        value = value - whs.U[k] * sys.R[k]
    for a in range(sys.l):
        value = value + sys.T[a] * whs.S[a]
    return value


def check_weak_hamiltonian(whs: WeakHamiltonianStructure) -> Report:
    """Every weak relation of the structure, including the weak Jacobi identity."""
    report = Report(command="weak-hamiltonian")
    for name, value in compatibility_residuals(whs):
        report.add_residual(name, value)
    report.add_residual("[P,P]", weak_jacobi_identity_residual(whs))
    return report


def check_poisson_bivector(P: SuPoly) -> Report:
    """The strict Jacobi identity [P, P] = 0."""
    report = Report(command="poisson")
    report.add_residual("[P,P]", schouten_bracket(P, P))
    return report


def hamiltonian_vector_field(P: SuPoly, H: SuPoly) -> SuPoly:
    return schouten_bracket(P, H)


def discover_weak_witnesses(
    core: InvolutiveSystem, P: SuPoly, degree_bound: Optional[int] = None
) -> WeakHamiltonianStructure:
    """Fill Y..S by bounded ideal membership or raise InvolutivityViolation."""
    degree_bound = get_config().degree_bound if degree_bound is None else degree_bound
    space = core.space
    ideal = core.ideal()

    def solve(label: str, target: SuPoly) -> Witness:
        witness = ideal_membership_solve(target, ideal, degree_bound, space)
        if witness is None:
            raise InvolutivityViolation(f"{label} not found within degree bound {degree_bound}")
        return witness

    fields: dict = {}
    Y, G = _zeros(space, core.l, core.m), _zeros(space, core.l, core.l)
    for a in range(core.l):
        w = solve(f"[T{a + 1},P]", schouten_bracket(core.T[a], P))
        Y[a] = [-g for g in w.g]
        G[a] = [-f for f in w.f]
    W, M = _zeros(space, core.m, core.m), _zeros(space, core.m, core.l)
    for k in range(core.m):
        w = solve(f"[R{k + 1},P]", schouten_bracket(core.R[k], P))
        W[k] = list(w.g)
        M[k] = [-f for f in w.f]
    w = solve("[V,P]", schouten_bracket(core.V, P))
    fields["Z"], fields["N"] = list(w.g), [-f for f in w.f]
    w = solve("[P,P]", schouten_bracket(P, P))
    fields["U"], fields["S"] = list(w.g), [-f for f in w.f]
    return WeakHamiltonianStructure(core=core, P=P, Y=Y, G=G, W=W, M=M, **fields)


class Observable(BaseModel):
    """A function whose gauge variation lies in the constraint ideal.

    ``witness[k][a]`` gives R_k(O) = sum_a witness[k][a] T_a.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    representative: SuPoly
    witness: Optional[list] = None

    @classmethod
    def build(
        cls,
        sys: InvolutiveSystem,
        representative: SuPoly,
        witness: Optional[list] = None,
        degree_bound: Optional[int] = None,
    ) -> "Observable":
        _require_degree("Observable", representative, 0)
        representative = representative.with_roster(sys.space.roster.merge(representative.roster))
        if witness is None:
            witness = find_observable_witness(sys, representative, degree_bound)
            if witness is None:
                raise InvolutivityViolation(
                    "Gauge variation of the observable is not in the constraint ideal "
                    "within the degree bound"
                )
        else:
            for k in range(sys.m):
                value = schouten_bracket(sys.R[k], representative)
                for a in range(sys.l):
                    value = value - witness[k][a] * sys.T[a]
                if not value.is_zero():
                    raise InvolutivityViolation(f"Observable witness fails for R{k + 1}: {value}")
        return cls(representative=representative, witness=witness)


def find_observable_witness(
    sys: InvolutiveSystem, a: SuPoly, degree_bound: Optional[int] = None
) -> Optional[list]:
    """Rows g with R_k(a) = g[k][b] T_b, or None when the bound is too small."""
    degree_bound = get_config().degree_bound if degree_bound is None else degree_bound
    constraints = IdealSpec(generators_even=list(sys.T))
    rows = []
    for k in range(sys.m):
        found = ideal_membership_solve(schouten_bracket(sys.R[k], a), constraints, degree_bound, sys.space)
        if found is None:
            return None
        rows.append(found.f)
    return rows


def derived_bracket(P: SuPoly, a: SuPoly, b: SuPoly) -> SuPoly:
    """[[P, a], b]."""
    return schouten_bracket(schouten_bracket(P, a), b)


def derived_observable_bracket(
    whs: WeakHamiltonianStructure, O1: Observable, O2: Observable
) -> Observable:
    """[[P, O1], O2] as an observable; its witness must be found within the bound."""
    value = derived_bracket(whs.P, O1.representative, O2.representative)
    witness = find_observable_witness(whs.core, value)
    if witness is None:
        logger.debug("no observable witness found for bracket %s", value)
        raise InvolutivityViolation(
            f"Gauge variation of the bracket {value} is not in the constraint ideal "
            "within the degree bound"
        )
    return Observable(representative=value, witness=witness)


def jacobi_sum(P: SuPoly, a: SuPoly, b: SuPoly, c: SuPoly) -> SuPoly:
    return (
        derived_bracket(P, derived_bracket(P, a, b), c)
        + derived_bracket(P, derived_bracket(P, b, c), a)
        + derived_bracket(P, derived_bracket(P, c, a), b)
    )


def weak_jacobi_residual(
    whs: WeakHamiltonianStructure,
    O1: Observable,
    O2: Observable,
    O3: Observable,
    degree_bound: Optional[int] = None,
) -> Report:
    """Cyclic sum of derived brackets, reduced modulo the constraint ideal."""
    degree_bound = get_config().degree_bound if degree_bound is None else degree_bound
    report = Report(command="weak-jacobi")
    value = jacobi_sum(whs.P, O1.representative, O2.representative, O3.representative)
    if value.is_zero():
        return report
    witness = ideal_membership_solve(
        value, IdealSpec(generators_even=list(whs.core.T)), degree_bound, whs.core.space
    )
    if witness is None:
        report.add_residual("Jacobi cyclic sum", value)
        report.mark_not_found("membership of the Jacobi cyclic sum in (T)")
    else:
        report.notes.append("Jacobi cyclic sum lies in (T)")
    return report


def lagrange_cocycle_from_P(whs: WeakHamiltonianStructure) -> SuPoly:
    """The ghost-one, momentum-degree-two relative cocycle of the structure."""
    sys = whs.core
    ph = phase(sys)
    v, lift = ph.v, ph.lift
    L = ph.tau(lift(whs.P))
    for k in range(sys.m):
        L = L - v(lambar(k)) * lift(whs.Z[k])
        for j in range(sys.m):
            L = L - v(lam(k)) * v(lambar(j)) * lift(whs.W[k][j])
        for a in range(sys.l):
            L = L + v(lam(k)) * v(eta_con(a)) * lift(whs.M[k][a])
    for a in range(sys.l):
        L = L + v(eta_con(a)) * lift(whs.N[a])
        for k in range(sys.m):
            L = L + lift(whs.Y[a][k]) * v(lambar(k)) * v(etabar_con(a))
        for b in range(sys.l):
            L = L + v(eta_con(b)) * v(etabar_con(a)) * lift(whs.G[a][b])
    return L


def relative_cocycle_check(sys: InvolutiveSystem, L: SuPoly) -> Report:
    """delta L must vanish up to total derivatives."""
    report = Report(command="relative-cocycle")
    image = koszul_tate_apply(sys, L)
    if not equals_mod_totald(image, SuPoly(image.roster)):
        report.add_residual("delta L", image)
    return report

