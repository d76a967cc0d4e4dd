"""The antisymplectic ghost space, generating functions (S, Gamma) and the
superfield construction of the total BRST charge.

Antifields reuse phase names: x* is ``etab_<coord>``, eta* is ``xib_<a>``
and c* is ``lamb_<k>``. A superfield Phi = phi_0 + theta phi_1 has the
components

    x    -> (x, eta^i)          x*   -> (etab_i, xb_i)
    eta  -> (-eta_a, xi_a)      eta* -> (xib^a, etab^a)
    c    -> (c, -lam)           c*   -> (-lamb, -cb)

in the phase roster.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .algebra import SuPoly, VariableRoster, derive_left
from .brst import BRSTCharge, phase_roster_for
from .errors import MasterViolation, ShapeError
from .jets import (
    JetRoster,
    LocalFunctional,
    as_integrand,
    functional_poisson_bracket,
    total_derivative,
)
from .polyvectors import InvolutiveSystem, odd_bracket
from .reports import Report
from .variables import (
    cbar,
    eta_con,
    eta_eq,
    etabar,
    etabar_con,
    ghost_c,
    lam,
    lambar,
    xbar,
    xi,
    xibar,
)
from .weak_poisson import WeakHamiltonianStructure

logger = logging.getLogger(__name__)


class AntiSpace:
    """Fields phi = (x, eta_a, c) and antifields phi* = (x*, eta*, c*)."""

    def __init__(self, coords: Sequence[str], m: int, l: int):  # noqa: E741
        self.coords = tuple(coords)
        self.m, self.l = m, l
        self.phase: JetRoster = phase_roster_for(self.coords, m, l)
        self.pairs: List[Tuple[str, str]] = (
            [(c, etabar(c)) for c in self.coords]
            + [(eta_con(a), xibar(a)) for a in range(l)]
            + [(ghost_c(k), lambar(k)) for k in range(m)]
        )
        self.roster = VariableRoster(
            self.phase.spec(name) for pair in self.pairs for name in pair
        )
        ph = self.phase_var
        self.body: Dict[str, SuPoly] = {}
        self.shadow: Dict[str, SuPoly] = {}
        for c in self.coords:
            self.body[c], self.shadow[c] = ph(c), ph(eta_eq(c))
            self.body[etabar(c)], self.shadow[etabar(c)] = ph(etabar(c)), ph(xbar(c))
        for a in range(l):
            self.body[eta_con(a)], self.shadow[eta_con(a)] = -ph(eta_con(a)), ph(xi(a))
            self.body[xibar(a)], self.shadow[xibar(a)] = ph(xibar(a)), ph(etabar_con(a))
        for k in range(m):
            self.body[ghost_c(k)], self.shadow[ghost_c(k)] = ph(ghost_c(k)), -ph(lam(k))
            self.body[lambar(k)], self.shadow[lambar(k)] = -ph(lambar(k)), -ph(cbar(k))

    @classmethod
    def of(cls, sys: InvolutiveSystem) -> "AntiSpace":
        return sys.cached("antispace", lambda: cls(sys.coords, sys.m, sys.l))

    def phase_var(self, name: str) -> SuPoly:
        return SuPoly.var(self.phase, name)

    def var(self, name: str) -> SuPoly:
        return SuPoly.var(self.roster, name)

    def zero(self) -> SuPoly:
        return SuPoly(self.roster)

    def at_body(self, f: SuPoly) -> SuPoly:
        """f(phi_0, phi*_0) on the phase roster."""
        moved = {name: self.body[name] for name in f.variables() if name in self.body}
        return f.substitute(moved).with_roster(self.phase.merge(f.roster))

    def kinetic(self) -> SuPoly:
        total = SuPoly(self.phase)
        for field, antifield in self.pairs:
            total = total + self.body[antifield] * total_derivative(self.body[field])
        return total


def antibracket(F: SuPoly, G: SuPoly, pairs: Optional[Sequence[Tuple[str, str]]] = None) -> SuPoly:
    """(F, G) = dR F/d phi* dL G/d phi - dR F/d phi dL G/d phi*."""
    if pairs is None:
        roster = F.roster.merge(G.roster)
        pairs = _pairs_in(roster)
    return odd_bracket(F, G, pairs)


def _pairs_in(roster: VariableRoster) -> List[Tuple[str, str]]:
    pairs = []
    for spec in roster:
        if spec.jet_order:
            continue
        label = spec.name.split("_", 1)[-1]
        if spec.role == "coordinate" and etabar(spec.name) in roster:
            pairs.append((spec.name, etabar(spec.name)))
        elif spec.role == "constraint_ghost" and f"xib_{label}" in roster:
            pairs.append((spec.name, f"xib_{label}"))
        elif spec.role == "gauge_ghost" and f"lamb_{label}" in roster:
            pairs.append((spec.name, f"lamb_{label}"))
    return pairs


def split_by_momentum(S: SuPoly) -> Dict[int, SuPoly]:
    return S.split_by("mdeg")


class GeneratingPair(BaseModel):
    """Even S of ghost number two and odd Gamma of ghost number one."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    S: SuPoly
    Gamma: SuPoly
    coords: List[str] = Field(default_factory=list)
    m: int = 0
    l: int = 0  # noqa: E741

    @model_validator(mode="after")
    def _check_gradings(self) -> "GeneratingPair":
        for label, poly, expected in (("S", self.S, (0, 2)), ("Gamma", self.Gamma, (1, 1))):
            for mono in poly.terms:
                parity, ghost, _, mdeg = poly.monomial_grading(mono)
                if (parity, ghost) != expected or mdeg == 0:
                    raise ShapeError(
                        f"{label} term has parity {parity}, ghost {ghost}, momentum degree {mdeg}"
                    )
        return self

    @property
    def space(self) -> AntiSpace:
        return AntiSpace(self.coords, self.m, self.l)


def generators_from_structure(
    sys: InvolutiveSystem, whs: Optional[WeakHamiltonianStructure] = None
) -> GeneratingPair:
    """S = eta* T + x* R c + P + ghost terms, Gamma = x* V + ghost terms."""
    space = AntiSpace.of(sys)
    v = space.var

    def lift(p: SuPoly) -> SuPoly:
        return p.with_roster(space.roster)

    S = space.zero()
    for a in range(sys.l):
        S = S + v(xibar(a)) * lift(sys.T[a])
    for k in range(sys.m):
        S = S + lift(sys.R[k]) * v(ghost_c(k))
    if whs is not None:
        S = S + lift(whs.P)
    half = Fraction(1, 2)
    for g in range(sys.m):
        for j in range(sys.m):
            for k in range(sys.m):
                S = S + (v(lambar(g)) * lift(sys.B[j][k][g]) * v(ghost_c(j)) * v(ghost_c(k))).scale(half)
    for a in range(sys.l):
        for j in range(sys.m):
            for k in range(sys.m):
                S = S - (lift(sys.C[a][j][k]) * v(eta_con(a)) * v(ghost_c(j)) * v(ghost_c(k))).scale(half)
            for b in range(sys.l):
                S = S - v(xibar(a)) * lift(sys.A[j][a][b]) * v(ghost_c(j)) * v(eta_con(b))

    Gamma = lift(sys.V)
    for k in range(sys.m):
        for j in range(sys.m):
            Gamma = Gamma - v(lambar(j)) * lift(sys.E[k][j]) * v(ghost_c(k))
        for a in range(sys.l):
            Gamma = Gamma + lift(sys.F[a][k]) * v(eta_con(a)) * v(ghost_c(k))
    for a in range(sys.l):
        for b in range(sys.l):
            Gamma = Gamma + v(xibar(a)) * lift(sys.D[a][b]) * v(eta_con(b))
    return GeneratingPair(S=S, Gamma=Gamma, coords=list(sys.coords), m=sys.m, l=sys.l)


def check_generating_masters(gp: GeneratingPair) -> Report:
    """(S, S) = 0 and (S, Gamma) = 0."""
    report = Report(command="generating-masters")
    pairs = gp.space.pairs
    report.add_residual("(S,S)", antibracket(gp.S, gp.S, pairs))
    report.add_residual("(S,Gamma)", antibracket(gp.S, gp.Gamma, pairs))
    return report


def superfield_integral(F: SuPoly, space: AntiSpace) -> SuPoly:
    """h(F): the theta-component of F evaluated on superfields."""
    total = SuPoly(space.phase)
    for name in F.variables():
        shadow = space.shadow.get(name)
        if shadow is None:
            raise ShapeError(f"'{name}' is not a variable of the antifield space")
        total = total + shadow * space.at_body(derive_left(F, name))
    return total


def charge_from_generators(gp: GeneratingPair, verify: bool = True) -> BRSTCharge:
    """Total BRST charge built from the superfield integrals of S and Gamma."""
    if verify:
        report = check_generating_masters(gp)
        if not report.passed:
            raise MasterViolation(
                "; ".join(f"{r.name} = {r.value}" for r in report.residuals)
            )
    space = gp.space
    integrand = space.kinetic() + superfield_integral(gp.S, space) + space.at_body(gp.Gamma)
    rdegs = integrand.split_by("rdeg")
    logger.debug("superfield charge: %d terms", len(integrand.terms))
    return BRSTCharge(
        functional=LocalFunctional(integrand=integrand),
        max_rdeg_constructed=max(rdegs, default=0),
        coords=list(gp.coords), m=gp.m, l=gp.l,
    )


def multibracket(
    charge: BRSTCharge, n: int, args: Sequence["LocalFunctional | SuPoly"]
) -> LocalFunctional:
    """{...{Omega_n, a_1}, ..., a_n} for momentum-degree-zero arguments."""
    if len(args) != n:
        raise ShapeError(f"multibracket of order {n} needs {n} arguments, got {len(args)}")
    args = [as_integrand(arg) for arg in args]
    for arg in args:
        if any(arg.monomial_grading(mono)[3] for mono in arg.terms):
            raise ShapeError("multibracket arguments must have momentum degree 0")
    component = charge.by_momentum().get(n)
    if component is None or component.is_zero():
        logger.warning("charge has no momentum-degree-%d part; bracket of order %d is 0", n, n)
        return LocalFunctional(integrand=SuPoly(charge.roster()))
    value = component
    for arg in args:
        value = functional_poisson_bracket(value, arg.with_roster(charge.roster().merge(arg.roster))).integrand
    return LocalFunctional(integrand=value)


def weak_poisson_bracket(S: SuPoly, a: SuPoly, b: SuPoly) -> SuPoly:
    """((S_2, a), b)."""
    S2 = split_by_momentum(S).get(2, SuPoly(S.roster))
    return antibracket(antibracket(S2, a), b)


def weak_poisson_jacobi(S: SuPoly, a: SuPoly, b: SuPoly, c: SuPoly) -> SuPoly:
    return (
        weak_poisson_bracket(S, weak_poisson_bracket(S, a, b), c)
        + weak_poisson_bracket(S, weak_poisson_bracket(S, b, c), a)
        + weak_poisson_bracket(S, weak_poisson_bracket(S, c, a), b)
    )
