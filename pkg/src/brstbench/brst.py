"""Classical BRST charge of an involutive system and its differentials.

The charge lives on the phase roster: positions (x, lam, eta^i, eta_a, c, xi)
paired with momenta (xb, lamb, etab_i, etab^a, cb, xib), all with jets.
"""

import logging
import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import linalg
from .algebra import Monomial, SuPoly, derive_left, derive_right
from .config import get_config
from .errors import AnsatzExhausted, InvolutivityViolation, ShapeError
from .expressions import format_canonical, parse_expression
from .jets import (
    JetRoster,
    LocalFunctional,
    apply_flows,
    base_of,
    characteristic,
    equals_mod_totald,
    functional_poisson_bracket,
    pair_flows,
    total_derivative,
    variational_derivatives,
)
from .polyvectors import InvolutiveSystem, check_involutivity
from .reports import Report
from .variables import (
    cbar,
    eta_con,
    eta_eq,
    etabar,
    etabar_con,
    ghost_c,
    jet_name,
    lam,
    lambar,
    phase_pairs,
    xbar,
    xi,
    xibar,
)

logger = logging.getLogger(__name__)

HEADER_RE = re.compile(
    r"#\s*brst-charge\s+coords=(?P<coords>\S*)\s+m=(?P<m>\d+)\s+l=(?P<l>\d+)"
    r"\s+max_rdeg=(?P<rdeg>\d+)"
)


def phase_roster_for(coords: Sequence[str], m: int, l: int, max_order: int = 2) -> JetRoster:  # noqa: E741
    """Phase-space jet roster of the fields, ghosts and their momenta."""
    pairs = phase_pairs(coords, m, l)
    bases = [p for p, _ in pairs] + [q for _, q in pairs]
    return JetRoster(bases, max_order, [(p.name, q.name) for p, q in pairs])


def phase_roster(sys: InvolutiveSystem, max_order: int = 2) -> JetRoster:
    """The jet phase roster of ``sys``, shared by every charge built from it."""
    roster = sys.cached(
        "phase_roster", lambda: phase_roster_for(sys.coords, sys.m, sys.l, max_order)
    )
    return roster.with_order(max_order)


class BRSTCharge(BaseModel):
    """An odd local functional of ghost number one, honest about its truncation."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    functional: LocalFunctional
    max_rdeg_constructed: int = 0
    coords: List[str] = Field(default_factory=list)
    m: int = 0
    l: int = 0  # noqa: E741

    @model_validator(mode="after")
    def _check_grading(self) -> "BRSTCharge":
        integrand = self.functional.integrand
        for mono in integrand.terms:
            parity, ghost, _, _ = integrand.monomial_grading(mono)
            if (parity, ghost) != (1, 1):
                raise ShapeError(
                    f"Charge term {format_canonical(SuPoly(integrand.roster, {mono: Fraction(1)}))}"
                    f" has parity {parity} and ghost number {ghost}"
                )
        return self

    @property
    def integrand(self) -> SuPoly:
        return self.functional.integrand

    def by_rdeg(self) -> Dict[int, SuPoly]:
        return self.integrand.split_by("rdeg")

    def by_momentum(self) -> Dict[int, SuPoly]:
        return self.integrand.split_by("mdeg")

    def roster(self) -> JetRoster:
        roster = self.integrand.roster
        if isinstance(roster, JetRoster) and roster.pairs:
            return roster
        return phase_roster_for(self.coords, self.m, self.l)

    def plus(self, extra: SuPoly, max_rdeg: Optional[int] = None) -> "BRSTCharge":
        return self.model_copy(update={
            "functional": LocalFunctional(integrand=self.integrand + extra),
            "max_rdeg_constructed": self.max_rdeg_constructed if max_rdeg is None else max_rdeg,
        })

    def __str__(self) -> str:
        return str(self.functional)


class _Phase:
    """Variable access for one system on its phase roster."""

    def __init__(self, sys: InvolutiveSystem, roster: JetRoster):
        self.sys = sys
        self.roster = roster
        self.R = [
            {c: comp.with_roster(roster) for c, comp in sys.R_components(k).items()}
            for k in range(sys.m)
        ]
        self.V = {c: comp.with_roster(roster) for c, comp in sys.V_components().items()}

    def v(self, name: str, order: int = 0) -> SuPoly:
        return SuPoly.var(self.roster, jet_name(name, order))

    def lift(self, p: SuPoly) -> SuPoly:
        return p.with_roster(self.roster)

    def zero(self) -> SuPoly:
        return SuPoly(self.roster)

    def tau(self, f: SuPoly) -> SuPoly:
        """eta^i d/dx^i + xb_i d/d etab_i."""
        result = self.zero()
        for c in self.sys.coords:
            result = result + self.v(eta_eq(c)) * derive_left(f, c)
            result = result + self.v(xbar(c)) * derive_left(f, etabar(c))
        return result

    def dynamics(self, c: str) -> SuPoly:
        """x'^i + V^i + lam^k R^i_k."""
        flow = self.v(c, 1) + self.V[c]
        for k in range(self.sys.m):
            flow = flow + self.v(lam(k)) * self.R[k][c]
        return flow

    def gauge_tail(self, k: int) -> SuPoly:
        """Everything multiplying c^k in the boundary charge except lamb_k'."""
        sys, v, lift = self.sys, self.v, self.lift
        inner = self.zero()
        for c in sys.coords:
            inner = inner + self.R[k][c] * v(xbar(c))
        for j in range(sys.m):
            inner = inner + v(lambar(j)) * lift(sys.E[k][j])
            for g in range(sys.m):
                inner = inner + v(lam(j)) * lift(sys.B[j][k][g]) * v(lambar(g))
        for a in range(sys.l):
            for j in range(sys.m):
                inner = inner + v(lam(j)) * lift(sys.C[a][k][j]) * v(eta_con(a))
            inner = inner - lift(sys.F[a][k]) * v(eta_con(a))
            for b in range(sys.l):
                inner = inner - lift(sys.A[k][a][b]) * v(etabar_con(a)) * v(eta_con(b))
        for ci in sys.coords:
            for cj in sys.coords:
                d = derive_left(self.R[k][ci], cj)
                if not d.is_zero():
                    inner = inner - d * v(etabar(ci)) * v(eta_eq(cj))
        return inner

    def noether_tail(self, a: int) -> SuPoly:
        """Everything multiplying -xib^a in the boundary charge except eta_a'."""
        sys, v, lift = self.sys, self.v, self.lift
        inner = self.zero()
        for b in range(sys.l):
            inner = inner + v(eta_con(b)) * lift(sys.D[a][b])
            for k in range(sys.m):
                inner = inner + v(lam(k)) * lift(sys.A[k][a][b]) * v(eta_con(b))
        for c in sys.coords:
            inner = inner - v(eta_eq(c)) * lift(derive_left(sys.T[a], c))
        return inner

    def psi(self, k: int) -> SuPoly:
        sys, v = self.sys, self.v
        total = self.zero()
        for j in range(sys.m):
            for g in range(sys.m):
                total = total + v(ghost_c(g)) * v(ghost_c(j)) * self.lift(sys.B[j][g][k])
        return total.scale(Fraction(1, 2))

    def theta(self, a: int) -> SuPoly:
        sys, v = self.sys, self.v
        quadratic = self.zero()
        for j in range(sys.m):
            for g in range(sys.m):
                quadratic = quadratic + v(ghost_c(j)) * v(ghost_c(g)) * self.lift(sys.C[a][j][g])
        total = quadratic.scale(Fraction(1, 2))
        for j in range(sys.m):
            for b in range(sys.l):
                total = total + v(ghost_c(j)) * v(xibar(b)) * self.lift(sys.A[j][b][a])
        return total


def phase(sys: InvolutiveSystem) -> _Phase:
    return sys.cached("phase", lambda: _Phase(sys, phase_roster(sys)))


def boundary_integrand(sys: InvolutiveSystem) -> SuPoly:
    """Resolution degrees 0 and 1 of the charge."""
    ph = phase(sys)
    v = ph.v
    total = ph.zero()
    for c in sys.coords:
        total = total + v(etabar(c)) * ph.dynamics(c)
    for a in range(sys.l):
        total = total + v(etabar_con(a)) * ph.lift(sys.T[a])
    for k in range(sys.m):
        total = total + v(ghost_c(k)) * (v(lambar(k), 1) + ph.gauge_tail(k))
    for a in range(sys.l):
        total = total - v(xibar(a)) * (ph.noether_tail(a) + v(eta_con(a), 1))
    return total


def second_order_integrand(sys: InvolutiveSystem) -> SuPoly:
    """Resolution-degree-two terms fixed by the structure functions."""
    ph = phase(sys)
    v = ph.v
    total = ph.zero()
    for k in range(sys.m):
        psi = ph.psi(k)
        total = total + v(cbar(k)) * psi + v(lambar(k)) * ph.tau(psi)
    for a in range(sys.l):
        theta = ph.theta(a)
        total = total + v(xi(a)) * theta + v(eta_con(a)) * ph.tau(theta)
    return total


def build_classical_charge(sys: InvolutiveSystem, verify: bool = True) -> BRSTCharge:
    """Omega_0 + Omega_1 + Omega_2 from the structure functions of an involutive system."""
    if verify:
        report = check_involutivity(sys)
        if not report.passed:
            names = ", ".join(r.name for r in report.residuals)
            raise InvolutivityViolation(f"Structure relations fail: {names}")
    integrand = boundary_integrand(sys) + second_order_integrand(sys)
    logger.debug("classical charge of %s: %d terms", sys.name, len(integrand.terms))
    return BRSTCharge(
        functional=LocalFunctional(integrand=integrand),
        max_rdeg_constructed=2,
        coords=list(sys.coords), m=sys.m, l=sys.l,
    )


def classical_charge(sys: InvolutiveSystem) -> BRSTCharge:
    """Cached charge without the involutivity gate, used by the differentials."""
    return sys.cached("charge", lambda: build_classical_charge(sys, verify=False))


def koszul_tate_images(sys: InvolutiveSystem) -> Dict[str, SuPoly]:
    """delta on base variables; jets follow by prolongation."""

    def build() -> Dict[str, SuPoly]:
        ph = phase(sys)
        v, lift = ph.v, ph.lift
        images: Dict[str, SuPoly] = {}
        for c in sys.coords:
            images[eta_eq(c)] = ph.dynamics(c)
        for a in range(sys.l):
            images[eta_con(a)] = lift(sys.T[a])
            images[xi(a)] = -ph.noether_tail(a) - v(eta_con(a), 1)
        for k in range(sys.m):
            value = ph.zero()
            for c in sys.coords:
                value = value - v(etabar(c)) * ph.R[k][c]
            images[lambar(k)] = value
        for c in sys.coords:
            value = v(etabar(c), 1)
            for j in sys.coords:
                value = value - lift(derive_left(ph.V[j], c)) * v(etabar(j))
                for k in range(sys.m):
                    value = value - v(lam(k)) * derive_left(ph.R[k][j], c) * v(etabar(j))
            for a in range(sys.l):
                value = value - v(etabar_con(a)) * lift(derive_left(sys.T[a], c))
            images[xbar(c)] = value
        for k in range(sys.m):
            images[cbar(k)] = v(lambar(k), 1) + ph.gauge_tail(k)
        return images

    return sys.cached("koszul_tate", build)


def koszul_tate_apply(sys: InvolutiveSystem, f: SuPoly) -> SuPoly:
    """The Koszul-Tate differential delta, an odd derivation lowering rdeg by one."""
    return apply_flows(koszul_tate_images(sys), f.with_roster(phase_roster(sys).merge(f.roster)))


def _boundary_tails(sys: InvolutiveSystem) -> SuPoly:
    """c^k (gauge tail) - xib^a (Noether tail): the x-dependent rdeg-1 part of the charge."""
    ph = phase(sys)
    total = ph.zero()
    for k in range(sys.m):
        total = total + ph.v(ghost_c(k)) * ph.gauge_tail(k)
    for a in range(sys.l):
        total = total - ph.v(xibar(a)) * ph.noether_tail(a)
    return total


def longitudinal_images(sys: InvolutiveSystem) -> Dict[str, SuPoly]:
    """gamma on base variables, tabulated from the structure functions; jets follow by prolongation."""

    def build() -> Dict[str, SuPoly]:
        ph = phase(sys)
        v, lift = ph.v, ph.lift
        components = sys.space.components
        images: Dict[str, SuPoly] = {}
        for c in sys.coords:
            value = ph.zero()
            for k in range(sys.m):
                value = value + v(ghost_c(k)) * ph.R[k][c]
            images[c] = value
        for g in range(sys.m):
            value = -v(ghost_c(g), 1)
            for k in range(sys.m):
                value = value + v(ghost_c(k)) * lift(sys.E[k][g])
                for j in range(sys.m):
                    value = value + v(ghost_c(k)) * v(lam(j)) * lift(sys.B[j][k][g])
            images[lam(g)] = value
        for ci in sys.coords:
            value = ph.zero()
            for k in range(sys.m):
                for cj in sys.coords:
                    value = value + v(ghost_c(k)) * derive_left(ph.R[k][ci], cj) * v(eta_eq(cj))
                for a in range(sys.l):
                    value = value + v(ghost_c(k)) * lift(components(sys.F[a][k])[ci]) * v(eta_con(a))
                    for j in range(sys.m):
                        C = lift(components(sys.C[a][k][j])[ci])
                        value = value - v(ghost_c(k)) * v(lam(j)) * C * v(eta_con(a))
            images[eta_eq(ci)] = value
        for a in range(sys.l):
            value = ph.zero()
            for k in range(sys.m):
                for b in range(sys.l):
                    value = value + v(ghost_c(k)) * lift(sys.A[k][a][b]) * v(eta_con(b))
            images[eta_con(a)] = value
        for k in range(sys.m):
            images[ghost_c(k)] = ph.psi(k)
        for a in range(sys.l):
            value = ph.zero()
            for b in range(sys.l):
                for j in range(sys.m):
                    A = sys.A[j][a][b]
                    value = value + v(xi(b)) * v(ghost_c(j)) * lift(A)
                    for ci in sys.coords:
                        dA = lift(derive_left(A, ci))
                        value = value + v(eta_con(b)) * v(eta_eq(ci)) * v(ghost_c(j)) * dA
            images[xi(a)] = value

        tails = _boundary_tails(sys)
        for ci in sys.coords:
            images[xbar(ci)] = -derive_left(tails, ci)
            value = ph.zero()
            for a in range(sys.l):
                value = value + v(xibar(a)) * lift(derive_left(sys.T[a], ci))
            for k in range(sys.m):
                for cm in sys.coords:
                    value = value - v(ghost_c(k)) * derive_left(ph.R[k][cm], ci) * v(etabar(cm))
            images[etabar(ci)] = value
        for k in range(sys.m):
            value = ph.zero()
            for j in range(sys.m):
                for g in range(sys.m):
                    value = value - v(ghost_c(j)) * lift(sys.B[k][j][g]) * v(lambar(g))
                for a in range(sys.l):
                    value = value - v(ghost_c(j)) * lift(sys.C[a][j][k]) * v(eta_con(a))
            for a in range(sys.l):
                for b in range(sys.l):
                    value = value + v(xibar(a)) * lift(sys.A[k][a][b]) * v(eta_con(b))
            images[lambar(k)] = value
        for a in range(sys.l):
            value = v(xibar(a), 1)
            for k in range(sys.m):
                value = value - v(ghost_c(k)) * lift(sys.F[a][k])
                for j in range(sys.m):
                    value = value + v(ghost_c(k)) * v(lam(j)) * lift(sys.C[a][k][j])
                for b in range(sys.l):
                    value = value - v(ghost_c(k)) * lift(sys.A[k][b][a]) * v(etabar_con(b))
            for b in range(sys.l):
                value = value - v(xibar(b)) * lift(sys.D[b][a])
                for k in range(sys.m):
                    value = value - v(xibar(b)) * v(lam(k)) * lift(sys.A[k][b][a])
            images[etabar_con(a)] = value
        ghost_terms = second_order_integrand(sys)
        for k in range(sys.m):
            images[cbar(k)] = derive_right(ghost_terms, ghost_c(k))
        for a in range(sys.l):
            images[xibar(a)] = -ph.theta(a)
        return {name: image for name, image in images.items() if not image.is_zero()}

    return sys.cached("longitudinal", build)


def longitudinal_apply(sys: InvolutiveSystem, f: SuPoly) -> SuPoly:
    """gamma: the resolution-degree-preserving part of the BRST differential."""
    return apply_flows(longitudinal_images(sys), f.with_roster(phase_roster(sys).merge(f.roster)))


def brst_differential_apply(charge: BRSTCharge, f: SuPoly) -> Dict[int, SuPoly]:
    """s f = {Omega, f}, split by resolution degree of the result."""
    roster = charge.roster().merge(f.roster)
    return apply_flows(characteristic(charge.functional), f.with_roster(roster)).split_by("rdeg")


def master_residual(charge: BRSTCharge, rdeg_cutoff: int) -> Report:
    """{Omega, Omega} modulo total derivatives, degree by degree."""
    report = Report(command="master")
    square = functional_poisson_bracket(charge.functional, charge.functional).integrand
    parts = square.split_by("rdeg")
    logger.debug("master residual: %d terms over rdeg %s", len(square.terms), sorted(parts))
    for rdeg, part in parts.items():
        if rdeg > rdeg_cutoff:
            continue
        if not equals_mod_totald(part, SuPoly(part.roster)):
            report.add_residual(f"{{Omega,Omega}} at rdeg {rdeg}", part, rdeg=rdeg)
    report.notes.append(f"charge constructed through rdeg {charge.max_rdeg_constructed}")
    return report


def noether_identity_residual(sys: InvolutiveSystem) -> List[SuPoly]:
    """T_a' - dT_a/dx^i (x'^i + V^i + lam^k R^i_k) + (lam^k A^b_ka + D^b_a) T_b, per constraint."""
    ph = phase(sys)
    residuals = []
    for a in range(sys.l):
        T = ph.lift(sys.T[a])
        value = total_derivative(T)
        for c in sys.coords:
            value = value - ph.lift(derive_left(sys.T[a], c)) * ph.dynamics(c)
        for b in range(sys.l):
            weight = ph.lift(sys.D[a][b])
            for k in range(sys.m):
                weight = weight + ph.v(lam(k)) * ph.lift(sys.A[k][a][b])
            value = value + weight * ph.lift(sys.T[b])
        residuals.append(value)
    return residuals


def check_noether_identity(sys: InvolutiveSystem) -> Report:
    """Report the Noether identity residual of every constraint."""
    report = Report(command="noether")
    for a, residual in enumerate(noether_identity_residual(sys)):
        report.add_residual(f"Noether identity of T{a + 1}", residual)
    return report


def _pair_rdeg(roster: JetRoster, base: str) -> int:
    partner = roster.partner_map()[base]
    return roster.spec(base).grading.rdeg + roster.spec(partner).grading.rdeg


def gamma_square_check(sys: InvolutiveSystem, charge: Optional[BRSTCharge] = None) -> Report:
    """gamma^2 + delta s1 + s1 delta = 0 on the generated base variables.

    Variables whose first-order image needs charge terms beyond those
    constructed are listed as skipped.
    """
    charge = charge or classical_charge(sys)
    roster = phase_roster(sys)
    report = Report(command="gamma-square")
    complete = charge.max_rdeg_constructed >= 3
    flows = characteristic(charge.functional)
    images: Dict[int, Dict[str, SuPoly]] = {0: {}, 1: {}}
    for base, flow in flows.items():
        rdeg = roster.spec(base).grading.rdeg
        parts = flow.split_by("rdeg")
        for shift in images:
            part = parts.get(rdeg + shift)
            if part is not None and not part.is_zero():
                images[shift][base] = part
    delta = koszul_tate_images(sys)
    incomplete = {b for b in roster.base_names if _pair_rdeg(roster, b) > 1}
    skipped = []
    for base in roster.base_names:
        if not complete:
            touched = {base_of(roster, v)[0] for v in delta.get(base, SuPoly(roster)).variables()}
            if base in incomplete or touched & incomplete:
                skipped.append(base)
                continue
        f = SuPoly.var(roster, base)
        value = apply_flows(images[0], apply_flows(images[0], f))
        value = value + apply_flows(delta, apply_flows(images[1], f))
        value = value + apply_flows(images[1], apply_flows(delta, f))
        report.add_residual(f"gamma^2 + [delta, s1] on {base}", value)
    if skipped:
        report.notes.append("skipped (needs rdeg 3 charge terms): " + ", ".join(skipped))
    return report


# -- homological perturbation ----------------------------------------------


def graded_monomials(
    roster: JetRoster,
    names: Sequence[str],
    target: Tuple[int, int, int, int],
    degree_bound: int,
) -> List[Monomial]:
    """Monomials in ``names`` of total degree <= bound with the given grading."""
    gradings = roster.gradings
    odd = roster.odd
    names = sorted(names, key=roster.rank.__getitem__)
    found: List[Monomial] = []

    def walk(index: int, degree: int, grading: Tuple[int, int, int, int], factors: list) -> None:
        if grading[2] > target[2] or grading[3] > target[3]:
            return
        if (grading[0] % 2, grading[1], grading[2], grading[3]) == target:
            found.append(tuple(factors))
        if degree == degree_bound:
            return
        for position in range(index, len(names)):
            name = names[position]
            p, g, r, m = gradings[name]
            max_exp = 1 if name in odd else degree_bound - degree
            for exponent in range(1, max_exp + 1):
                walk(
                    position + 1,
                    degree + exponent,
                    (grading[0] + p * exponent, grading[1] + g * exponent,
                     grading[2] + r * exponent, grading[3] + m * exponent),
                    factors + [(name, exponent)],
                )

    walk(0, 0, (0, 0, 0, 0), [])
    return found


def _euler_columns(polys: Sequence[SuPoly]) -> List[Dict[Tuple[str, Monomial], Fraction]]:
    """Euler derivative coefficients: zero exactly when a poly is a total derivative."""
    columns = []
    for poly in polys:
        column: Dict[Tuple[str, Monomial], Fraction] = {}
        for base, variation in variational_derivatives(poly).items():
            for mono, coeff in variation.terms.items():
                column[(base, mono)] = coeff
        constant = poly.constant_term()
        if constant:
            column[("", ())] = constant
        columns.append(column)
    return columns


def _solve_correction(
    charge: BRSTCharge,
    residual: SuPoly,
    rdeg: int,
    degree_bound: int,
) -> Optional[SuPoly]:
    roster = charge.roster()
    mdegs = sorted(charge.by_momentum()) or [1]
    jet_cap = get_config().ansatz_jet_order
    names = [
        jet_name(base, order) for base in roster.base_names for order in range(jet_cap + 1)
    ]
    roster = roster.with_order(jet_cap)
    ansatz: List[SuPoly] = []
    for mdeg in mdegs:
        for mono in graded_monomials(roster, names, (1, 1, rdeg + 1, mdeg), degree_bound):
            ansatz.append(SuPoly(roster, {mono: Fraction(1)}))
    logger.debug("HPT ansatz at rdeg %d: %d monomials", rdeg + 1, len(ansatz))
    if not ansatz:
        return None
    flows = characteristic(charge.functional)
    variations = variational_derivatives(charge.integrand)
    images = []
    for x in ansatz:
        value = pair_flows(flows, variational_derivatives(x), roster)
        value = value + pair_flows(characteristic(x), variations, roster)
        images.append(value.split_by("rdeg").get(rdeg, SuPoly(roster)))
    columns = _euler_columns(images + [residual])
    target = columns.pop()
    index: Dict[Tuple[str, Monomial], int] = {}
    for column in columns + [target]:
        for key in column:
            index.setdefault(key, len(index))
    rows: List[Dict[int, Fraction]] = [{} for _ in index]
    rhs = [Fraction(0)] * len(index)
    for k, column in enumerate(columns):
        for key, coeff in column.items():
            rows[index[key]][k] = coeff
    for key, coeff in target.items():
        rhs[index[key]] = -coeff
    solution = linalg.solve(rows, len(ansatz), rhs)
    logger.debug("HPT system at rdeg %d: %d equations, solvable=%s", rdeg, len(rows), solution is not None)
    if solution is None:
        return None
    correction = SuPoly(roster)
    for value, x in zip(solution, ansatz):
        if value:
            correction = correction + x.scale(value)
    return correction


def extend_charge_hpt(
    charge: BRSTCharge, target_rdeg: Optional[int] = None, degree_bound: Optional[int] = None
) -> BRSTCharge:
    """Add higher resolution-degree terms until {Omega, Omega} vanishes through target_rdeg."""
    config = get_config()
    target_rdeg = config.target_rdeg if target_rdeg is None else target_rdeg
    degree_bound = config.degree_bound if degree_bound is None else degree_bound
    current = charge
    for rdeg in range(target_rdeg + 1):
        square = functional_poisson_bracket(current.functional, current.functional).integrand
        residual = square.split_by("rdeg").get(rdeg)
        if residual is None or equals_mod_totald(residual, SuPoly(residual.roster)):
            continue
        correction = _solve_correction(current, residual, rdeg, degree_bound)
        if correction is None:
            raise AnsatzExhausted(
                f"No correction at rdeg {rdeg + 1} within degree bound {degree_bound}",
                residual=format_canonical(residual),
                rdeg=rdeg,
            )
        current = current.plus(correction, max(current.max_rdeg_constructed, rdeg + 1))
        square = functional_poisson_bracket(current.functional, current.functional).integrand
        left = square.split_by("rdeg").get(rdeg)
        if left is not None and not equals_mod_totald(left, SuPoly(left.roster)):
            raise AnsatzExhausted(
                f"Correction at rdeg {rdeg + 1} leaves a residual",
                residual=format_canonical(left),
                rdeg=rdeg,
            )
    if current is not charge:
        current = current.model_copy(
            update={"max_rdeg_constructed": max(current.max_rdeg_constructed, target_rdeg + 1)}
        )
    return current


# -- charge files -----------------------------------------------------------


def charge_to_text(charge: BRSTCharge) -> str:
    """Header line and canonical integrand, readable by charge_from_text."""
    header = (
        f"# brst-charge coords={','.join(charge.coords)} m={charge.m} l={charge.l}"
        f" max_rdeg={charge.max_rdeg_constructed}"
    )
    return f"{header}\n{format_canonical(charge.integrand)}\n"


def charge_from_text(text: str) -> BRSTCharge:
    lines = [line for line in text.splitlines() if line.strip()]
    match = HEADER_RE.match(lines[0]) if lines else None
    if match is None:
        raise ShapeError("Charge file must start with a '# brst-charge' header")
    coords = [c for c in match.group("coords").split(",") if c]
    m, l = int(match.group("m")), int(match.group("l"))  # noqa: E741
    roster = phase_roster_for(coords, m, l)
    body = " ".join(lines[1:]) or "0"
    return BRSTCharge(
        functional=LocalFunctional(integrand=parse_expression(body, roster)),
        max_rdeg_constructed=int(match.group("rdeg")),
        coords=coords, m=m, l=l,
    )

