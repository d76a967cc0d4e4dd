"""Jet-space calculus: total derivative, Euler operator, local functionals.

A :class:`JetRoster` carries base variables and all their time
derivatives up to ``max_order``. Derivative orders grow on demand, capped
by ``WORKBENCH_MAX_JET_ORDER``.
"""

import logging
from typing import Dict, List, Mapping, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from .algebra import SuPoly, VariableRoster, VarSpec, derive_left, derive_right
from .config import get_config
from .errors import JetOrderExceeded, RosterMismatch, UnknownIdentifier
from .variables import jet_name, jet_spec, split_jet_name

logger = logging.getLogger(__name__)


class JetRoster(VariableRoster):
    """Base variables with their jets, plus optional canonical pairs."""

    __slots__ = ("bases", "max_order", "pairs", "_extensions")

    def __init__(
        self,
        bases: Sequence[VarSpec],
        max_order: int = 2,
        pairs: Sequence[Tuple[str, str]] = (),
    ):
        self.bases: Tuple[VarSpec, ...] = tuple(bases)
        self.max_order = max_order
        self.pairs: Tuple[Tuple[str, str], ...] = tuple(pairs)
        self._extensions: Dict[int, "JetRoster"] = {}
        super().__init__(
            jet_spec(base, order) for base in self.bases for order in range(max_order + 1)
        )

    @property
    def base_names(self) -> List[str]:
        return [b.name for b in self.bases]

    def with_order(self, order: int) -> "JetRoster":
        """The same jet family with at least ``order`` derivatives."""
        if order <= self.max_order:
            return self
        cap = get_config().max_jet_order
        if order > cap:
            raise JetOrderExceeded(f"Jet order {order} exceeds the configured cap {cap}")
        extended = self._extensions.get(order)
        if extended is None:
            logger.debug("extending jet roster to order %d", order)
            extended = JetRoster(self.bases, order, self.pairs)
            self._extensions[order] = extended
        return extended

    def ensure(self, name: str) -> "VariableRoster":
        if name in self:
            return self
        base, order = split_jet_name(name)
        if order and base in self.base_names:
            return self.with_order(order)
        raise UnknownIdentifier(name)

    def union(self, other: VariableRoster) -> VariableRoster:
        if isinstance(other, JetRoster) and {b.name for b in other.bases} <= set(self.base_names):
            return self.with_order(other.max_order)
        if isinstance(other, JetRoster) and set(self.base_names) <= {b.name for b in other.bases}:
            return other.with_order(self.max_order)
        return super().union(other)

    def partner_map(self) -> Dict[str, str]:
        mapping = {}
        for position, momentum in self.pairs:
            mapping[position] = momentum
            mapping[momentum] = position
        return mapping


def _require_jets(f: SuPoly) -> JetRoster:
    if not isinstance(f.roster, JetRoster):
        raise RosterMismatch("Jet operations need a polynomial over a JetRoster")
    return f.roster


def base_of(roster: VariableRoster, name: str) -> Tuple[str, int]:
    spec = roster.spec(name)
    return (spec.base or spec.name, spec.jet_order)


def total_derivative(f: SuPoly) -> SuPoly:
    """D f: an even derivation raising every jet order by one."""
    roster = _require_jets(f)
    top = max((base_of(roster, v)[1] for v in f.variables()), default=0)
    roster = roster.with_order(top + 1)
    f = f.with_roster(roster)
    result = SuPoly(roster)
    for name in f.variables():
        base, order = base_of(roster, name)
        nxt = SuPoly.var(roster, jet_name(base, order + 1))
        result = result + nxt * derive_left(f, name)
    return result


def prolong(f: SuPoly, k: int) -> SuPoly:
    """D^k f."""
    for _ in range(k):
        f = total_derivative(f)
    return f


def euler_derivative(f: SuPoly, base: str, side: str = "left") -> SuPoly:
    """Variational derivative sum_k (-D)^k d f / d base_(k)."""
    roster = _require_jets(f)
    derive = derive_left if side == "left" else derive_right
    result = SuPoly(roster)
    orders = sorted(
        order for b, order in (base_of(roster, v) for v in f.variables()) if b == base
    )
    for order in orders:
        term = derive(f, jet_name(base, order))
        for _ in range(order):
            term = -total_derivative(term)
        result = result + term
    return result


def equals_mod_totald(f: SuPoly, g: SuPoly) -> bool:
    """True iff f - g is a total derivative (constants are not)."""
    h = f - g
    if h.is_zero():
        return True
    if h.constant_term():
        return False
    roster = _require_jets(h)
    bases = {base_of(roster, v)[0] for v in h.variables()}
    return all(euler_derivative(h, base).is_zero() for base in sorted(bases))


class LocalFunctional(BaseModel):
    """An integral over time, known through one representative integrand."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    integrand: SuPoly

    def equals(self, other: "LocalFunctional") -> bool:
        return equals_mod_totald(self.integrand, other.integrand)

    def __str__(self) -> str:
        return f"∫ dt ({self.integrand})"


def as_integrand(value: "LocalFunctional | SuPoly") -> SuPoly:
    """The integrand of a functional, or the polynomial itself."""
    return value.integrand if isinstance(value, LocalFunctional) else value


def characteristic(F: "LocalFunctional | SuPoly") -> Dict[str, SuPoly]:
    """Evolutionary characteristic of the Hamiltonian field generated by F."""
    integrand = as_integrand(F)
    roster = _require_jets(integrand)
    partners = roster.partner_map()
    bases = {base_of(roster, v)[0] for v in integrand.variables()}
    unpaired = sorted(b for b in bases if b not in partners)
    if unpaired:
        raise RosterMismatch(f"No canonical partner declared for: {', '.join(unpaired)}")
    odd = roster.odd
    flows: Dict[str, SuPoly] = {}
    for position, momentum in roster.pairs:
        if position in bases:
            d_position = euler_derivative(integrand, position, side="right")
            if not d_position.is_zero():
                flows[momentum] = d_position if position in odd else -d_position
        if momentum in bases:
            d_momentum = euler_derivative(integrand, momentum, side="right")
            if not d_momentum.is_zero():
                flows[position] = d_momentum
    return flows


def variational_derivatives(g: SuPoly) -> Dict[str, SuPoly]:
    """Nonzero left Euler derivatives of g, keyed by base variable."""
    roster = _require_jets(g)
    bases = sorted({base_of(roster, v)[0] for v in g.variables()}, key=roster.rank.__getitem__)
    result: Dict[str, SuPoly] = {}
    for base in bases:
        variation = euler_derivative(g, base)
        if not variation.is_zero():
            result[base] = variation
    return result


def pair_flows(flows: Mapping[str, SuPoly], variations: Mapping[str, SuPoly], roster: VariableRoster) -> SuPoly:
    """sum_A flows[A] * variations[A]."""
    result = SuPoly(roster)
    for name, flow in flows.items():
        variation = variations.get(name)
        if variation is not None:
            result = result + flow * variation
    return result


def functional_poisson_bracket(
    F: "LocalFunctional | SuPoly", G: "LocalFunctional | SuPoly"
) -> LocalFunctional:
    """Representative integrand of {F, G}."""
    g = as_integrand(G)
    return LocalFunctional(
        integrand=pair_flows(characteristic(F), variational_derivatives(g), g.roster)
    )


def apply_flows(flows: Mapping[str, SuPoly], f: SuPoly) -> SuPoly:
    """Odd or even derivation fixed by its values on base variables, prolonged to jets."""
    roster = _require_jets(f)
    result = SuPoly(roster)
    for name in f.variables():
        base, order = base_of(roster, name)
        flow = flows.get(base)
        if flow is None or flow.is_zero():
            continue
        result = result + prolong(flow, order) * derive_left(f, name)
    return result


def evolutionary_field_apply(F: "LocalFunctional | SuPoly", f: SuPoly) -> SuPoly:
    """Apply the prolonged evolutionary field of F to a jet polynomial."""
    return apply_flows(characteristic(F), f)


def jet_variables_up_to(roster: JetRoster, order: int) -> List[str]:
    """Every base variable and its x-derivatives up to the given order."""
    roster = roster.with_order(order)
    return [jet_name(b.name, k) for b in roster.bases for k in range(order + 1)]
