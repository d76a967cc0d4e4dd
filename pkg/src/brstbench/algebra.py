"""Graded supercommutative polynomials over the rationals.

Every symbolic object in the workbench is a :class:`SuPoly`: a finite map
from canonical monomials to nonzero ``Fraction`` coefficients over a
:class:`VariableRoster`. Monomials list their variables in the roster's
global order; odd variables appear at most once and anticommute.
"""

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from .errors import InhomogeneousError, RosterMismatch, UnknownIdentifier

Monomial = Tuple[Tuple[str, int], ...]
Scalar = Union[int, Fraction]


class GradingVector(BaseModel):
    """Parity, ghost number, resolution degree and momentum degree."""

    model_config = ConfigDict(frozen=True)

    parity: int = Field(default=0, ge=0, le=1)
    ghost: int = 0
    rdeg: int = Field(default=0, ge=0)
    mdeg: int = Field(default=0, ge=0)

    def __add__(self, other: "GradingVector") -> "GradingVector":
        return GradingVector(
            parity=(self.parity + other.parity) % 2,
            ghost=self.ghost + other.ghost,
            rdeg=self.rdeg + other.rdeg,
            mdeg=self.mdeg + other.mdeg,
        )

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.parity, self.ghost, self.rdeg, self.mdeg)

    @classmethod
    def from_ghost(cls, ghost: int, rdeg: int = 0, mdeg: int = 0) -> "GradingVector":
        """Grading with parity fixed by the ghost number."""
        return cls(parity=ghost % 2, ghost=ghost, rdeg=rdeg, mdeg=mdeg)


class VarSpec(BaseModel):
    """A named variable with its grading and its place in the global order."""

    model_config = ConfigDict(frozen=True)

    name: str
    grading: GradingVector = Field(default_factory=GradingVector)
    order_key: Tuple[int, ...] = ()
    role: str = ""
    base: Optional[str] = None
    jet_order: int = 0

    @property
    def odd(self) -> bool:
        return self.grading.parity == 1


class VariableRoster:
    """An immutable, ordered set of variables.

    Two rosters are compatible when every shared name carries the same
    ``VarSpec``; operations on compatible operands land in the larger one.
    """

    __slots__ = ("specs", "_by_name", "rank", "odd", "gradings", "_merge_cache")

    def __init__(self, specs: Iterable[VarSpec]):
        specs = list(specs)
        keyed = []
        for position, spec in enumerate(specs):
            if not spec.order_key:
                spec = spec.model_copy(update={"order_key": (0, 0, 0, position, 0)})
            keyed.append(spec)
        keyed.sort(key=lambda s: s.order_key)
        self.specs: Tuple[VarSpec, ...] = tuple(keyed)
        self._by_name: Dict[str, VarSpec] = {}
        for spec in self.specs:
            if spec.name in self._by_name:
                raise RosterMismatch(f"Duplicate variable name '{spec.name}'")
            self._by_name[spec.name] = spec
        self.rank: Dict[str, int] = {s.name: i for i, s in enumerate(self.specs)}
        self.odd = frozenset(s.name for s in self.specs if s.odd)
        self.gradings: Dict[str, Tuple[int, int, int, int]] = {
            s.name: s.grading.as_tuple() for s in self.specs
        }
        self._merge_cache: Dict[int, Tuple["VariableRoster", "VariableRoster"]] = {}

    @classmethod
    def from_gradings(cls, entries: Sequence[Tuple[str, GradingVector]]) -> "VariableRoster":
        return cls(VarSpec(name=name, grading=grading) for name, grading in entries)

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[VarSpec]:
        return iter(self.specs)

    def __len__(self) -> int:
        return len(self.specs)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({[s.name for s in self.specs]})"

    @property
    def names(self) -> List[str]:
        return [s.name for s in self.specs]

    def spec(self, name: str) -> VarSpec:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownIdentifier(name) from None

    def ensure(self, name: str) -> "VariableRoster":
        """Return a roster containing ``name``; plain rosters never grow."""
        if name not in self._by_name:
            raise UnknownIdentifier(name)
        return self

    def includes(self, other: "VariableRoster") -> bool:
        if other is self:
            return True
        for spec in other.specs:
            mine = self._by_name.get(spec.name)
            if mine is None or mine != spec:
                return False
        return True

    def merge(self, other: "VariableRoster") -> "VariableRoster":
        if other is self:
            return self
        cached = self._merge_cache.get(id(other))
        if cached is not None and cached[0] is other:
            return cached[1]
        if self.includes(other):
            merged = self
        elif other.includes(self):
            merged = other
        else:
            clash = [
                s.name for s in other.specs
                if s.name in self._by_name and self._by_name[s.name] != s
            ]
            if clash:
                raise RosterMismatch(f"Variables declared differently: {', '.join(clash)}")
            merged = self.union(other)
        self._merge_cache[id(other)] = (other, merged)
        return merged

    def union(self, other: "VariableRoster") -> "VariableRoster":
        extra = [s for s in other.specs if s.name not in self._by_name]
        return VariableRoster(list(self.specs) + extra)


def _coerce(value: Scalar) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


class SuPoly:
    """Supercommutative polynomial in canonical form. Immutable."""

    __slots__ = ("roster", "terms")

    def __init__(self, roster: VariableRoster, terms: Optional[Mapping[Monomial, Fraction]] = None):
        self.roster = roster
        self.terms: Dict[Monomial, Fraction] = (
            {m: c for m, c in terms.items() if c} if terms else {}
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, roster: VariableRoster) -> "SuPoly":
        return cls(roster)

    @classmethod
    def constant(cls, roster: VariableRoster, value: Scalar) -> "SuPoly":
        return cls(roster, {(): _coerce(value)})

    @classmethod
    def var(cls, roster: VariableRoster, name: str, exponent: int = 1) -> "SuPoly":
        roster = roster.ensure(name)
        if exponent == 0:
            return cls.constant(roster, 1)
        if name in roster.odd and exponent > 1:
            return cls(roster)
        return cls(roster, {((name, exponent),): Fraction(1)})

    @classmethod
    def monomial(
        cls, roster: VariableRoster, factors: Sequence[Tuple[str, int]], coeff: Scalar = 1
    ) -> "SuPoly":
        """Product of ``factors`` taken in the given (not necessarily canonical) order."""
        result = cls.constant(roster, coeff)
        for name, exponent in factors:
            result = result * cls.var(roster, name, exponent)
        return result

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> List[str]:
        seen = {name for mono in self.terms for name, _ in mono}
        return sorted(seen, key=self.roster.rank.__getitem__)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e for _, e in mono) for mono in self.terms)

    def monomial_grading(self, mono: Monomial) -> Tuple[int, int, int, int]:
        parity = ghost = rdeg = mdeg = 0
        gradings = self.roster.gradings
        for name, exponent in mono:
            p, g, r, m = gradings[name]
            parity += p * exponent
            ghost += g * exponent
            rdeg += r * exponent
            mdeg += m * exponent
        return (parity % 2, ghost, rdeg, mdeg)

    def is_homogeneous(self) -> bool:
        return len({self.monomial_grading(m) for m in self.terms}) <= 1

    @property
    def parity(self) -> int:
        """Parity of a homogeneous polynomial (0 for the zero polynomial)."""
        parities = {self.monomial_grading(m)[0] for m in self.terms}
        if len(parities) > 1:
            raise InhomogeneousError("Polynomial mixes even and odd monomials")
        return parities.pop() if parities else 0

    def split_by(self, field: str) -> Dict[int, "SuPoly"]:
        """Split into homogeneous parts by one of parity/ghost/rdeg/mdeg."""
        index = ("parity", "ghost", "rdeg", "mdeg").index(field)
        parts: Dict[int, Dict[Monomial, Fraction]] = {}
        for mono, coeff in self.terms.items():
            parts.setdefault(self.monomial_grading(mono)[index], {})[mono] = coeff
        return {key: SuPoly(self.roster, terms) for key, terms in sorted(parts.items())}

    def with_roster(self, roster: VariableRoster) -> "SuPoly":
        if roster is self.roster:
            return self
        for name in self.variables():
            if name not in roster or roster.spec(name) != self.roster.spec(name):
                raise RosterMismatch(f"Target roster does not carry '{name}'")
        return SuPoly(roster, self.terms)

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other: Union["SuPoly", Scalar]) -> Tuple[VariableRoster, "SuPoly"]:
        if isinstance(other, SuPoly):
            roster = self.roster.merge(other.roster)
            return roster, other
        return self.roster, SuPoly.constant(self.roster, other)

    def __add__(self, other: Union["SuPoly", Scalar]) -> "SuPoly":
        roster, other = self._lift(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            total = terms.get(mono, 0) + coeff
            if total:
                terms[mono] = total
            else:
                terms.pop(mono, None)
        return SuPoly(roster, terms)

    __radd__ = __add__

    def __neg__(self) -> "SuPoly":
        return SuPoly(self.roster, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Union["SuPoly", Scalar]) -> "SuPoly":
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "SuPoly":
        return (-self) + other

    def scale(self, value: Scalar) -> "SuPoly":
        value = _coerce(value)
        if not value:
            return SuPoly(self.roster)
        return SuPoly(self.roster, {m: c * value for m, c in self.terms.items()})

    def __mul__(self, other: Union["SuPoly", Scalar]) -> "SuPoly":
        if not isinstance(other, SuPoly):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other: Scalar) -> "SuPoly":
        return self.scale(other)

    def __pow__(self, exponent: int) -> "SuPoly":
        result = SuPoly.constant(self.roster, 1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SuPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        from .expressions import format_canonical

        return f"SuPoly({format_canonical(self)!r})"

    def __str__(self) -> str:
        from .expressions import format_canonical

        return format_canonical(self)

    # -- substitution -------------------------------------------------------

    def substitute(self, mapping: Mapping[str, Union["SuPoly", Scalar]]) -> "SuPoly":
        """Replace variables by polynomials, keeping the monomial's factor order."""
        roster = self.roster
        images: Dict[str, SuPoly] = {}
        for name, image in mapping.items():
            if isinstance(image, SuPoly):
                roster = roster.merge(image.roster)
                images[name] = image
            else:
                images[name] = SuPoly.constant(self.roster, image)
        result = SuPoly(roster)
        for mono, coeff in self.terms.items():
            if not any(name in images for name, _ in mono):
                result = result + SuPoly(roster, {mono: coeff})
                continue
            term = SuPoly.constant(roster, coeff)
            for name, exponent in mono:
                factor = images.get(name)
                if factor is None:
                    factor = SuPoly(roster, {((name, 1),): Fraction(1)})
                for _ in range(exponent):
                    term = term * factor
            result = result + term
        return result

    def evaluate(self, point: Mapping[str, Scalar]) -> "SuPoly":
        return self.substitute({name: _coerce(v) for name, v in point.items()})


def _mul_monomials(roster: VariableRoster, m1: Monomial, m2: Monomial) -> Optional[Tuple[int, Monomial]]:
    rank = roster.rank
    odd = roster.odd
    odd_left = sum(1 for name, _ in m1 if name in odd)
    sign = 1
    out: List[Tuple[str, int]] = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        a, ea = m1[i]
        b, eb = m2[j]
        if a == b:
            if a in odd:
                return None
            out.append((a, ea + eb))
            i += 1
            j += 1
        elif rank[a] < rank[b]:
            out.append(m1[i])
            if a in odd:
                odd_left -= 1
            i += 1
        else:
            if b in odd and odd_left % 2:
                sign = -sign
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return sign, tuple(out)


def multiply(p: SuPoly, q: SuPoly) -> SuPoly:
    """Koszul-signed product in canonical form."""
    roster = p.roster.merge(q.roster)
    terms: Dict[Monomial, Fraction] = {}
    for m1, c1 in p.terms.items():
        for m2, c2 in q.terms.items():
            product = _mul_monomials(roster, m1, m2)
            if product is None:
                continue
            sign, mono = product
            total = terms.get(mono, 0) + sign * c1 * c2
            if total:
                terms[mono] = total
            else:
                terms.pop(mono, None)
    return SuPoly(roster, terms)


def _derive(p: SuPoly, name: str, from_left: bool) -> SuPoly:
    odd = p.roster.odd
    is_odd = name in odd
    terms: Dict[Monomial, Fraction] = {}
    for mono, coeff in p.terms.items():
        for position, (var, exponent) in enumerate(mono):
            if var != name:
                continue
            if is_odd:
                others = mono[:position] if from_left else mono[position + 1:]
                crossings = sum(1 for v, _ in others if v in odd)
                factor = Fraction(-1 if crossings % 2 else 1)
                reduced = mono[:position] + mono[position + 1:]
            else:
                factor = Fraction(exponent)
                if exponent == 1:
                    reduced = mono[:position] + mono[position + 1:]
                else:
                    reduced = mono[:position] + ((var, exponent - 1),) + mono[position + 1:]
            total = terms.get(reduced, 0) + factor * coeff
            if total:
                terms[reduced] = total
            else:
                terms.pop(reduced, None)
            break
    return SuPoly(p.roster, terms)


def derive_left(p: SuPoly, v: Union[VarSpec, str]) -> SuPoly:
    """Graded left derivative: move ``v`` to the front, then delete it."""
    name = v.name if isinstance(v, VarSpec) else v
    return _derive(p, name, from_left=True)


def derive_right(p: SuPoly, v: Union[VarSpec, str]) -> SuPoly:
    """Graded right derivative: move ``v`` to the back, then delete it."""
    name = v.name if isinstance(v, VarSpec) else v
    return _derive(p, name, from_left=False)


def grading_of(p: SuPoly) -> GradingVector:
    """The common grading of all monomials of ``p``."""
    if p.is_zero():
        raise InhomogeneousError("The zero polynomial has no definite grading")
    gradings = {p.monomial_grading(m) for m in p.terms}
    if len(gradings) > 1:
        raise InhomogeneousError(
            f"Monomials disagree in grading: {sorted(gradings)}"
        )
    parity, ghost, rdeg, mdeg = gradings.pop()
    return GradingVector(parity=parity, ghost=ghost, rdeg=rdeg, mdeg=mdeg)
