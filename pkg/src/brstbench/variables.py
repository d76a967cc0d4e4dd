"""Names, gradings and global order of the generated variables."""

import re
from enum import Enum
from typing import Dict, List, NamedTuple, Sequence, Tuple

from .algebra import GradingVector, VarSpec
from .errors import ShapeError

COORDINATE_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")
JET_SUFFIX_RE = re.compile(r"^(?P<base>.+)_d(?P<order>[1-9][0-9]*)\Z")


class Kind(str, Enum):
    """Every family of generated variables."""

    COORDINATE = "coordinate"
    MULTIPLIER = "multiplier"
    PARAMETER = "parameter"
    NOETHER_GHOST = "noether_ghost"
    EQUATION_GHOST = "equation_ghost"
    CONSTRAINT_GHOST = "constraint_ghost"
    GAUGE_GHOST = "gauge_ghost"
    COORDINATE_MOMENTUM = "coordinate_momentum"
    MULTIPLIER_MOMENTUM = "multiplier_momentum"
    EQUATION_MOMENTUM = "equation_momentum"
    CONSTRAINT_MOMENTUM = "constraint_momentum"
    GAUGE_MOMENTUM = "gauge_momentum"
    NOETHER_MOMENTUM = "noether_momentum"


class KindInfo(NamedTuple):
    prefix: str
    ghost: int
    rdeg: int
    mdeg: int
    order: Tuple[int, int, int]


# Order: coordinates, multipliers, ghosts by ghost number, momenta.
KINDS: Dict[Kind, KindInfo] = {
    Kind.COORDINATE: KindInfo("", 0, 0, 0, (0, 0, 0)),
    Kind.MULTIPLIER: KindInfo("lam", 0, 0, 0, (1, 0, 0)),
    Kind.PARAMETER: KindInfo("eps", 0, 0, 0, (1, 0, 1)),
    Kind.NOETHER_GHOST: KindInfo("xi", -2, 2, 0, (2, 8, 0)),
    Kind.EQUATION_GHOST: KindInfo("eta", -1, 1, 0, (2, 9, 0)),
    Kind.CONSTRAINT_GHOST: KindInfo("eta", -1, 1, 0, (2, 9, 1)),
    Kind.GAUGE_GHOST: KindInfo("c", 1, 0, 0, (2, 11, 0)),
    Kind.COORDINATE_MOMENTUM: KindInfo("xb", 0, 1, 1, (3, 0, 0)),
    Kind.MULTIPLIER_MOMENTUM: KindInfo("lamb", 0, 1, 1, (3, 0, 1)),
    Kind.EQUATION_MOMENTUM: KindInfo("etab", 1, 0, 1, (3, 0, 2)),
    Kind.CONSTRAINT_MOMENTUM: KindInfo("etab", 1, 0, 1, (3, 0, 3)),
    Kind.GAUGE_MOMENTUM: KindInfo("cb", -1, 2, 1, (3, 0, 4)),
    Kind.NOETHER_MOMENTUM: KindInfo("xib", 2, 0, 1, (3, 0, 5)),
}

MOMENTUM_OF: Dict[Kind, Kind] = {
    Kind.COORDINATE: Kind.COORDINATE_MOMENTUM,
    Kind.MULTIPLIER: Kind.MULTIPLIER_MOMENTUM,
    Kind.EQUATION_GHOST: Kind.EQUATION_MOMENTUM,
    Kind.CONSTRAINT_GHOST: Kind.CONSTRAINT_MOMENTUM,
    Kind.GAUGE_GHOST: Kind.GAUGE_MOMENTUM,
    Kind.NOETHER_GHOST: Kind.NOETHER_MOMENTUM,
}


def validate_coordinates(coords: Sequence[str]) -> None:
    if len(set(coords)) != len(coords):
        raise ShapeError(f"Duplicate coordinate names: {list(coords)}")
    for name in coords:
        if not COORDINATE_RE.match(name):
            raise ShapeError(
                f"Coordinate name '{name}' must be a letter followed by letters or digits"
            )


def var_name(kind: Kind, label: str) -> str:
    info = KINDS[kind]
    return label if not info.prefix else f"{info.prefix}_{label}"


def jet_name(base: str, order: int) -> str:
    return base if order == 0 else f"{base}_d{order}"


def split_jet_name(name: str) -> Tuple[str, int]:
    match = JET_SUFFIX_RE.match(name)
    if match is None:
        return name, 0
    return match.group("base"), int(match.group("order"))


def base_spec(kind: Kind, label: str, index: int) -> VarSpec:
    info = KINDS[kind]
    return VarSpec(
        name=var_name(kind, label),
        grading=GradingVector.from_ghost(info.ghost, rdeg=info.rdeg, mdeg=info.mdeg),
        order_key=info.order + (index, 0),
        role=kind.value,
    )


def jet_spec(spec: VarSpec, order: int) -> VarSpec:
    if order == 0:
        return spec
    return VarSpec(
        name=jet_name(spec.name, order),
        grading=spec.grading,
        order_key=spec.order_key[:-1] + (order,),
        role=spec.role,
        base=spec.name,
        jet_order=order,
    )


def labels(count: int) -> List[str]:
    return [str(k) for k in range(1, count + 1)]


def phase_positions(coords: Sequence[str], m: int, l: int) -> List[Tuple[Kind, str, int]]:
    """Position variables as (kind, label, declaration index)."""
    entries: List[Tuple[Kind, str, int]] = []
    entries += [(Kind.COORDINATE, c, i) for i, c in enumerate(coords)]
    entries += [(Kind.MULTIPLIER, k, i) for i, k in enumerate(labels(m))]
    entries += [(Kind.EQUATION_GHOST, c, i) for i, c in enumerate(coords)]
    entries += [(Kind.CONSTRAINT_GHOST, a, i) for i, a in enumerate(labels(l))]
    entries += [(Kind.GAUGE_GHOST, k, i) for i, k in enumerate(labels(m))]
    entries += [(Kind.NOETHER_GHOST, a, i) for i, a in enumerate(labels(l))]
    return entries


def phase_pairs(coords: Sequence[str], m: int, l: int) -> List[Tuple[VarSpec, VarSpec]]:
    """Canonical (position, momentum) pairs of the phase space."""
    return [
        (base_spec(kind, label, index), base_spec(MOMENTUM_OF[kind], label, index))
        for kind, label, index in phase_positions(coords, m, l)
    ]


def polyvector_specs(coords: Sequence[str]) -> List[VarSpec]:
    """Coordinates and their odd duals, shared verbatim with the phase roster."""
    validate_coordinates(coords)
    specs = [base_spec(Kind.COORDINATE, c, i) for i, c in enumerate(coords)]
    specs += [base_spec(Kind.EQUATION_MOMENTUM, c, i) for i, c in enumerate(coords)]
    return specs


# Convenience name builders used across modules.
def lam(k: int) -> str:
    return var_name(Kind.MULTIPLIER, str(k + 1))


def eps(k: int) -> str:
    return var_name(Kind.PARAMETER, str(k + 1))


def eta_eq(coord: str) -> str:
    return var_name(Kind.EQUATION_GHOST, coord)


def eta_con(a: int) -> str:
    return var_name(Kind.CONSTRAINT_GHOST, str(a + 1))


def ghost_c(k: int) -> str:
    return var_name(Kind.GAUGE_GHOST, str(k + 1))


def xi(a: int) -> str:
    return var_name(Kind.NOETHER_GHOST, str(a + 1))


def xbar(coord: str) -> str:
    return var_name(Kind.COORDINATE_MOMENTUM, coord)


def lambar(k: int) -> str:
    return var_name(Kind.MULTIPLIER_MOMENTUM, str(k + 1))


def etabar(coord: str) -> str:
    return var_name(Kind.EQUATION_MOMENTUM, coord)


def etabar_con(a: int) -> str:
    return var_name(Kind.CONSTRAINT_MOMENTUM, str(a + 1))


def cbar(k: int) -> str:
    return var_name(Kind.GAUGE_MOMENTUM, str(k + 1))


def xibar(a: int) -> str:
    return var_name(Kind.NOETHER_MOMENTUM, str(a + 1))
