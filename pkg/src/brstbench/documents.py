"""JSON system documents: the input format of the command line.

A document names the coordinates and gives every polynomial as grammar
text over the polyvector roster (coordinates plus ``etab_<coord>``)::

    {
      "name": "circle",
      "coords": ["x", "y"],
      "V": "0",
      "R": ["-y*etab_x + x*etab_y"],
      "T": ["x^2 + y^2 - 1"],
      "sigma_points": [{"x": "1", "y": "0"}]
    }

Structure-function witnesses A..F and the weak Hamiltonian witnesses Y..S
are nested lists of strings shaped as in :class:`InvolutiveSystem` and
:class:`WeakHamiltonianStructure`. Missing witnesses are discovered by
bounded ideal membership when ``discover`` is set.
"""

import json
import logging
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from .algebra import SuPoly
from .config import get_config
from .errors import ExpressionSyntaxError, ShapeError, UnknownIdentifier
from .expressions import parse_expression
from .polyvectors import InvolutiveSystem, PolyvectorSpace, discover_structure_functions
from .variables import validate_coordinates
from .weak_poisson import WeakHamiltonianStructure, discover_weak_witnesses

logger = logging.getLogger(__name__)

Nested = Union[str, List[Any]]

STRUCTURE_FIELDS = ("A", "B", "C", "D", "E", "F")
WEAK_FIELDS = ("Y", "G", "W", "M", "Z", "N", "U", "S")


class SystemDocument(BaseModel):
    """An involutive system, optionally with a weak Poisson bivector."""

    name: str = Field(default="system", description="Label used in reports")
    coords: List[str] = Field(default_factory=list, description="Coordinate names x^i")
    n: Optional[int] = Field(default=None, ge=0, description="Declared number of coordinates")
    m: Optional[int] = Field(default=None, ge=0, description="Declared number of gauge generators")
    l: Optional[int] = Field(default=None, ge=0, description="Declared number of constraints")  # noqa: E741
    V: str = Field(default="0", description="Drift 1-vector")
    R: List[str] = Field(default_factory=list, description="Gauge generators (1-vectors)")
    T: List[str] = Field(default_factory=list, description="Constraints (0-vectors)")
    A: Optional[List[Any]] = None
    B: Optional[List[Any]] = None
    C: Optional[List[Any]] = None
    D: Optional[List[Any]] = None
    E: Optional[List[Any]] = None
    F: Optional[List[Any]] = None
    P: Optional[str] = Field(default=None, description="Weak Poisson bivector")
    Y: Optional[List[Any]] = None
    G: Optional[List[Any]] = None
    W: Optional[List[Any]] = None
    M: Optional[List[Any]] = None
    Z: Optional[List[Any]] = None
    N: Optional[List[Any]] = None
    U: Optional[List[Any]] = None
    S: Optional[List[Any]] = None
    sigma_points: List[Dict[str, Union[str, int]]] = Field(default_factory=list)
    discover: bool = Field(default=True, description="Search for missing witnesses")
    degree_bound: Optional[int] = Field(default=None, ge=0)
    target_rdeg: Optional[int] = Field(default=None, ge=0)

    @field_validator("coords")
    @classmethod
    def _coordinate_names(cls, value: List[str]) -> List[str]:
        validate_coordinates(value)
        return value

    @model_validator(mode="after")
    def _declared_dimensions(self) -> "SystemDocument":
        for label, declared, actual in (
            ("n", self.n, len(self.coords)),
            ("m", self.m, len(self.R)),
            ("l", self.l, len(self.T)),
        ):
            if declared is not None and declared != actual:
                raise ShapeError(f"Declared {label} = {declared} but {actual} entries given")
        return self

    @property
    def bound(self) -> int:
        return get_config().degree_bound if self.degree_bound is None else self.degree_bound

    def space(self) -> PolyvectorSpace:
        return PolyvectorSpace(self.coords)

    def parse(self, label: str, text: str) -> SuPoly:
        space = self.space()
        try:
            return parse_expression(text, space.roster)
        except ExpressionSyntaxError as exc:
            raise ExpressionSyntaxError(f"{label}: {exc.message}", exc.position, text) from None
        except UnknownIdentifier as exc:
            exc.args = (f"{label}: {exc.args[0]}",)
            raise

    def _parse_nested(self, label: str, value: Nested) -> Any:
        if isinstance(value, str):
            return self.parse(label, value)
        return [self._parse_nested(f"{label}[{i}]", item) for i, item in enumerate(value)]

    def _points(self) -> List[Dict[str, Fraction]]:
        points = []
        for point in self.sigma_points:
            unknown = sorted(set(point) - set(self.coords))
            if unknown:
                raise ShapeError(f"Sample point names unknown coordinates: {', '.join(unknown)}")
            points.append({name: Fraction(str(value)) for name, value in point.items()})
        return points

    def build_system(self) -> Tuple[InvolutiveSystem, Optional[WeakHamiltonianStructure]]:
        V = self.parse("V", self.V)
        R = [self.parse(f"R[{k}]", text) for k, text in enumerate(self.R)]
        T = [self.parse(f"T[{a}]", text) for a, text in enumerate(self.T)]
        witnesses = {
            field: self._parse_nested(field, getattr(self, field))
            for field in STRUCTURE_FIELDS
            if getattr(self, field) is not None
        }
        if self.discover and len(witnesses) < len(STRUCTURE_FIELDS) and (R or T):
            logger.info("discovering structure functions of %s at degree %d", self.name, self.bound)
            found = discover_structure_functions(self.coords, V, R, T, self.bound, self.name)
            for field in STRUCTURE_FIELDS:
                witnesses.setdefault(field, getattr(found, field))
        system = InvolutiveSystem(
            coords=list(self.coords), V=V, R=R, T=T,
            sigma_points=self._points(), name=self.name, **witnesses,
        )
        return system, self._weak_structure(system)

    def _weak_structure(self, system: InvolutiveSystem) -> Optional[WeakHamiltonianStructure]:
        if self.P is None:
            return None
        P = self.parse("P", self.P)
        given = {
            field: self._parse_nested(field, getattr(self, field))
            for field in WEAK_FIELDS
            if getattr(self, field) is not None
        }
        if self.discover and len(given) < len(WEAK_FIELDS):
            found = discover_weak_witnesses(system, P, self.bound)
            for field in WEAK_FIELDS:
                given.setdefault(field, getattr(found, field))
        return WeakHamiltonianStructure(core=system, P=P, **given)


def load_document(path: Union[str, Path]) -> SystemDocument:
    """Read and validate a system document from JSON."""
    return SystemDocument.model_validate_json(Path(path).read_text())


def bundled_names() -> List[str]:
    """Names of the systems shipped with the package."""
    folder = resources.files("brstbench") / "systems"
    return sorted(entry.name[:-5] for entry in folder.iterdir() if entry.name.endswith(".json"))


def bundled_document(name: str) -> SystemDocument:
    """One of the worked examples shipped in ``brstbench/systems``."""
    entry = resources.files("brstbench") / "systems" / f"{name}.json"
    return SystemDocument.model_validate(json.loads(entry.read_text()))
