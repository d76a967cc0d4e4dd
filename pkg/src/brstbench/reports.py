"""Report models shared by every check, build and solve."""

import time
from contextlib import contextmanager
from typing import Iterator, List, Optional

from pydantic import BaseModel, Field

from .algebra import SuPoly
from .expressions import format_canonical

NOT_FOUND = "not found within bound"


class Residual(BaseModel):
    """A named residual polynomial in canonical text."""

    name: str
    value: str
    rdeg: Optional[int] = None

    @property
    def is_zero(self) -> bool:
        return self.value == "0"


class DimensionRow(BaseModel):
    """One line of a solver dimension table."""

    p: int
    degree_bound: int
    raw_dimension: int
    dimension: int


class Report(BaseModel):
    """Outcome of a workbench command."""

    command: str
    passed: bool = True
    residuals: List[Residual] = Field(default_factory=list)
    not_found: List[str] = Field(default_factory=list)
    dimensions: List[DimensionRow] = Field(default_factory=list)
    representatives: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    elapsed: float = 0.0

    def add_residual(self, name: str, poly: SuPoly, rdeg: Optional[int] = None) -> None:
        """Record a residual; only nonzero ones fail the report."""
        if not poly.is_zero():
            self.residuals.append(Residual(name=name, value=format_canonical(poly), rdeg=rdeg))
            self.passed = False

    def mark_not_found(self, what: str) -> None:
        self.not_found.append(f"{what}: {NOT_FOUND}")
        self.passed = False

    def fail(self, note: str) -> None:
        self.notes.append(note)
        self.passed = False

    def merge(self, other: "Report") -> "Report":
        self.passed = self.passed and other.passed
        prefix = f"{other.command}: "
        self.residuals += [
            r.model_copy(update={"name": prefix + r.name}) for r in other.residuals
        ]
        self.not_found += [prefix + item for item in other.not_found]
        self.notes += [prefix + note for note in other.notes]
        self.dimensions += other.dimensions
        self.representatives += other.representatives
        return self

    def to_text(self, with_timing: bool = False) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for residual in self.residuals:
            degree = f" [rdeg {residual.rdeg}]" if residual.rdeg is not None else ""
            lines.append(f"  residual {residual.name}{degree}: {residual.value}")
        for item in self.not_found:
            lines.append(f"  {item}")
        if self.dimensions:
            lines.append("  p  d  raw  dim")
            for row in self.dimensions:
                lines.append(
                    f"  {row.p:<2} {row.degree_bound:<2} {row.raw_dimension:<4} {row.dimension}"
                )
        for representative in self.representatives:
            lines.append(f"  representative: {representative}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        if with_timing:
            lines.append(f"  elapsed: {self.elapsed:.3f}s")
        return "\n".join(lines)


@contextmanager
def timed(report: Report) -> Iterator[Report]:
    """Record wall-clock seconds on the report around the block."""
    start = time.perf_counter()
    try:
        yield report
    finally:
        report.elapsed = time.perf_counter() - start
