"""Exceptions raised by the workbench.

Failed checks are reported through :class:`brstbench.reports.Report`; the
exceptions below are reserved for malformed input and exhausted searches.
"""

from typing import Optional


class WorkbenchError(ValueError):
    """Base class for all workbench errors."""


class InhomogeneousError(WorkbenchError):
    """Monomials of a polynomial disagree in some grading."""


class RosterMismatch(WorkbenchError):
    """Operands live over incompatible variable rosters."""


class ExpressionSyntaxError(WorkbenchError):
    """Expression text does not conform to the grammar."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownIdentifier(WorkbenchError):
    """Identifier is not a variable of the roster."""

    def __init__(self, name: str, position: int = -1):
        self.name = name
        self.position = position
        where = f" at position {position}" if position >= 0 else ""
        super().__init__(f"Unknown identifier '{name}'{where}")


class PointNotOnSurface(WorkbenchError):
    """A sample point does not satisfy the constraints."""


class InvolutivityViolation(WorkbenchError):
    """Structure relations fail for the supplied or searched witnesses."""


class AnsatzExhausted(WorkbenchError):
    """No solution exists inside the bounded ansatz space."""

    def __init__(self, message: str, residual: Optional[str] = None, rdeg: Optional[int] = None):
        self.residual = residual
        self.rdeg = rdeg
        super().__init__(message)


class InvalidDegree(WorkbenchError):
    """Requested polyvector degree is out of range."""


class MasterViolation(WorkbenchError):
    """Generating functions violate their master equations."""


class ShapeError(WorkbenchError):
    """Witness index shapes do not match the declared dimensions."""


class JetOrderExceeded(WorkbenchError):
    """Jet order would grow beyond the configured cap."""
