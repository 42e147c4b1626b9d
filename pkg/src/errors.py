"""
Structured errors raised by the verification engine.
Every error carries a details dict that ends up in the failed check record.
"""

from typing import Any, Dict, Optional


class NCP4Error(Exception):
    """Base class for all engine errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}

    def describe(self) -> str:
        """One-line description used in reports."""
        return f"{type(self).__name__}: {self}"


class DimensionMismatch(NCP4Error):
    """Operands have different matrix dimensions."""


class ShapeMismatch(NCP4Error):
    """Ring matrices or lambda windows have incompatible shapes."""


class NonInvertibleConstantTerm(NCP4Error):
    """A series was inverted whose constant coefficient is singular."""


class SingularMinor(NCP4Error):
    """Elimination found no admissible pivot in a quasideterminant minor."""


class SpectralCollision(NCP4Error):
    """spec(A0) and spec(-B0) are too close for a Sylvester solve."""


class InsufficientSequence(NCP4Error):
    """A Hankel matrix asks for more terms than the sequence holds."""


class NonInvertiblePivot(NCP4Error):
    """A Backlund generator needs the inverse of a singular f_i."""


class InconsistentParameters(NCP4Error):
    """Parameter triples violate their defining relations."""


class UnassignedSymbol(NCP4Error):
    """A word polynomial was evaluated without a value for one of its symbols."""


class ScenarioError(NCP4Error):
    """Scenario file violates the documented schema."""

    def __init__(self, message: str, field: str = "", line: Optional[int] = None):
        details = {"field": field}
        if line is not None:
            details["line"] = line
        parts = ([f"field '{field}'"] if field else []) + ([f"line {line}"] if line is not None else [])
        location = f" ({', '.join(parts)})" if parts else ""
        super().__init__(f"{message}{location}", details)
        self.field = field
        self.line = line
