"""Exception hierarchy shared by the library and the command line."""
from __future__ import annotations

from typing import Optional, Sequence


class LabError(Exception):
    """Base class; ``exit_code`` is what the CLI returns when this escapes a command."""

    exit_code: int = 1


class ConfigError(LabError):
    """Unreadable or invalid run configuration / family spec."""


class ConstraintError(LabError, ValueError):
    """Family constants violate one or more defining relations."""

    def __init__(self, violations: Sequence[str] | str):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DegenerateSolutionError(ConstraintError):
    """Every l_i is constant where a nonconstant solution is required."""


class DomainError(LabError, ValueError):
    """A point or argument lies outside the admissible domain."""

    def __init__(self, message: str, value: Optional[object] = None):
        super().__init__(message)
        self.value = value


class DomainShrunkError(DomainError):
    """The requested xi-range leaves the region where every l_i^2 is positive."""

    def __init__(self, message: str, admissible: tuple[float, float]):
        super().__init__(message, admissible)
        self.admissible = admissible


class SingularityError(LabError, ArithmeticError):
    """Some l_j is (numerically) zero at an evaluation point."""

    exit_code = 3

    def __init__(self, message: str, point: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.point = None if point is None else tuple(float(v) for v in point)


class UnsupportedRegimeError(LabError):
    """The closed-form reduction does not apply to these constants."""


class UnsupportedNetError(LabError):
    """The operation needs a net of another kind (e.g. translation-invariant)."""


class ParseError(LabError, ValueError):
    """Syntax error in the symbolic grammar."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.reason = message
        self.offset = offset


class UnknownAtomError(ParseError):
    """Identifier that is not an atom of the jet space."""


class RewriteLimitError(LabError, RuntimeError):
    """On-shell reduction did not reach a fixpoint within the pass limit."""

    exit_code = 3
