"""
Error types for hapassess.

Every error carries a stable upper-case ``code`` and the process exit code
the CLI maps it to. Pydantic validation failures are reformatted into a
readable field-by-field message.
"""

from typing import TYPE_CHECKING, Any, Optional

from pydantic import ValidationError

if TYPE_CHECKING:
    from .dimensioning import FeasibilityReport


class HapAssessError(Exception):
    """Base class for all engine errors."""

    code = "ERROR"
    exit_code = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message
        self.architecture: Optional[str] = None

    def with_architecture(self, architecture: str) -> "HapAssessError":
        """Attach the id of the architecture being assessed."""
        if self.architecture is None:
            self.architecture = architecture
        return self

    def __str__(self) -> str:
        if self.architecture:
            return f"[{self.code}] architecture '{self.architecture}': {self.message}"
        return f"[{self.code}] {self.message}"


class ScenarioInputError(HapAssessError):
    """A scenario file could not be read or decoded."""

    code = "IO"
    exit_code = 1


class ScenarioValidationError(HapAssessError):
    """A scenario value violates a constraint."""

    code = "VALIDATION"

    def __init__(self, field: str, constraint: str, details: Optional[str] = None):
        super().__init__(details or f"Field '{field}': {constraint}")
        self.field = field
        self.constraint = constraint


class UnknownReferenceError(HapAssessError):
    """A platform, offer or architecture id does not resolve."""

    code = "UNKNOWN_REFERENCE"

    def __init__(self, kind: str, reference: str, available: Any = ()):
        listing = ", ".join(sorted(available))
        message = f"unknown {kind} '{reference}'"
        if listing:
            message += f" (available: {listing})"
        super().__init__(message)
        self.kind = kind
        self.reference = reference


class MissingParameterError(HapAssessError):
    """A computation needs a parameter the scenario leaves absent."""

    code = "MISSING_PARAMETER"

    def __init__(self, parameter: str, reason: str = ""):
        message = f"missing parameter '{parameter}'"
        if reason:
            message += f": {reason}"
        super().__init__(message)
        self.parameter = parameter


class OutOfRangeError(HapAssessError):
    """A lookup or argument falls outside the modelled range."""

    code = "OUT_OF_RANGE"


class InvalidArgumentError(HapAssessError):
    """An operation was called with an argument outside its domain."""

    def __init__(self, message: str, code: str = "INVALID_ARGUMENT"):
        super().__init__(message)
        self.code = code


class CapacityExceededError(HapAssessError):
    """Forecast demand does not fit the sellable platform capacity."""

    code = "CAPACITY_EXCEEDED"
    exit_code = 3

    def __init__(self, total_links: int, sellable: int, year: Optional[int] = None):
        where = f"year {year}: " if year is not None else ""
        super().__init__(f"{where}{total_links} links demanded, {sellable} sellable")
        self.total_links = total_links
        self.sellable = sellable
        self.year = year


class InfeasibleArchitectureError(HapAssessError):
    """The architecture cannot carry the scenario at the configured fleet size."""

    code = "INFEASIBLE"
    exit_code = 3

    def __init__(self, feasibility: "FeasibilityReport"):
        super().__init__(
            f"binding constraint '{feasibility.binding_constraint.value}' "
            f"({feasibility.platforms_required} platform(s) required)"
        )
        self.feasibility = feasibility


class NoSignChangeError(HapAssessError):
    """IRR requested for a series whose flows never change sign."""

    code = "NO_SIGN_CHANGE"


class NoRootInRangeError(HapAssessError):
    """IRR has no root inside the search bracket."""

    code = "NO_ROOT_IN_RANGE"


class MultipleRootsWarning(UserWarning):
    """IRR series with several sign changes; the root nearest zero was returned."""


def _field_path(loc: tuple, prefix: str = "") -> str:
    path = ".".join(str(part) for part in loc)
    if prefix:
        return f"{prefix}.{path}" if path else prefix
    return path or "root"


def format_validation_error(error: ValidationError, prefix: str = "") -> str:
    """One ``  scenario.field: message`` line per failing scenario field."""
    return "\n".join(
        f"  {_field_path(tuple(item.get('loc', ())), prefix)}: {item.get('msg', 'invalid value')}"
        for item in error.errors()
    )


def from_validation_error(error: ValidationError, prefix: str = "") -> ScenarioValidationError:
    """Translate a pydantic error into a ScenarioValidationError naming the first field."""
    errors = error.errors()
    first = errors[0] if errors else {}
    return ScenarioValidationError(
        field=_field_path(tuple(first.get("loc", ())), prefix),
        constraint=first.get("msg", "invalid value"),
        details=f"scenario is invalid:\n{format_validation_error(error, prefix)}",
    )
