"""Exception hierarchy shared across the susmine engine.

Malformed JSON is reported via ``json.JSONDecodeError`` by the parsers;
everything past the byte level raises a :class:`SusmineError` subclass.
"""

from __future__ import annotations


class SusmineError(Exception):
    """Base class for all engine errors."""


class SchemaError(SusmineError):
    """A document is valid JSON/CSV but does not match its schema."""


class IntegrityError(SusmineError):
    """An event log violates its structural invariants (strict ingest)."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        extra = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"log integrity violations: {lines}{extra}")


class UnknownComponentError(SusmineError):
    """A component reference does not resolve against the log."""


class UnknownScopeError(SusmineError):
    """A scope label is not part of the active scope set."""


class UnknownUnitError(SusmineError):
    """A unit identifier is not declared in the unit registry."""


class NoConversionPathError(SusmineError):
    """No chain of declared conversions links the two units."""


class UnitMismatchError(SusmineError):
    """Quantities in incompatible units met where one unit is required."""


class UncharacterizedFlowError(SusmineError):
    """Strict characterization hit a flow with no factor table entry."""

    def __init__(self, flow: str, unit: str, direction: str):
        self.flow = flow
        self.unit = unit
        self.direction = direction
        super().__init__(f"no characterization entry for flow '{flow}' [{unit}, {direction}]")


class ZeroOutputError(SusmineError):
    """Functional-unit scaling found zero measured output in the log."""


class NoTargetsError(SusmineError):
    """An allocation rule selected an empty target set."""


class MissingAttributeError(SusmineError):
    """A proportional allocation key names an attribute a target lacks."""


class InvalidAllocationKeyError(SusmineError):
    """Allocation key values are unusable (e.g. negative attribute values)."""


class DuplicateSourceError(SusmineError):
    """Two allocation rules name the same source component."""


class LogMismatchError(SusmineError):
    """Pipeline results were computed on a different log than the graph."""


class MissingFixtureError(SusmineError):
    """A manifest entry points at a fixture file that does not exist."""
