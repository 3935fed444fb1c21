"""Impact allocation: redistributing one component's impacts to others.

A rule names a source (typically a shared resource object), a target
selection (the events related to it, or an explicit list), a key (equal,
or proportional to a target attribute such as ``mass_kg`` or
``economic_value``) and a fraction of the source's impact to move.

All transfers are computed against a snapshot of the incoming impact map
and applied at once, so rules cannot chain within a pass and their order
never matters. Every transfer is written to a ledger; global totals per
(category, scope) are invariant, and the (category, scope) pair travels
unchanged from source to target.

Degenerate proportional keys (all target values zero) fall back to an
equal split with a recorded warning — allocation choices must stay
visible, not silent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicateSourceError,
    InvalidAllocationKeyError,
    MissingAttributeError,
    NoTargetsError,
    SchemaError,
)
from .model import ComponentKind, ComponentRef, Quantity, resolve_component
from .annotations import RELATED_EVENTS, AllocationRule, AnnotatedLog
from .impact import Mode
from .scoping import ScopedVector


@dataclass(frozen=True)
class LedgerEntry:
    source: ComponentRef
    target: ComponentRef
    category: str
    scope: str
    amount: float
    weight: float

    def sort_key(self):
        return (*self.source.sort_key(), *self.target.sort_key(), self.category, self.scope)


@dataclass
class AllocationLedger:
    """Record of every transfer plus per-source residual vectors."""

    entries: list[LedgerEntry] = field(default_factory=list)
    residuals: dict[ComponentRef, ScopedVector] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def _select_targets(rule: AllocationRule, al: AnnotatedLog) -> list[ComponentRef]:
    if rule.targets == RELATED_EVENTS:
        if rule.source.kind is not ComponentKind.OBJECT_INSTANCE:
            raise SchemaError(
                f"related_events selection requires an object_instance source, got {rule.source}"
            )
        events = al.log.events_related_to(rule.source.id, rule.qualifier)
        refs = [ComponentRef(ComponentKind.ACTIVITY_INSTANCE, e.event_id) for e in events]
    else:
        refs = list(rule.targets)
        for ref in refs:
            resolve_component(ref, al.log)
    return sorted(set(refs), key=lambda r: r.sort_key())


def _attribute_value(ref: ComponentRef, al: AnnotatedLog, attribute: str):
    if ref.kind is ComponentKind.ACTIVITY_INSTANCE:
        entity = al.log.event(ref.id)
    elif ref.kind is ComponentKind.OBJECT_INSTANCE:
        entity = al.log.object(ref.id)
    else:
        return None  # type-level components carry no attributes
    if entity is None:
        return None
    return entity.attributes.get(attribute)


def allocation_weights_detailed(
    rule: AllocationRule, al: AnnotatedLog, mode: Mode = Mode.STRICT
) -> tuple[dict[ComponentRef, float], list[str]]:
    """Weights plus any fallback warnings for one rule.

    Weights are non-negative and sum to 1. Proportional keys read the
    named attribute off each target; a missing attribute is an error in
    strict mode and a zero weight (with a warning) in lenient mode.
    """
    resolve_component(rule.source, al.log)
    targets = _select_targets(rule, al)
    if not targets:
        raise NoTargetsError(f"rule on {rule.source} selected no targets")
    warnings: list[str] = []

    if not rule.key.proportional:
        weight = 1.0 / len(targets)
        return {ref: weight for ref in targets}, warnings

    attribute = rule.key.attribute
    values: list[float] = []
    for ref in targets:
        raw = _attribute_value(ref, al, attribute)
        if raw is None or isinstance(raw, (str, bool)):
            if Mode(mode) is Mode.STRICT:
                raise MissingAttributeError(
                    f"target {ref} lacks numeric attribute '{attribute}' required by key '{rule.key.label}'"
                )
            warnings.append(f"{rule.source}: target {ref} lacks '{attribute}', weighted 0")
            values.append(0.0)
            continue
        value = float(raw)
        if value < 0:
            raise InvalidAllocationKeyError(
                f"target {ref}: attribute '{attribute}' is negative ({value}); weights must be >= 0"
            )
        values.append(value)

    total = sum(values)
    if total == 0:
        warnings.append(
            f"{rule.source}: all '{attribute}' values zero, falling back to equal split"
        )
        weight = 1.0 / len(targets)
        return {ref: weight for ref in targets}, warnings
    return {ref: v / total for ref, v in zip(targets, values)}, warnings


def allocation_weights(
    rule: AllocationRule, al: AnnotatedLog, mode: Mode = Mode.STRICT
) -> dict[ComponentRef, float]:
    weights, _ = allocation_weights_detailed(rule, al, mode)
    return weights


def apply_allocations(
    al: AnnotatedLog,
    impacts: dict[ComponentRef, ScopedVector],
    rules: list[AllocationRule] | None = None,
    mode: Mode = Mode.STRICT,
) -> tuple[dict[ComponentRef, ScopedVector], AllocationLedger]:
    """Apply every rule against a snapshot of ``impacts``.

    Each source's fraction-scaled vector is split by the rule's weights
    and added to the targets; the source keeps (1 - fraction) of it.
    Returns the reallocated map and the ledger, both deterministically
    ordered. Raises :class:`DuplicateSourceError` when two rules share a
    source.
    """
    rules = al.rules if rules is None else rules
    seen_sources: set[ComponentRef] = set()
    for rule in rules:
        if rule.source in seen_sources:
            raise DuplicateSourceError(f"multiple rules name source {rule.source}")
        seen_sources.add(rule.source)

    result: dict[ComponentRef, ScopedVector] = {ref: dict(sv) for ref, sv in impacts.items()}
    ledger = AllocationLedger()

    for rule in sorted(rules, key=lambda r: r.source.sort_key()):
        weights, warnings = allocation_weights_detailed(rule, al, mode)
        ledger.warnings.extend(warnings)
        fraction = float(rule.fraction)
        source_vector = impacts.get(rule.source, {})
        if fraction == 0.0 or not source_vector:
            continue
        residual: ScopedVector = {}
        out_vector = result.setdefault(rule.source, {})
        for (category, scope), q in sorted(source_vector.items()):
            moved = q.amount * fraction
            kept = q.amount - moved
            current = out_vector[(category, scope)]
            out_vector[(category, scope)] = Quantity(current.amount - moved, current.unit)
            if fraction < 1.0:
                residual[(category, scope)] = Quantity(kept, q.unit)
            for target, weight in sorted(weights.items(), key=lambda kv: kv[0].sort_key()):
                share = moved * weight
                tvec = result.setdefault(target, {})
                prev = tvec.get((category, scope))
                amount = share if prev is None else prev.amount + share
                tvec[(category, scope)] = Quantity(amount, q.unit)
                ledger.entries.append(
                    LedgerEntry(rule.source, target, category, scope, share, weight)
                )
        if residual:
            ledger.residuals[rule.source] = residual

    ledger.entries.sort(key=lambda e: e.sort_key())
    ledger.warnings.sort()
    return result, ledger
