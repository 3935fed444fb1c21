"""Characterization: turning flow inventories into impact assessments.

Each inventory entry is matched against the factor table by flow, entry
direction filter, and unit (directly or through a declared conversion),
then multiplied into every impact category the entry declares. This is
the boundary where exact decimals end: factors are measured values, so
impact amounts are binary floats.

Strict mode fails on the first flow with no table entry; lenient mode
computes what it can and reports the gaps, because a silently partial
assessment is worse than a visibly partial one.
"""

from __future__ import annotations

from enum import Enum

from .errors import UncharacterizedFlowError, UnitMismatchError
from .model import ComponentRef, Direction, Quantity
from .annotations import CharacterizationTable, ImpactClass, TableEntry
from .inventory import Inventory
from .units import UnitRegistry


class Mode(str, Enum):
    STRICT = "strict"
    LENIENT = "lenient"


#: category -> Quantity in the category's impact unit (float amounts).
ImpactVector = dict[str, Quantity]


class UncharacterizedFlow(tuple):
    """(flow, unit, direction) triple with readable rendering."""

    def __new__(cls, flow: str, unit: str, direction: str):
        return super().__new__(cls, (flow, unit, direction))

    def __str__(self) -> str:
        return f"{self[0]} [{self[1]}, {self[2]}]"


def _find_entry(
    table: CharacterizationTable,
    flow: str,
    unit: str,
    direction: Direction,
    registry: UnitRegistry,
) -> tuple[TableEntry | None, bool]:
    """Locate the applicable entry; returns (entry, flow_known).

    ``flow_known`` distinguishes "no entry for this flow+direction at
    all" from "entries exist but no unit conversion path reaches them".
    """
    candidates = [e for e in table.entries_for_flow(flow) if e.matches_direction(direction)]
    if not candidates:
        return None, False
    for entry in candidates:
        if entry.unit == unit:
            return entry, True
    for entry in candidates:  # entries_for_flow is sorted, so this is deterministic
        if registry.can_convert(unit, entry.unit):
            return entry, True
    return None, True


def vector_add(vec: ImpactVector, category: str, amount: float, unit: str) -> None:
    existing = vec.get(category)
    if existing is None:
        vec[category] = Quantity(amount, unit)
    else:
        vec[category] = Quantity(existing.amount + amount, unit)


def characterize(
    inv: Inventory,
    table: CharacterizationTable,
    mode: Mode = Mode.STRICT,
    registry: UnitRegistry | None = None,
) -> tuple[dict[ComponentRef, ImpactVector], list[UncharacterizedFlow]]:
    """Characterize an inventory into per-component impact vectors.

    Returns the vectors plus the sorted list of flows that matched no
    factor entry (or no category). Strict mode raises
    :class:`UncharacterizedFlowError` / :class:`UnitMismatchError`
    instead of skipping.
    """
    registry = registry or UnitRegistry()
    mode = Mode(mode)
    vectors: dict[ComponentRef, ImpactVector] = {}
    uncharacterized: set[UncharacterizedFlow] = set()

    for key, q in inv.sorted_entries():
        entry, flow_known = _find_entry(table, key.flow, q.unit, key.direction, registry)
        if entry is None:
            if mode is Mode.STRICT:
                if flow_known:
                    raise UnitMismatchError(
                        f"no conversion path from '{q.unit}' to any table unit for flow '{key.flow}'"
                    )
                raise UncharacterizedFlowError(key.flow, q.unit, key.direction.value)
            uncharacterized.add(UncharacterizedFlow(key.flow, q.unit, key.direction.value))
            continue
        if not entry.factors:
            # an entry that characterizes into no category still leaves the
            # flow unassessed; report it, in either mode
            uncharacterized.add(UncharacterizedFlow(key.flow, q.unit, key.direction.value))
            continue
        amount = q.amount
        if entry.unit != q.unit:
            amount = amount * registry.factor(q.unit, entry.unit)
        base = float(amount)
        vec = vectors.setdefault(key.component, {})
        for category, factor in sorted(entry.factors.items()):
            vector_add(vec, category, base * factor, table.categories[category].impact_unit)

    return vectors, sorted(uncharacterized)


def classify_impacts(vec: ImpactVector, table: CharacterizationTable) -> dict[ImpactClass, ImpactVector]:
    """Partition a vector into climate / environmental / social classes."""
    out: dict[ImpactClass, ImpactVector] = {cls: {} for cls in ImpactClass}
    for category, q in vec.items():
        out[table.categories[category].impact_class][category] = q
    return out


def vector_total(vectors: dict[ComponentRef, ImpactVector]) -> ImpactVector:
    """Entrywise sum over all components."""
    total: ImpactVector = {}
    for vec in vectors.values():
        for category, q in vec.items():
            vector_add(total, category, q.amount, q.unit)
    return total
