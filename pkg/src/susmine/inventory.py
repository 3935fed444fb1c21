"""Flow inventories: quantified inputs/outputs per process component.

An inventory maps (component, flow, direction, scope) to an exact decimal
quantity. Assignments without a scope tag aggregate under the reserved
``unscoped`` label. Aggregation is plain decimal addition, so conservation
checks hold exactly at this stage; unit conversions are deliberately not
applied here (they happen at characterization lookup), and mixing units
under one key is an error rather than a silent normalization.

Roll-ups never cross component kinds: object flows are not folded into
activity flows — redistribution across kinds is allocation's job.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterator, NamedTuple

from .errors import UnitMismatchError, UnknownComponentError, ZeroOutputError
from .model import (
    PROCESS_REF,
    UNSCOPED,
    ComponentKind,
    ComponentRef,
    Direction,
    Quantity,
    resolve_component,
)
from .annotations import AnnotatedLog


class InvKey(NamedTuple):
    component: ComponentRef
    flow: str
    direction: Direction
    scope: str

    def sort_key(self):
        return (*self.component.sort_key(), self.flow, self.direction.value, self.scope)


@dataclass
class Inventory:
    """Additive map of inventory entries with exact decimal amounts."""

    entries: dict[InvKey, Quantity] = field(default_factory=dict)

    def add(self, key: InvKey, quantity: Quantity) -> None:
        existing = self.entries.get(key)
        if existing is None:
            self.entries[key] = quantity
            return
        if existing.unit != quantity.unit:
            raise UnitMismatchError(
                f"flow '{key.flow}' on {key.component} mixes units "
                f"'{existing.unit}' and '{quantity.unit}'"
            )
        self.entries[key] = Quantity(existing.amount + quantity.amount, existing.unit)

    def merge(self, other: "Inventory") -> None:
        for key, q in other.entries.items():
            self.add(key, q)

    def scaled(self, factor: Decimal) -> "Inventory":
        out = Inventory()
        for key, q in self.entries.items():
            out.entries[key] = Quantity(q.amount * factor, q.unit)
        return out

    def sorted_entries(self) -> list[tuple[InvKey, Quantity]]:
        return sorted(self.entries.items(), key=lambda kv: kv[0].sort_key())

    def negative_entries(self) -> list[tuple[InvKey, Quantity]]:
        """Avoided-burden credits; surfaced in reports, never netted silently."""
        return [(k, q) for k, q in self.sorted_entries() if q.amount < 0]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[InvKey, Quantity]]:
        return iter(self.sorted_entries())


@dataclass(frozen=True)
class FunctionalUnit:
    """Reference output amount that analyses are normalized against.

    ``measured_attribute`` selects what counts as output quantity: None
    means "number of objects of the type"; otherwise the named numeric
    object attribute is summed (objects lacking it contribute zero).
    """

    object_type: str
    reference: Quantity
    measured_attribute: str | None = None

    def __post_init__(self):
        if not isinstance(self.reference.amount, Decimal) or self.reference.amount <= 0:
            raise ValueError("functional unit reference amount must be a positive decimal")


def _scope_label(scope: str | None) -> str:
    return scope if scope is not None else UNSCOPED


def direct_inventory(al: AnnotatedLog) -> Inventory:
    """Every resolved assignment summed onto exactly its own component."""
    inv = Inventory()
    for ref, a in al.resolved:
        key = InvKey(ref, a.flow, a.direction, _scope_label(a.scope))
        inv.add(key, a.quantity)
    return inv


def component_inventory(al: AnnotatedLog, ref: ComponentRef) -> Inventory:
    """Inventory slice for exactly one component (no roll-up)."""
    resolve_component(ref, al.log)  # UnknownComponentError for dangling refs
    inv = Inventory()
    for comp, a in al.resolved:
        if comp != ref:
            continue
        inv.add(InvKey(comp, a.flow, a.direction, _scope_label(a.scope)), a.quantity)
    return inv


_ROLLUP_LEVELS = {ComponentKind.ACTIVITY_TYPE, ComponentKind.OBJECT_TYPE, ComponentKind.PROCESS}


def rollup_inventory(al: AnnotatedLog, level: ComponentKind) -> Inventory:
    """Aggregate instance entries up to their types, or everything to the
    process.

    Type-level totals are instance sums plus the type's own absolute
    assignments; the process total is a flat sum over all resolved
    assignments (each counted once — type totals are derived here, never
    re-added).
    """
    if level not in _ROLLUP_LEVELS:
        raise ValueError(f"roll-up level must be one of {sorted(k.value for k in _ROLLUP_LEVELS)}")
    inv = Inventory()
    for ref, a in al.resolved:
        key = InvKey(ref, a.flow, a.direction, _scope_label(a.scope))
        if level is ComponentKind.PROCESS:
            inv.add(key._replace(component=PROCESS_REF), a.quantity)
        elif level is ComponentKind.ACTIVITY_TYPE:
            if ref.kind is ComponentKind.ACTIVITY_INSTANCE:
                event = al.log.event(ref.id)
                type_ref = ComponentRef(ComponentKind.ACTIVITY_TYPE, event.activity)
                inv.add(key._replace(component=type_ref), a.quantity)
            elif ref.kind is ComponentKind.ACTIVITY_TYPE:
                inv.add(key, a.quantity)
        else:
            if ref.kind is ComponentKind.OBJECT_INSTANCE:
                obj = al.log.object(ref.id)
                type_ref = ComponentRef(ComponentKind.OBJECT_TYPE, obj.object_type)
                inv.add(key._replace(component=type_ref), a.quantity)
            elif ref.kind is ComponentKind.OBJECT_TYPE:
                inv.add(key, a.quantity)
    return inv


def measured_output(al: AnnotatedLog, fu: FunctionalUnit) -> Decimal:
    """Total measured output of the functional unit's object type."""
    objects = al.log.objects_of_type(fu.object_type)
    if fu.measured_attribute is None:
        return Decimal(len(objects))
    total = Decimal(0)
    for obj in objects:
        value = obj.attributes.get(fu.measured_attribute)
        if value is None:
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float, Decimal)):
            raise UnitMismatchError(
                f"object '{obj.object_id}': attribute '{fu.measured_attribute}' is not numeric"
            )
        total += value if isinstance(value, Decimal) else Decimal(str(value))
    return total


def scale_to_functional_unit(inv: Inventory, fu: FunctionalUnit, al: AnnotatedLog) -> Inventory:
    """Rescale an inventory to the functional unit: every amount is
    multiplied by reference / (total measured output of the type)."""
    if fu.object_type not in al.log.object_types:
        raise UnknownComponentError(f"unknown object type '{fu.object_type}'")
    total = measured_output(al, fu)
    if total == 0:
        raise ZeroOutputError(
            f"log contains no measured output of object type '{fu.object_type}'"
        )
    return inv.scaled(fu.reference.amount / total)


def inventory_to_csv(inv: Inventory) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["component_kind", "component_id", "flow", "direction", "scope", "amount", "unit"])
    for key, q in inv.sorted_entries():
        writer.writerow([
            key.component.kind.value,
            key.component.id or "",
            key.flow,
            key.direction.value,
            key.scope,
            str(q.amount),
            q.unit,
        ])
    return out.getvalue()
