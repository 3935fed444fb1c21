"""End-to-end analysis pipeline: inventory -> impacts -> scopes -> allocation.

``run_pipeline`` is the one place the stage order lives; everything the
reporting layer needs is collected into a :class:`PipelineResult`.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .model import ComponentKind, ComponentRef, EventLog, Quantity
from .annotations import AnnotatedLog, AnnotationBundle, bind_annotations
from .allocation import AllocationLedger, apply_allocations
from .audit import SupportLevel, pattern_audit
from .dfg import AnnotatedDFG, annotate_dfg, build_dfg
from .impact import Mode, UncharacterizedFlow
from .inventory import (
    FunctionalUnit,
    Inventory,
    direct_inventory,
    measured_output,
    rollup_inventory,
    scale_to_functional_unit,
)
from .scoping import ScopedVector, scoped_impacts


@dataclass
class PipelineResult:
    al: AnnotatedLog
    mode: Mode
    inventory: Inventory
    scoped: dict[ComponentRef, ScopedVector]
    post_allocation: dict[ComponentRef, ScopedVector]
    ledger: AllocationLedger
    uncharacterized: list[UncharacterizedFlow]
    audit_row: dict[str, SupportLevel]
    dfg: AnnotatedDFG
    fu: FunctionalUnit | None = None
    fu_scale: Decimal | None = None
    fu_output: Decimal | None = None
    fu_inventory: Inventory | None = None

    @property
    def log(self) -> EventLog:
        return self.al.log


def activity_type_totals(
    al: AnnotatedLog, vectors: dict[ComponentRef, ScopedVector]
) -> dict[str, ScopedVector]:
    """Roll component vectors up to activity types: instance vectors sum
    into their type plus anything held by the type itself. Other kinds
    (objects, process) are excluded — they are the non-activity residual."""
    totals: dict[str, ScopedVector] = {}
    for ref, sv in vectors.items():
        if ref.kind is ComponentKind.ACTIVITY_INSTANCE:
            event = al.log.event(ref.id)
            if event is None:
                continue
            activity = event.activity
        elif ref.kind is ComponentKind.ACTIVITY_TYPE:
            activity = ref.id
        else:
            continue
        bucket = totals.setdefault(activity, {})
        for key, q in sv.items():
            prev = bucket.get(key)
            bucket[key] = Quantity(q.amount if prev is None else prev.amount + q.amount, q.unit)
    return totals


def run_pipeline(
    log: EventLog,
    bundle: AnnotationBundle,
    mode: Mode = Mode.STRICT,
    fu: FunctionalUnit | None = None,
) -> PipelineResult:
    al = bind_annotations(log, bundle)
    inventory = direct_inventory(al)
    scoped, uncharacterized = scoped_impacts(al, mode)
    post, ledger = apply_allocations(al, scoped, al.rules, mode)
    audit_row = pattern_audit(al, scoped, ledger)
    dfg = build_dfg(log)
    annotate_dfg(dfg, activity_type_totals(al, post), log.digest())

    result = PipelineResult(
        al=al,
        mode=Mode(mode),
        inventory=inventory,
        scoped=scoped,
        post_allocation=post,
        ledger=ledger,
        uncharacterized=uncharacterized,
        audit_row=audit_row,
        dfg=dfg,
    )
    if fu is not None:
        result.fu = fu
        result.fu_output = measured_output(al, fu)
        process_inv = rollup_inventory(al, ComponentKind.PROCESS)
        result.fu_inventory = scale_to_functional_unit(process_inv, fu, al)
        result.fu_scale = fu.reference.amount / result.fu_output
    return result
