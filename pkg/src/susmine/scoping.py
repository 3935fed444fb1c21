"""Scoped impact views: disjoint buckets plus derived cumulative readings.

Scope labels partition assignments into disjoint buckets (the GHG
Protocol scopes are disjoint by definition), so no flow is ever counted
in two scopes and the bucket sum always equals the unpartitioned total.
Cumulative boundary readings — gate-to-gate within cradle-to-gate — are
derived on demand and never stored.

Assignments without a scope tag land in the reserved ``unscoped`` bucket,
which reports surface explicitly so partially scoped data stays visible.
"""

from __future__ import annotations

from .errors import UnknownScopeError
from .model import UNSCOPED, ComponentRef, Quantity
from .annotations import AnnotatedLog, ScopeSet
from .impact import ImpactVector, Mode, UncharacterizedFlow, characterize
from .inventory import Inventory, direct_inventory

#: (impact category, scope label) -> Quantity (float amounts).
ScopedVector = dict[tuple[str, str], Quantity]


def _bucket_labels(al: AnnotatedLog) -> list[str]:
    return [*al.scope_set.scopes, UNSCOPED]


def scoped_impacts(
    al: AnnotatedLog, mode: Mode = Mode.STRICT
) -> tuple[dict[ComponentRef, ScopedVector], list[UncharacterizedFlow]]:
    """Characterize each scope bucket independently.

    Buckets are disjoint by construction: every inventory entry carries
    exactly one scope label, so the per-scope inventories partition the
    full one and totals are conserved.
    """
    full = direct_inventory(al)
    vectors: dict[ComponentRef, ScopedVector] = {}
    uncharacterized: set[UncharacterizedFlow] = set()
    for scope in _bucket_labels(al):
        bucket = Inventory(entries={k: q for k, q in full.entries.items() if k.scope == scope})
        if not bucket.entries:
            continue
        by_component, gaps = characterize(bucket, al.table, mode, al.registry)
        uncharacterized.update(gaps)
        for component, vec in by_component.items():
            scoped = vectors.setdefault(component, {})
            for category, q in vec.items():
                prev = scoped.get((category, scope))
                amount = q.amount if prev is None else prev.amount + q.amount
                scoped[(category, scope)] = Quantity(amount, q.unit)
    return vectors, sorted(uncharacterized)


def collapse_scopes(sv: ScopedVector) -> ImpactVector:
    """Sum a scoped vector over its scope labels."""
    out: ImpactVector = {}
    for (category, _), q in sorted(sv.items()):
        prev = out.get(category)
        out[category] = Quantity(q.amount if prev is None else prev.amount + q.amount, q.unit)
    return out


def scoped_total(vectors: dict[ComponentRef, ScopedVector]) -> ScopedVector:
    """Entrywise sum over all components."""
    total: ScopedVector = {}
    for sv in vectors.values():
        for key, q in sv.items():
            prev = total.get(key)
            total[key] = Quantity(q.amount if prev is None else prev.amount + q.amount, q.unit)
    return total


def cumulative_view(
    sv: ScopedVector,
    order: list[str] | tuple[str, ...],
    scope_set: ScopeSet | None = None,
) -> dict[tuple[str, str], Quantity]:
    """Running totals along an ordered scope list.

    The result maps (category, label) to the sum of all buckets up to and
    including that label, e.g. a cradle-to-gate reading on top of
    gate-to-gate buckets. ``order`` must be a permutation of the scope
    set; the ``unscoped`` bucket never participates.
    """
    order = list(order)
    if len(set(order)) != len(order):
        raise ValueError("scope order contains duplicates")
    if UNSCOPED in order:
        raise UnknownScopeError(f"'{UNSCOPED}' cannot appear in a cumulative order")
    if scope_set is not None:
        unknown = [s for s in order if s not in scope_set]
        if unknown:
            raise UnknownScopeError(f"scope(s) {unknown} not in scope set '{scope_set.name}'")
        if set(order) != set(scope_set.scopes):
            raise ValueError("scope order must be a permutation of the scope set")
    else:
        present = {scope for (_, scope) in sv if scope != UNSCOPED}
        missing = sorted(present - set(order))
        if missing:
            raise UnknownScopeError(f"scope order omits bucket(s) {missing} present in the data")

    categories = sorted({category for (category, _) in sv})
    out: dict[tuple[str, str], Quantity] = {}
    for category in categories:
        unit = next(q.unit for (cat, _), q in sorted(sv.items()) if cat == category)
        running = 0.0
        for label in order:
            bucket = sv.get((category, label))
            if bucket is not None:
                running += bucket.amount
            out[(category, label)] = Quantity(running, unit)
    return out


def unscoped_share(total: ScopedVector) -> dict[str, float]:
    """Fraction of each category's total that carries no scope tag."""
    sums: dict[str, float] = {}
    unscoped: dict[str, float] = {}
    for (category, scope), q in total.items():
        sums[category] = sums.get(category, 0.0) + q.amount
        if scope == UNSCOPED:
            unscoped[category] = unscoped.get(category, 0.0) + q.amount
    return {
        category: (unscoped.get(category, 0.0) / sums[category]) if sums[category] != 0 else 0.0
        for category in sorted(sums)
    }
