"""Sustainability annotation bundles and their binding to event logs.

A bundle (JSON, ``"schema": "susmine/1"``) carries everything the engine
needs on top of a raw log:

* flow assignments — quantified inputs/outputs attached to components,
  optionally scope-tagged,
* a characterization table — per-unit factors mapping flows into impact
  categories, each category labelled climate / environmental / social,
* a scope set — ordered, disjoint buckets (presets: ``ghg``, ``lca``),
* allocation rules — how impacts held by one component are redistributed,
* a unit registry section with optional linear conversions.

Amounts are parsed into exact decimals and stay exact through the
inventory stage; characterization factors become binary floats because
that is where measured-value arithmetic starts.

Binding resolves every component reference against a concrete log and
expands ``per_instance`` type-level assignments into one assignment per
instance. Instance-level assignments coexist additively with expanded
ones unless they set ``override``, which suppresses expanded entries for
the same instance, flow and direction.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum

from .errors import SchemaError, UnknownScopeError, UnknownUnitError
from .model import ComponentKind, ComponentRef, Direction, EventLog, Quantity, resolve_component
from .units import UnitRegistry

SCHEMA_ID = "susmine/1"

_TYPE_KINDS = {ComponentKind.ACTIVITY_TYPE, ComponentKind.OBJECT_TYPE}
_INSTANCE_KINDS = {ComponentKind.ACTIVITY_INSTANCE, ComponentKind.OBJECT_INSTANCE}


class ImpactClass(str, Enum):
    CLIMATE = "climate"
    ENVIRONMENTAL = "environmental"
    SOCIAL = "social"


class Basis(str, Enum):
    ABSOLUTE = "absolute"
    PER_INSTANCE = "per_instance"


@dataclass(frozen=True)
class ScopeSet:
    """Ordered set of disjoint scope labels."""

    name: str
    scopes: tuple[str, ...]

    def __post_init__(self):
        if not self.scopes:
            raise SchemaError("scope set must declare at least one scope")
        if len(set(self.scopes)) != len(self.scopes):
            raise SchemaError("scope labels must be unique")
        from .model import UNSCOPED

        if UNSCOPED in self.scopes:
            raise SchemaError(f"'{UNSCOPED}' is a reserved scope label")

    def __contains__(self, label: str) -> bool:
        return label in self.scopes


#: Built-in scope presets: GHG Protocol emission buckets and a minimal
#: in-company vs. upstream value-chain split.
SCOPE_PRESETS = {
    "ghg": ScopeSet("ghg", ("scope1", "scope2", "scope3")),
    "lca": ScopeSet("lca", ("gate_to_gate", "upstream")),
}


@dataclass(frozen=True)
class FlowAssignment:
    """One quantified input/output flow attached to a process component."""

    component: ComponentRef
    flow: str
    direction: Direction
    quantity: Quantity
    scope: str | None = None
    basis: Basis = Basis.ABSOLUTE
    override: bool = False


@dataclass(frozen=True)
class CategoryInfo:
    impact_unit: str
    impact_class: ImpactClass


@dataclass(frozen=True)
class TableEntry:
    """Factors for one (flow, unit); ``direction`` filters which flow
    direction the entry characterizes (None = both)."""

    flow: str
    unit: str
    direction: Direction | None
    factors: dict[str, float]

    def matches_direction(self, direction: Direction) -> bool:
        return self.direction is None or self.direction is direction


@dataclass
class CharacterizationTable:
    """Map from (flow, unit) to per-category factors, plus the category
    declarations (impact unit and climate/environmental/social class)."""

    entries: dict[tuple[str, str], TableEntry] = field(default_factory=dict)
    categories: dict[str, CategoryInfo] = field(default_factory=dict)

    def entries_for_flow(self, flow: str) -> list[TableEntry]:
        return [e for (f, _), e in sorted(self.entries.items()) if f == flow]

    def categories_of_class(self, impact_class: ImpactClass) -> list[str]:
        return sorted(c for c, info in self.categories.items() if info.impact_class is impact_class)


@dataclass(frozen=True)
class AllocationKey:
    """How a source's impact is split: equally, or proportional to a
    target attribute. ``mass`` / ``economic_value`` are shorthands for
    the attributes ``mass_kg`` / ``economic_value``."""

    label: str
    attribute: str | None = None

    @property
    def proportional(self) -> bool:
        return self.attribute is not None


EQUAL_KEY = AllocationKey("equal")
RELATED_EVENTS = "related_events"


@dataclass(frozen=True)
class AllocationRule:
    source: ComponentRef
    targets: str | tuple[ComponentRef, ...] = RELATED_EVENTS
    key: AllocationKey = EQUAL_KEY
    fraction: Decimal = Decimal(1)
    qualifier: str | None = None

    def __post_init__(self):
        if not (0 <= self.fraction <= 1):
            raise SchemaError(f"allocation fraction must lie in [0,1], got {self.fraction}")


@dataclass
class AnnotationBundle:
    """Parsed but unbound annotation document."""

    assignments: list[FlowAssignment]
    table: CharacterizationTable
    scope_set: ScopeSet
    rules: list[AllocationRule]
    registry: UnitRegistry


@dataclass
class AnnotatedLog:
    """A log plus its fully resolved annotations.

    ``resolved`` pairs each concrete component with the assignment that
    landed on it; type-level per-instance assignments appear once per
    instance of the type.
    """

    log: EventLog
    resolved: list[tuple[ComponentRef, FlowAssignment]]
    table: CharacterizationTable
    scope_set: ScopeSet
    rules: list[AllocationRule]
    registry: UnitRegistry


def _as_decimal(value, where: str) -> Decimal:
    if isinstance(value, Decimal):
        dec = value
    elif isinstance(value, (int, str)):
        try:
            dec = Decimal(value)
        except InvalidOperation as exc:
            raise SchemaError(f"{where}: invalid decimal '{value}'") from exc
    elif isinstance(value, float):
        dec = Decimal(str(value))
    else:
        raise SchemaError(f"{where}: expected a number, got {type(value).__name__}")
    if not dec.is_finite():
        raise SchemaError(f"{where}: amount must be finite")
    return dec


def parse_component_ref(raw, where: str) -> ComponentRef:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: component must be an object with 'kind'")
    kind_raw = raw.get("kind")
    try:
        kind = ComponentKind(kind_raw)
    except ValueError:
        raise SchemaError(f"{where}: unknown component kind '{kind_raw}'") from None
    cid = raw.get("id")
    if kind is ComponentKind.PROCESS:
        if cid is not None:
            raise SchemaError(f"{where}: process refs carry no id")
        return ComponentRef(kind)
    if not isinstance(cid, str) or not cid:
        raise SchemaError(f"{where}: '{kind.value}' ref requires a non-empty id")
    return ComponentRef(kind, cid)


def parse_scope_set(raw) -> ScopeSet:
    if raw is None:
        return SCOPE_PRESETS["ghg"]
    if isinstance(raw, str):
        preset = SCOPE_PRESETS.get(raw)
        if preset is None:
            raise SchemaError(f"unknown scope preset '{raw}' (expected one of {sorted(SCOPE_PRESETS)})")
        return preset
    if isinstance(raw, dict):
        name = raw.get("name")
        scopes = raw.get("scopes")
        if not isinstance(name, str) or not name:
            raise SchemaError("custom scope set requires a 'name'")
        if not isinstance(scopes, list) or not all(isinstance(s, str) and s for s in scopes):
            raise SchemaError("custom scope set requires a list of scope labels")
        return ScopeSet(name, tuple(scopes))
    raise SchemaError("'scopes' must be a preset name or {name, scopes}")


def _parse_registry(raw) -> UnitRegistry:
    if raw is None:
        return UnitRegistry()
    if not isinstance(raw, dict):
        raise SchemaError("'units' must be an object")
    declare = raw.get("declare", [])
    if not isinstance(declare, list) or not all(isinstance(u, str) and u for u in declare):
        raise SchemaError("units.declare must be a list of unit names")
    conversions: dict[tuple[str, str], Decimal] = {}
    for conv in raw.get("conversions", []):
        if not isinstance(conv, dict):
            raise SchemaError("units.conversions entries must be objects")
        src, dst = conv.get("from"), conv.get("to")
        if not isinstance(src, str) or not isinstance(dst, str):
            raise SchemaError("units.conversions entries need 'from' and 'to'")
        conversions[(src, dst)] = _as_decimal(conv.get("factor"), f"conversion {src}->{dst}")
    return UnitRegistry(units=set(declare), conversions=conversions)


def _parse_direction(raw, where: str) -> Direction:
    try:
        return Direction(raw)
    except ValueError:
        raise SchemaError(f"{where}: direction must be 'input' or 'output', got {raw!r}") from None


def _parse_assignment(raw, scope_set: ScopeSet, registry: UnitRegistry, where: str) -> FlowAssignment:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: assignments must be objects")
    component = parse_component_ref(raw.get("component"), where)
    flow = raw.get("flow")
    if not isinstance(flow, str) or not flow:
        raise SchemaError(f"{where}: 'flow' must be a non-empty string")
    direction = _parse_direction(raw.get("direction"), where)
    amount = _as_decimal(raw.get("amount"), f"{where} amount")
    unit = raw.get("unit")
    if not isinstance(unit, str) or not unit:
        raise SchemaError(f"{where}: 'unit' must be a non-empty string")
    if not registry.has_unit(unit):
        raise UnknownUnitError(f"{where}: unit '{unit}' not in registry")
    scope = raw.get("scope")
    if scope is not None:
        if not isinstance(scope, str):
            raise SchemaError(f"{where}: 'scope' must be a string")
        if scope not in scope_set:
            raise UnknownScopeError(
                f"{where}: scope '{scope}' not in scope set '{scope_set.name}' {list(scope_set.scopes)}"
            )
    basis_raw = raw.get("basis", Basis.ABSOLUTE.value)
    try:
        basis = Basis(basis_raw)
    except ValueError:
        raise SchemaError(f"{where}: basis must be 'absolute' or 'per_instance'") from None
    if basis is Basis.PER_INSTANCE and component.kind not in _TYPE_KINDS:
        raise SchemaError(f"{where}: per_instance basis is only legal on type-level components")
    override = raw.get("override", False)
    if not isinstance(override, bool):
        raise SchemaError(f"{where}: 'override' must be a boolean")
    if override and component.kind not in _INSTANCE_KINDS:
        raise SchemaError(f"{where}: 'override' is only legal on instance-level components")
    return FlowAssignment(component, flow, direction, Quantity(amount, unit), scope, basis, override)


def _parse_table(raw, scope_set: ScopeSet, registry: UnitRegistry) -> CharacterizationTable:
    table = CharacterizationTable()
    if raw is None:
        return table
    if not isinstance(raw, dict):
        raise SchemaError("'characterization' must be an object")

    categories_raw = raw.get("categories", {})
    if not isinstance(categories_raw, dict):
        raise SchemaError("characterization.categories must be an object")
    for name, info in sorted(categories_raw.items()):
        if not isinstance(info, dict):
            raise SchemaError(f"category '{name}': declaration must be an object")
        impact_unit = info.get("impact_unit")
        if not isinstance(impact_unit, str) or not impact_unit:
            raise SchemaError(f"category '{name}': 'impact_unit' required")
        try:
            impact_class = ImpactClass(info.get("class"))
        except ValueError:
            raise SchemaError(
                f"category '{name}': class must be climate, environmental or social"
            ) from None
        if scope_set.name == "ghg" and impact_class is ImpactClass.CLIMATE and impact_unit != "kg CO2e":
            raise SchemaError(
                f"category '{name}': climate categories must use 'kg CO2e' under the ghg preset"
            )
        table.categories[name] = CategoryInfo(impact_unit, impact_class)

    for entry_raw in raw.get("factors", []):
        if not isinstance(entry_raw, dict):
            raise SchemaError("characterization.factors entries must be objects")
        flow = entry_raw.get("flow")
        unit = entry_raw.get("unit")
        if not isinstance(flow, str) or not flow or not isinstance(unit, str) or not unit:
            raise SchemaError("factor entries require 'flow' and 'unit'")
        if not registry.has_unit(unit):
            raise UnknownUnitError(f"factor entry for '{flow}': unit '{unit}' not in registry")
        direction = None
        if entry_raw.get("direction") is not None:
            direction = _parse_direction(entry_raw["direction"], f"factor entry '{flow}'")
        factors_raw = entry_raw.get("factors", {})
        if not isinstance(factors_raw, dict):
            raise SchemaError(f"factor entry '{flow}': 'factors' must be an object")
        factors: dict[str, float] = {}
        for category, value in sorted(factors_raw.items()):
            if category not in table.categories:
                raise SchemaError(f"factor entry '{flow}': undeclared category '{category}'")
            factor = float(_as_decimal(value, f"factor {flow}->{category}"))
            factors[category] = factor
        key = (flow, unit)
        if key in table.entries:
            raise SchemaError(f"duplicate factor entry for flow '{flow}' [{unit}]")
        table.entries[key] = TableEntry(flow, unit, direction, factors)
    return table


def _parse_key(raw, where: str) -> AllocationKey:
    if raw is None or raw == "equal":
        return EQUAL_KEY
    if raw == "mass":
        return AllocationKey("mass", "mass_kg")
    if raw == "economic_value":
        return AllocationKey("economic_value", "economic_value")
    if isinstance(raw, dict):
        attribute = raw.get("attribute")
        if not isinstance(attribute, str) or not attribute:
            raise SchemaError(f"{where}: proportional key requires a non-empty 'attribute'")
        return AllocationKey(f"attribute:{attribute}", attribute)
    raise SchemaError(f"{where}: unknown allocation key {raw!r}")


def _parse_rule(raw, where: str) -> AllocationRule:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: allocation rules must be objects")
    source = parse_component_ref(raw.get("source"), where)
    targets_raw = raw.get("targets", RELATED_EVENTS)
    targets: str | tuple[ComponentRef, ...]
    if targets_raw == RELATED_EVENTS:
        targets = RELATED_EVENTS
    elif isinstance(targets_raw, list):
        targets = tuple(parse_component_ref(t, f"{where} target") for t in targets_raw)
    else:
        raise SchemaError(f"{where}: 'targets' must be 'related_events' or a list of components")
    qualifier = raw.get("qualifier")
    if qualifier is not None and not isinstance(qualifier, str):
        raise SchemaError(f"{where}: 'qualifier' must be a string")
    if qualifier is not None and isinstance(targets, tuple):
        raise SchemaError(f"{where}: 'qualifier' only applies to related_events selection")
    key = _parse_key(raw.get("key"), where)
    fraction = _as_decimal(raw.get("fraction", 1), f"{where} fraction")
    return AllocationRule(source, targets, key, fraction, qualifier)


def parse_annotations(document: bytes | str, scopes_override: ScopeSet | None = None) -> AnnotationBundle:
    """Parse an annotation bundle document.

    Raises ``json.JSONDecodeError`` for malformed JSON, and
    ``SchemaError`` / ``UnknownScopeError`` / ``UnknownUnitError`` when
    the content is invalid. Scope labels are checked here, at parse time.
    ``scopes_override`` replaces the document's scope set (and every
    scope label is re-validated against it).
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    data = json.loads(document, parse_float=Decimal)
    if not isinstance(data, dict):
        raise SchemaError("annotation bundle must be a JSON object")
    if data.get("schema") != SCHEMA_ID:
        raise SchemaError(f"annotation bundle must declare \"schema\": \"{SCHEMA_ID}\"")

    registry = _parse_registry(data.get("units"))
    scope_set = scopes_override if scopes_override is not None else parse_scope_set(data.get("scopes"))
    table = _parse_table(data.get("characterization"), scope_set, registry)

    assignments_raw = data.get("assignments", [])
    if not isinstance(assignments_raw, list):
        raise SchemaError("'assignments' must be an array")
    assignments = [
        _parse_assignment(raw, scope_set, registry, f"assignment #{i}")
        for i, raw in enumerate(assignments_raw)
    ]

    rules_raw = data.get("allocations", [])
    if not isinstance(rules_raw, list):
        raise SchemaError("'allocations' must be an array")
    rules = [_parse_rule(raw, f"allocation #{i}") for i, raw in enumerate(rules_raw)]

    return AnnotationBundle(assignments, table, scope_set, rules, registry)


def characterization_from_csv(text: str, scope_set: ScopeSet | None = None,
                              registry: UnitRegistry | None = None) -> CharacterizationTable:
    """Load a characterization table from CSV.

    Columns: flow,unit,category,factor,impact_unit,class. Rows sharing a
    (flow, unit) merge into one entry; conflicting category declarations
    raise :class:`SchemaError`. CSV entries apply to both directions.
    """
    scope_set = scope_set or SCOPE_PRESETS["ghg"]
    registry = registry or UnitRegistry()
    reader = csv.DictReader(io.StringIO(text))
    required = {"flow", "unit", "category", "factor", "impact_unit", "class"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise SchemaError(f"characterization CSV requires columns {sorted(required)}")

    table = CharacterizationTable()
    factors_by_key: dict[tuple[str, str], dict[str, float]] = {}
    for i, row in enumerate(reader, start=2):
        flow, unit, category = row["flow"], row["unit"], row["category"]
        if not flow or not unit or not category:
            raise SchemaError(f"CSV line {i}: flow, unit and category are required")
        if not registry.has_unit(unit):
            raise UnknownUnitError(f"CSV line {i}: unit '{unit}' not in registry")
        try:
            impact_class = ImpactClass(row["class"])
        except ValueError:
            raise SchemaError(f"CSV line {i}: bad class '{row['class']}'") from None
        info = CategoryInfo(row["impact_unit"], impact_class)
        if scope_set.name == "ghg" and impact_class is ImpactClass.CLIMATE and info.impact_unit != "kg CO2e":
            raise SchemaError(f"CSV line {i}: climate categories must use 'kg CO2e' under the ghg preset")
        existing = table.categories.get(category)
        if existing is not None and existing != info:
            raise SchemaError(f"CSV line {i}: conflicting declaration for category '{category}'")
        table.categories[category] = info
        factor = float(_as_decimal(row["factor"], f"CSV line {i} factor"))
        bucket = factors_by_key.setdefault((flow, unit), {})
        if category in bucket:
            raise SchemaError(f"CSV line {i}: duplicate factor for ({flow}, {unit}, {category})")
        bucket[category] = factor

    for (flow, unit), factors in sorted(factors_by_key.items()):
        table.entries[(flow, unit)] = TableEntry(flow, unit, None, factors)
    return table


def empty_bundle(scope_set: ScopeSet | None = None) -> AnnotationBundle:
    """A bundle with no annotations; every downstream analysis is all-zeros."""
    return AnnotationBundle(
        assignments=[],
        table=CharacterizationTable(),
        scope_set=scope_set or SCOPE_PRESETS["ghg"],
        rules=[],
        registry=UnitRegistry(),
    )


def bind_annotations(log: EventLog, bundle: AnnotationBundle) -> AnnotatedLog:
    """Resolve every assignment against the log and expand type-level
    per-instance assignments to their instances.

    Raises :class:`UnknownComponentError` for dangling references.
    Expansion conserves totals exactly: each instance receives the
    per-instance decimal amount unchanged.
    """
    resolved: list[tuple[ComponentRef, FlowAssignment]] = []
    overrides: set[tuple[str, str, Direction]] = set()
    for a in bundle.assignments:
        if a.override and a.component.id is not None:
            overrides.add((a.component.id, a.flow, a.direction))

    for a in bundle.assignments:
        resolve_component(a.component, log)  # raises UnknownComponentError
        if a.basis is Basis.ABSOLUTE:
            resolved.append((a.component, a))
            continue
        # per-instance expansion
        if a.component.kind is ComponentKind.ACTIVITY_TYPE:
            instances = [
                ComponentRef(ComponentKind.ACTIVITY_INSTANCE, e.event_id)
                for e in log.events
                if e.activity == a.component.id
            ]
        else:
            instances = [
                ComponentRef(ComponentKind.OBJECT_INSTANCE, o.object_id)
                for o in log.objects
                if o.object_type == a.component.id
            ]
        for ref in instances:
            if (ref.id, a.flow, a.direction) in overrides:
                continue
            resolved.append((ref, a))

    for rule in bundle.rules:
        resolve_component(rule.source, log)
        if isinstance(rule.targets, tuple):
            for target in rule.targets:
                resolve_component(target, log)

    return AnnotatedLog(log, resolved, bundle.table, bundle.scope_set, bundle.rules, bundle.registry)
