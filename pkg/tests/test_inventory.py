import json
from decimal import Decimal

import pytest

from susmine import (
    ComponentKind,
    ComponentRef,
    FunctionalUnit,
    Quantity,
    UnitMismatchError,
    UnknownComponentError,
    ZeroOutputError,
    bind_annotations,
    parse_annotations,
    parse_ocel,
)
from susmine.inventory import (
    InvKey,
    Inventory,
    component_inventory,
    direct_inventory,
    inventory_to_csv,
    rollup_inventory,
    scale_to_functional_unit,
)
from susmine.model import PROCESS_REF, Direction, UNSCOPED
from susmine.generator import generate_bundle

from conftest import make_log
from test_annotations import bundle_doc, shipping_log


def bound(log, assignments, **doc_overrides):
    doc = bundle_doc(assignments=assignments, **doc_overrides)
    return bind_annotations(log, parse_annotations(json.dumps(doc)))


def instance_assignment(eid, amount, flow="CO2", unit="kg", scope=None, direction="output"):
    a = {"component": {"kind": "activity_instance", "id": eid},
         "flow": flow, "direction": direction, "amount": str(amount), "unit": unit}
    if scope:
        a["scope"] = scope
    return a


def test_single_output_slice():
    log = shipping_log()
    al = bound(log, [instance_assignment("s0", 5)])
    inv = component_inventory(al, ComponentRef(ComponentKind.ACTIVITY_INSTANCE, "s0"))
    ((key, q),) = inv.sorted_entries()
    assert key.flow == "CO2"
    assert key.direction is Direction.OUTPUT
    assert key.scope == UNSCOPED
    assert q == Quantity(Decimal(5), "kg")


def test_component_without_assignments_is_empty():
    log = shipping_log()
    al = bound(log, [instance_assignment("s0", 5)])
    inv = component_inventory(al, ComponentRef(ComponentKind.ACTIVITY_INSTANCE, "s1"))
    assert len(inv) == 0


def test_two_outputs_merge_exactly():
    log = shipping_log()
    al = bound(log, [instance_assignment("s0", 2), instance_assignment("s0", 3)])
    inv = component_inventory(al, ComponentRef(ComponentKind.ACTIVITY_INSTANCE, "s0"))
    ((_, q),) = inv.sorted_entries()
    assert q.amount == Decimal(5)


def test_unknown_component_slice():
    log = shipping_log()
    al = bound(log, [])
    with pytest.raises(UnknownComponentError):
        component_inventory(al, ComponentRef(ComponentKind.ACTIVITY_INSTANCE, "ghost"))


def test_mixed_units_same_key_rejected():
    log = shipping_log()
    al = bound(log, [
        instance_assignment("s0", 2, flow="residue", unit="kg"),
        instance_assignment("s0", 3, flow="residue", unit="g"),
    ])
    with pytest.raises(UnitMismatchError):
        component_inventory(al, ComponentRef(ComponentKind.ACTIVITY_INSTANCE, "s0"))


def test_rollup_to_activity_type():
    log = shipping_log(n_ship=3)
    al = bound(log, [{
        "component": {"kind": "activity_type", "id": "ship"},
        "flow": "CO2", "direction": "output", "amount": "5", "unit": "kg",
        "basis": "per_instance",
    }])
    inv = rollup_inventory(al, ComponentKind.ACTIVITY_TYPE)
    key = InvKey(ComponentRef(ComponentKind.ACTIVITY_TYPE, "ship"), "CO2", Direction.OUTPUT, UNSCOPED)
    assert inv.entries[key].amount == Decimal(15)


def test_rollup_empty_log():
    log = make_log()
    al = bound(log, [])
    assert len(rollup_inventory(al, ComponentKind.PROCESS)) == 0


def test_process_rollup_equals_flat_sum_oracle():
    bundle = generate_bundle(17, 200)
    log = parse_ocel(bundle.log_json)
    al = bind_annotations(log, parse_annotations(bundle.annotations_json))
    inv = rollup_inventory(al, ComponentKind.PROCESS)
    flat = {}
    for _, a in al.resolved:
        key = (a.flow, a.direction, a.scope or UNSCOPED)
        flat[key] = flat.get(key, Decimal(0)) + a.quantity.amount
    got = {(k.flow, k.direction, k.scope): q.amount for k, q in inv.entries.items()}
    assert got == flat


def test_rollup_does_not_cross_kinds():
    log = shipping_log()
    al = bound(log, [
        {"component": {"kind": "object_instance", "id": "o1"},
         "flow": "CO2", "direction": "output", "amount": "9", "unit": "kg"},
    ])
    assert len(rollup_inventory(al, ComponentKind.ACTIVITY_TYPE)) == 0
    obj_inv = rollup_inventory(al, ComponentKind.OBJECT_TYPE)
    key = InvKey(ComponentRef(ComponentKind.OBJECT_TYPE, "order"), "CO2", Direction.OUTPUT, UNSCOPED)
    assert obj_inv.entries[key].amount == Decimal(9)


def order_log(n_orders):
    events = [("e1", "deliver", "2024-01-01T08:00:00Z", [], {})]
    objects = [(f"o{i}", "order", {}) for i in range(n_orders)]
    return make_log(events=events, objects=objects)


def fu(amount, object_type="order"):
    return FunctionalUnit(object_type, Quantity(Decimal(str(amount)), "count"))


def test_scale_to_functional_unit():
    log = order_log(3)
    al = bound(log, [instance_assignment("e1", 15)])
    scaled = scale_to_functional_unit(direct_inventory(al), fu(1), al)
    ((_, q),) = scaled.sorted_entries()
    assert q.amount == Decimal(5)


def test_scale_identity_when_reference_equals_output():
    log = order_log(3)
    al = bound(log, [instance_assignment("e1", 15)])
    scaled = scale_to_functional_unit(direct_inventory(al), fu(3), al)
    ((_, q),) = scaled.sorted_entries()
    assert q.amount == Decimal(15)


def test_scale_zero_output():
    log = make_log(
        events=[("e1", "deliver", "2024-01-01T08:00:00Z", [], {})],
        objects=[],
        object_types=["order"],
    )
    al = bound(log, [instance_assignment("e1", 15)])
    with pytest.raises(ZeroOutputError):
        scale_to_functional_unit(direct_inventory(al), fu(1), al)


def test_scale_by_measured_attribute():
    log = make_log(
        events=[("e1", "deliver", "2024-01-01T08:00:00Z", [], {})],
        objects=[("o1", "order", {"mass_kg": 2.0}), ("o2", "order", {"mass_kg": 3.0})],
    )
    al = bound(log, [instance_assignment("e1", 15)])
    unit = FunctionalUnit("order", Quantity(Decimal(1), "kg"), "mass_kg")
    scaled = scale_to_functional_unit(direct_inventory(al), unit, al)
    ((_, q),) = scaled.sorted_entries()
    assert q.amount == Decimal(3)


def test_scaling_linearity():
    log = order_log(7)
    al = bound(log, [instance_assignment("e1", "13.37")])
    base = scale_to_functional_unit(direct_inventory(al), fu(1), al)
    for k in (Decimal("0.5"), Decimal(2), Decimal(10)):
        scaled = scale_to_functional_unit(direct_inventory(al), fu(k), al)
        for (key, q), (_, qb) in zip(scaled.sorted_entries(), base.sorted_entries()):
            expect = qb.amount * k
            assert abs(q.amount - expect) <= Decimal("1e-12") * max(abs(expect), Decimal(1))


def test_additivity_over_disjoint_logs():
    b1 = generate_bundle(101, 40)
    b2 = generate_bundle(202, 40)
    log1 = parse_ocel(b1.log_json)
    al1 = bind_annotations(log1, parse_annotations(b1.annotations_json))

    # relabel every id (instances and type names) so the union is disjoint
    log2_doc = json.loads(b2.log_json)
    for e in log2_doc["events"]:
        e["id"] = "x" + e["id"]
        e["type"] = "x" + e["type"]
        for rel in e["relationships"]:
            rel["objectId"] = "x" + rel["objectId"]
    for o in log2_doc["objects"]:
        o["id"] = "x" + o["id"]
        o["type"] = "x" + o["type"]
    for t in log2_doc["eventTypes"]:
        t["name"] = "x" + t["name"]
    for t in log2_doc["objectTypes"]:
        t["name"] = "x" + t["name"]
    ann2_doc = json.loads(b2.annotations_json)
    for a in ann2_doc["assignments"]:
        if a["component"]["kind"] != "process":
            a["component"]["id"] = "x" + a["component"]["id"]
    for r in ann2_doc["allocations"]:
        r["source"]["id"] = "x" + r["source"]["id"]
    log2 = parse_ocel(json.dumps(log2_doc))
    al2 = bind_annotations(log2, parse_annotations(json.dumps(ann2_doc)))

    union_doc = json.loads(b1.log_json)
    union_doc["events"] += log2_doc["events"]
    union_doc["objects"] += log2_doc["objects"]
    union_doc["eventTypes"] = [{"name": n} for n in sorted(
        {t["name"] for t in union_doc["eventTypes"]} | {t["name"] for t in log2_doc["eventTypes"]}
    )]
    union_doc["objectTypes"] = [{"name": n} for n in sorted(
        {t["name"] for t in union_doc["objectTypes"]} | {t["name"] for t in log2_doc["objectTypes"]}
    )]
    ann_union = json.loads(b1.annotations_json)
    ann_union["assignments"] += ann2_doc["assignments"]
    ann_union["allocations"] += ann2_doc["allocations"]
    log_union = parse_ocel(json.dumps(union_doc))
    al_union = bind_annotations(log_union, parse_annotations(json.dumps(ann_union)))

    merged = Inventory()
    merged.merge(direct_inventory(al1))
    merged.merge(direct_inventory(al2))
    got = direct_inventory(al_union)
    assert {k: q.amount for k, q in got.entries.items()} == {
        k: q.amount for k, q in merged.entries.items()
    }


def test_negative_amounts_flagged_not_dropped():
    log = shipping_log()
    al = bound(log, [instance_assignment("s0", "-2.5")])
    inv = direct_inventory(al)
    assert [q.amount for _, q in inv.negative_entries()] == [Decimal("-2.5")]


def test_csv_projection_shape():
    log = shipping_log()
    al = bound(log, [instance_assignment("s0", 5, scope="scope1")])
    text = inventory_to_csv(direct_inventory(al))
    lines = text.strip().split("\n")
    assert lines[0] == "component_kind,component_id,flow,direction,scope,amount,unit"
    assert lines[1] == "activity_instance,s0,CO2,output,scope1,5,kg"


def test_process_ref_row_has_empty_id():
    log = shipping_log()
    al = bound(log, [{
        "component": {"kind": "process"},
        "flow": "CO2", "direction": "output", "amount": "1", "unit": "kg",
    }])
    text = inventory_to_csv(rollup_inventory(al, ComponentKind.PROCESS))
    assert "process,,CO2,output,unscoped,1,kg" in text
    assert PROCESS_REF.id is None
