import json

import pytest

from susmine import IntegrityError, SchemaError, log_summary, parse_ocel, serialize_ocel
from susmine.generator import generate_bundle

from conftest import make_log_doc


MINIMAL = {
    "objectTypes": [{"name": "order"}],
    "eventTypes": [{"name": "pack"}],
    "objects": [{"id": "o1", "type": "order", "attributes": []}],
    "events": [
        {
            "id": "e1",
            "type": "pack",
            "time": "2024-01-01T08:00:00Z",
            "attributes": [],
            "relationships": [{"objectId": "o1", "qualifier": "handles"}],
        }
    ],
}


def test_parse_minimal_counts():
    log = parse_ocel(json.dumps(MINIMAL))
    assert (len(log.events), len(log.objects), len(log.relations)) == (1, 1, 1)


def test_relation_to_undefined_object_is_integrity_error():
    doc = json.loads(json.dumps(MINIMAL))
    doc["events"][0]["relationships"][0]["objectId"] = "o9"
    with pytest.raises(IntegrityError) as err:
        parse_ocel(json.dumps(doc))
    assert "o9" in str(err.value)


def test_lenient_parse_keeps_dirty_log():
    doc = json.loads(json.dumps(MINIMAL))
    doc["events"][0]["relationships"][0]["objectId"] = "o9"
    log = parse_ocel(json.dumps(doc), strict=False)
    assert len(log.relations) == 1


def test_missing_top_level_key():
    doc = {k: v for k, v in MINIMAL.items() if k != "objects"}
    with pytest.raises(SchemaError):
        parse_ocel(json.dumps(doc))


def test_unknown_key_rejected():
    doc = json.loads(json.dumps(MINIMAL))
    doc["events"][0]["extras"] = 1
    with pytest.raises(SchemaError):
        parse_ocel(json.dumps(doc))


def test_object_to_object_relationships_rejected():
    doc = json.loads(json.dumps(MINIMAL))
    doc["objects"][0]["relationships"] = []
    with pytest.raises(SchemaError):
        parse_ocel(json.dumps(doc))


def test_bad_timestamp():
    doc = json.loads(json.dumps(MINIMAL))
    doc["events"][0]["time"] = "yesterday"
    with pytest.raises(SchemaError):
        parse_ocel(json.dumps(doc))


def test_malformed_json_raises_decode_error():
    with pytest.raises(json.JSONDecodeError):
        parse_ocel(b"{not json")


def test_round_trip_is_fixed_point():
    bundle = generate_bundle(3, 50)
    once = parse_ocel(bundle.log_json)
    twice = parse_ocel(serialize_ocel(once))
    assert once == twice
    assert serialize_ocel(once) == serialize_ocel(twice)


def test_generator_round_trip_matches_declared_counts():
    bundle = generate_bundle(11, 100)
    log = parse_ocel(bundle.log_json)
    summary = log_summary(log)
    counts = bundle.ground_truth["counts"]
    assert summary.event_count == counts["events"]
    assert summary.object_count == counts["objects"]
    assert summary.per_activity == counts["per_activity"]
    assert summary.per_object_type == counts["per_object_type"]


def test_sorted_view_respects_timestamps_and_breaks_ties_by_id():
    doc = make_log_doc(
        events=[
            ("b", "pack", "2024-01-01T09:00:00Z", [], {}),
            ("z", "pack", "2024-01-01T08:00:00Z", [], {}),
            ("a", "pack", "2024-01-01T09:00:00Z", [], {}),
        ],
    )
    log = parse_ocel(json.dumps(doc))
    assert [e.event_id for e in log.sorted_events()] == ["z", "a", "b"]
    # document order is preserved on the unsorted view
    assert [e.event_id for e in log.events] == ["b", "z", "a"]


def test_empty_log_summary():
    log = parse_ocel(json.dumps(make_log_doc()))
    summary = log_summary(log)
    assert summary.event_count == 0
    assert summary.object_count == 0
    assert summary.per_activity == {}
    assert summary.per_object_type == {}


def test_summary_example_counts():
    events = [
        (f"e{i}", activity, f"2024-01-01T08:0{i}:00Z", [], {})
        for i, activity in enumerate(["ship", "ship", "ship", "pack", "pack"])
    ]
    log = parse_ocel(json.dumps(make_log_doc(events=events)))
    assert log_summary(log).per_activity == {"pack": 2, "ship": 3}


def test_summary_matches_brute_force_recount():
    bundle = generate_bundle(29, 120)
    doc = json.loads(bundle.log_json)
    log = parse_ocel(bundle.log_json)
    summary = log_summary(log)
    recount_activity = {}
    for e in doc["events"]:
        recount_activity[e["type"]] = recount_activity.get(e["type"], 0) + 1
    recount_types = {}
    for o in doc["objects"]:
        recount_types[o["type"]] = recount_types.get(o["type"], 0) + 1
    assert summary.per_activity == recount_activity
    assert summary.per_object_type == recount_types


def test_summary_serialization_is_deterministic():
    bundle = generate_bundle(5, 30)
    log = parse_ocel(bundle.log_json)
    assert log_summary(log).to_json() == log_summary(log).to_json()
