import json
from decimal import Decimal

import pytest

from susmine import parse_annotations, parse_ocel
from susmine.fixtures import fixture_path


@pytest.fixture(scope="session")
def demo_log_path():
    return fixture_path("ocel/mineral_water.json")


@pytest.fixture(scope="session")
def demo_bundle_path():
    return fixture_path("annotations/mineral_water.json")


@pytest.fixture(scope="session")
def machine_bundle_path():
    return fixture_path("annotations/machine_allocation.json")


@pytest.fixture(scope="session")
def orders_log_path():
    return fixture_path("ocel/orders.json")


@pytest.fixture()
def demo_log(demo_log_path):
    return parse_ocel(demo_log_path.read_bytes())


@pytest.fixture()
def demo_bundle(demo_bundle_path):
    return parse_annotations(demo_bundle_path.read_bytes())


@pytest.fixture()
def machine_bundle(machine_bundle_path):
    return parse_annotations(machine_bundle_path.read_bytes())


def make_log_doc(events=(), objects=(), activity_types=None, object_types=None):
    """Build an OCEL subset document from terse tuples.

    events: (id, activity, time, relations, attributes) with relations a
    list of (object_id, qualifier); objects: (id, type, attributes).
    """
    events = list(events)
    objects = list(objects)
    if activity_types is None:
        activity_types = sorted({e[1] for e in events})
    if object_types is None:
        object_types = sorted({o[1] for o in objects})
    return {
        "objectTypes": [{"name": t} for t in object_types],
        "eventTypes": [{"name": t} for t in activity_types],
        "objects": [
            {
                "id": oid,
                "type": otype,
                "attributes": [{"name": k, "value": v} for k, v in sorted(attrs.items())],
            }
            for oid, otype, attrs in objects
        ],
        "events": [
            {
                "id": eid,
                "type": activity,
                "time": time,
                "attributes": [{"name": k, "value": v} for k, v in sorted((attrs or {}).items())],
                "relationships": [
                    {"objectId": oid, "qualifier": q} for oid, q in (relations or [])
                ],
            }
            for eid, activity, time, relations, attrs in events
        ],
    }


def make_log(events=(), objects=(), **kwargs):
    return parse_ocel(json.dumps(make_log_doc(events, objects, **kwargs)))


def rel_close(a, b, tol=1e-9):
    a, b = float(a), float(b)
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-30)


def dec(x) -> Decimal:
    return Decimal(str(x))
