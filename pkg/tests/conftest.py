from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from ocelbridge.iotschema import NormalizedReading
from ocelbridge.ocel import (
    E2ORelation,
    O2ORelation,
    OcelEvent,
    OcelLog,
    OcelObject,
    ObjectAttributeEntry,
    write_ocel,
)
from ocelbridge.scenario import ScenarioParams, generate

BASE = datetime(2024, 5, 1, 8, 0, 0, tzinfo=timezone.utc)

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def at(seconds):
    return BASE + timedelta(seconds=seconds)


def make_log():
    """Small two-order, one-item log used across the unit tests."""
    events = [
        OcelEvent("e1", "Create Order", at(0), {"clerk": "ann", "priority": 2}),
        OcelEvent("e2", "Pack Item", at(60), {"station": "S1"}),
        OcelEvent("e3", "Ship Order", at(180), {"carrier": "acme", "express": True}),
        OcelEvent("e4", "Create Order", at(240), {"clerk": "bob", "priority": 1}),
    ]
    objects = [
        OcelObject("o1", "Order", (
            ObjectAttributeEntry("status", "open", at(0)),
            ObjectAttributeEntry("status", "shipped", at(180), "status"),
        )),
        OcelObject("o2", "Order", (ObjectAttributeEntry("status", "open", at(240)),)),
        OcelObject("i1", "Item", (ObjectAttributeEntry("weight_kg", 1.5, at(60)),)),
    ]
    e2o = [
        E2ORelation("e1", "o1", "order"),
        E2ORelation("e2", "o1", "order"),
        E2ORelation("e2", "i1", "item"),
        E2ORelation("e3", "o1", "order"),
        E2ORelation("e4", "o2", "order"),
    ]
    o2o = [O2ORelation("i1", "o1", "part-of")]
    return OcelLog.build(events=events, objects=objects, e2o=e2o, o2o=o2o)


def make_reading(i=0, *, device="dev-1", prop="weight", value=1.0, text=None,
                 seconds=0, event_ref=None, object_ref=None, dtype="scale",
                 unit="kg"):
    return NormalizedReading(
        device_id=device,
        property=prop,
        result_time=at(seconds),
        value_numeric=None if text is not None else float(value),
        value_text=text,
        device_type=dtype,
        unit=unit,
        event_ref=event_ref,
        object_ref=object_ref,
        source_row=i,
    )


@pytest.fixture
def tiny_log():
    return make_log()


@pytest.fixture
def tiny_store(tmp_path, tiny_log):
    path = tmp_path / "store.sqlite"
    write_ocel(tiny_log, path)
    return path


@pytest.fixture(scope="session")
def scenario_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("scenario")
    generate(ScenarioParams(seed=42), out)
    return out


def random_small_log(rng: random.Random, *, max_events=20, max_objects=8):
    """Random but well-formed log for round-trip style tests."""
    activities = [f"A{i}" for i in range(rng.randint(1, 4))]
    types = [f"T{i}" for i in range(rng.randint(1, 3))]
    objects = []
    for i in range(rng.randint(1, max_objects)):
        hist = []
        t0 = at(rng.randint(0, 3600))
        if rng.random() < 0.8:
            hist.append(ObjectAttributeEntry("label", f"v{i}", t0))
        if rng.random() < 0.4:
            hist.append(ObjectAttributeEntry("score", rng.random(), t0, "score"))
        objects.append(OcelObject(f"o{i}", rng.choice(types), tuple(hist)))
    events = []
    for i in range(rng.randint(1, max_events)):
        attrs = {}
        if rng.random() < 0.7:
            attrs["count"] = rng.randint(0, 9)
        if rng.random() < 0.3:
            attrs["flag"] = bool(rng.getrandbits(1))
        events.append(OcelEvent(f"e{i:03d}", rng.choice(activities),
                                at(rng.randint(0, 3600)), attrs))
    e2o = []
    seen = set()
    for ev in events:
        for obj in rng.sample(objects, k=min(len(objects), rng.randint(1, 2))):
            if (ev.id, obj.id) not in seen:
                seen.add((ev.id, obj.id))
                e2o.append(E2ORelation(ev.id, obj.id, rng.choice(["q", "r"])))
    o2o = []
    if len(objects) >= 2 and rng.random() < 0.6:
        a, b = rng.sample(objects, k=2)
        o2o.append(O2ORelation(a.id, b.id, "linked"))
    return OcelLog.build(events=events, objects=objects, e2o=e2o, o2o=o2o)
