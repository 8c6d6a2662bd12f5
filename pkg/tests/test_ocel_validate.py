from __future__ import annotations

from ocelbridge.ocel import (
    E2ORelation,
    O2ORelation,
    OcelEvent,
    OcelLog,
    OcelObject,
    ObjectAttributeEntry,
    validate_ocel,
)

from .conftest import at, make_log


def kinds(log):
    return sorted({v.kind for v in validate_ocel(log)})


def test_clean_log_has_no_violations(tiny_log):
    assert validate_ocel(tiny_log) == []


def test_duplicate_event_id():
    events = [OcelEvent("e1", "A", at(0), {}), OcelEvent("e1", "A", at(1), {})]
    assert "duplicate-event-id" in kinds(OcelLog.build(events=events))


def test_duplicate_object_id():
    objects = [OcelObject("o", "T", ()), OcelObject("o", "T", ())]
    assert "duplicate-object-id" in kinds(OcelLog.build(objects=objects))


def test_naive_timestamp_flagged():
    ev = OcelEvent("e1", "A", at(0).replace(tzinfo=None), {})
    assert "naive-timestamp" in kinds(OcelLog.build(events=[ev]))


def test_undeclared_event_attribute():
    # bypass build(), which would derive the column from the data
    ev = OcelEvent("e1", "A", at(0), {"x": 1})
    log = OcelLog(events=(ev,), event_attr_types={"A": {}})
    assert "undeclared-attribute" in kinds(log)


def test_event_attribute_type_mismatch():
    ev = OcelEvent("e1", "A", at(0), {"x": "text"})
    log = OcelLog.build(events=[ev], event_attr_types={"A": {"x": "float"}})
    assert "type-mismatch" in kinds(log)


def test_object_history_must_be_time_ordered():
    obj = OcelObject("o", "T", (
        ObjectAttributeEntry("x", 1.0, at(100), "x"),
        ObjectAttributeEntry("x", 2.0, at(50), "x"),
    ))
    assert "unordered-history" in kinds(OcelLog.build(objects=[obj]))


def test_change_entry_without_time():
    obj = OcelObject("o", "T", (ObjectAttributeEntry("x", 1.0, None, "x"),))
    assert "missing-change-time" in kinds(OcelLog.build(objects=[obj]))


def test_dangling_e2o_both_sides():
    log = OcelLog.build(
        events=[OcelEvent("e1", "A", at(0), {})],
        objects=[OcelObject("o1", "T", ())],
        e2o=[E2ORelation("e1", "ghost", "q"), E2ORelation("ghost", "o1", "q")],
    )
    assert kinds(log).count("dangling-relation") == 1
    assert len([v for v in validate_ocel(log) if v.kind == "dangling-relation"]) == 2


def test_dangling_o2o():
    log = OcelLog.build(
        objects=[OcelObject("o1", "T", ())],
        o2o=[O2ORelation("o1", "ghost", "q")],
    )
    assert "dangling-relation" in kinds(log)


def test_duplicate_relation_triples():
    log = OcelLog.build(
        events=[OcelEvent("e1", "A", at(0), {})],
        objects=[OcelObject("o1", "T", ())],
        e2o=[E2ORelation("e1", "o1", "q"), E2ORelation("e1", "o1", "q")],
    )
    assert "duplicate-relation" in kinds(log)


def test_violations_carry_subject_and_message():
    events = [OcelEvent("e1", "A", at(0), {}), OcelEvent("e1", "A", at(1), {})]
    v = validate_ocel(OcelLog.build(events=events))[0]
    assert v.subject == "e1"
    assert "e1" in v.message


def test_scenario_store_is_valid(scenario_dir):
    from ocelbridge.ocel import load_ocel

    log = load_ocel(scenario_dir / "scenario.sqlite")
    assert validate_ocel(log) == []


def test_enriched_tiny_log_stays_valid(tmp_path):
    from ocelbridge.ocel import AdditionSet, apply_additions, load_ocel, write_ocel

    path = write_ocel(make_log(), tmp_path / "s.sqlite")
    apply_additions(path, AdditionSet(
        new_event_attribute_columns=[("Pack Item", "temp", "float")],
        event_attribute_writes=[("e2", "temp", 3.5)],
    ))
    assert validate_ocel(load_ocel(path)) == []
