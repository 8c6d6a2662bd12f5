from __future__ import annotations

from dataclasses import replace

from ocelbridge.iotschema import device_summary

from .conftest import at, make_reading


def test_summary_groups_by_device():
    readings = [
        make_reading(0, device="b", prop="t", value=1.0, seconds=10),
        make_reading(1, device="a", prop="t", value=2.0, seconds=0),
        make_reading(2, device="a", prop="t", value=3.0, seconds=20),
    ]
    s = device_summary(readings)
    assert [d.device_id for d in s.devices] == ["a", "b"]
    assert s.reading_count == 3
    a = s.devices[0]
    assert a.reading_count == 2
    assert a.first_time == at(0)
    assert a.last_time == at(20)


def test_property_rollup_min_max_kind():
    readings = [
        make_reading(0, prop="w", value=5.0),
        make_reading(1, prop="w", value=-2.0),
        make_reading(2, prop="s", text="open"),
        make_reading(3, prop="m", value=1.0),
        make_reading(4, prop="m", text="n/a"),
    ]
    dev = device_summary(readings).devices[0]
    by_name = {p.name: p for p in dev.properties}
    assert by_name["w"].value_kind == "numeric"
    assert by_name["w"].numeric_min == -2.0
    assert by_name["w"].numeric_max == 5.0
    assert by_name["s"].value_kind == "text"
    assert by_name["s"].numeric_min is None
    assert by_name["m"].value_kind == "mixed"
    assert by_name["m"].reading_count == 2


def test_conflicts_detected():
    readings = [
        make_reading(0, device="d", dtype="scale"),
        make_reading(1, device="d", dtype="gps"),
        replace(make_reading(2, device="d"), device_kind="gadget"),
        make_reading(3, device="d", prop="w", unit="kg"),
        make_reading(4, device="d", prop="w", unit="lb"),
    ]
    s = device_summary(readings)
    text = "\n".join(s.conflicts)
    assert "reported types" in text
    assert "unknown kind 'gadget'" in text
    assert "mixes units" in text


def test_clean_summary_has_no_conflicts():
    readings = [make_reading(i, value=float(i)) for i in range(3)]
    s = device_summary(readings, notes=("location derived from platform",))
    assert s.conflicts == ()
    assert s.notes == ("location derived from platform",)


def test_empty_input():
    s = device_summary([])
    assert s.devices == ()
    assert s.reading_count == 0
