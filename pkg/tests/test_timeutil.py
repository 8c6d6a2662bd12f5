from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ocelbridge.timeutil import (
    epoch_ms,
    format_timestamp,
    from_epoch_ms,
    parse_timestamp,
    to_utc,
    truncate_ms,
)

UTC = timezone.utc


def test_parse_iso_with_offset():
    t = parse_timestamp("2024-03-01T06:00:00+01:00")
    assert t == datetime(2024, 3, 1, 5, 0, tzinfo=UTC)


def test_parse_iso_z_suffix():
    assert parse_timestamp("2024-03-01T06:00:00Z") == datetime(2024, 3, 1, 6, 0, tzinfo=UTC)


def test_parse_naive_assumes_utc():
    assert parse_timestamp("2024-03-01 06:00:00").tzinfo == UTC


def test_parse_epoch_seconds_and_millis():
    assert parse_timestamp(1709272800) == datetime(2024, 3, 1, 6, 0, tzinfo=UTC)
    assert parse_timestamp(1709272800123) == datetime(2024, 3, 1, 6, 0, 0, 123000, tzinfo=UTC)


def test_parse_datetime_passthrough_truncates():
    src = datetime(2024, 3, 1, 6, 0, 0, 123456, tzinfo=UTC)
    assert parse_timestamp(src).microsecond == 123000


def test_parse_with_explicit_format():
    t = parse_timestamp("01/03/2024 06:30", fmt="%d/%m/%Y %H:%M")
    assert t == datetime(2024, 3, 1, 6, 30, tzinfo=UTC)


@pytest.mark.parametrize("bad", ["", "not-a-timestamp", None, object(), float("nan")])
def test_parse_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_timestamp(bad)


def test_format_is_iso_utc():
    t = datetime(2024, 3, 1, 6, 0, 0, 5000, tzinfo=UTC)
    assert format_timestamp(t) == "2024-03-01T06:00:00.005Z"


def test_truncate_and_to_utc():
    plus2 = timezone(timedelta(hours=2))
    t = datetime(2024, 3, 1, 8, 0, 0, 999999, tzinfo=plus2)
    out = truncate_ms(to_utc(t))
    assert out == datetime(2024, 3, 1, 6, 0, 0, 999000, tzinfo=UTC)


@given(st.integers(min_value=0, max_value=4102444800000))
def test_epoch_ms_round_trip(ms):
    assert epoch_ms(from_epoch_ms(ms)) == ms


@given(st.datetimes(min_value=datetime(1980, 1, 1), max_value=datetime(2100, 1, 1)))
def test_format_parse_round_trip(naive):
    t = truncate_ms(naive.replace(tzinfo=UTC))
    assert parse_timestamp(format_timestamp(t)) == t
