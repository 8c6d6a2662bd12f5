"""Timestamp parsing and canonical rendering.

Canonical form everywhere: UTC, millisecond precision, rendered as
``YYYY-MM-DDTHH:MM:SS.mmmZ`` in text columns. Parsing accepts an explicit
format string, ISO-8601 variants, and integer/float epochs; epoch values at
or above 1e11 are interpreted as milliseconds, below as seconds.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

EPOCH_MS_THRESHOLD = 100_000_000_000  # 1e11

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_ONE_MS = timedelta(milliseconds=1)


def truncate_ms(dt: datetime) -> datetime:
    return dt.replace(microsecond=(dt.microsecond // 1000) * 1000)


def to_utc(dt: datetime) -> datetime:
    """Attach UTC to naive datetimes, convert aware ones."""
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def parse_timestamp(value, fmt: str | None = None) -> datetime:
    """Parse ``value`` into a UTC datetime at millisecond precision.

    Raises ValueError when the value cannot be interpreted.
    """
    if isinstance(value, datetime):
        return truncate_ms(to_utc(value))
    if isinstance(value, bool):
        raise ValueError(f"not a timestamp: {value!r}")
    if isinstance(value, (int, float)):
        return _from_epoch(float(value))

    text = str(value).strip()
    if not text:
        raise ValueError("empty timestamp")
    if fmt is not None:
        return truncate_ms(to_utc(datetime.strptime(text, fmt)))

    try:
        return truncate_ms(to_utc(_parse_iso(text)))
    except ValueError:
        pass
    try:
        return _from_epoch(float(text))
    except ValueError:
        raise ValueError(f"unparseable timestamp: {text!r}") from None


def _from_epoch(number: float) -> datetime:
    if abs(number) >= EPOCH_MS_THRESHOLD:
        # integer millisecond counts stay in integer arithmetic; a float
        # division here can land one millisecond off at large magnitudes
        if number.is_integer():
            try:
                return from_epoch_ms(int(number))
            except OverflowError as exc:
                raise ValueError(f"epoch out of range: {number!r}") from exc
        number = number / 1000.0
    try:
        dt = datetime.fromtimestamp(number, tz=timezone.utc)
    except (OverflowError, OSError, ValueError) as exc:
        raise ValueError(f"epoch out of range: {number!r}") from exc
    return truncate_ms(dt)


def _parse_iso(text: str) -> datetime:
    # fromisoformat in 3.10 rejects a trailing 'Z'
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text)


def format_timestamp(dt: datetime) -> str:
    """Canonical ISO-8601 UTC text with millisecond precision."""
    dt = truncate_ms(to_utc(dt))
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}Z"


def epoch_ms(dt: datetime) -> int:
    # timedelta division is exact; timestamp() would round through a float
    return (truncate_ms(to_utc(dt)) - _EPOCH) // _ONE_MS


def from_epoch_ms(ms: int) -> datetime:
    return _EPOCH + timedelta(milliseconds=ms)
