"""Small shared helpers: UTC hour keys and CSV plumbing."""

from __future__ import annotations

import csv
from datetime import datetime, timedelta, timezone
from pathlib import Path

HOUR = timedelta(hours=1)


def parse_hour(text: str) -> datetime:
    """Parse a UTC hour key such as ``2016-01-01T07:00:00Z``.

    Accepts ISO-8601 with or without seconds, a trailing ``Z`` or an
    explicit offset; naive timestamps are taken as UTC. Minutes and
    seconds must be zero (all series are hourly).
    """
    raw = text.strip()
    try:
        stamp = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ValueError(f"unparseable timestamp {text!r}") from exc
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    stamp = stamp.astimezone(timezone.utc)
    if stamp.minute or stamp.second or stamp.microsecond:
        raise ValueError(f"timestamp {text!r} is not on an hour boundary")
    return stamp


def format_hour(stamp: datetime) -> str:
    return stamp.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def hour_range(first: datetime, last: datetime) -> list[datetime]:
    """Inclusive contiguous hourly range."""
    if last < first:
        raise ValueError("hour range end precedes start")
    n = int((last - first) / HOUR) + 1
    return [first + i * HOUR for i in range(n)]


def read_rows(path: Path, required: list[str]):
    """Yield (row_number, dict) from a headered CSV.

    Row numbers are 1-based counting data rows only, matching the error
    reporting convention used by the loaders.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise ValueError(f"missing column(s) {', '.join(missing)}")
        for number, row in enumerate(reader, start=1):
            yield number, row


def write_csv(path: Path, header: list[str], rows) -> None:
    """Write rows with deterministic formatting.

    Floats are rendered with ``repr`` (shortest round-trip form) so that
    identical numeric results serialize to identical bytes regardless of
    worker count or platform scheduling.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            # float(v) first: numpy scalars pass isinstance(..., float) but
            # repr to 'np.float64(...)' under numpy 2
            writer.writerow([repr(float(v)) if isinstance(v, float) else v
                             for v in row])
