"""Interaction-log parsing, time binning and per-individual sequences.

The log is a CSV with header ``time,ego,alter,location``; ``time`` is a
non-negative integer in seconds and ``location`` may be empty.  Each row is
one observed interaction from the ego's point of view.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple, TextIO

from .core import CategoricalSequence, encode_labels

__all__ = [
    "BinnedEventStream",
    "Entry",
    "EventLog",
    "InteractionEvent",
    "LogFormatError",
    "bin_events",
    "format_event_log",
    "gap_sequence",
    "location_sequence",
    "parse_event_log",
    "partner_gap_sequences",
    "partner_location_sequences",
    "partner_sequence",
]

HEADER = ("time", "ego", "alter", "location")
DEFAULT_BIN_WIDTH = 300
DEFAULT_GAP_CAP = 288


class LogFormatError(ValueError):
    """Malformed event log; ``line`` is the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InteractionEvent(NamedTuple):
    time: int
    ego: str
    alter: str
    location: str | None = None

    def validate(self):
        if self.time < 0:
            raise ValueError(f"negative time {self.time}")
        if self.ego == self.alter:
            raise ValueError(f"ego and alter are both {self.ego!r}")


def _sort_key(e: InteractionEvent):
    return (e.time, e.ego, e.alter, e.location or "")


@dataclass(frozen=True)
class EventLog:
    """Events sorted by ``(time, ego, alter)``, with the binning width."""

    events: tuple
    bin_width: int = DEFAULT_BIN_WIDTH

    def __post_init__(self):
        if self.bin_width <= 0:
            raise ValueError("bin_width must be a positive number of seconds")
        events = tuple(sorted((InteractionEvent(*e) for e in self.events), key=_sort_key))
        for e in events:
            e.validate()
        object.__setattr__(self, "events", events)

    def __len__(self):
        return len(self.events)

    @property
    def egos(self) -> list[str]:
        return sorted({e.ego for e in self.events})


def _open_text(source) -> TextIO:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_event_log(source: str | TextIO, bin_width: int = DEFAULT_BIN_WIDTH) -> EventLog:
    """Parse CSV text (a string or an open text stream) into an :class:`EventLog`.

    Rows need not be sorted.  The first problem found in a row is reported as
    a :class:`LogFormatError` carrying its line number.
    """
    reader = csv.reader(_open_text(source))
    try:
        header = next(reader)
    except StopIteration:
        raise LogFormatError("missing header", 1) from None
    header = [h.strip() for h in header]
    if header[:3] != list(HEADER[:3]) or header[3:] not in ([], ["location"]):
        raise LogFormatError(f"expected header {','.join(HEADER)}, got {','.join(header)}", 1)
    width = len(header)

    events = []
    for row in reader:
        line = reader.line_num
        if not row or all(not field.strip() for field in row):
            continue
        if len(row) != width:
            raise LogFormatError(f"expected {width} fields, got {len(row)}", line)
        raw_time, ego, alter = (f.strip() for f in row[:3])
        location = row[3].strip() if width == 4 else ""
        try:
            time = int(raw_time)
        except ValueError:
            raise LogFormatError(f"time {raw_time!r} is not an integer", line) from None
        if time < 0:
            raise LogFormatError(f"time {time} is negative", line)
        if not ego or not alter:
            raise LogFormatError("ego and alter must be non-empty", line)
        if ego == alter:
            raise LogFormatError(f"ego and alter are both {ego!r}", line)
        events.append(InteractionEvent(time, ego, alter, location or None))
    return EventLog(tuple(events), bin_width)


def format_event_log(log: EventLog | Iterable[InteractionEvent]) -> str:
    """Serialize events back to the CSV format read by :func:`parse_event_log`."""
    events = log.events if isinstance(log, EventLog) else log
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for e in events:
        writer.writerow((e.time, e.ego, e.alter, e.location or ""))
    return buf.getvalue()


class Entry(NamedTuple):
    bin: int
    alter: str
    location: str | None


@dataclass(frozen=True)
class BinnedEventStream:
    """Per-ego entries ordered by ``(bin, alter)``."""

    entries: dict
    bin_width: int = DEFAULT_BIN_WIDTH

    @property
    def egos(self) -> list[str]:
        return sorted(self.entries)

    def __getitem__(self, ego) -> tuple:
        try:
            return self.entries[ego]
        except KeyError:
            raise KeyError(f"ego {ego!r} not present in the event stream") from None

    def __contains__(self, ego):
        return ego in self.entries


def bin_events(log: EventLog) -> BinnedEventStream:
    """Group events into ``floor(time / bin_width)`` bins per ego.

    Repeated ``(ego, bin, alter)`` rows collapse to one entry, which keeps the
    first non-empty location seen in time order.  Distinct alters sharing a
    bin become separate entries ordered by alter label.
    """
    cells: dict = {}
    for e in log.events:
        key = (e.ego, e.time // log.bin_width, e.alter)
        if key not in cells or (cells[key] is None and e.location is not None):
            cells[key] = e.location
    per_ego: dict = {}
    for (ego, b, alter) in sorted(cells):
        per_ego.setdefault(ego, []).append(Entry(b, alter, cells[(ego, b, alter)]))
    return BinnedEventStream({ego: tuple(v) for ego, v in per_ego.items()}, log.bin_width)


def partner_sequence(stream: BinnedEventStream, ego) -> CategoricalSequence:
    """One symbol per entry: who ``ego`` interacted with, in stream order."""
    return encode_labels(entry.alter for entry in stream[ego])[1]


def location_sequence(stream: BinnedEventStream, ego) -> CategoricalSequence:
    """Locations of ``ego``'s interactions; entries without one are skipped."""
    located = [entry.location for entry in stream[ego] if entry.location is not None]
    if not located:
        raise ValueError(f"ego {ego!r} has no location data")
    return encode_labels(located)[1]


def _distinct_bins(entries) -> list[int]:
    bins = []
    for entry in entries:
        if not bins or bins[-1] != entry.bin:
            bins.append(entry.bin)
    return bins


def gap_sequence(stream: BinnedEventStream, ego, cap: int = DEFAULT_GAP_CAP) -> CategoricalSequence:
    """Bins elapsed between successive interaction bins, capped at ``cap``."""
    if cap < 1:
        raise ValueError("gap cap must be a positive number of bins")
    bins = _distinct_bins(stream[ego])
    if len(bins) < 2:
        raise ValueError(f"ego {ego!r} has fewer than two distinct interaction bins")
    return encode_labels(min(b - a, cap) for a, b in zip(bins, bins[1:]))[1]


def partner_location_sequences(stream: BinnedEventStream, ego) -> tuple[CategoricalSequence, CategoricalSequence]:
    """Equal-length (partner, location) sequences over entries that have a location."""
    located = [entry for entry in stream[ego] if entry.location is not None]
    if not located:
        raise ValueError(f"ego {ego!r} has no location data")
    partners = encode_labels(e.alter for e in located)[1]
    places = encode_labels(e.location for e in located)[1]
    return partners, places


def partner_gap_sequences(
    stream: BinnedEventStream, ego, cap: int = DEFAULT_GAP_CAP
) -> tuple[CategoricalSequence, CategoricalSequence]:
    """Equal-length (partner, gap) sequences, one symbol per entry.

    Each entry is tagged with the capped gap since the previous interaction
    bin; further entries in the same bin get gap 0.  Entries in the first bin
    have no gap and are dropped.
    """
    entries = stream[ego]
    partners, gaps = [], []
    prev_bin = None
    for entry in entries:
        if prev_bin is None:
            first_bin = entry.bin
            prev_bin = entry.bin
            continue
        if entry.bin == first_bin:
            continue
        if entry.bin == prev_bin:
            gap = 0
        else:
            gap = min(entry.bin - prev_bin, cap)
            prev_bin = entry.bin
        partners.append(entry.alter)
        gaps.append(gap)
    if not partners:
        raise ValueError(f"ego {ego!r} has fewer than two distinct interaction bins")
    return encode_labels(partners)[1], encode_labels(gaps)[1]
