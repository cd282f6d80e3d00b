"""
Mouse events and session logs.

A session log is a UTF-8 text file with one event per line and five fields
separated by spaces or tabs: Timestamp, X, Y, EventType, UserID.
An optional header line (field names) may precede the events.
"""
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, TextIO

logger = logging.getLogger(__name__)

EVENT_MOVE = -1
DEFAULT_MAX_COORDINATE = 8192
FIELD_COUNT = 5
HEADER_FIELDS = ('Timestamp', 'X', 'Y', 'Event Type', 'User ID')

_SEPARATOR = re.compile(r'[ \t]+')
_INTEGER = re.compile(r'[-+]?[0-9]+')
_DECIMAL = re.compile(r'[-+]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][-+]?[0-9]+)?')


class LogParseError(ValueError):
    """A log line could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None, field_index: Optional[int] = None):
        self.line_number = line_number
        self.field_index = field_index
        location = []
        if line_number is not None:
            location.append(f"line {line_number}")
        if field_index is not None:
            location.append(f"field {field_index}")
        prefix = f"{', '.join(location)}: " if location else ''
        super().__init__(f"{prefix}{message}")


class SessionLogError(ValueError):
    """A session log violates the one-user-per-file rule."""


@dataclass(frozen=True)
class MouseEvent:
    """One timestamped cursor sample."""
    timestamp: float
    x: int
    y: int
    event_type: int
    user_id: int

    def __post_init__(self):
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValueError(f"Invalid timestamp: {self.timestamp}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"Negative coordinate: ({self.x}, {self.y})")
        if self.user_id < 0:
            raise ValueError(f"Invalid user id: {self.user_id}")

    @property
    def key(self) -> tuple:
        """The (x, y, event_type) triple used to detect duplicates."""
        return (self.x, self.y, self.event_type)

    def to_dict(self) -> dict:
        return {
            'timestamp': self.timestamp,
            'x': self.x,
            'y': self.y,
            'event_type': self.event_type,
            'user_id': self.user_id,
        }


@dataclass(frozen=True)
class SessionLog:
    """All events of one user session, sorted by timestamp."""
    user_id: Optional[int]
    events: tuple = ()
    out_of_order: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'events', tuple(self.events))
        for event in self.events:
            if event.user_id != self.user_id:
                raise SessionLogError(
                    f"Event for user {event.user_id} in session of user {self.user_id}"
                )
        for prev, cur in zip(self.events, self.events[1:]):
            if cur.timestamp < prev.timestamp:
                raise SessionLogError("Session events must be sorted by timestamp")

    def __len__(self):
        return len(self.events)

    def __repr__(self):
        return f"SessionLog(user={self.user_id}, {len(self.events)} events)"


def _is_number(text: str) -> bool:
    return _DECIMAL.fullmatch(text) is not None


def _parse_int(text: str, line_number: Optional[int], field_index: int) -> int:
    if _INTEGER.fullmatch(text) is None:
        raise LogParseError(f"expected an integer, got {text!r}", line_number, field_index)
    return int(text, 10)


def coordinate_error(value: int, max_coordinate: int) -> Optional[str]:
    """Why a coordinate is off screen, or None when it is in bounds."""
    if value < 0:
        return f"negative coordinate {value}"
    if value > max_coordinate:
        return f"coordinate {value} exceeds screen bound {max_coordinate}"
    return None


def parse_event_line(line: str, line_number: Optional[int] = None,
                     max_coordinate: int = DEFAULT_MAX_COORDINATE) -> MouseEvent:
    """
    Parse one log line.

    Args:
        line: Text with exactly five whitespace-separated fields
        line_number: 1-based line number reported in errors
        max_coordinate: Largest accepted x or y value

    Returns:
        The parsed MouseEvent

    Raises:
        LogParseError: On a wrong field count, a non-numeric field or an
            out-of-range value
    """
    fields = [f for f in _SEPARATOR.split(line.strip()) if f]
    if len(fields) != FIELD_COUNT:
        raise LogParseError(f"expected {FIELD_COUNT} fields, got {len(fields)}", line_number)

    if not _is_number(fields[0]):
        raise LogParseError(f"expected a timestamp, got {fields[0]!r}", line_number, 1)
    timestamp = float(fields[0])
    if not math.isfinite(timestamp) or timestamp < 0:
        raise LogParseError(f"timestamp must be finite and non-negative, got {fields[0]!r}", line_number, 1)

    x = _parse_int(fields[1], line_number, 2)
    y = _parse_int(fields[2], line_number, 3)
    for index, value in ((2, x), (3, y)):
        error = coordinate_error(value, max_coordinate)
        if error:
            raise LogParseError(error, line_number, index)

    event_type = _parse_int(fields[3], line_number, 4)
    user_id = _parse_int(fields[4], line_number, 5)
    if user_id < 0:
        raise LogParseError(f"negative user id {user_id}", line_number, 5)

    return MouseEvent(timestamp, x, y, event_type, user_id)


def parse_session_log(lines: Iterable[str], max_coordinate: int = DEFAULT_MAX_COORDINATE) -> SessionLog:
    """
    Parse a whole session.

    The first non-blank line is treated as a header when its first field is
    not numeric. Out-of-order events are stably sorted and counted in
    ``SessionLog.out_of_order``.

    Raises:
        LogParseError: On any malformed line
        SessionLogError: When the file mixes user ids
    """
    events: List[MouseEvent] = []
    seen_content = False
    for line_number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if not seen_content:
            seen_content = True
            first = _SEPARATOR.split(stripped)[0]
            if not _is_number(first):
                continue
        events.append(parse_event_line(stripped, line_number, max_coordinate))

    if not events:
        return SessionLog(user_id=None)

    user_id = events[0].user_id
    for event in events:
        if event.user_id != user_id:
            raise SessionLogError(f"mixed user ids in one session: {user_id} and {event.user_id}")

    out_of_order = 0
    latest = -math.inf
    for event in events:
        if event.timestamp < latest:
            out_of_order += 1
        else:
            latest = event.timestamp
    if out_of_order:
        logger.warning(f"Session of user {user_id}: {out_of_order} out-of-order events sorted")
        events = sorted(events, key=lambda e: e.timestamp)

    return SessionLog(user_id=user_id, events=events, out_of_order=out_of_order)


def read_session_file(path, max_coordinate: int = DEFAULT_MAX_COORDINATE) -> SessionLog:
    """Parse a session log file from disk."""
    with open(path, 'r', encoding='utf-8') as fh:
        return parse_session_log(fh, max_coordinate)


def dedupe_events(events: Iterable[MouseEvent]) -> List[MouseEvent]:
    """Drop every event repeating the (x, y, event_type) of the last kept event."""
    kept: List[MouseEvent] = []
    for event in events:
        if kept and kept[-1].key == event.key:
            continue
        kept.append(event)
    return kept


def format_event_line(event: MouseEvent) -> str:
    return f"{event.timestamp!r}\t{event.x}\t{event.y}\t{event.event_type}\t{event.user_id}"


def write_session_log(log: SessionLog, stream: TextIO, header: bool = True):
    """Write a session in the five-field format (tab separated)."""
    if header:
        stream.write('\t'.join(HEADER_FIELDS) + '\n')
    for event in log.events:
        stream.write(format_event_line(event) + '\n')
