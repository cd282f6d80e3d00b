"""
Shared payload helpers for the socket and HTTP handlers.
"""
from typing import List, Optional

from evaluation.stream import StreamAuthenticator, segmenter_for_model
from forest.forest import RandomForestModel
from mouse.action import DEFAULT_SEQUENCE_LENGTH, SegmenterConfig
from mouse.event import DEFAULT_MAX_COORDINATE, EVENT_MOVE, MouseEvent, coordinate_error, parse_event_line


def parse_user_id(value) -> int:
    """Validate a claimed user id. Raises ValueError."""
    if isinstance(value, bool) or value is None:
        raise ValueError('user_id is required')
    try:
        user_id = int(value)
    except (TypeError, ValueError):
        raise ValueError(f'Invalid user_id: {value!r}') from None
    if user_id < 0:
        raise ValueError('user_id must be non-negative')
    return user_id


def parse_threshold(value, default: float) -> float:
    """Validate an optional decision threshold. Raises ValueError."""
    if value is None:
        return default
    try:
        threshold = float(value)
    except (TypeError, ValueError):
        raise ValueError(f'Invalid threshold: {value!r}') from None
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f'threshold must be in [0,1], got {threshold}')
    return threshold


def parse_events(data: dict, user_id: int, max_events: int,
                 max_coordinate: int = DEFAULT_MAX_COORDINATE) -> List[MouseEvent]:
    """
    Events of a payload, given either as 'events' rows
    [timestamp, x, y, event_type, user_id] or as raw log 'lines'.

    Raises:
        ValueError: On a malformed payload, an off-screen coordinate, too
            many events, or events of another user than the stream's
    """
    rows = data.get('events')
    lines = data.get('lines')
    if rows is None and lines is None:
        raise ValueError("Payload needs 'events' or 'lines'")
    if rows is not None and not isinstance(rows, list):
        raise ValueError("'events' must be a list")
    if lines is not None and not isinstance(lines, list):
        raise ValueError("'lines' must be a list")

    events = []
    for index, row in enumerate(rows or []):
        if not isinstance(row, (list, tuple)) or len(row) != 5:
            raise ValueError(f'Event {index} must have 5 fields')
        timestamp, x, y, event_type, uid = row
        if any(isinstance(v, bool) or not isinstance(v, int) for v in (x, y, event_type, uid)):
            raise ValueError(f'Event {index}: x, y, event_type and user_id must be integers')
        if isinstance(timestamp, bool) or not isinstance(timestamp, (int, float)):
            raise ValueError(f'Event {index}: timestamp must be a number')
        for value in (x, y):
            error = coordinate_error(value, max_coordinate)
            if error:
                raise ValueError(f'Event {index}: {error}')
        events.append(MouseEvent(float(timestamp), x, y, event_type, uid))
    for number, line in enumerate(lines or [], start=1):
        if not isinstance(line, str):
            raise ValueError(f'Line {number} must be a string')
        if line.strip():
            events.append(parse_event_line(line, number, max_coordinate))

    if len(events) > max_events:
        raise ValueError(f'Too many events in one message ({len(events)} > {max_events})')
    for event in events:
        if event.user_id != user_id:
            raise ValueError(f'Event of user {event.user_id} in stream of user {user_id}')
    return events


def build_authenticator(model: RandomForestModel, app_config, threshold: Optional[float] = None) -> StreamAuthenticator:
    """
    Authenticator for one model.

    Models that record their training windowing are scored with it; the
    service's SEQUENCE_LENGTH, STRIDE and EVENT_FILTER only apply to models
    that do not.
    """
    if model.window is not None:
        segmenter = segmenter_for_model(model)
    else:
        segmenter = SegmenterConfig(
            app_config.get('SEQUENCE_LENGTH', DEFAULT_SEQUENCE_LENGTH),
            app_config.get('STRIDE'),
            app_config.get('EVENT_FILTER', frozenset({EVENT_MOVE})),
        )
    if threshold is None:
        threshold = app_config.get('DEFAULT_THRESHOLD', 0.5)
    return StreamAuthenticator(model, segmenter, threshold)
