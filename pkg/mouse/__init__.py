# Mouse event model, action windows and kinematic features
from .event import (
    EVENT_MOVE,
    LogParseError,
    MouseEvent,
    SessionLog,
    SessionLogError,
    dedupe_events,
    parse_event_line,
    parse_session_log,
    read_session_file,
    write_session_log,
)
from .action import MouseAction, SegmenterConfig, segment_actions
from .features import FEATURE_DIMENSION, FEATURE_NAMES, FeatureVector, extract_all, extract_features

__all__ = [
    'EVENT_MOVE', 'LogParseError', 'MouseEvent', 'SessionLog', 'SessionLogError',
    'dedupe_events', 'parse_event_line', 'parse_session_log', 'read_session_file', 'write_session_log',
    'MouseAction', 'SegmenterConfig', 'segment_actions',
    'FEATURE_DIMENSION', 'FEATURE_NAMES', 'FeatureVector', 'extract_all', 'extract_features',
]
