"""
Mouse actions: fixed-length windows of consecutive filtered events.
"""
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence

from .event import EVENT_MOVE, MouseEvent

DEFAULT_SEQUENCE_LENGTH = 10


@dataclass(frozen=True)
class SegmenterConfig:
    """
    Windowing policy.

    Args:
        sequence_length: Events per action (L), at least 2
        stride: Step between window starts; None means L (no overlap)
        event_filter: Event type codes kept before windowing
    """
    sequence_length: int = DEFAULT_SEQUENCE_LENGTH
    stride: Optional[int] = None
    event_filter: FrozenSet[int] = field(default_factory=lambda: frozenset({EVENT_MOVE}))

    def __post_init__(self):
        if self.sequence_length < 2:
            raise ValueError(f"sequence_length must be at least 2, got {self.sequence_length}")
        if self.stride is None:
            object.__setattr__(self, 'stride', self.sequence_length)
        if self.stride < 1:
            raise ValueError(f"stride must be positive, got {self.stride}")
        object.__setattr__(self, 'event_filter', frozenset(self.event_filter))
        if not self.event_filter:
            raise ValueError("event_filter must keep at least one event type")

    def to_dict(self) -> dict:
        return {
            'sequence_length': self.sequence_length,
            'stride': self.stride,
            'event_filter': sorted(self.event_filter),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'SegmenterConfig':
        try:
            return cls(int(data['sequence_length']), int(data['stride']),
                       frozenset(int(code) for code in data['event_filter']))
        except (KeyError, TypeError) as e:
            raise ValueError(f"Invalid windowing settings: {data!r}") from e


@dataclass(frozen=True)
class MouseAction:
    """L consecutive events of one user, the unit of classification."""
    user_id: int
    events: tuple
    ordinal: int

    def __post_init__(self):
        object.__setattr__(self, 'events', tuple(self.events))
        if len(self.events) < 2:
            raise ValueError("A mouse action needs at least 2 events")
        if self.end_time < self.start_time:
            raise ValueError("Action events must be time ordered")

    @property
    def start_time(self) -> float:
        return self.events[0].timestamp

    @property
    def end_time(self) -> float:
        return self.events[-1].timestamp

    def __len__(self):
        return len(self.events)


def expected_action_count(filtered_count: int, sequence_length: int, stride: int) -> int:
    """Number of windows segment_actions emits for a filtered stream."""
    if filtered_count < sequence_length:
        return 0
    return (filtered_count - sequence_length) // stride + 1


def segment_actions(events: Sequence[MouseEvent], config: SegmenterConfig = None) -> List[MouseAction]:
    """
    Cut a deduplicated, time-ordered stream into actions.

    Events are filtered by type first; windows then start at 0, stride,
    2*stride, ... and a trailing partial window is dropped.
    """
    config = config or SegmenterConfig()
    filtered = [e for e in events if e.event_type in config.event_filter]
    length = config.sequence_length
    actions = []
    for ordinal, start in enumerate(range(0, len(filtered) - length + 1, config.stride)):
        window = filtered[start:start + length]
        actions.append(MouseAction(user_id=window[0].user_id, events=window, ordinal=ordinal))
    return actions
