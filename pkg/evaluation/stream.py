"""
Continuous authentication over an incrementally supplied event stream.

The authenticator applies the offline pipeline (dedupe, type filter,
windowing, features, scoring) one event at a time, so feeding a session
event by event yields the same (ordinal, score) pairs as the batch path.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional

from forest.forest import RandomForestModel, check_threshold, predict_proba
from mouse.action import MouseAction, SegmenterConfig
from mouse.event import MouseEvent
from mouse.features import extract_features

logger = logging.getLogger(__name__)


def segmenter_for_model(model: RandomForestModel, sequence_length: Optional[int] = None,
                        stride: Optional[int] = None,
                        event_filter: Optional[Iterable[int]] = None) -> SegmenterConfig:
    """
    Windowing to score a model with.

    A model that records its training windowing uses it; explicit values
    must then agree with it. A model without one falls back to the explicit
    values and the segmenter defaults.

    Raises:
        ValueError: When an explicit value conflicts with the model's windowing
    """
    if model.window is None:
        defaults = SegmenterConfig()
        return SegmenterConfig(
            sequence_length if sequence_length is not None else defaults.sequence_length,
            stride,
            event_filter if event_filter is not None else defaults.event_filter,
        )
    trained = SegmenterConfig.from_dict(model.window)
    requested = {
        'sequence_length': sequence_length,
        'stride': stride,
        'event_filter': None if event_filter is None else frozenset(event_filter),
    }
    for name, value in requested.items():
        if value is not None and value != getattr(trained, name):
            raise ValueError(
                f"Model was trained with {name}={_render(getattr(trained, name))}, "
                f"got {_render(value)}"
            )
    return trained


def _render(value) -> str:
    if isinstance(value, frozenset):
        return ','.join(str(code) for code in sorted(value))
    return str(value)


@dataclass(frozen=True)
class StreamDecision:
    ordinal: int
    score: float
    decision: bool

    def to_dict(self) -> dict:
        return {'ordinal': self.ordinal, 'score': self.score, 'decision': self.decision}


class StreamAuthenticator:
    """Single-consumer scorer for one claimed user's event stream."""

    def __init__(self, model: RandomForestModel, config: SegmenterConfig = None, threshold: float = 0.5):
        check_threshold(threshold)
        if config is None:
            config = segmenter_for_model(model)
        else:
            config = segmenter_for_model(model, config.sequence_length, config.stride, config.event_filter)
        self.model = model
        self.config = config
        self.threshold = threshold
        self.rejected = 0
        self.duplicates = 0
        self.accepted_events = 0
        self.decisions = 0
        self.authenticated = 0
        self._last_kept: Optional[MouseEvent] = None
        self._last_timestamp: Optional[float] = None
        self._window: List[MouseEvent] = []
        self._filtered_count = 0
        self._buffer_start = 0   # filtered index of self._window[0]
        self._next_start = 0     # filtered index where the next action starts
        self._ordinal = 0

    def push(self, event: MouseEvent) -> List[StreamDecision]:
        """Feed one event; returns the decisions of any action it completes."""
        if self._last_timestamp is not None and event.timestamp < self._last_timestamp:
            self.rejected += 1
            logger.warning(
                f"Rejected out-of-order event at {event.timestamp} "
                f"(last {self._last_timestamp}); {self.rejected} rejected so far"
            )
            return []
        self._last_timestamp = event.timestamp
        self.accepted_events += 1

        if self._last_kept is not None and self._last_kept.key == event.key:
            self.duplicates += 1
            return []
        self._last_kept = event
        if event.event_type not in self.config.event_filter:
            return []

        self._window.append(event)
        self._filtered_count += 1
        length = self.config.sequence_length
        emitted = []
        while self._filtered_count >= self._next_start + length:
            offset = self._next_start - self._buffer_start
            action = MouseAction(
                user_id=event.user_id,
                events=self._window[offset:offset + length],
                ordinal=self._ordinal,
            )
            emitted.append(self._score(action))
            self._ordinal += 1
            self._next_start += self.config.stride
            self._trim()
        return emitted

    def _trim(self):
        drop = min(self._next_start - self._buffer_start, len(self._window))
        if drop > 0:
            del self._window[:drop]
            self._buffer_start += drop

    def _score(self, action: MouseAction) -> StreamDecision:
        score = predict_proba(self.model, extract_features(action))
        decision = score >= self.threshold
        self.decisions += 1
        if decision:
            self.authenticated += 1
        return StreamDecision(ordinal=action.ordinal, score=score, decision=decision)

    def feed(self, events: Iterable[MouseEvent]) -> List[StreamDecision]:
        decisions = []
        for event in events:
            decisions.extend(self.push(event))
        return decisions

    @property
    def authentication_rate(self) -> Optional[float]:
        if not self.decisions:
            return None
        return self.authenticated / self.decisions

    def summary(self) -> dict:
        return {
            'actions_scored': self.decisions,
            'authenticated': self.authenticated,
            'authentication_rate': self.authentication_rate,
            'accepted_events': self.accepted_events,
            'duplicates_removed': self.duplicates,
            'rejected_events': self.rejected,
        }


def authenticate_stream(model: RandomForestModel, events: Iterable[MouseEvent],
                        config: SegmenterConfig = None, threshold: float = 0.5) -> Iterator[StreamDecision]:
    """Lazily score an event stream, yielding one decision per completed action."""
    authenticator = StreamAuthenticator(model, config, threshold)
    for event in events:
        yield from authenticator.push(event)
