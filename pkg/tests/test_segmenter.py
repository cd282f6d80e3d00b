"""
Tests for action segmentation.
"""
import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mouse.action import MouseAction, SegmenterConfig, expected_action_count, segment_actions
from mouse.event import MouseEvent, dedupe_events, parse_session_log
from tests.sample_logs import RECORDED_LINES, straight_events


class TestSegmenterConfig:
    """Tests for SegmenterConfig validation."""

    def test_defaults(self):
        """Test the default windowing."""
        config = SegmenterConfig()
        assert config.sequence_length == 10
        assert config.stride == 10
        assert config.event_filter == frozenset({-1})

    def test_stride_defaults_to_length(self):
        """Test that stride defaults to the length."""
        assert SegmenterConfig(sequence_length=7).stride == 7

    def test_invalid_length(self):
        """Test rejecting a short length."""
        with pytest.raises(ValueError):
            SegmenterConfig(sequence_length=1)

    def test_invalid_stride(self):
        """Test rejecting a non-positive stride."""
        with pytest.raises(ValueError):
            SegmenterConfig(sequence_length=5, stride=0)

    def test_empty_filter(self):
        """Test rejecting an empty filter."""
        with pytest.raises(ValueError):
            SegmenterConfig(event_filter=frozenset())


class TestSegmentActions:
    """Tests for segment_actions."""

    def test_recorded_session(self):
        """Test segmenting the recorded session."""
        events = dedupe_events(parse_session_log(RECORDED_LINES).events)
        actions = segment_actions(events, SegmenterConfig(10, 10))
        assert len(actions) == 2
        assert actions[0].events == tuple(events[:10])
        assert actions[1].events == tuple(events[10:20])
        assert [a.ordinal for a in actions] == [0, 1]

    def test_too_few_events(self):
        """Test a stream shorter than one action."""
        assert segment_actions(straight_events(9)) == []

    def test_overlapping_windows(self):
        """Test overlapping windows."""
        events = straight_events(25)
        actions = segment_actions(events, SegmenterConfig(10, 5))
        assert len(actions) == 4
        assert [a.events[0] for a in actions] == [events[0], events[5], events[10], events[15]]

    def test_filter_applied_first(self):
        """Test that filtering happens before windowing."""
        events = []
        for i in range(20):
            events.append(MouseEvent(float(i), i, 0, -1 if i % 2 == 0 else 1, 0))
        actions = segment_actions(events, SegmenterConfig(5))
        assert len(actions) == 2
        assert all(e.event_type == -1 for a in actions for e in a.events)

    def test_filter_can_include_other_types(self):
        """Test keeping other event types."""
        events = [MouseEvent(float(i), i, 0, -1 if i % 2 == 0 else 1, 0) for i in range(20)]
        actions = segment_actions(events, SegmenterConfig(5, event_filter=frozenset({-1, 1})))
        assert len(actions) == 4

    def test_non_overlapping_partition(self):
        """Test that non-overlapping windows partition the stream."""
        events = straight_events(47)
        actions = segment_actions(events, SegmenterConfig(10))
        covered = [e for a in actions for e in a.events]
        assert covered == events[:40]

    def test_action_times(self):
        """Test action start and end times."""
        action = segment_actions(straight_events(10, dt=0.5), SegmenterConfig(10))[0]
        assert action.start_time == 0.0
        assert action.end_time == 4.5
        assert len(action) == 10

    def test_count_law(self):
        """Test the action count."""
        for filtered in range(0, 101):
            events = straight_events(filtered)
            for length in range(2, 21):
                for stride in range(1, 21):
                    starts = [s for s in range(filtered) if s % stride == 0 and s + length <= filtered]
                    expected = expected_action_count(filtered, length, stride)
                    assert expected == len(starts)
                    if filtered % 10 == 0 and stride % 4 == 1:
                        actions = segment_actions(events, SegmenterConfig(length, stride))
                        assert len(actions) == expected
                        assert [events.index(a.events[0]) for a in actions] == starts


class TestMouseAction:
    """Tests for MouseAction invariants."""

    def test_needs_two_events(self):
        """Test that an action needs two events."""
        with pytest.raises(ValueError):
            MouseAction(user_id=0, events=straight_events(1), ordinal=0)

    def test_time_ordered(self):
        """Test that action events must be time ordered."""
        events = list(reversed(straight_events(3)))
        with pytest.raises(ValueError):
            MouseAction(user_id=0, events=events, ordinal=0)
