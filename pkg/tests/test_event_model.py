"""
Tests for the mouse event model.
"""
import io
import pytest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mouse.event import (
    EVENT_MOVE,
    LogParseError,
    MouseEvent,
    SessionLog,
    SessionLogError,
    coordinate_error,
    dedupe_events,
    parse_event_line,
    parse_session_log,
    read_session_file,
    write_session_log,
)
from tests.sample_logs import RECORDED_LINES, random_events


class TestParseEventLine:
    """Tests for single line parsing."""

    def test_recorded_line(self):
        """Test parsing a recorded log line."""
        event = parse_event_line("1616448584.38407 1088 608 -1 0")
        assert event == MouseEvent(1616448584.38407, 1088, 608, -1, 0)

    def test_tab_separated(self):
        """Test parsing a tab separated line."""
        event = parse_event_line("1616448584.38407\t1088\t608\t-1\t0")
        assert event.x == 1088
        assert event.event_type == EVENT_MOVE

    def test_all_zero(self):
        """Test parsing an all zero line."""
        assert parse_event_line("0 0 0 -1 0") == MouseEvent(0.0, 0, 0, -1, 0)

    def test_non_numeric_timestamp(self):
        """Test rejecting a non-numeric timestamp."""
        with pytest.raises(LogParseError) as info:
            parse_event_line("abc 1 2 -1 0", line_number=7)
        assert info.value.field_index == 1
        assert info.value.line_number == 7
        assert 'line 7' in str(info.value)

    def test_wrong_field_count(self):
        """Test rejecting a wrong field count."""
        with pytest.raises(LogParseError) as info:
            parse_event_line("1.0 1 2 -1")
        assert info.value.field_index is None

    def test_negative_coordinate(self):
        """Test rejecting a negative coordinate."""
        with pytest.raises(LogParseError) as info:
            parse_event_line("1.0 5 -2 -1 0")
        assert info.value.field_index == 3

    def test_coordinate_bound(self):
        """Test the screen bound on coordinates."""
        with pytest.raises(LogParseError):
            parse_event_line("1.0 8193 2 -1 0")
        assert parse_event_line("1.0 8193 2 -1 0", max_coordinate=10000).x == 8193

    def test_float_coordinate_rejected(self):
        """Test rejecting a fractional coordinate."""
        with pytest.raises(LogParseError) as info:
            parse_event_line("1.0 5.5 2 -1 0")
        assert info.value.field_index == 2

    def test_other_event_types_preserved(self):
        """Test that other event types are kept."""
        assert parse_event_line("1.0 5 2 3 0").event_type == 3

    @pytest.mark.parametrize("line, field", [
        ("1.0 1_0 2 -1 0", 2),
        ("1_0.5 1 2 -1 0", 1),
        ("1.0 1 2 -1 0_0", 5),
        ("nan 1 2 -1 0", 1),
        ("inf 1 2 -1 0", 1),
        ("1.0 \uff11 2 -1 0", 2),
    ])
    def test_loose_numbers_rejected(self, line, field):
        """Test rejecting underscores, non-finite values and non-ASCII digits."""
        with pytest.raises(LogParseError) as info:
            parse_event_line(line)
        assert info.value.field_index == field

    def test_signed_and_exponent_forms(self):
        """Test accepting signs and exponents."""
        event = parse_event_line("1.5e2 +3 4 -1 0")
        assert event == MouseEvent(150.0, 3, 4, -1, 0)

    def test_coordinate_error(self):
        """Test the coordinate bound messages."""
        assert coordinate_error(0, 10) is None
        assert coordinate_error(10, 10) is None
        assert coordinate_error(-1, 10) == "negative coordinate -1"
        assert coordinate_error(11, 10) == "coordinate 11 exceeds screen bound 10"


class TestParseSessionLog:
    """Tests for whole-session parsing."""

    def test_recorded_session(self):
        """Test parsing the recorded session."""
        log = parse_session_log(RECORDED_LINES)
        assert len(log) == 30
        assert log.user_id == 0
        assert log.out_of_order == 0
        assert log.events[0].timestamp == 1616448584.38407

    def test_empty_input(self):
        """Test parsing empty input."""
        log = parse_session_log([])
        assert len(log) == 0
        assert log.user_id is None

    def test_header_only(self):
        """Test parsing a header with no events."""
        assert len(parse_session_log(["Timestamp X Y Type ID"])) == 0

    def test_blank_lines_skipped(self):
        """Test that blank lines are skipped."""
        log = parse_session_log(["", "1.0 1 1 -1 2", "   ", "2.0 2 2 -1 2", ""])
        assert len(log) == 2
        assert log.user_id == 2

    def test_mixed_ids(self):
        """Test rejecting mixed user ids."""
        with pytest.raises(SessionLogError):
            parse_session_log(["1.0 1 1 -1 0", "2.0 2 2 -1 1"])

    def test_error_carries_line_number(self):
        """Test that errors carry the line number."""
        with pytest.raises(LogParseError) as info:
            parse_session_log(["Timestamp X Y Type ID", "1.0 1 1 -1 0", "x 1 1 -1 0"])
        assert info.value.line_number == 3

    def test_out_of_order_sorted_stably(self):
        """Test that out of order events are sorted stably."""
        lines = ["1.0 1 1 -1 0", "3.0 3 3 -1 0", "2.0 2 2 -1 0", "2.0 4 4 -1 0"]
        log = parse_session_log(lines)
        assert [e.x for e in log.events] == [1, 2, 4, 3]
        assert log.out_of_order == 2

    def test_round_trip(self):
        """Test writing and reading back a session."""
        log = parse_session_log(RECORDED_LINES)
        buffer = io.StringIO()
        write_session_log(log, buffer)
        assert parse_session_log(buffer.getvalue().splitlines()) == log

    def test_round_trip_without_header(self):
        """Test reading back a session written without a header."""
        rng = np.random.default_rng(3)
        log = SessionLog(user_id=0, events=random_events(rng, 50))
        buffer = io.StringIO()
        write_session_log(log, buffer, header=False)
        assert parse_session_log(buffer.getvalue().splitlines()) == log

    def test_read_file(self, tmp_path):
        """Test reading a session file."""
        path = tmp_path / 'session.txt'
        path.write_text('\n'.join(RECORDED_LINES) + '\n', encoding='utf-8')
        assert len(read_session_file(str(path))) == 30


class TestSessionLog:
    """Tests for SessionLog invariants."""

    def test_rejects_other_user(self):
        """Test rejecting an event of another user."""
        with pytest.raises(SessionLogError):
            SessionLog(user_id=0, events=[MouseEvent(1.0, 1, 1, -1, 1)])

    def test_rejects_unsorted(self):
        """Test rejecting unsorted events."""
        with pytest.raises(SessionLogError):
            SessionLog(user_id=0, events=[MouseEvent(2.0, 1, 1, -1, 0), MouseEvent(1.0, 2, 2, -1, 0)])


class TestDedupe:
    """Tests for duplicate removal."""

    def test_recorded_session(self):
        """Test deduplicating the recorded session."""
        log = parse_session_log(RECORDED_LINES)
        kept = dedupe_events(log.events)
        assert len(kept) == 28
        removed = {e.timestamp for e in log.events} - {e.timestamp for e in kept}
        assert removed == {1616448584.44124, 1616448584.56824}

    def test_distinct_coordinates_unchanged(self):
        """Test that distinct coordinates are kept."""
        events = [MouseEvent(float(i), i, i, -1, 0) for i in range(10)]
        assert dedupe_events(events) == events

    def test_run_collapses(self):
        """Test collapsing a run of repeats."""
        events = [MouseEvent(float(i), 5, 5, -1, 0) for i in range(5)]
        assert dedupe_events(events) == events[:1]

    def test_event_type_distinguishes(self):
        """Test that the event type distinguishes events."""
        events = [MouseEvent(1.0, 5, 5, -1, 0), MouseEvent(2.0, 5, 5, 1, 0)]
        assert len(dedupe_events(events)) == 2

    def test_only_adjacent_repeats_removed(self):
        """Test that only adjacent repeats are removed."""
        events = [MouseEvent(1.0, 1, 1, -1, 0), MouseEvent(2.0, 2, 2, -1, 0), MouseEvent(3.0, 1, 1, -1, 0)]
        assert len(dedupe_events(events)) == 3

    def test_idempotent_and_no_adjacent_repeats(self):
        """Test that deduplication is idempotent."""
        rng = np.random.default_rng(11)
        for _ in range(50):
            events = [MouseEvent(float(i), int(rng.integers(0, 3)), int(rng.integers(0, 3)), -1, 0)
                      for i in range(40)]
            once = dedupe_events(events)
            assert dedupe_events(once) == once
            assert all(a.key != b.key for a, b in zip(once, once[1:]))
