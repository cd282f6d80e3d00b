"""
Stream Manager for the scoring service.
Tracks one live authentication stream per socket session.
"""
from typing import Dict, List, Optional
from dataclasses import dataclass, field
import time
import threading

from evaluation.stream import StreamAuthenticator, StreamDecision
from mouse.event import MouseEvent


@dataclass
class Stream:
    """A live stream of one claimed user's mouse events."""
    sid: str
    user_id: int
    authenticator: StreamAuthenticator
    created_at: float = field(default_factory=time.time)
    last_activity: float = field(default_factory=time.time)
    # Serializes feeding; the manager lock is not held while scoring
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def update_activity(self):
        """Update last activity timestamp."""
        self.last_activity = time.time()

    def is_stale(self, max_idle_seconds: float) -> bool:
        """Check if the stream has been idle for too long."""
        return time.time() - self.last_activity > max_idle_seconds

    def to_dict(self) -> dict:
        """Serialize stream state, counters included."""
        data = {
            'user_id': self.user_id,
            'threshold': self.authenticator.threshold,
            'sequence_length': self.authenticator.config.sequence_length,
            'stride': self.authenticator.config.stride,
            'created_at': self.created_at,
        }
        data.update(self.authenticator.summary())
        return data


class StreamManager:
    """Manages all live streams. Distinct streams are fed concurrently."""

    def __init__(self, max_idle_seconds: float = 1800.0):
        self.lock = threading.RLock()  # Protects all mutable state
        self.max_idle_seconds = max_idle_seconds
        self.streams: Dict[str, Stream] = {}  # socket sid -> stream

    def start_stream(self, sid: str, user_id: int, authenticator: StreamAuthenticator) -> Stream:
        """
        Start (or restart) the stream of a socket.

        Args:
            sid: Socket session id
            user_id: The claimed user
            authenticator: Scorer holding that user's model

        Returns:
            The new stream
        """
        with self.lock:
            stream = Stream(sid=sid, user_id=user_id, authenticator=authenticator)
            self.streams[sid] = stream
            return stream

    def get_stream(self, sid: str) -> Optional[Stream]:
        """Get the stream of a socket."""
        with self.lock:
            return self.streams.get(sid)

    def push_events(self, sid: str, events: List[MouseEvent]) -> tuple[bool, str, List[StreamDecision]]:
        """
        Feed events to a socket's stream.

        Returns:
            (success, message, decisions)
        """
        with self.lock:
            stream = self.streams.get(sid)
        if not stream:
            return False, "No active stream", []
        with stream.lock:
            stream.update_activity()
            return True, "ok", stream.authenticator.feed(events)

    def end_stream(self, sid: str) -> Optional[dict]:
        """Close a socket's stream and return its summary."""
        with self.lock:
            stream = self.streams.pop(sid, None)
        if not stream:
            return None
        with stream.lock:
            return stream.to_dict()

    def cleanup_stale_streams(self) -> int:
        """
        Remove idle streams.
        Returns number of streams deleted.
        """
        with self.lock:
            to_delete = [sid for sid, s in self.streams.items() if s.is_stale(self.max_idle_seconds)]
            for sid in to_delete:
                del self.streams[sid]
            return len(to_delete)

    def __len__(self):
        with self.lock:
            return len(self.streams)
