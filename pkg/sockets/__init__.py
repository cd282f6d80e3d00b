# Sockets module
from .stream_events import register_stream_events

__all__ = ['register_stream_events']
