# Streams module
from .stream_manager import StreamManager, Stream

__all__ = ['StreamManager', 'Stream']
