"""
Streaming authentication Socket.IO events.
"""
import logging
from flask import request, current_app
from flask_socketio import emit

from sockets.utils import build_authenticator, parse_events, parse_threshold, parse_user_id

logger = logging.getLogger(__name__)


def register_stream_events(socketio, stream_manager, model_store):
    """Register all stream-related socket events."""

    @socketio.on('connect')
    def handle_connect():
        """Handle new connection."""
        logger.info(f"Client connected: {request.sid}")

    @socketio.on('disconnect')
    def handle_disconnect():
        """Handle disconnection."""
        logger.info(f"Client disconnected: {request.sid}")
        stream_manager.end_stream(request.sid)

    @socketio.on('start_stream')
    def handle_start_stream(data):
        """
        Start authenticating this socket's events.
        Data: { user_id, threshold? }
        """
        data = data or {}
        try:
            user_id = parse_user_id(data.get('user_id'))
            threshold = parse_threshold(data.get('threshold'), current_app.config['DEFAULT_THRESHOLD'])
        except ValueError as e:
            emit('error', {'message': str(e)})
            return

        try:
            model = model_store.get(user_id)
        except ValueError as e:
            logger.error(f"Model for user {user_id} could not be loaded: {e}")
            emit('error', {'message': f'Model for user {user_id} is unreadable'})
            return
        if model is None:
            emit('error', {'message': f'No model for user {user_id}'})
            return

        stream = stream_manager.start_stream(
            request.sid, user_id, build_authenticator(model, current_app.config, threshold)
        )
        logger.info(f"Stream started for user {user_id} on {request.sid}")
        emit('stream_started', stream.to_dict())

    @socketio.on('mouse_events')
    def handle_mouse_events(data):
        """
        Score a batch of events.
        Data: { events: [[timestamp, x, y, event_type, user_id], ...] } or { lines: [...] }
        """
        stream = stream_manager.get_stream(request.sid)
        if not stream:
            emit('error', {'message': 'No active stream, send start_stream first'})
            return

        try:
            events = parse_events(data or {}, stream.user_id, current_app.config['MAX_EVENTS_PER_MESSAGE'],
                                  current_app.config['MAX_COORDINATE'])
        except ValueError as e:
            logger.warning(f"Skipped payload on {request.sid}: {e}")
            emit('error', {'message': str(e)})
            return

        success, message, decisions = stream_manager.push_events(request.sid, events)
        if not success:
            emit('error', {'message': message})
            return
        for decision in decisions:
            emit('auth_decision', decision.to_dict())

    @socketio.on('end_stream')
    def handle_end_stream(data=None):
        """Close the stream and report its counters."""
        summary = stream_manager.end_stream(request.sid)
        if summary is None:
            emit('error', {'message': 'No active stream'})
            return
        logger.info(f"Stream ended for user {summary['user_id']}: "
                    f"{summary['actions_scored']} actions, rate {summary['authentication_rate']}")
        emit('stream_summary', summary)
