"""
mouseauth - continuous authentication scoring service.
"""
import logging
from urllib.parse import parse_qs
from flask import Flask, request, jsonify, current_app
from werkzeug.wrappers import Response
from flask_socketio import SocketIO
from dotenv import load_dotenv

from config import get_config
from models import ModelStore
from sockets import register_stream_events
from sockets.utils import build_authenticator, parse_events, parse_threshold, parse_user_id
from streams import StreamManager

load_dotenv()

# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


# Block websocket transport for Engine.IO to avoid gunicorn gthread errors.
class _BlockWebSocketTransport:
    def __init__(self, wsgi_app):
        self.wsgi_app = wsgi_app

    def __call__(self, environ, start_response):
        path = environ.get('PATH_INFO', '')
        if path.startswith('/socket.io'):
            qs = parse_qs(environ.get('QUERY_STRING', ''))
            if qs.get('transport', [''])[0] == 'websocket':
                res = Response('WebSocket disabled', status=400)
                return res(environ, start_response)
        return self.wsgi_app(environ, start_response)


def create_app(config_object=None, **overrides):
    """
    Build the Flask app and its Socket.IO server.

    Args:
        config_object: Config instance or class; defaults to get_config()
        overrides: Individual config values, e.g. MODEL_DIR

    Returns:
        (app, socketio)
    """
    app = Flask(__name__)
    app.config.from_object(config_object or get_config())
    app.config.update(overrides)

    model_store = ModelStore(app.config['MODEL_DIR'])
    stream_manager = StreamManager(app.config['STREAM_IDLE_SECONDS'])
    app.extensions['model_store'] = model_store
    app.extensions['stream_manager'] = stream_manager

    # Create Socket.IO instance
    socketio = SocketIO(
        app,
        cors_allowed_origins=app.config.get('CORS_ALLOWED_ORIGINS', '*'),
        async_mode='threading',
        allow_upgrades=False,
        transports=['polling']
    )
    app.wsgi_app = _BlockWebSocketTransport(app.wsgi_app)

    # Register socket events
    register_stream_events(socketio, stream_manager, model_store)
    _register_routes(app)
    return app, socketio


def _register_routes(app):

    @app.route('/api/health', methods=['GET'])
    def api_health():
        return jsonify({
            'success': True,
            'status': 'ok',
            'streams': len(current_app.extensions['stream_manager']),
            'models': len(current_app.extensions['model_store'].available()),
        })

    @app.route('/api/models', methods=['GET'])
    def api_models():
        return jsonify({'success': True, 'models': current_app.extensions['model_store'].available()})

    @app.route('/api/score', methods=['POST'])
    def api_score():
        """Score a whole batch of events in one request."""
        data = request.get_json(silent=True) or {}
        try:
            user_id = parse_user_id(data.get('user_id'))
            threshold = parse_threshold(data.get('threshold'), current_app.config['DEFAULT_THRESHOLD'])
            events = parse_events(data, user_id, current_app.config['MAX_EVENTS_PER_MESSAGE'],
                                  current_app.config['MAX_COORDINATE'])
        except ValueError as e:
            return jsonify({'success': False, 'error': str(e)}), 400

        try:
            model = current_app.extensions['model_store'].get(user_id)
        except ValueError as e:
            logger.error(f"Model for user {user_id} could not be loaded: {e}")
            return jsonify({'success': False, 'error': f'Model for user {user_id} is unreadable'}), 500
        if model is None:
            return jsonify({'success': False, 'error': f'No model for user {user_id}'}), 404

        authenticator = build_authenticator(model, current_app.config, threshold)
        decisions = authenticator.feed(events)
        return jsonify({
            'success': True,
            'user_id': user_id,
            'decisions': [d.to_dict() for d in decisions],
            'summary': authenticator.summary(),
        })

    @app.route('/admin/cleanup', methods=['POST'])
    def admin_cleanup():
        """Admin endpoint to cleanup idle streams."""
        auth_key = request.headers.get('X-Admin-Key') or request.args.get('key')
        expected_key = current_app.config.get('SECRET_KEY')

        if not auth_key or auth_key != expected_key:
            return jsonify({'error': 'Unauthorized'}), 401

        stream_manager = current_app.extensions['stream_manager']
        deleted_count = stream_manager.cleanup_stale_streams()

        return jsonify({
            'success': True,
            'deleted_streams': deleted_count,
            'remaining_streams': len(stream_manager)
        })


app, socketio = create_app()


# ==================== Main ====================

if __name__ == '__main__':
    logger.info("Starting mouseauth scoring service...")
    logger.info(f"Models from {app.config['MODEL_DIR']}")
    socketio.run(app, host='0.0.0.0', port=5000, debug=True, allow_unsafe_werkzeug=True)
