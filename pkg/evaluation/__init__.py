# Metrics, scenarios and continuous authentication
from .metrics import MetricError, compute_eer, confusion, metrics, threshold_for_target_fpr
from .scenarios import EvalReport, EvaluationError, MetricRow, run_scenario, train_user_models
from .stream import StreamAuthenticator, StreamDecision, authenticate_stream

__all__ = [
    'MetricError', 'compute_eer', 'confusion', 'metrics', 'threshold_for_target_fpr',
    'EvalReport', 'EvaluationError', 'MetricRow', 'run_scenario', 'train_user_models',
    'StreamAuthenticator', 'StreamDecision', 'authenticate_stream',
]
