"""
Scenario A / Scenario B evaluation across all users.

Scenario A scores each owner's forest on the rows it was trained on;
Scenario B scores it on the owner's held-out test set.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from dataset.builder import GENUINE, MasterDatasets, UserDataset
from forest.forest import RandomForestModel, train_forest
from forest.params import ForestParams

from .metrics import compute_eer, confusion, metrics, threshold_for_target_fpr

logger = logging.getLogger(__name__)

SCENARIOS = ('A', 'B')
RATE_FIELDS = ('acc', 'fnr', 'fpr', 'eer', 'eer_threshold', 'target_threshold', 'target_fnr', 'target_fpr')


class EvaluationError(ValueError):
    """A per-user evaluation failed."""

    def __init__(self, user_id: int, message: str):
        self.user_id = user_id
        super().__init__(f"user {user_id}: {message}")


@dataclass(frozen=True)
class MetricRow:
    user_id: Union[int, str]
    genuine_action_count: Optional[int]
    acc: float
    fnr: float
    fpr: float
    eer: float
    eer_threshold: float
    target_threshold: Optional[float] = None
    target_fnr: Optional[float] = None
    target_fpr: Optional[float] = None

    def __post_init__(self):
        for name in ('acc', 'fnr', 'fpr', 'eer'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {value}")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class EvalReport:
    scenario: str
    rows: Tuple[MetricRow, ...]
    avg: MetricRow
    std: MetricRow
    threshold: float = 0.5
    target_fpr: Optional[float] = None

    @property
    def user_ids(self) -> List[int]:
        return [row.user_id for row in self.rows]


def summarize_rows(rows: List[MetricRow]) -> Tuple[MetricRow, MetricRow]:
    """Average and population standard deviation of each rate over the rows."""
    if not rows:
        raise ValueError("Cannot summarize an empty report")
    avg, std = {}, {}
    for name in RATE_FIELDS:
        values = [getattr(row, name) for row in rows]
        if any(v is None for v in values):
            avg[name] = std[name] = None
            continue
        array = np.array(values, dtype=float)
        avg[name] = float(array.mean())
        std[name] = float(array.std())
    return (MetricRow(user_id='Avg.', genuine_action_count=None, **avg),
            MetricRow(user_id='Std.', genuine_action_count=None, **std))


def train_user_models(master: MasterDatasets, params: ForestParams,
                      n_jobs: int = 1, window: Optional[dict] = None) -> Dict[int, RandomForestModel]:
    """Train one forest per owner on its training split; window is recorded in each model."""
    def fit(owner_id: int) -> RandomForestModel:
        X, y = master[owner_id].matrix('train')
        try:
            model = train_forest(X, y, params, owner_id=owner_id, window=window)
        except ValueError as e:
            logger.error(f"Training failed for user {owner_id}: {e}")
            raise EvaluationError(owner_id, f"training failed: {e}") from e
        logger.info(f"Trained forest for user {owner_id} on {len(y)} actions")
        return model

    return _map_users(fit, master.user_ids, n_jobs)


def _map_users(fn, user_ids: List[int], n_jobs: int) -> Dict:
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(fn, user_ids))
    else:
        results = [fn(uid) for uid in user_ids]
    return dict(zip(user_ids, results))


def _holdout(X: np.ndarray, y: np.ndarray, fraction: float):
    """Chronological split of each class: first (1 - fraction) to fit, rest to score."""
    fit_rows, eval_rows = [], []
    for label in (1, 0):
        rows = np.flatnonzero(y == label)
        cut = int(np.floor((1.0 - fraction) * len(rows)))
        fit_rows.extend(rows[:cut].tolist())
        eval_rows.extend(rows[cut:].tolist())
    return np.array(sorted(fit_rows), dtype=np.int64), np.array(sorted(eval_rows), dtype=np.int64)


def evaluate_user(scenario: str, dataset: UserDataset, params: ForestParams,
                  model: Optional[RandomForestModel] = None, threshold: float = 0.5,
                  scenario_a_holdout: Optional[float] = None,
                  target_fpr: Optional[float] = None) -> MetricRow:
    """Metric row of one owner under one scenario."""
    X_train, y_train = dataset.matrix('train')
    if scenario == 'A':
        if scenario_a_holdout:
            fit_rows, eval_rows = _holdout(X_train, y_train, scenario_a_holdout)
            model = train_forest(X_train[fit_rows], y_train[fit_rows], params, owner_id=dataset.owner_id)
            X_eval, y_eval = X_train[eval_rows], y_train[eval_rows]
        else:
            X_eval, y_eval = X_train, y_train
    else:
        X_eval, y_eval = dataset.matrix('test')
    if model is None:
        model = train_forest(X_train, y_train, params, owner_id=dataset.owner_id)

    scores = model.predict_proba(X_eval)
    rates = metrics(confusion(scores, y_eval, threshold))
    eer = compute_eer(scores, y_eval)
    target = {}
    if target_fpr is not None:
        chosen = threshold_for_target_fpr(scores, y_eval, target_fpr)
        target = {'target_threshold': chosen.threshold, 'target_fnr': chosen.fnr, 'target_fpr': chosen.fpr}
    return MetricRow(
        user_id=dataset.owner_id,
        genuine_action_count=int(np.sum(y_eval == GENUINE)),
        acc=rates.acc,
        fnr=rates.fnr,
        fpr=rates.fpr,
        eer=eer.eer,
        eer_threshold=eer.threshold,
        **target,
    )


def run_scenario(scenario: str, master: MasterDatasets, params: ForestParams = None,
                 models: Optional[Mapping[int, RandomForestModel]] = None,
                 threshold: float = 0.5, scenario_a_holdout: Optional[float] = None,
                 target_fpr: Optional[float] = None, n_jobs: int = 1) -> EvalReport:
    """
    Evaluate every owner under Scenario 'A' or 'B'.

    Args:
        scenario: 'A' (score the training rows) or 'B' (score the test rows)
        master: Per-owner balanced datasets
        params: Forest parameters for owners without a supplied model
        models: Already trained forests keyed by owner id
        threshold: Decision threshold for ACC/FNR/FPR
        scenario_a_holdout: When set, Scenario A fits on the first part of
            the training rows and scores the held-out remainder
        target_fpr: Also report the lowest-FNR threshold with FPR <= target
        n_jobs: Owners evaluated in parallel

    Raises:
        EvaluationError: Naming the user whose evaluation failed
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"Unknown scenario: {scenario}")
    if len(master) < 2:
        raise ValueError("At least 2 users are required")
    params = params or ForestParams()
    models = models or {}

    def evaluate(owner_id: int) -> MetricRow:
        try:
            model = None if (scenario == 'A' and scenario_a_holdout) else models.get(owner_id)
            row = evaluate_user(scenario, master[owner_id], params, model, threshold,
                                scenario_a_holdout, target_fpr)
        except EvaluationError:
            raise
        except ValueError as e:
            logger.error(f"Scenario {scenario} failed for user {owner_id}: {e}")
            raise EvaluationError(owner_id, str(e)) from e
        logger.info(f"Scenario {scenario} user {owner_id}: acc={row.acc:.4f} "
                    f"fnr={row.fnr:.4f} fpr={row.fpr:.4f} eer={row.eer:.6f}")
        return row

    by_user = _map_users(evaluate, master.user_ids, n_jobs)
    rows = [by_user[uid] for uid in sorted(by_user)]
    avg, std = summarize_rows(rows)
    return EvalReport(scenario=scenario, rows=tuple(rows), avg=avg, std=std,
                      threshold=threshold, target_fpr=target_fpr)
