"""
Binary random forest: bagged CART trees scored by mean leaf probability.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from io_utils import atomic_open

from .params import ForestError, ForestParams
from .tree import DecisionTree, train_tree

logger = logging.getLogger(__name__)

MODEL_FORMAT = 'mouseauth-forest'
MODEL_FORMAT_VERSION = 1


class RandomForestModel:
    """A trained forest. Safe to share between threads for scoring."""

    def __init__(self, trees: List[DecisionTree], params: ForestParams, feature_dimension: int,
                 owner_id: Optional[int] = None, window: Optional[dict] = None):
        if not trees:
            raise ForestError("A forest needs at least one tree")
        for tree in trees:
            internal = tree.feature[tree.feature >= 0]
            if internal.size and internal.max() >= feature_dimension:
                raise ForestError("Tree tests a feature beyond the model dimension")
        self.trees = list(trees)
        self.params = params
        self.feature_dimension = feature_dimension
        self.owner_id = owner_id
        # windowing the training actions were cut with, stored as given
        self.window = window

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.feature_dimension:
            raise ForestError(
                f"Expected {self.feature_dimension} features, got shape {X.shape}"
            )
        return X

    def predict_proba(self, X) -> np.ndarray:
        """Genuine-class score in [0, 1] for each row of X."""
        X = self._check(X)
        # tree by tree, so a row scores the same alone or inside a batch
        total = np.zeros(len(X))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)

    def classify(self, X, threshold: float = 0.5) -> np.ndarray:
        """1 where the score reaches the threshold (ties authenticate)."""
        check_threshold(threshold)
        return (self.predict_proba(X) >= threshold).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            'format': MODEL_FORMAT,
            'format_version': MODEL_FORMAT_VERSION,
            'owner_id': self.owner_id,
            'feature_dimension': self.feature_dimension,
            'params': self.params.to_dict(),
            'window': self.window,
            'trees': [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'RandomForestModel':
        if data.get('format') != MODEL_FORMAT:
            raise ForestError("Not a forest model file")
        if data.get('format_version') != MODEL_FORMAT_VERSION:
            raise ForestError(f"Unsupported model format version: {data.get('format_version')}")
        return cls(
            trees=[DecisionTree.from_dict(t) for t in data['trees']],
            params=ForestParams.from_dict(data['params']),
            feature_dimension=int(data['feature_dimension']),
            owner_id=data.get('owner_id'),
            window=data.get('window'),
        )

    def __repr__(self):
        return f"RandomForestModel(owner={self.owner_id}, {len(self.trees)} trees, d={self.feature_dimension})"


def check_threshold(threshold: float):
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0,1], got {threshold}")


def tree_seed_sequence(seed: int, tree_index: int) -> np.random.SeedSequence:
    """Seed of one tree, derived only from the master seed and the tree index."""
    return np.random.SeedSequence([seed, tree_index])


def _fit_one(X: np.ndarray, y: np.ndarray, params: ForestParams, tree_index: int) -> DecisionTree:
    bootstrap_seed, split_seed = tree_seed_sequence(params.seed, tree_index).spawn(2)
    if params.bootstrap:
        rows = np.random.default_rng(bootstrap_seed).integers(0, len(X), size=len(X))
        X, y = X[rows], y[rows]
    return train_tree(X, y, params, split_seed)


def train_forest(X, y, params: ForestParams = None, owner_id: Optional[int] = None,
                 n_jobs: int = 1, window: Optional[dict] = None) -> RandomForestModel:
    """
    Train a forest of params.n_trees trees.

    Each tree draws its bootstrap sample and feature candidates from its own
    seed, so the result does not depend on training order or n_jobs.

    Raises:
        ForestError: On an empty dataset or invalid input
    """
    params = params or ForestParams()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) == 0:
        raise ForestError("Cannot train a forest on an empty dataset")

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(lambda t: _fit_one(X, y, params, t), range(params.n_trees)))
    else:
        trees = [_fit_one(X, y, params, t) for t in range(params.n_trees)]
    return RandomForestModel(trees, params, X.shape[1], owner_id=owner_id, window=window)


def predict_proba(model: RandomForestModel, x) -> float:
    """Score of a single feature vector."""
    values = getattr(x, 'values', x)
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ForestError("predict_proba expects a single feature vector")
    return float(model.predict_proba(values)[0])


def classify(model: RandomForestModel, x, threshold: float = 0.5) -> int:
    check_threshold(threshold)
    return int(predict_proba(model, x) >= threshold)


def save_model(model: RandomForestModel, path):
    """Write a model as versioned JSON (atomic)."""
    with atomic_open(path) as fh:
        json.dump(model.to_dict(), fh, sort_keys=True, separators=(',', ':'))
        fh.write('\n')
    logger.debug(f"Saved {model!r} to {path}")


def load_model(path) -> RandomForestModel:
    with open(path, 'r', encoding='utf-8') as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ForestError(f"Corrupt model file {path}: {e}") from None
    return RandomForestModel.from_dict(data)
