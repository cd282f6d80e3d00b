"""
CART decision tree for binary labels (Gini impurity).

Nodes are stored in parallel arrays in depth-first order (left subtree
first). A node with feature == -1 is a leaf. A sample goes to the left child
iff x[feature] <= threshold.
"""
from typing import Union

import numpy as np

from .params import ForestError, ForestParams

LEAF = -1
_IMPURITY_TOL = 1e-12

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


class DecisionTree:
    """A trained tree; immutable after construction."""

    def __init__(self, feature, threshold, left, right, counts):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.int64).reshape(-1, 2)
        n = len(self.feature)
        if n == 0:
            raise ForestError("A tree needs at least one node")
        for name in ('threshold', 'left', 'right', 'counts'):
            if len(getattr(self, name)) != n:
                raise ForestError(f"Tree arrays disagree in length ({name})")
        internal = self.feature != LEAF
        if np.any((self.left[internal] <= 0) | (self.left[internal] >= n)
                  | (self.right[internal] <= 0) | (self.right[internal] >= n)):
            raise ForestError("Internal node with a missing child")
        for array in (self.feature, self.threshold, self.left, self.right, self.counts):
            array.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Index of the leaf each row of X reaches."""
        X = np.asarray(X, dtype=float)
        nodes = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            features = self.feature[nodes]
            active = features != LEAF
            if not active.any():
                return nodes
            idx = rows[active]
            current = nodes[idx]
            go_left = X[idx, features[idx]] <= self.threshold[current]
            nodes[idx] = np.where(go_left, self.left[current], self.right[current])

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Positive-class fraction of the leaf each row reaches."""
        counts = self.counts[self.apply(X)]
        return counts[:, 1] / counts.sum(axis=1)

    def to_dict(self) -> dict:
        return {
            'feature': self.feature.tolist(),
            'threshold': self.threshold.tolist(),
            'left': self.left.tolist(),
            'right': self.right.tolist(),
            'counts': self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'DecisionTree':
        return cls(data['feature'], data['threshold'], data['left'], data['right'], data['counts'])

    def __eq__(self, other):
        if not isinstance(other, DecisionTree):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ('feature', 'threshold', 'left', 'right', 'counts')
        )

    def __repr__(self):
        return f"DecisionTree({self.n_nodes} nodes, {self.n_leaves} leaves)"


def _midpoint(low: float, high: float) -> float:
    mid = (low + high) / 2.0
    if not np.isfinite(mid) or mid >= high:
        return low
    return mid


def _best_split_on_feature(column, labels, n_pos, min_samples_leaf):
    """
    Best threshold of one feature.

    Returns (proxy, threshold); None when the feature is constant; an empty
    tuple when no split respects min_samples_leaf. The proxy is sum over children of
    (pos^2 + neg^2) / size, which is maximal where weighted Gini is minimal.
    """
    order = np.argsort(column, kind='mergesort')
    xs = column[order]
    if xs[0] == xs[-1]:
        return None
    n = len(xs)
    left_n = np.arange(1, n, dtype=np.int64)
    right_n = n - left_n
    valid = (xs[:-1] < xs[1:]) & (left_n >= min_samples_leaf) & (right_n >= min_samples_leaf)
    if not valid.any():
        return ()
    left_pos = np.cumsum(labels[order])[:-1]
    left_neg = left_n - left_pos
    right_pos = n_pos - left_pos
    right_neg = right_n - right_pos
    proxy = ((left_pos * left_pos + left_neg * left_neg) / left_n
             + (right_pos * right_pos + right_neg * right_neg) / right_n)
    proxy = np.where(valid, proxy, -np.inf)
    top = proxy.max()
    i = int(np.argmax(proxy >= top - _IMPURITY_TOL * max(1.0, abs(top))))
    return float(proxy[i]), _midpoint(float(xs[i]), float(xs[i + 1]))


def train_tree(samples, labels, params: ForestParams = None, tree_seed: SeedLike = 0) -> DecisionTree:
    """
    Grow one CART tree greedily.

    At each node a seeded permutation of the features is walked until
    max_features non-constant features have been examined. The split with the
    lowest weighted Gini wins; ties go to the lowest feature index, then the
    lowest threshold. A node becomes a leaf when it is pure, at max_depth,
    below the sample limits, or has no valid split.

    Args:
        samples: (n, d) finite feature matrix, n >= 1
        labels: n binary labels (1 = genuine)
        params: Tree growth parameters (n_trees and bootstrap are ignored)
        tree_seed: Seed or generator for the feature draws

    Raises:
        ForestError: On empty, non-finite or non-binary input
    """
    params = params or ForestParams()
    X = np.asarray(samples, dtype=float)
    y = np.asarray(labels)
    if X.ndim != 2 or len(X) == 0:
        raise ForestError("Training data must be a non-empty 2-D matrix")
    if len(y) != len(X):
        raise ForestError(f"{len(X)} samples but {len(y)} labels")
    if not np.all(np.isfinite(X)):
        raise ForestError("Training features must be finite")
    if not np.all((y == 0) | (y == 1)):
        raise ForestError("Labels must be 0 or 1")
    y = y.astype(np.int64)

    rng = tree_seed if isinstance(tree_seed, np.random.Generator) else np.random.default_rng(tree_seed)
    n_features = X.shape[1]
    per_split = params.features_per_split(n_features)
    msl = params.min_samples_leaf

    feature, threshold, left, right, counts = [], [], [], [], []
    stack = [(np.arange(len(X)), 0, -1, False)]
    while stack:
        idx, depth, parent, is_right = stack.pop()
        node = len(feature)
        if parent >= 0:
            (right if is_right else left)[parent] = node
        node_labels = y[idx]
        n = len(idx)
        n_pos = int(node_labels.sum())
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append((n - n_pos, n_pos))

        if (n_pos == 0 or n_pos == n
                or (params.max_depth is not None and depth >= params.max_depth)
                or n < params.min_samples_split or n < 2 * msl):
            continue

        best = None
        examined = 0
        for f in rng.permutation(n_features).tolist():
            if examined >= per_split:
                break
            found = _best_split_on_feature(X[idx, f], node_labels, n_pos, msl)
            if found is None:
                continue
            examined += 1
            if not found:
                continue
            proxy, thr = found
            if best is None:
                best = (proxy, f, thr)
                continue
            tol = _IMPURITY_TOL * max(1.0, abs(best[0]))
            if proxy > best[0] + tol or (abs(proxy - best[0]) <= tol and f < best[1]):
                best = (proxy, f, thr)

        if best is None:
            continue
        _, f, thr = best
        go_left = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        stack.append((idx[~go_left], depth + 1, node, True))
        stack.append((idx[go_left], depth + 1, node, False))

    return DecisionTree(feature, threshold, left, right, counts)
