"""
Random forest hyperparameters.

Defaults follow the usual library defaults for a forest classifier:
100 trees, sqrt feature subsampling, unlimited depth, bootstrap sampling.
"""
import math
from dataclasses import asdict, dataclass
from typing import Optional, Union

MAX_FEATURES_RULES = ('sqrt', 'log2', 'all')


class ForestError(ValueError):
    """Invalid forest input or parameters."""


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    min_samples_split: int = 2
    max_features: Union[str, int] = 'sqrt'
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ForestError(f"n_trees must be positive, got {self.n_trees}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ForestError(f"max_depth must be positive or None, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise ForestError(f"min_samples_leaf must be positive, got {self.min_samples_leaf}")
        if self.min_samples_split < 2:
            raise ForestError(f"min_samples_split must be at least 2, got {self.min_samples_split}")
        if isinstance(self.max_features, str):
            if self.max_features not in MAX_FEATURES_RULES:
                raise ForestError(f"Unknown max_features rule: {self.max_features}")
        elif isinstance(self.max_features, bool) or not isinstance(self.max_features, int) or self.max_features < 1:
            raise ForestError(f"max_features must be a rule or a positive integer, got {self.max_features!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ForestError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def features_per_split(self, n_features: int) -> int:
        """Number of candidate features examined at each node."""
        if self.max_features == 'all':
            return n_features
        if self.max_features == 'sqrt':
            return max(1, int(math.sqrt(n_features)))
        if self.max_features == 'log2':
            return max(1, int(math.log2(n_features)))
        if self.max_features > n_features:
            raise ForestError(f"max_features={self.max_features} exceeds feature dimension {n_features}")
        return self.max_features

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'ForestParams':
        return cls(**data)
