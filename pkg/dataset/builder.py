"""
Per-user balanced datasets.

Each owner gets every one of their own training actions as positives and an
equal number of imposter actions drawn evenly from all other users. The test
set is built the same way from the test pools, so no action is shared between
an owner's train and test sets.
"""
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, TypeVar

import numpy as np

from io_utils import atomic_write_text
from mouse.features import FeatureVector, feature_matrix, features_frame, write_feature_csv

logger = logging.getLogger(__name__)

T = TypeVar('T')

SPLIT_MODES = ('chronological', 'random')
GENUINE = 1
IMPOSTER = 0
_SPLIT_STREAMS = {'train': 0, 'test': 1}


class DatasetError(ValueError):
    """A dataset could not be built as requested."""


@dataclass(frozen=True)
class LabeledSample:
    features: FeatureVector
    label: int
    source_user: int
    ordinal: int

    def __post_init__(self):
        if self.label not in (GENUINE, IMPOSTER):
            raise ValueError(f"Label must be 0 or 1, got {self.label}")

    @property
    def provenance(self) -> Tuple[int, int]:
        return (self.source_user, self.ordinal)


@dataclass
class UserSplit:
    """One user's actions as (ordinal, features) pairs, split into train and test."""
    user_id: int
    train: List[Tuple[int, FeatureVector]] = field(default_factory=list)
    test: List[Tuple[int, FeatureVector]] = field(default_factory=list)


@dataclass
class UserDataset:
    owner_id: int
    train: List[LabeledSample] = field(default_factory=list)
    test: List[LabeledSample] = field(default_factory=list)
    seed: int = 0

    def samples(self, split: str) -> List[LabeledSample]:
        if split not in _SPLIT_STREAMS:
            raise ValueError(f"Unknown split: {split}")
        return self.train if split == 'train' else self.test

    def genuine_count(self, split: str) -> int:
        return sum(1 for s in self.samples(split) if s.label == GENUINE)

    def imposter_count(self, split: str) -> int:
        return sum(1 for s in self.samples(split) if s.label == IMPOSTER)

    def matrix(self, split: str) -> Tuple[np.ndarray, np.ndarray]:
        """Feature matrix and label vector of one split."""
        samples = self.samples(split)
        X = feature_matrix([s.features for s in samples])
        y = np.array([s.label for s in samples], dtype=np.int64)
        return X, y

    def __repr__(self):
        return (f"UserDataset(owner={self.owner_id}, train={len(self.train)}, "
                f"test={len(self.test)})")


@dataclass
class MasterDatasets:
    datasets: Dict[int, UserDataset]
    summary: Dict[str, int]

    @property
    def user_ids(self) -> List[int]:
        return sorted(self.datasets)

    def __getitem__(self, owner_id: int) -> UserDataset:
        return self.datasets[owner_id]

    def __len__(self):
        return len(self.datasets)


def split_user(actions: Sequence[T], ratio: float = 0.7, mode: str = 'chronological',
               seed: int = 0) -> Tuple[List[T], List[T]]:
    """
    Split one user's actions into train and test.

    The first floor(ratio * n) actions go to train. In 'random' mode the
    train members are a seeded random subset instead; both parts keep the
    original order.
    """
    if not 0 < ratio < 1:
        raise ValueError(f"Split ratio must be in (0, 1), got {ratio}")
    if mode not in SPLIT_MODES:
        raise ValueError(f"Unknown split mode: {mode}")
    n = len(actions)
    n_train = math.floor(ratio * n)
    if mode == 'chronological':
        return list(actions[:n_train]), list(actions[n_train:])

    rng = np.random.default_rng(seed)
    chosen = set(rng.permutation(n)[:n_train].tolist())
    train = [a for i, a in enumerate(actions) if i in chosen]
    test = [a for i, a in enumerate(actions) if i not in chosen]
    return train, test


def imposter_quotas(n: int, imposter_ids: Iterable[int]) -> Dict[int, int]:
    """
    Spread n imposter draws over the imposter users.

    Each gets floor(n / k); the remainder goes one each to the lowest ids.
    """
    ids = sorted(imposter_ids)
    if not ids:
        raise DatasetError("At least 2 users are required to form imposters")
    base, remainder = divmod(n, len(ids))
    return {uid: base + (1 if rank < remainder else 0) for rank, uid in enumerate(ids)}


def _draw(pool: Sequence[Tuple[int, FeatureVector]], quota: int, seed: int,
          owner_id: int, split: str, imposter_id: int) -> List[Tuple[int, FeatureVector]]:
    if quota > len(pool):
        raise DatasetError(
            f"User {imposter_id} has {len(pool)} {split} actions but {quota} are needed "
            f"as imposters for user {owner_id} (short by {quota - len(pool)})"
        )
    rng = np.random.default_rng(np.random.SeedSequence([seed, owner_id, _SPLIT_STREAMS[split], imposter_id]))
    picked = np.sort(rng.choice(len(pool), size=quota, replace=False))
    return [pool[i] for i in picked.tolist()]


def _build_split(owner_id: int, splits: Mapping[int, UserSplit], split: str, seed: int) -> List[LabeledSample]:
    genuine = getattr(splits[owner_id], split)
    samples = [LabeledSample(fv, GENUINE, owner_id, ordinal) for ordinal, fv in genuine]
    quotas = imposter_quotas(len(genuine), [uid for uid in splits if uid != owner_id])
    for imposter_id, quota in quotas.items():
        pool = getattr(splits[imposter_id], split)
        for ordinal, fv in _draw(pool, quota, seed, owner_id, split, imposter_id):
            samples.append(LabeledSample(fv, IMPOSTER, imposter_id, ordinal))
    return samples


def build_user_dataset(owner_id: int, splits: Mapping[int, UserSplit], seed: int = 0) -> UserDataset:
    """
    Build the balanced dataset of one owner.

    Args:
        owner_id: The genuine user
        splits: Every user's train/test actions, keyed by user id
        seed: Master seed for imposter sampling

    Raises:
        DatasetError: When the owner is unknown, there are fewer than two
            users, or an imposter pool is smaller than its quota
    """
    if owner_id not in splits:
        raise DatasetError(f"No actions for user {owner_id}")
    dataset = UserDataset(
        owner_id=owner_id,
        train=_build_split(owner_id, splits, 'train', seed),
        test=_build_split(owner_id, splits, 'test', seed),
        seed=seed,
    )
    logger.debug(f"Built {dataset!r}")
    return dataset


def assemble_master(datasets: Iterable[UserDataset]) -> MasterDatasets:
    """Collect per-owner datasets and count their actions."""
    collected: Dict[int, UserDataset] = {}
    for dataset in datasets:
        if dataset.owner_id in collected:
            raise DatasetError(f"Duplicate dataset for user {dataset.owner_id}")
        collected[dataset.owner_id] = dataset
    if len(collected) < 2:
        raise DatasetError("At least 2 users are required to form imposters")

    summary: Dict[str, int] = {}
    total_train = total_test = 0
    for owner_id in sorted(collected):
        dataset = collected[owner_id]
        for split in ('train', 'test'):
            genuine = dataset.genuine_count(split)
            imposter = dataset.imposter_count(split)
            if genuine != imposter:
                raise DatasetError(
                    f"User {owner_id} {split} set is unbalanced: {genuine} genuine, {imposter} imposter"
                )
            summary[f"user_{owner_id}_{split}_genuine"] = genuine
        total_train += summary[f"user_{owner_id}_train_genuine"]
        total_test += summary[f"user_{owner_id}_test_genuine"]
    summary['users'] = len(collected)
    summary['total_train_genuine'] = total_train
    summary['total_test_genuine'] = total_test
    return MasterDatasets(datasets=collected, summary=summary)


def _split_frame(dataset: UserDataset, split: str):
    samples = dataset.samples(split)
    return features_frame(
        [s.features for s in samples],
        [s.source_user for s in samples],
        [s.label for s in samples],
        [s.ordinal for s in samples],
    )


def write_user_dataset(dataset: UserDataset, out_dir) -> List[str]:
    """Write train/test CSVs and a key=value summary for one owner."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for split in ('train', 'test'):
        path = os.path.join(out_dir, f"user_{dataset.owner_id}_{split}.csv")
        write_feature_csv(_split_frame(dataset, split), path)
        written.append(path)
    summary_path = os.path.join(out_dir, f"user_{dataset.owner_id}_summary.txt")
    lines = [
        f"owner_id={dataset.owner_id}",
        f"seed={dataset.seed}",
        f"train_genuine={dataset.genuine_count('train')}",
        f"train_imposter={dataset.imposter_count('train')}",
        f"test_genuine={dataset.genuine_count('test')}",
        f"test_imposter={dataset.imposter_count('test')}",
    ]
    atomic_write_text(summary_path, '\n'.join(lines) + '\n')
    written.append(summary_path)
    return written
