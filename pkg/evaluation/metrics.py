"""
Verification metrics: confusion counts, ACC/FNR/FPR and the equal error rate.

Label 1 is the genuine user (positive), 0 an imposter. A sample is predicted
genuine iff its score is >= the threshold.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


class MetricError(ValueError):
    """Metrics are undefined for the given input."""


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("Confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.tn + self.fp


@dataclass(frozen=True)
class Rates:
    acc: float
    fnr: float
    fpr: float


@dataclass(frozen=True)
class EerResult:
    eer: float
    threshold: float
    fpr: float
    fnr: float

    @property
    def percent(self) -> float:
        return 100.0 * self.eer


def _as_arrays(scores, labels) -> Tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise MetricError(f"{scores.size} scores but {labels.size} labels")
    if scores.size == 0:
        raise MetricError("No samples to evaluate")
    if not np.all((labels == 0) | (labels == 1)):
        raise MetricError("Labels must be 0 or 1")
    return scores, labels.astype(np.int64)


def confusion(scores: Sequence[float], labels: Sequence[int], threshold: float = 0.5) -> ConfusionCounts:
    scores, labels = _as_arrays(scores, labels)
    predicted = scores >= threshold
    genuine = labels == 1
    return ConfusionCounts(
        tp=int(np.sum(predicted & genuine)),
        fp=int(np.sum(predicted & ~genuine)),
        tn=int(np.sum(~predicted & ~genuine)),
        fn=int(np.sum(~predicted & genuine)),
    )


def metrics(counts: ConfusionCounts) -> Rates:
    """
    ACC, FNR (genuine rejected) and FPR (imposter accepted).

    Raises:
        MetricError: When there are no genuine or no imposter samples
    """
    if counts.positives == 0:
        raise MetricError("No genuine samples: FNR is undefined")
    if counts.negatives == 0:
        raise MetricError("No imposter samples: FPR is undefined")
    return Rates(
        acc=(counts.tp + counts.tn) / counts.total,
        fnr=counts.fn / counts.positives,
        fpr=counts.fp / counts.negatives,
    )


def candidate_thresholds(scores: np.ndarray) -> np.ndarray:
    """0, the midpoints between consecutive distinct scores, and just above 1."""
    distinct = np.unique(scores)
    midpoints = (distinct[:-1] + distinct[1:]) / 2.0
    return np.unique(np.concatenate(([0.0], midpoints, [np.nextafter(1.0, 2.0)])))


def _error_counts(scores: np.ndarray, labels: np.ndarray, thresholds: np.ndarray):
    """False accepts and false rejects at each threshold."""
    pos = np.sort(scores[labels == 1])
    neg = np.sort(scores[labels == 0])
    if pos.size == 0 or neg.size == 0:
        missing = 'genuine' if pos.size == 0 else 'imposter'
        raise MetricError(f"No {missing} samples: EER is undefined")
    fn = np.searchsorted(pos, thresholds, side='left')
    fp = neg.size - np.searchsorted(neg, thresholds, side='left')
    return fp, fn, pos.size, neg.size


def compute_eer(scores: Sequence[float], labels: Sequence[int]) -> EerResult:
    """
    Equal error rate over a threshold sweep.

    The threshold minimizing |FPR - FNR| wins (compared exactly on counts;
    ties go to the lowest threshold) and the EER is the mean of the two rates
    there.
    """
    scores, labels = _as_arrays(scores, labels)
    thresholds = candidate_thresholds(scores)
    fp, fn, n_pos, n_neg = _error_counts(scores, labels, thresholds)
    gap = np.abs(fp * n_pos - fn * n_neg)
    best = int(np.argmin(gap))
    fpr = fp[best] / n_neg
    fnr = fn[best] / n_pos
    return EerResult(eer=(fpr + fnr) / 2.0, threshold=float(thresholds[best]), fpr=float(fpr), fnr=float(fnr))


def threshold_for_target_fpr(scores: Sequence[float], labels: Sequence[int], max_fpr: float) -> EerResult:
    """
    Lowest-FNR threshold whose FPR does not exceed max_fpr.

    For deployments where accepting an imposter costs more than rejecting
    the genuine user. The returned ``eer`` field carries the mean error at
    that threshold.
    """
    if not 0.0 <= max_fpr <= 1.0:
        raise ValueError(f"max_fpr must be in [0,1], got {max_fpr}")
    scores, labels = _as_arrays(scores, labels)
    thresholds = candidate_thresholds(scores)
    fp, fn, n_pos, n_neg = _error_counts(scores, labels, thresholds)
    allowed = fp <= max_fpr * n_neg
    fn_masked = np.where(allowed, fn, np.iinfo(np.int64).max)
    best = int(np.argmin(fn_masked))
    fpr = fp[best] / n_neg
    fnr = fn[best] / n_pos
    return EerResult(eer=(fpr + fnr) / 2.0, threshold=float(thresholds[best]), fpr=float(fpr), fnr=float(fnr))
