"""
Tests for verification metrics.
"""
from fractions import Fraction
import pytest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from evaluation.metrics import (
    ConfusionCounts,
    MetricError,
    candidate_thresholds,
    compute_eer,
    confusion,
    metrics,
    threshold_for_target_fpr,
)


def brute_force_eer(scores, labels):
    """Every distinct score plus one cut above them all, with exact rates."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    best = None
    for cut in sorted(set(scores)) + [float('inf')]:
        fnr = Fraction(sum(1 for s in pos if s < cut), len(pos))
        fpr = Fraction(sum(1 for s in neg if s >= cut), len(neg))
        gap = abs(fpr - fnr)
        if best is None or gap < best[0]:
            best = (gap, (fpr + fnr) / 2)
    return best[1]


def counting_eer(scores, labels):
    """Same cuts as brute_force_eer, compared in integer counts so large sets stay fast."""
    scores, labels = np.asarray(scores), np.asarray(labels)
    pos, neg = scores[labels == 1], scores[labels == 0]
    cuts = np.append(np.unique(scores), np.inf)
    fn = (pos[None, :] < cuts[:, None]).sum(axis=1)
    fp = (neg[None, :] >= cuts[:, None]).sum(axis=1)
    best = int(np.argmin(np.abs(fp * len(pos) - fn * len(neg))))
    return (fp[best] / len(neg) + fn[best] / len(pos)) / 2


class TestConfusion:
    """Tests for confusion counts."""

    def test_separated(self):
        """Test two separated samples."""
        assert confusion([0.9, 0.1], [1, 0], 0.5) == ConfusionCounts(tp=1, fp=0, tn=1, fn=0)

    def test_false_accept(self):
        """Test a false accept."""
        counts = confusion([0.9, 0.9], [1, 0], 0.5)
        assert counts.tp == 1
        assert counts.fp == 1

    def test_ten_samples(self):
        """Test counting ten samples."""
        scores = [0.9, 0.8, 0.7, 0.6, 0.3, 0.5, 0.6, 0.1, 0.2, 0.4]
        labels = [1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
        counts = confusion(scores, labels, 0.5)
        assert counts.fn == 1
        assert counts.fp == 2
        assert counts.total == 10

    def test_tie_is_accepted(self):
        """Test that a tie is accepted."""
        assert confusion([0.5], [0], 0.5).fp == 1

    def test_length_mismatch(self):
        """Test rejecting a length mismatch."""
        with pytest.raises(MetricError):
            confusion([0.1, 0.2], [1], 0.5)

    def test_bad_labels(self):
        """Test rejecting labels other than 0 and 1."""
        with pytest.raises(MetricError):
            confusion([0.1, 0.2], [1, 3], 0.5)

    def test_negative_counts(self):
        """Test rejecting negative counts."""
        with pytest.raises(ValueError):
            ConfusionCounts(tp=-1, fp=0, tn=0, fn=0)

    def test_counting_oracle(self):
        """Test counts against direct counting on large sets."""
        rng = np.random.default_rng(5)
        for _ in range(1000):
            n = int(rng.integers(2, 501))
            scores = rng.random(n).round(2)
            labels = rng.integers(0, 2, size=n)
            threshold = float(np.round(rng.random(), 2))
            counts = confusion(scores, labels, threshold)
            expected = {'tp': 0, 'fp': 0, 'tn': 0, 'fn': 0}
            for s, l in zip(scores.tolist(), labels.tolist()):
                accepted = s >= threshold
                key = ('t' if accepted == (l == 1) else 'f') + ('p' if accepted else 'n')
                expected[key] += 1
            assert (counts.tp, counts.fp, counts.tn, counts.fn) == (
                expected['tp'], expected['fp'], expected['tn'], expected['fn'])


class TestRates:
    """Tests for ACC, FNR and FPR."""

    def test_perfect(self):
        """Test perfect rates."""
        rates = metrics(ConfusionCounts(tp=5, fp=0, tn=5, fn=0))
        assert (rates.acc, rates.fnr, rates.fpr) == (1.0, 0.0, 0.0)

    def test_arithmetic(self):
        """Test rate arithmetic."""
        rates = metrics(ConfusionCounts(tp=4, fp=2, tn=3, fn=1))
        assert rates.acc == pytest.approx(0.7)
        assert rates.fnr == pytest.approx(0.2)
        assert rates.fpr == pytest.approx(0.4)

    def test_balanced_identity_recorded_average(self):
        """Test the balanced identity on a recorded average."""
        # 10000 genuine all accepted, 1439 of 10000 imposters accepted
        rates = metrics(ConfusionCounts(tp=10000, fp=1439, tn=8561, fn=0))
        assert rates.acc == pytest.approx(0.92805)
        assert rates.acc == pytest.approx(0.9273, abs=1e-3)

    def test_balanced_identity(self):
        """Test the balanced accuracy identity."""
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(1, 50))
            scores = rng.random(2 * n)
            labels = np.array([1] * n + [0] * n)
            rates = metrics(confusion(scores, labels, float(rng.random())))
            assert rates.acc == pytest.approx(1 - (rates.fpr + rates.fnr) / 2)

    def test_no_genuine(self):
        """Test rates without genuine samples."""
        with pytest.raises(MetricError) as info:
            metrics(ConfusionCounts(tp=0, fp=1, tn=1, fn=0))
        assert 'genuine' in str(info.value)

    def test_no_imposter(self):
        """Test rates without imposter samples."""
        with pytest.raises(MetricError) as info:
            metrics(ConfusionCounts(tp=1, fp=0, tn=0, fn=1))
        assert 'imposter' in str(info.value)


class TestEqualErrorRate:
    """Tests for compute_eer."""

    def test_separated(self):
        """Test separated scores."""
        result = compute_eer([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
        assert result.eer == 0.0
        assert 0.2 < result.threshold <= 0.8

    def test_indistinguishable(self):
        """Test indistinguishable scores."""
        result = compute_eer([0.5] * 6, [1, 1, 1, 0, 0, 0])
        assert result.eer == 0.5

    def test_worked_example(self):
        """Test a worked example."""
        result = compute_eer([0.9, 0.8, 0.4, 0.7, 0.2, 0.1], [1, 1, 1, 0, 0, 0])
        assert result.eer == pytest.approx(1 / 3)
        assert result.fpr == pytest.approx(1 / 3)
        assert result.fnr == pytest.approx(1 / 3)
        assert result.threshold == pytest.approx(0.55)
        assert result.percent == pytest.approx(100 / 3)

    def test_candidates(self):
        """Test the candidate thresholds."""
        thresholds = candidate_thresholds(np.array([0.4, 0.2, 0.4, 0.8]))
        assert thresholds[0] == 0.0
        assert thresholds[1:3].tolist() == pytest.approx([0.3, 0.6])
        assert thresholds[-1] > 1.0
        assert len(thresholds) == 4

    def test_brute_force_oracle(self):
        """Test the EER against exact rates on small sets."""
        rng = np.random.default_rng(1)
        for _ in range(1000):
            n = int(rng.integers(2, 12))
            scores = (rng.integers(0, 6, size=n) / 5.0).tolist()
            labels = [1, 0] + rng.integers(0, 2, size=n - 2).tolist()
            result = compute_eer(scores, labels)
            assert result.eer == pytest.approx(float(brute_force_eer(scores, labels)), abs=1e-12)

    def test_counting_oracle_large_sets(self):
        """Test the EER against integer counts on large sets."""
        rng = np.random.default_rng(6)
        for _ in range(1000):
            n = int(rng.integers(2, 501))
            scores = rng.random(n).round(2)
            labels = rng.integers(0, 2, size=n)
            labels[:2] = [1, 0]
            result = compute_eer(scores, labels)
            assert result.eer == pytest.approx(counting_eer(scores, labels), abs=1e-12)

    def test_rates_monotone_in_threshold(self):
        """Test that rates are monotone in the threshold."""
        rng = np.random.default_rng(2)
        scores = rng.random(60)
        labels = rng.integers(0, 2, size=60)
        labels[:2] = [0, 1]
        previous = None
        for threshold in candidate_thresholds(scores):
            rates = metrics(confusion(scores, labels, threshold))
            if previous is not None:
                assert rates.fpr <= previous.fpr
                assert rates.fnr >= previous.fnr
            previous = rates

    def test_gap_bound_with_distinct_scores(self):
        """Test the rate gap with distinct scores."""
        rng = np.random.default_rng(3)
        for _ in range(100):
            n_pos = int(rng.integers(1, 40))
            n_neg = int(rng.integers(1, 40))
            scores = rng.random(n_pos + n_neg)
            labels = np.array([1] * n_pos + [0] * n_neg)
            result = compute_eer(scores, labels)
            assert abs(result.fpr - result.fnr) <= max(1 / n_pos, 1 / n_neg) + 1e-12

    def test_single_class(self):
        """Test rejecting a single class."""
        with pytest.raises(MetricError):
            compute_eer([0.1, 0.9], [1, 1])

    def test_empty(self):
        """Test rejecting empty input."""
        with pytest.raises(MetricError):
            compute_eer([], [])


class TestTargetFpr:
    """Tests for threshold_for_target_fpr."""

    def test_respects_target_and_minimizes_fnr(self):
        """Test meeting the target and minimizing FNR."""
        rng = np.random.default_rng(4)
        for _ in range(100):
            scores = rng.random(40)
            labels = np.array([1] * 20 + [0] * 20)
            target = float(rng.choice([0.0, 0.05, 0.1, 0.25, 0.5]))
            result = threshold_for_target_fpr(scores, labels, target)
            assert result.fpr <= target + 1e-12
            best_fnr = min(
                metrics(confusion(scores, labels, t)).fnr
                for t in candidate_thresholds(scores)
                if metrics(confusion(scores, labels, t)).fpr <= target
            )
            assert result.fnr == best_fnr

    def test_zero_target(self):
        """Test a zero FPR target."""
        result = threshold_for_target_fpr([0.9, 0.6, 0.7, 0.1], [1, 1, 0, 0], 0.0)
        assert result.fpr == 0.0
        assert result.fnr == 0.5
        assert result.threshold == pytest.approx(0.8)

    def test_invalid_target(self):
        """Test rejecting an invalid target."""
        with pytest.raises(ValueError):
            threshold_for_target_fpr([0.9, 0.1], [1, 0], 1.5)
