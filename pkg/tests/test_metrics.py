"""
Pruebas unitarias para métricas y exports de evaluación
"""
import math
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import numpy as np

from models.policy import DecisionPolicy
from models.stream import ScoredEvent
from src.errors import ChronologyError, MetricUndefinedError
from src.metrics import (
    TIMELINE_COLUMNS,
    attack_intervals,
    evaluate_method,
    pr_curve,
    precision_at_recall,
    reliability,
    roc_curve,
    timeline_export,
)


def sweep_average_precision(scores, labels) -> float:
    """AP por barrido explícito de umbrales (sin vectorizar)"""
    scores = list(scores)
    labels = list(labels)
    positives = sum(labels)
    ap, previous_recall = 0.0, 0.0
    for threshold in sorted(set(scores), reverse=True):
        tp = sum(1 for s, y in zip(scores, labels) if s >= threshold and y == 1)
        fp = sum(1 for s, y in zip(scores, labels) if s >= threshold and y == 0)
        recall = tp / positives
        ap += (recall - previous_recall) * tp / (tp + fp)
        previous_recall = recall
    return ap


def mann_whitney_auc(scores, labels) -> float:
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


class TestPrecisionRecall(unittest.TestCase):
    """Pruebas para la curva PR y AUPRC"""

    def test_hand_traced_example(self):
        _, auprc = pr_curve([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
        self.assertAlmostEqual(auprc, 0.5 * (1.0 + 2.0 / 3.0), delta=1e-9)

    def test_perfect_separation(self):
        _, auprc = pr_curve([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
        self.assertEqual(auprc, 1.0)

    def test_all_equal_scores(self):
        """Un solo umbral: AUPRC = prevalencia"""
        labels = [1, 0, 0, 0, 1, 0, 0, 0, 0, 0]
        _, auprc = pr_curve([0.3] * 10, labels)
        self.assertAlmostEqual(auprc, 0.2, places=12)

    def test_matches_threshold_sweep(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            n = int(rng.integers(5, 60))
            labels = rng.integers(0, 2, size=n)
            labels[0] = 1
            scores = np.round(rng.random(n), 1)
            _, auprc = pr_curve(scores, labels)
            self.assertAlmostEqual(auprc, sweep_average_precision(scores, labels), delta=1e-12)

    def test_curve_endpoints(self):
        curve, _ = pr_curve([0.9, 0.4, 0.3, 0.8], [1, 0, 1, 0])
        self.assertEqual((curve[0].x, curve[0].y), (0.0, 1.0))
        self.assertTrue(math.isinf(curve[0].threshold))
        self.assertEqual(curve[-1].x, 1.0)
        self.assertAlmostEqual(curve[-1].y, 0.5)

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(1)
        scores = rng.random(200)
        labels = (rng.random(200) < 0.2).astype(int)
        _, base = pr_curve(scores, labels)
        _, mapped = pr_curve(np.exp(3.0 * scores) + 7.0, labels)
        self.assertAlmostEqual(base, mapped, places=12)

    def test_random_scores_near_prevalence(self):
        rng = np.random.default_rng(2)
        labels = np.zeros(1000, dtype=int)
        labels[:50] = 1
        values = [pr_curve(rng.random(1000), rng.permutation(labels))[1] for _ in range(200)]
        self.assertLess(abs(np.mean(values) - 0.05), 0.02)

    def test_undefined_without_positives(self):
        with self.assertRaises(MetricUndefinedError):
            pr_curve([0.1, 0.2], [0, 0])
        with self.assertRaises(MetricUndefinedError):
            pr_curve([], [])
        with self.assertRaises(MetricUndefinedError):
            pr_curve([0.1, 0.2], [1])

    def test_precision_at_recall(self):
        curve, _ = pr_curve([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
        self.assertEqual(precision_at_recall(curve, 0.5), 1.0)
        self.assertAlmostEqual(precision_at_recall(curve, 1.0), 2.0 / 3.0)


class TestRoc(unittest.TestCase):
    """Pruebas para la curva ROC y AUC"""

    def test_mann_whitney_example(self):
        _, auc = roc_curve([3.0, 2.0, 1.0], [1, 0, 1])
        self.assertAlmostEqual(auc, 0.5, delta=1e-9)

    def test_all_equal_scores(self):
        _, auc = roc_curve([1.0] * 6, [1, 0, 1, 0, 0, 1])
        self.assertEqual(auc, 0.5)

    def test_matches_mann_whitney(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            n = int(rng.integers(4, 50))
            labels = rng.integers(0, 2, size=n)
            labels[:2] = (0, 1)
            scores = np.round(rng.random(n), 1)
            _, auc = roc_curve(scores, labels)
            self.assertAlmostEqual(auc, mann_whitney_auc(scores, labels), delta=1e-12)

    def test_negation_flips_auc(self):
        rng = np.random.default_rng(4)
        scores = rng.random(100)
        labels = (rng.random(100) < 0.3).astype(int)
        _, auc = roc_curve(scores, labels)
        _, flipped = roc_curve(-scores, labels)
        self.assertAlmostEqual(auc + flipped, 1.0, places=12)

    def test_curve_endpoints(self):
        curve, _ = roc_curve([0.5, 0.1, 0.9], [1, 0, 0])
        self.assertEqual((curve[0].x, curve[0].y), (0.0, 0.0))
        self.assertEqual((curve[-1].x, curve[-1].y), (1.0, 1.0))
        xs = [p.x for p in curve]
        self.assertEqual(xs, sorted(xs))

    def test_single_class(self):
        with self.assertRaises(MetricUndefinedError):
            roc_curve([0.1, 0.5], [1, 1])


class TestReliability(unittest.TestCase):
    """Pruebas para el diagrama de confiabilidad"""

    def test_hand_traced_example(self):
        _, ece = reliability([0.9, 0.9, 0.1, 0.1], [1, 0, 0, 0], bins=10)
        self.assertAlmostEqual(ece, 0.25, delta=1e-9)

    def test_perfect_confidence(self):
        _, ece = reliability([1.0] * 5, [1] * 5)
        self.assertEqual(ece, 0.0)

    def test_half_and_half(self):
        bins, ece = reliability([0.5] * 4, [1, 0, 1, 0])
        self.assertEqual(ece, 0.0)
        self.assertEqual(sum(b.count for b in bins), 4)

    def test_zero_goes_to_first_bin(self):
        bins, _ = reliability([0.0, 0.0, 1.0], [0, 0, 1], bins=4)
        self.assertEqual(bins[0].count, 2)
        self.assertEqual(bins[-1].count, 1)
        self.assertIsNone(bins[1].mean_predicted)
        self.assertEqual(bins[1].count, 0)

    def test_out_of_range(self):
        with self.assertRaises(MetricUndefinedError):
            reliability([1.2, 0.3], [1, 0])


class TestExports(unittest.TestCase):
    """Pruebas para timeline e intervalos"""

    def _event(self, t, score, label=0):
        return ScoredEvent(t=t, features=[0.0], score=score, alert=False, label=label)

    def test_empty_timeline(self):
        frame = timeline_export([], DecisionPolicy.sre_example())
        self.assertEqual(list(frame.columns), TIMELINE_COLUMNS)
        self.assertEqual(len(frame), 0)

    def test_alert_recomputed(self):
        policy = DecisionPolicy.sre_example()
        frame = timeline_export([self._event(0, 0.95, 1), self._event(1, 0.5)], policy)
        self.assertEqual(frame["alert"].tolist(), [True, False])
        self.assertAlmostEqual(frame["threshold"].iloc[0], 0.908257, places=6)

    def test_out_of_order(self):
        with self.assertRaises(ChronologyError):
            timeline_export([self._event(5, 0.1), self._event(3, 0.2)], DecisionPolicy.sre_example())
        with self.assertRaises(ChronologyError):
            timeline_export([self._event(5, 0.1), self._event(5, 0.2)], DecisionPolicy.sre_example())

    def test_attack_intervals(self):
        self.assertEqual(attack_intervals([0, 1, 1, 0, 1]), [(1, 2), (4, 4)])
        self.assertEqual(attack_intervals([0, 0]), [])
        self.assertEqual(attack_intervals([1, 1, 0], t=[10, 11, 12]), [(10, 11)])

    def test_evaluate_method(self):
        evaluation = evaluate_method("x", [0.9, 0.1, 0.8, 0.2], [1, 0, 1, 0], probabilities=True)
        self.assertEqual(evaluation.metrics.auprc, 1.0)
        self.assertEqual(evaluation.metrics.auc, 1.0)
        self.assertIsNotNone(evaluation.metrics.ece)
        self.assertEqual(evaluation.metrics.positives, 2)
        raw = evaluate_method("y", [9.0, 1.0, 8.0, 2.0], [1, 0, 1, 0])
        self.assertIsNone(raw.metrics.ece)
        self.assertEqual(raw.reliability, [])


if __name__ == '__main__':
    unittest.main()
