"""
Métricas de evaluación bajo desbalance de clases

- Curva precision-recall y AUPRC (regla escalonada de average precision)
- Curva ROC y AUC (trapecios)
- Diagrama de confiabilidad y ECE
- Export de timeline de scores y de intervalos de ataque
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from models.policy import DecisionPolicy
from models.report import CurvePoint, MethodMetrics, ReliabilityBin
from models.stream import ScoredEvent
from src.errors import ChronologyError, MetricUndefinedError
from src.mixture_risk import decide


TIMELINE_COLUMNS = ["t", "score", "threshold", "label", "alert"]


def _labeled_scores(scores, labels) -> Tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if s.shape[0] != y.shape[0]:
        raise MetricUndefinedError(f"scores ({s.shape[0]}) y labels ({y.shape[0]}) con longitudes distintas")
    if s.shape[0] == 0:
        raise MetricUndefinedError("no hay eventos para evaluar")
    if not np.all(np.isin(y, (0, 1))):
        raise MetricUndefinedError("los labels deben ser 0 o 1")
    if not np.all(np.isfinite(s)):
        raise MetricUndefinedError("scores no finitos")
    return s, y.astype(np.int64)


def _threshold_counts(scores: np.ndarray, labels: np.ndarray):
    """TP y FP acumulados en cada umbral distinto (descendente, empates agrupados)"""
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    y = labels[order]
    last_of_group = np.r_[np.flatnonzero(np.diff(s)), s.shape[0] - 1]
    tp = np.cumsum(y)[last_of_group]
    fp = (last_of_group + 1) - tp
    return s[last_of_group], tp, fp


def pr_curve(scores, labels) -> Tuple[List[CurvePoint], float]:
    """
    Curva precision-recall sobre todos los umbrales distintos

    AUPRC = sum_i (R_i - R_{i-1}) P_i, sin interpolación.

    Returns:
        (puntos con x=recall, y=precision; el primero es (0, 1, inf)), AUPRC
    """
    s, y = _labeled_scores(scores, labels)
    positives = int(y.sum())
    if positives == 0:
        raise MetricUndefinedError("AUPRC indefinida: no hay positivos")

    thresholds, tp, fp = _threshold_counts(s, y)
    precision = tp / (tp + fp)
    recall = tp / positives
    previous = np.r_[0.0, recall[:-1]]
    auprc = float(np.sum((recall - previous) * precision))

    curve = [CurvePoint(x=0.0, y=1.0, threshold=math.inf)]
    curve.extend(
        CurvePoint(x=float(r), y=float(p), threshold=float(th))
        for r, p, th in zip(recall, precision, thresholds)
    )
    return curve, min(1.0, max(0.0, auprc))


def roc_curve(scores, labels) -> Tuple[List[CurvePoint], float]:
    """
    Curva ROC (x=FPR, y=TPR) y AUC por trapecios

    Returns:
        (puntos desde (0, 0) hasta (1, 1)), AUC
    """
    s, y = _labeled_scores(scores, labels)
    positives = int(y.sum())
    negatives = int(y.shape[0] - positives)
    if positives == 0 or negatives == 0:
        raise MetricUndefinedError("ROC indefinida: se necesitan ambas clases")

    thresholds, tp, fp = _threshold_counts(s, y)
    tpr = np.r_[0.0, tp / positives]
    fpr = np.r_[0.0, fp / negatives]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))

    all_thresholds = np.r_[math.inf, thresholds]
    curve = [
        CurvePoint(x=float(x), y=float(v), threshold=float(th))
        for x, v, th in zip(fpr, tpr, all_thresholds)
    ]
    return curve, min(1.0, max(0.0, auc))


def reliability(probabilities, labels, bins: int = 10) -> Tuple[List[ReliabilityBin], float]:
    """
    Diagrama de confiabilidad con bins de igual ancho sobre (0, 1]

    El 0 cae en el primer bin. Los bins vacíos se reportan con count=0 y no
    entran en la suma del ECE.

    Returns:
        (bins, ECE)
    """
    if bins < 1:
        raise ValueError(f"bins debe ser >= 1, recibido {bins}")
    p, y = _labeled_scores(probabilities, labels)
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise MetricUndefinedError("las probabilidades deben estar en [0, 1]")

    edges = np.linspace(0.0, 1.0, bins + 1)
    index = np.clip(np.searchsorted(edges, p, side="left") - 1, 0, bins - 1)
    n = p.shape[0]

    result: List[ReliabilityBin] = []
    ece = 0.0
    for b in range(bins):
        mask = index == b
        count = int(mask.sum())
        if count == 0:
            result.append(ReliabilityBin(bin_low=float(edges[b]), bin_high=float(edges[b + 1]), count=0))
            continue
        mean_predicted = float(p[mask].mean())
        frequency = float(y[mask].mean())
        ece += count / n * abs(mean_predicted - frequency)
        result.append(
            ReliabilityBin(
                bin_low=float(edges[b]),
                bin_high=float(edges[b + 1]),
                mean_predicted=mean_predicted,
                empirical_frequency=frequency,
                count=count,
            )
        )
    return result, float(ece)


def timeline_export(events: Sequence[ScoredEvent], policy: DecisionPolicy) -> pd.DataFrame:
    """
    Registros (t, score, threshold, label, alert) de un stream puntuado

    La columna alert se recalcula con la política, así que siempre coincide
    con score > threshold.
    """
    previous: Optional[int] = None
    for event in events:
        if previous is not None and event.t <= previous:
            raise ChronologyError(f"evento t={event.t} llega después de t={previous}")
        previous = event.t

    return pd.DataFrame(
        {
            "t": pd.Series([e.t for e in events], dtype="int64"),
            "score": pd.Series([e.score for e in events], dtype="float64"),
            "threshold": pd.Series([policy.threshold] * len(events), dtype="float64"),
            "label": pd.Series([e.label for e in events], dtype="int64"),
            "alert": pd.Series([decide(e.score, policy) for e in events], dtype="bool"),
        },
        columns=TIMELINE_COLUMNS,
    )


def attack_intervals(labels, t=None) -> List[Tuple[int, int]]:
    """Rangos inclusivos (inicio, fin) de labels positivos contiguos"""
    y = np.asarray(labels).ravel().astype(bool)
    times = np.arange(y.shape[0]) if t is None else np.asarray(t).ravel()
    padded = np.r_[False, y, False].astype(np.int8)
    starts = np.flatnonzero(np.diff(padded) == 1)
    ends = np.flatnonzero(np.diff(padded) == -1) - 1
    return [(int(times[a]), int(times[b])) for a, b in zip(starts, ends)]


def precision_at_recall(curve: Sequence[CurvePoint], recall_level: float) -> float:
    """Mejor precisión alcanzable con recall >= recall_level"""
    candidates = [point.y for point in curve if point.x >= recall_level]
    return max(candidates) if candidates else 0.0


@dataclass
class MethodEvaluation:
    """Métricas y curvas de un método"""
    name: str
    metrics: MethodMetrics
    pr: List[CurvePoint]
    roc: List[CurvePoint]
    reliability: List[ReliabilityBin] = field(default_factory=list)


def evaluate_method(
    name: str,
    scores,
    labels,
    probabilities: bool = False,
    bins: int = 10,
) -> MethodEvaluation:
    """
    Evalúa un método sobre el segmento de test

    Args:
        name: Nombre del método
        scores: Scores (mayor = más anómalo)
        labels: Ground truth
        probabilities: Si los scores son probabilidades (habilita ECE)
        bins: Bins del diagrama de confiabilidad

    Returns:
        MethodEvaluation
    """
    pr, auprc = pr_curve(scores, labels)
    roc, auc = roc_curve(scores, labels)
    bins_out: List[ReliabilityBin] = []
    ece = None
    if probabilities:
        bins_out, ece = reliability(scores, labels, bins)

    y = np.asarray(labels)
    metrics = MethodMetrics(
        auprc=auprc,
        auc=auc,
        ece=ece,
        n=int(y.shape[0]),
        positives=int(y.sum()),
        precision_at_recall_50=precision_at_recall(pr, 0.5),
    )
    return MethodEvaluation(name=name, metrics=metrics, pr=pr, roc=roc, reliability=bins_out)
