"""
Búsqueda de hiperparámetros en la ventana de validación y sensibilidad del umbral

Los costos no se ajustan: vienen de la política SRE y sólo se usan para la
tabla de sensibilidad.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from detectors.bocpd_detector import BocpdDetector
from models.detector import DetectorSettings, TuningGrid
from models.policy import DecisionPolicy
from models.report import SensitivityRow, TuningCell, TuningResult
from models.stream import ScoredEvent
from src.errors import CentinelaError, NoValidCellsError
from src.metrics import pr_curve
from src.mixture_risk import budget_burn


logger = logging.getLogger("Tuner")


def _evaluate_cell(
    cell: Tuple[float, float, Optional[float]],
    grid: TuningGrid,
    base_settings: DetectorSettings,
    default_mixing_weight: float,
    train,
    validation,
) -> TuningCell:
    hazard, inflation, weight = cell
    mixing_weight = weight if weight is not None else (base_settings.mixing_weight or default_mixing_weight)
    settings = base_settings.model_copy(
        update={"hazard": hazard, "scale_inflation": inflation, "mixing_weight": mixing_weight}
    )
    record = dict(hazard=hazard, scale_inflation=inflation, mixing_weight=mixing_weight, objective=grid.objective)
    try:
        detector = BocpdDetector(settings, mixing_weight).fit(train.features, train.labels)
        steps = detector.run(validation.features)
        if grid.objective == "log_evidence":
            value = float(sum(s.log_evidence for s in steps))
        else:
            _, value = pr_curve([s.probability for s in steps], validation.labels)
    except CentinelaError as e:
        logger.warning(f"Celda excluida (h={hazard}, s={inflation}, pi={mixing_weight}): {e}")
        return TuningCell(**record, value=None, status="excluded", reason=str(e))
    logger.info(f"Celda h={hazard}, s={inflation}, pi={mixing_weight:.4f}: {grid.objective}={value:.6f}")
    return TuningCell(**record, value=value)


def tune(
    grid: TuningGrid,
    train,
    validation,
    base_settings: Optional[DetectorSettings] = None,
    default_mixing_weight: float = 0.99,
    n_jobs: int = 1,
) -> TuningResult:
    """
    Evalúa cada celda de la grilla sobre la ventana de validación

    Cada celda ajusta priors en train y corre el detector sobre validación.
    Mejor celda: máximo objetivo; empates por hazard menor y luego inflación
    menor.

    Args:
        grid: Grilla y objetivo
        train: EventStream de entrenamiento
        validation: EventStream de validación
        base_settings: Resto de hiperparámetros del detector
        default_mixing_weight: pi cuando ni la grilla ni los settings lo fijan
        n_jobs: Hilos para evaluar celdas en paralelo

    Returns:
        TuningResult con la tabla en orden de grilla
    """
    if len(train) == 0 or len(validation) == 0:
        raise CentinelaError("tune requiere segmentos de entrenamiento y validación no vacíos")
    base_settings = base_settings or DetectorSettings()
    cells = grid.cells()
    logger.info(f"Tuning: {len(cells)} celdas, objetivo={grid.objective}, n_jobs={n_jobs}")

    def run(cell):
        return _evaluate_cell(cell, grid, base_settings, default_mixing_weight, train, validation)

    if n_jobs > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as executor:
            table = list(executor.map(run, cells))
    else:
        table = [run(cell) for cell in cells]

    valid = [c for c in table if c.is_valid]
    if not valid:
        raise NoValidCellsError(f"ninguna celda válida para el objetivo {grid.objective}")
    best = min(valid, key=lambda c: (-c.value, c.hazard, c.scale_inflation))
    logger.info(f"Mejor celda: h={best.hazard}, s={best.scale_inflation}, valor={best.value:.6f}")
    return TuningResult(best=best, table=table)


def error_counts(scores, labels, threshold: float) -> Tuple[int, int, int]:
    """(TP, FP, FN) alertando con score > threshold"""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(bool)
    alerts = s > threshold
    return int(np.sum(alerts & y)), int(np.sum(alerts & ~y)), int(np.sum(~alerts & y))


def threshold_sensitivity(
    policy_grid: Iterable[Tuple[float, float, float]],
    scored: Sequence[ScoredEvent],
) -> List[SensitivityRow]:
    """
    Precisión, recall y budget quemado para cada política (C_FP, C_FN, rho)

    Sin alertas la precisión se informa como 1; sin positivos el recall es 0.
    """
    scores = [e.score for e in scored]
    labels = [e.label for e in scored]
    rows = []
    for cost_fp, cost_fn, base_rate in policy_grid:
        policy = DecisionPolicy.from_costs(cost_fp, cost_fn, base_rate)
        threshold = policy.threshold
        tp, fp, fn = error_counts(scores, labels, threshold)
        rows.append(
            SensitivityRow(
                cost_fp=cost_fp,
                cost_fn=cost_fn,
                base_rate=base_rate,
                threshold=threshold,
                precision=tp / (tp + fp) if tp + fp else 1.0,
                recall=tp / (tp + fn) if tp + fn else 0.0,
                false_positives=fp,
                false_negatives=fn,
                budget_burn_minutes=budget_burn(fp, fn, policy),
            )
        )
    return rows
