"""
Modelos Pydantic para reportes de evaluación, detección y tuning
"""
from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, Field

from models.policy import BudgetStatus


class CurvePoint(BaseModel):
    """Punto de una curva PR (x=recall, y=precision) o ROC (x=FPR, y=TPR)"""
    x: float = Field(ge=0.0, le=1.0)
    y: float = Field(ge=0.0, le=1.0)
    threshold: float


class ReliabilityBin(BaseModel):
    """Bin (low, high] de un diagrama de confiabilidad"""
    bin_low: float
    bin_high: float
    mean_predicted: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    empirical_frequency: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    count: int = Field(ge=0)


class MethodMetrics(BaseModel):
    """Métricas de un método sobre el segmento de test"""
    auprc: float = Field(ge=0.0, le=1.0)
    auc: float = Field(ge=0.0, le=1.0)
    ece: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    n: int = Field(ge=1)
    positives: int = Field(ge=1)
    precision_at_recall_50: float = Field(ge=0.0, le=1.0)


class EvaluationReportV1(BaseModel):
    """Resumen JSON del comando eval"""
    schema_version: Literal["evaluation_report.v1"] = "evaluation_report.v1"
    seed: int
    methods: Dict[str, MethodMetrics]


class DetectSummaryV1(BaseModel):
    """Resumen JSON del comando detect"""
    schema_version: Literal["detect_summary.v1"] = "detect_summary.v1"
    seed: int
    n_events: int = Field(ge=0)
    positives: int = Field(ge=0)
    alerts: int = Field(ge=0)
    true_positives: int = Field(ge=0)
    false_positives: int = Field(ge=0)
    false_negatives: int = Field(ge=0)
    threshold: float = Field(gt=0.0, lt=1.0)
    cost_fp: float
    cost_fn: float
    base_rate: float
    mixing_weight: float
    budget: BudgetStatus


class TuningCell(BaseModel):
    """Resultado de una celda de la grilla"""
    hazard: float
    scale_inflation: float
    mixing_weight: float
    objective: Literal["auprc", "log_evidence"]
    value: Optional[float] = None
    status: Literal["ok", "excluded"] = "ok"
    # Motivo de la exclusión (None si la celda es válida)
    reason: Optional[str] = None

    @property
    def is_valid(self) -> bool:
        return self.status == "ok" and self.value is not None


class SensitivityRow(BaseModel):
    """Fila de la tabla de sensibilidad de umbral"""
    cost_fp: float
    cost_fn: float
    base_rate: float
    threshold: float
    precision: float
    recall: float
    false_positives: int
    false_negatives: int
    budget_burn_minutes: float


class TuningResult(BaseModel):
    """Mejor celda más la tabla completa en orden de grilla"""
    best: TuningCell
    table: List[TuningCell]
