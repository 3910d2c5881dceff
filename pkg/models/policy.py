"""
Modelos Pydantic para la política de decisión y el error budget SRE
"""
from decimal import Decimal
from typing import Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class DecisionPolicy(BaseModel):
    """Costos, tasa base y umbral derivado (cacheado)"""
    model_config = ConfigDict(frozen=True)

    cost_fp: float = Field(gt=0.0, default=1.0)
    cost_fn: float = Field(gt=0.0, default=10.0)
    base_rate: float = Field(gt=0.0, lt=1.0, default=0.01)
    threshold: Optional[float] = None

    @model_validator(mode="before")
    @classmethod
    def _derive(cls, data):
        from src.mixture_risk import derive_threshold

        if not isinstance(data, dict):
            return data
        data = dict(data)
        try:
            derived = derive_threshold(
                float(data.get("cost_fp", 1.0)),
                float(data.get("cost_fn", 10.0)),
                float(data.get("base_rate", 0.01)),
            )
        except (TypeError, ValueError):
            # Los validadores de campo reportan el error concreto
            return data
        supplied = data.get("threshold")
        if supplied is not None and abs(float(supplied) - derived) > 1e-12:
            raise ValueError(
                f"threshold {supplied} no coincide con el derivado de los costos ({derived})"
            )
        data["threshold"] = derived
        return data

    @classmethod
    def from_costs(cls, cost_fp: float, cost_fn: float, base_rate: float) -> "DecisionPolicy":
        """Construye la política calculando el umbral"""
        return cls(cost_fp=cost_fp, cost_fn=cost_fn, base_rate=base_rate)

    @classmethod
    def sre_example(cls) -> "DecisionPolicy":
        """Política del ejemplo SRE: 1 min por falsa alarma, 10 min por incidente, rho=0.01"""
        return cls(cost_fp=1.0, cost_fn=10.0, base_rate=0.01)


class ErrorBudget(BaseModel):
    """Error budget derivado de un SLO de disponibilidad"""
    model_config = ConfigDict(frozen=True)

    slo: float = Field(gt=0.0, le=1.0, default=0.999)
    period_minutes: float = Field(gt=0.0, default=43200.0)

    @computed_field
    @property
    def budget_minutes(self) -> float:
        # En decimal: (1 - 0.999) * 43200 es 43.2 y no 43.20000000000004
        return float((1 - Decimal(str(self.slo))) * Decimal(str(self.period_minutes)))


class BudgetReportV1(BaseModel):
    """Reporte del comando budget"""
    schema_version: Literal["budget_report.v1"] = "budget_report.v1"
    slo: float
    period_minutes: float
    budget_minutes: float = Field(ge=0.0)
    cost_fp: float
    cost_fn: float
    base_rate: float
    threshold: float = Field(gt=0.0, lt=1.0)
    max_false_alerts: int = Field(ge=0)
    max_missed_incidents: int = Field(ge=0)


class BudgetStatus(BaseModel):
    """Consumo del budget por las decisiones sobre un stream etiquetado"""
    slo: float
    period_minutes: float
    budget_minutes: float = Field(ge=0.0)
    burn_minutes: float = Field(ge=0.0)
    remaining_minutes: float
    burn_fraction: Optional[float] = None
    exhausted: bool
    max_false_alerts: int = Field(ge=0)
    max_missed_incidents: int = Field(ge=0)
