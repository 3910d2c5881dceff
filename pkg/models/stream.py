"""
Modelos Pydantic para streams de eventos
"""
import math
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


DEFAULT_BENIGN_VALUES = ["0", "benign", "BENIGN", "normal"]


class SyntheticConfig(BaseModel):
    """Configuración del generador sintético (drift + ráfagas de ataque)"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["synthetic"] = "synthetic"
    dimension: int = Field(ge=1, default=4)
    length: int = Field(ge=1, default=20000)
    benign_mean_drift_rate: float = Field(ge=0.0, default=0.002)
    attack_rate: float = Field(ge=0.0, lt=0.5, default=0.01)
    attack_shift: float = Field(ge=0.0, default=4.0)
    attack_scale: float = Field(gt=0.0, default=1.5)
    burst_length_mean: float = Field(ge=1.0, default=20.0)
    changepoint_hazard: float = Field(gt=0.0, lt=1.0, default=0.001)
    regime_spread: float = Field(ge=0.0, default=0.5)
    seed: int = 0


class StreamSettings(BaseModel):
    """Fuente, columnas y partición cronológica de un stream etiquetado"""
    source: Union[SyntheticConfig, str]
    feature_columns: List[str] = Field(default_factory=list)
    label_column: str = "label"
    timestamp_column: Optional[str] = None
    split_fractions: Tuple[float, float, float] = (0.5, 0.2, 0.3)
    benign_values: List[str] = Field(default_factory=lambda: list(DEFAULT_BENIGN_VALUES))

    @field_validator("split_fractions")
    @classmethod
    def _check_fractions(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(f <= 0 for f in value):
            raise ValueError(f"cada fracción debe ser > 0: {value}")
        if abs(sum(value) - 1.0) > 1e-9:
            raise ValueError(f"las fracciones deben sumar 1: {value}")
        return value

    @property
    def is_synthetic(self) -> bool:
        return isinstance(self.source, SyntheticConfig)


class ScoredEvent(BaseModel):
    """Evento procesado por el detector"""
    t: int = Field(ge=0)
    features: List[float]
    score: float = Field(ge=0.0, le=1.0)
    alert: bool
    label: Literal[0, 1]
    map_run_length: Optional[int] = Field(default=None, ge=0)


class StandardizationParams(BaseModel):
    """Media y desvío por feature, calculados sólo sobre el segmento de entrenamiento"""
    feature_names: List[str]
    mean: List[float]
    std: List[float]
    zero_variance: List[bool]

    @model_validator(mode="after")
    def _check_lengths(self) -> "StandardizationParams":
        n = len(self.feature_names)
        if not (len(self.mean) == len(self.std) == len(self.zero_variance) == n):
            raise ValueError("parámetros de estandarización con longitudes distintas")
        if not all(math.isfinite(v) for v in self.mean + self.std):
            raise ValueError("parámetros de estandarización no finitos")
        return self

    @property
    def flagged_features(self) -> List[str]:
        return [name for name, flag in zip(self.feature_names, self.zero_variance) if flag]

    def apply(self, features) -> np.ndarray:
        """Transforma una matriz (n, d); las features de varianza cero quedan en 0"""
        X = np.asarray(features, dtype=float)
        zero = np.asarray(self.zero_variance, dtype=bool)
        std = np.where(zero, 1.0, np.asarray(self.std, dtype=float))
        Z = (X - np.asarray(self.mean, dtype=float)) / std
        Z[..., zero] = 0.0
        return Z
