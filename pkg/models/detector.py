"""
Modelos Pydantic para la configuración del detector BOCPD
"""
import math
from typing import Annotated, List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import settings


class NigParams(BaseModel):
    """Parámetros Normal-Inversa-Gamma de una dimensión"""
    model_config = ConfigDict(frozen=True)

    mu0: float = 0.0
    kappa0: float = Field(gt=0.0, default=1.0)
    alpha0: float = Field(gt=0.0, default=1.0)
    beta0: float = Field(gt=0.0, default=1.0)

    @model_validator(mode="after")
    def _check_finite(self) -> "NigParams":
        if not all(math.isfinite(v) for v in (self.mu0, self.kappa0, self.alpha0, self.beta0)):
            raise ValueError("los parámetros NIG deben ser finitos")
        return self


class HazardFunction(BaseModel):
    """Hazard constante: probabilidad de changepoint por paso"""
    model_config = ConfigDict(frozen=True)

    hazard: float = Field(gt=0.0, lt=1.0)


class BocpdConfig(BaseModel):
    """Configuración completa del motor de run-length"""
    model_config = ConfigDict(frozen=True)

    hazard: HazardFunction
    prune_threshold: float = Field(lt=0.0, default=settings.PRUNE_THRESHOLD)
    max_run_length: Optional[int] = Field(ge=1, default=settings.MAX_RUN_LENGTH)
    benign_prior: List[NigParams] = Field(min_length=1)
    malicious_prior: List[NigParams] = Field(min_length=1)
    mixing_weight: float = Field(gt=0.0, lt=1.0)
    assignment: Literal["soft", "hard"] = "soft"

    @model_validator(mode="after")
    def _check_dimensions(self) -> "BocpdConfig":
        if len(self.benign_prior) != len(self.malicious_prior):
            raise ValueError(
                f"prior benigno ({len(self.benign_prior)} dims) y malicioso "
                f"({len(self.malicious_prior)} dims) difieren en dimensión"
            )
        return self

    @property
    def dimension(self) -> int:
        return len(self.benign_prior)


class DetectorSettings(BaseModel):
    """Hiperparámetros del detector tal como aparecen en el RunConfig"""
    hazard: float = Field(gt=0.0, lt=1.0, default=0.01)
    prune_threshold: float = Field(lt=0.0, default=settings.PRUNE_THRESHOLD)
    max_run_length: Optional[int] = Field(ge=1, default=settings.MAX_RUN_LENGTH)
    # None => pi = 1 - base_rate
    mixing_weight: Optional[float] = Field(gt=0.0, lt=1.0, default=None)
    # Sólo en modo inflate: beta0 del malicioso = beta0 benigno * scale_inflation
    scale_inflation: float = Field(gt=0.0, default=10.0)
    assignment: Literal["soft", "hard"] = "soft"
    # Pseudo-conteos del prior malicioso
    prior_kappa0: float = Field(gt=0.0, default=1.0)
    prior_alpha0: float = Field(gt=1.0, default=5.0)
    # Pseudo-conteos del prior benigno; cada changepoint vuelve a este prior
    benign_kappa0: float = Field(gt=0.0, default=100.0)
    benign_alpha0: float = Field(gt=1.0, default=50.0)
    malicious_prior: Literal["auto", "inflate", "labeled"] = "auto"
    min_labeled_attacks: int = Field(ge=2, default=10)


Probability = Annotated[float, Field(gt=0.0, lt=1.0)]
PositiveReal = Annotated[float, Field(gt=0.0)]


class TuningGrid(BaseModel):
    """Grilla de búsqueda sobre la ventana de validación"""
    hazard_values: List[Probability] = Field(min_length=1, default_factory=lambda: [0.001, 0.01, 0.1])
    scale_inflation_values: List[PositiveReal] = Field(min_length=1, default_factory=lambda: [5.0, 10.0, 50.0])
    mixing_weights: Optional[List[Probability]] = Field(default=None, min_length=1)
    objective: Literal["auprc", "log_evidence"] = "auprc"

    def cells(self) -> List[tuple]:
        """Celdas (hazard, inflación, mixing) en orden de grilla"""
        weights = self.mixing_weights or [None]
        return [
            (h, s, w)
            for h in self.hazard_values
            for s in self.scale_inflation_values
            for w in weights
        ]
