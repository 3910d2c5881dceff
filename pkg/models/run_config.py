"""
Modelo Pydantic del RunConfig: un documento JSON que describe una corrida completa
"""
import json
from pathlib import Path
from typing import List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field

from config import settings
from models.detector import DetectorSettings, TuningGrid
from models.policy import DecisionPolicy, ErrorBudget
from models.stream import StreamSettings, SyntheticConfig


BaselineName = Literal["lof", "ecod", "copod"]


class BaselineSettings(BaseModel):
    """Selección de baselines e hiperparámetros"""
    methods: List[BaselineName] = Field(default_factory=lambda: ["lof", "ecod", "copod"])
    lof_k: int = Field(ge=1, default=settings.LOF_K)


class RunConfig(BaseModel):
    """Configuración de una corrida (detect, eval, tune, synth)"""
    # Los presets agregan 'name' y 'description'
    model_config = ConfigDict(extra="ignore")

    schema_version: Literal["run_config.v1"] = "run_config.v1"
    seed: int = settings.DEFAULT_SEED
    output_dir: str = settings.OUTPUT_DIR
    stream: StreamSettings = Field(default_factory=lambda: StreamSettings(source=SyntheticConfig()))
    detector: DetectorSettings = Field(default_factory=DetectorSettings)
    policy: DecisionPolicy = Field(default_factory=DecisionPolicy.sre_example)
    budget: ErrorBudget = Field(default_factory=ErrorBudget)
    baselines: BaselineSettings = Field(default_factory=BaselineSettings)
    tuning: TuningGrid = Field(default_factory=TuningGrid)
    reliability_bins: int = Field(ge=1, default=settings.RELIABILITY_BINS)
    n_jobs: int = Field(ge=1, default=settings.N_JOBS)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        """Carga un RunConfig (o preset) desde JSON"""
        with open(path, "r", encoding="utf-8") as f:
            return cls.model_validate(json.load(f))

    def to_file(self, path: str | Path) -> None:
        """Escribe el RunConfig en el mismo formato que consume from_file"""
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.model_dump_json(indent=2))
            f.write("\n")

    def with_overrides(
        self,
        seed: Optional[int] = None,
        output_dir: Optional[str] = None,
        input_path: Optional[str] = None,
        n_jobs: Optional[int] = None,
    ) -> "RunConfig":
        """Aplica flags del CLI por encima de los valores del archivo"""
        data = self.model_dump()
        if seed is not None:
            data["seed"] = seed
        if output_dir is not None:
            data["output_dir"] = output_dir
        if input_path is not None:
            data["stream"]["source"] = input_path
        if n_jobs is not None:
            data["n_jobs"] = n_jobs
        return RunConfig.model_validate(data)

    def resolved_stream(self) -> StreamSettings:
        """StreamSettings con la semilla del generador reemplazada por la semilla de la corrida"""
        if isinstance(self.stream.source, SyntheticConfig):
            source = self.stream.source.model_copy(update={"seed": self.seed})
            return self.stream.model_copy(update={"source": source})
        return self.stream

    def mixing_weight(self) -> float:
        """pi efectivo: explícito o 1 - base_rate"""
        if self.detector.mixing_weight is not None:
            return self.detector.mixing_weight
        return 1.0 - self.policy.base_rate
