"""
BOCPD Detector - detector online calibrado por riesgo

Ajusta los priors en el segmento de entrenamiento, corre la recursión de run
length evento por evento y entrega P(y_t = 1 | x_{1:t}) para cada evento.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from detectors.base_detector import BaseDetector, training_matrix, with_event_index
from models.detector import BocpdConfig, DetectorSettings, HazardFunction, NigParams
from models.policy import DecisionPolicy
from models.stream import ScoredEvent
from src import bocpd
from src.errors import CentinelaError
from src.mixture_risk import decide, incident_probability
from src.model_core import as_feature_vector, fit_prior, inflate_prior


logger = logging.getLogger("BocpdDetector")


@dataclass(frozen=True)
class DetectionStep:
    """Salida de un paso online"""
    probability: float
    map_run_length: int
    log_evidence: float
    hypotheses: int


def fit_priors(
    settings: DetectorSettings,
    features,
    labels=None,
) -> tuple[List[NigParams], List[NigParams], str]:
    """
    Priors benigno y malicioso desde el segmento de entrenamiento

    El benigno se ajusta sobre las filas con label 0 con pseudo-conteos
    altos (benign_kappa0, benign_alpha0): tras un changepoint la componente
    benigna arranca del tráfico de entrenamiento y unas pocas observaciones
    de una ráfaga no la desplazan. El malicioso usa prior_kappa0 y
    prior_alpha0 y se ajusta sobre los ataques etiquetados cuando hay
    suficientes (modo labeled, sin inflar); si no, se ajusta sobre las filas
    benignas con beta0 multiplicado por scale_inflation (modo inflate).

    Returns:
        (prior benigno, prior malicioso, modo usado para el malicioso)
    """
    X = training_matrix(features)
    y = np.zeros(X.shape[0], dtype=np.int8) if labels is None else np.asarray(labels).ravel()
    if y.shape[0] != X.shape[0]:
        raise CentinelaError(f"{X.shape[0]} filas de entrenamiento con {y.shape[0]} labels")

    benign_rows = X[y == 0]
    attack_rows = X[y == 1]
    if benign_rows.shape[0] == 0:
        raise CentinelaError("el entrenamiento no tiene eventos benignos para ajustar el prior")
    benign = fit_prior(benign_rows, settings.benign_kappa0, settings.benign_alpha0)

    mode = settings.malicious_prior
    if mode == "auto":
        mode = "labeled" if attack_rows.shape[0] >= settings.min_labeled_attacks else "inflate"
    if mode == "labeled":
        if attack_rows.shape[0] < 2:
            raise CentinelaError(
                f"malicious_prior='labeled' requiere al menos 2 ataques en entrenamiento, hay {attack_rows.shape[0]}"
            )
        malicious = fit_prior(attack_rows, settings.prior_kappa0, settings.prior_alpha0)
    else:
        base = fit_prior(benign_rows, settings.prior_kappa0, settings.prior_alpha0)
        malicious = inflate_prior(base, settings.scale_inflation)
    return benign, malicious, mode


class BocpdDetector(BaseDetector):
    """
    Detector BOCPD con mezcla benigno/malicioso

    A diferencia de los baselines, score() es online: cada llamada avanza la
    recursión un evento. reset() vuelve al posterior inicial.
    """

    emits_probabilities = True

    def __init__(self, settings: Optional[DetectorSettings] = None, mixing_weight: float = 0.99):
        super().__init__(name="bocpd", description="BOCPD con mezcla benigno/malicioso calibrada por riesgo")
        self.settings = settings or DetectorSettings()
        self.mixing_weight = self.settings.mixing_weight or mixing_weight
        self.config: Optional[BocpdConfig] = None
        self.posterior: Optional[bocpd.RunLengthPosterior] = None
        self.prior_source: Optional[str] = None

    @property
    def is_fitted(self) -> bool:
        return self.config is not None

    def fit(self, features, labels=None) -> "BocpdDetector":
        benign, malicious, source = fit_priors(self.settings, features, labels)
        self.config = BocpdConfig(
            hazard=HazardFunction(hazard=self.settings.hazard),
            prune_threshold=self.settings.prune_threshold,
            max_run_length=self.settings.max_run_length,
            benign_prior=benign,
            malicious_prior=malicious,
            mixing_weight=self.mixing_weight,
            assignment=self.settings.assignment,
        )
        self.prior_source = source
        inflation = f" x{self.settings.scale_inflation}" if source == "inflate" else ""
        logger.info(
            f"Priors ajustados: d={self.config.dimension}, hazard={self.settings.hazard}, "
            f"pi={self.mixing_weight:.4f}, malicioso={source}{inflation}"
        )
        return self.reset()

    def with_config(self, config: BocpdConfig) -> "BocpdDetector":
        """Usa una configuración del motor ya construida"""
        self.config = config
        self.mixing_weight = config.mixing_weight
        return self.reset()

    def reset(self) -> "BocpdDetector":
        if self.config is None:
            raise CentinelaError("bocpd: el detector no está ajustado")
        self.posterior = bocpd.init(self.config)
        return self

    def update(self, x) -> DetectionStep:
        """Avanza la recursión con un evento"""
        if self.config is None or self.posterior is None:
            raise CentinelaError("bocpd: el detector no está ajustado")
        x = as_feature_vector(x, self.config.dimension)
        self.posterior, diagnostics = bocpd.step(self.posterior, x, self.config)
        probability = incident_probability(diagnostics.attribution, x)
        return DetectionStep(
            probability=probability,
            map_run_length=diagnostics.map_run_length,
            log_evidence=diagnostics.log_evidence,
            hypotheses=len(self.posterior),
        )

    def score(self, x) -> float:
        return self.update(x).probability

    def run(self, X) -> List[DetectionStep]:
        """Procesa un stream completo desde el posterior inicial"""
        self.reset()
        rows = np.asarray(X, dtype=float)
        if rows.size == 0:
            return []
        steps = []
        for index, x in enumerate(np.atleast_2d(rows)):
            try:
                steps.append(self.update(x))
            except CentinelaError as e:
                raise with_event_index(e, index) from e
            logger.debug(f"t={index} p={steps[-1].probability:.4f} r_map={steps[-1].map_run_length}")
        return steps

    def score_stream(self, X) -> np.ndarray:
        return np.array([s.probability for s in self.run(X)], dtype=float)

    def detect(self, t, features, labels, policy: DecisionPolicy) -> List[ScoredEvent]:
        """
        Procesa el segmento evento por evento y decide con la política

        Returns:
            Un ScoredEvent por evento
        """
        steps = self.run(features)
        return [
            ScoredEvent(
                t=int(ti),
                features=[float(v) for v in x],
                score=s.probability,
                alert=decide(s.probability, policy),
                label=int(yi),
                map_run_length=s.map_run_length,
            )
            for ti, x, yi, s in zip(t, features, labels, steps)
        ]
