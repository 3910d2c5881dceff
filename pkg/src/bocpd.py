"""
Recursión del posterior de run length (BOCPD)

Un único reloj de run length: cada hipótesis r guarda el par de componentes
benigna/maliciosa, de modo que la mezcla vive dentro de cada hipótesis.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from models.detector import BocpdConfig
from src.errors import DegenerateModelError, DimensionMismatchError
from src.mixture_risk import MixtureState, mixture_terms, mixture_update_with
from src.model_core import ConjugateModel, as_feature_vector


logger = logging.getLogger("Bocpd")


@dataclass(frozen=True, eq=False)
class RunLengthPosterior:
    """Distribución discreta sobre run lengths con estado suficiente por hipótesis"""
    run_lengths: np.ndarray
    log_weights: np.ndarray
    states: MixtureState
    max_run_length: Optional[int] = None

    def __len__(self) -> int:
        return int(self.run_lengths.shape[0])

    @property
    def per_run_state(self) -> List[MixtureState]:
        """Vista como lista, una MixtureState por run length"""
        return [self.states.take(i) for i in range(len(self))]

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_weights)

    def log_normalizer(self) -> float:
        return float(logsumexp(self.log_weights))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RunLengthPosterior):
            return NotImplemented
        return (
            np.array_equal(self.run_lengths, other.run_lengths)
            and np.array_equal(self.log_weights, other.log_weights)
            and self.states == other.states
            and self.max_run_length == other.max_run_length
        )


@dataclass(frozen=True)
class StepDiagnostics:
    """
    Diagnóstico de un paso

    log_evidence: log p(x_t | x_{1:t-1}), la suma antes de normalizar
    attribution: posterior sobre el run length previo dado x_{1:t}, con los
        estados que predijeron x_t (entrada de incident_probability)
    pruned: hipótesis descartadas por el piso o plegadas por el tope
    """
    log_evidence: float
    attribution: RunLengthPosterior
    pruned: int
    map_run_length: int


def prior_state(config: BocpdConfig) -> MixtureState:
    """Estado de mezcla sin observaciones (lote de una hipótesis)"""
    return MixtureState(
        benign=ConjugateModel.from_prior(config.benign_prior).repeat(1),
        malicious=ConjugateModel.from_prior(config.malicious_prior).repeat(1),
        mixing_weight=config.mixing_weight,
    )


def init(config: BocpdConfig) -> RunLengthPosterior:
    """P(r_0 = 0) = 1 con estadísticos del prior"""
    return RunLengthPosterior(
        run_lengths=np.zeros(1, dtype=np.int64),
        log_weights=np.zeros(1),
        states=prior_state(config),
        max_run_length=config.max_run_length,
    )


def _concat_states(first: MixtureState, rest: MixtureState) -> MixtureState:
    return MixtureState(
        benign=ConjugateModel.concat([first.benign, rest.benign]),
        malicious=ConjugateModel.concat([first.malicious, rest.malicious]),
        mixing_weight=rest.mixing_weight,
    )


def _fold_cap(
    run_lengths: np.ndarray,
    log_weights: np.ndarray,
    states: MixtureState,
    cap: int,
) -> Tuple[np.ndarray, np.ndarray, MixtureState, int]:
    """Pliega las hipótesis con r >= cap en una sola etiquetada cap"""
    over = run_lengths >= cap
    if not np.any(run_lengths > cap):
        return run_lengths, log_weights, states, 0
    folded = np.flatnonzero(over)
    heaviest = folded[np.argmax(log_weights[folded])]
    keep = np.flatnonzero(~over)
    order = np.concatenate([keep, [heaviest]])

    new_lengths = run_lengths[order].copy()
    new_lengths[-1] = cap
    new_weights = log_weights[order].copy()
    new_weights[-1] = logsumexp(log_weights[folded])
    return new_lengths, new_weights, states.take(order), int(folded.size - 1)


def step(
    posterior: RunLengthPosterior,
    x,
    config: BocpdConfig,
) -> Tuple[RunLengthPosterior, StepDiagnostics]:
    """
    Un paso de la recursión

    Para cada hipótesis r con peso w y predictiva de mezcla p(x | r): la masa
    w p (1 - H) crece a r + 1 con estadísticos actualizados, y la masa
    sum_r w p H va a r = 0 con estadísticos frescos del prior. Luego se
    normaliza, se aplica el tope y se podan hipótesis bajo el piso.

    Args:
        posterior: Posterior normalizado
        x: Observación
        config: Configuración del motor

    Returns:
        (nuevo posterior, diagnóstico)
    """
    dimension = posterior.states.dimension
    if config.dimension != dimension:
        raise DimensionMismatchError(dimension, config.dimension)
    x = as_feature_vector(x, dimension)

    log_predictive, log_gamma = mixture_terms(posterior.states, x)
    joint = posterior.log_weights + log_predictive
    log_evidence = float(logsumexp(joint))
    if not math.isfinite(log_evidence):
        raise DegenerateModelError(f"masa predictiva total degenerada (log = {log_evidence})")

    hazard = config.hazard.hazard
    growth = joint + math.log1p(-hazard)
    changepoint = log_evidence + math.log(hazard)

    updated = mixture_update_with(
        posterior.states, x, np.exp(log_gamma), hard=config.assignment == "hard"
    )
    run_lengths = np.concatenate([[0], posterior.run_lengths + 1]).astype(np.int64)
    log_weights = np.concatenate([[changepoint], growth])
    log_weights = log_weights - logsumexp(log_weights)
    states = _concat_states(prior_state(config), updated)

    pruned = 0
    if config.max_run_length is not None:
        run_lengths, log_weights, states, pruned = _fold_cap(
            run_lengths, log_weights, states, config.max_run_length
        )

    keep = log_weights >= config.prune_threshold
    if not np.all(keep):
        keep[np.argmax(log_weights)] = True
        index = np.flatnonzero(keep)
        pruned += int(keep.size - index.size)
        run_lengths = run_lengths[index]
        log_weights = log_weights[index]
        log_weights = log_weights - logsumexp(log_weights)
        states = states.take(index)

    new_posterior = RunLengthPosterior(
        run_lengths=run_lengths,
        log_weights=log_weights,
        states=states,
        max_run_length=config.max_run_length,
    )
    attribution = RunLengthPosterior(
        run_lengths=posterior.run_lengths,
        log_weights=joint - log_evidence,
        states=posterior.states,
        max_run_length=posterior.max_run_length,
    )
    diagnostics = StepDiagnostics(
        log_evidence=log_evidence,
        attribution=attribution,
        pruned=pruned,
        map_run_length=map_run_length(new_posterior),
    )
    return new_posterior, diagnostics


def map_run_length(posterior: RunLengthPosterior) -> int:
    """Run length de máxima probabilidad; empates hacia el run length más corto"""
    return int(posterior.run_lengths[int(np.argmax(posterior.log_weights))])


def run_stream(
    config: BocpdConfig,
    observations,
) -> Iterator[Tuple[RunLengthPosterior, StepDiagnostics]]:
    """Aplica step secuencialmente sobre una matriz (n, d)"""
    posterior = init(config)
    for x in np.atleast_2d(np.asarray(observations, dtype=float)):
        posterior, diagnostics = step(posterior, x, config)
        yield posterior, diagnostics
