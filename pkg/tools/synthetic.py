"""
Generador de streams sintéticos con drift, changepoints y ráfagas de ataque
"""
import logging

import numpy as np

from models.stream import SyntheticConfig
from tools.stream_io import EventStream


logger = logging.getLogger("Synthetic")


def burst_start_probability(attack_rate: float, burst_length_mean: float) -> float:
    """
    Probabilidad por paso de iniciar una ráfaga fuera de ataque

    Con ráfagas de largo medio L y huecos geométricos, la fracción estacionaria
    de ataque es L / (L + (1 - p) / p); se despeja p para que valga attack_rate.
    """
    if attack_rate <= 0.0:
        return 0.0
    return attack_rate / (attack_rate + burst_length_mean * (1.0 - attack_rate))


def generate_synthetic(config: SyntheticConfig) -> EventStream:
    """
    Genera un stream etiquetado determinista para una semilla dada

    Benigno: Gaussiana unitaria cuya media es la del régimen actual más un
    random walk de drift. En cada paso, con probabilidad changepoint_hazard,
    se sortea una nueva media de régimen. Ataques: ráfagas de largo geométrico
    con media desplazada attack_shift en una dirección aleatoria y ruido
    escalado por attack_scale.

    Args:
        config: Parámetros del generador

    Returns:
        EventStream con columnas f0..f{d-1}
    """
    rng = np.random.default_rng(config.seed)
    n, d = config.length, config.dimension

    changes = rng.random(n) < config.changepoint_hazard
    changes[0] = False
    regime = np.cumsum(changes)
    regime_means = rng.normal(0.0, config.regime_spread, size=(int(regime[-1]) + 1, d))
    drift = np.cumsum(rng.normal(0.0, config.benign_mean_drift_rate, size=(n, d)), axis=0)
    benign_mean = regime_means[regime] + drift
    noise = rng.standard_normal((n, d))

    labels = np.zeros(n, dtype=np.int8)
    shift = np.zeros((n, d))
    scale = np.ones(n)
    start_probability = burst_start_probability(config.attack_rate, config.burst_length_mean)
    starts = rng.random(n)
    i = 0
    bursts = 0
    while i < n:
        if starts[i] >= start_probability:
            i += 1
            continue
        length = int(rng.geometric(1.0 / config.burst_length_mean))
        direction = rng.standard_normal(d)
        direction /= np.linalg.norm(direction)
        stop = min(n, i + length)
        labels[i:stop] = 1
        shift[i:stop] = config.attack_shift * direction
        scale[i:stop] = config.attack_scale
        bursts += 1
        i = stop

    features = benign_mean + shift + scale[:, None] * noise
    logger.debug(f"Sintético: {n} eventos, {bursts} ráfagas, {int(changes.sum())} changepoints")
    return EventStream(
        t=np.arange(n),
        features=features,
        labels=labels,
        feature_names=tuple(f"f{j}" for j in range(d)),
    )
