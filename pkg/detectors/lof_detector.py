"""
Local Outlier Factor en modo novelty

Se ajusta sobre las filas benignas del entrenamiento y puntúa cada evento
del test contra ese conjunto, sin updates online.
"""
import logging
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

from config import settings
from detectors.base_detector import BaseDetector, FittedBaseline, frozen_array, training_matrix
from src.errors import CentinelaError
from src.model_core import as_feature_vector


logger = logging.getLogger("LofDetector")

# Piso de la suma de reachability: puntos duplicados darían lrd infinita
REACH_FLOOR = np.finfo(float).eps


def _neighbors_excluding_self(tree: cKDTree, X: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """k vecinos más cercanos de cada fila de entrenamiento, sin contarse a sí misma"""
    n = X.shape[0]
    dist, idx = tree.query(X, k=k + 1)
    dist = dist.reshape(n, k + 1)
    idx = idx.reshape(n, k + 1)
    keep = np.ones_like(idx, dtype=bool)
    own = idx == np.arange(n)[:, None]
    has_own = own.any(axis=1)
    keep[has_own] = ~own[has_own]
    # Con duplicados la propia fila puede quedar fuera: se descarta el último
    keep[~has_own, -1] = False
    return dist[keep].reshape(n, k), idx[keep].reshape(n, k)


def fit_lof(features, k: int = settings.LOF_K) -> FittedBaseline:
    """
    Ajusta LOF: k-distancias y densidades locales del entrenamiento

    Args:
        features: Matriz benigna (n, d), n >= 2
        k: Vecinos; se recorta a n - 1 con un warning

    Returns:
        FittedBaseline con kind 'lof'
    """
    X = training_matrix(features)
    n = X.shape[0]
    if k < 1:
        raise CentinelaError(f"LOF: k debe ser >= 1, recibido {k}")
    if n < 2:
        raise CentinelaError("LOF: se necesitan al menos 2 filas de entrenamiento")
    if k >= n:
        logger.warning(f"LOF: k={k} recortado a {n - 1} (n={n})")
        k = n - 1

    tree = cKDTree(X)
    dist, idx = _neighbors_excluding_self(tree, X, k)
    k_distance = dist[:, -1]
    reach = np.maximum(k_distance[idx], dist)
    lrd = 1.0 / np.maximum(reach.mean(axis=1), REACH_FLOOR)
    if np.any(k_distance == 0.0):
        logger.warning("LOF: puntos duplicados en el entrenamiento (k-distancia 0)")

    return FittedBaseline(
        kind="lof",
        training_matrix=X,
        hyperparams={
            "k": k,
            "tree": tree,
            "k_distance": frozen_array(k_distance),
            "lrd": frozen_array(lrd),
        },
    )


def lof_score(fitted: FittedBaseline, x) -> float:
    """
    LOF de un punto de consulta: media de lrd(vecino) / lrd(x)

    reach(x, o) = max(k-dist(o), d(x, o)), lrd = 1 / media de reach sobre
    los k vecinos.
    """
    if fitted.kind != "lof":
        raise CentinelaError(f"lof_score sobre un baseline {fitted.kind}")
    x = as_feature_vector(x, fitted.dimension)
    k = fitted.hyperparams["k"]
    dist, idx = fitted.hyperparams["tree"].query(x, k=k)
    dist = np.atleast_1d(dist)
    idx = np.atleast_1d(idx)
    reach = np.maximum(fitted.hyperparams["k_distance"][idx], dist)
    reach_mean = max(float(reach.mean()), REACH_FLOOR)
    return float(fitted.hyperparams["lrd"][idx].mean() * reach_mean)


class LofDetector(BaseDetector):
    """LOF sobre features estandarizadas con distancia euclídea"""

    def __init__(self, k: int = settings.LOF_K):
        super().__init__(name="lof", description="Local Outlier Factor (novelty, k-NN exacto)")
        self.k = k

    def fit(self, features, labels=None) -> "LofDetector":
        self.fitted = fit_lof(features, self.k)
        logger.info(f"LOF ajustado: n={self.fitted.n}, k={self.fitted.hyperparams['k']}")
        return self

    def score(self, x) -> float:
        return lof_score(self.fitted, self.check_input(x))
