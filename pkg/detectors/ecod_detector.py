"""
ECOD y COPOD: puntajes de cola a partir de ECDFs marginales

Ambos se usan en su forma independiente por dimensión, con suavizado
(conteo + 1) / (n + 1) para que los logaritmos sean finitos.
"""
import logging
from typing import Tuple

import numpy as np
from scipy.stats import skew

from detectors.base_detector import BaseDetector, BaselineKind, FittedBaseline, frozen_array, training_matrix
from src.errors import CentinelaError
from src.model_core import as_feature_vector


logger = logging.getLogger("EcodDetector")


def fit_tail_model(features, kind: BaselineKind = "ecod") -> FittedBaseline:
    """Columnas ordenadas y signo de asimetría de cada dimensión"""
    X = training_matrix(features)
    skewness = np.nan_to_num(skew(X, axis=0))
    return FittedBaseline(
        kind=kind,
        training_matrix=X,
        hyperparams={
            "sorted": frozen_array(np.sort(X, axis=0)),
            "skewness": frozen_array(skewness),
        },
    )


def _tail_counts(fitted: FittedBaseline, x) -> Tuple[np.ndarray, np.ndarray, int]:
    """#{t <= x_j} y #{t >= x_j} por dimensión"""
    x = as_feature_vector(x, fitted.dimension)
    ordered = fitted.hyperparams["sorted"]
    n = ordered.shape[0]
    below = np.array([np.searchsorted(ordered[:, j], x[j], side="right") for j in range(x.shape[0])])
    above = n - np.array([np.searchsorted(ordered[:, j], x[j], side="left") for j in range(x.shape[0])])
    return below, above, n


def tail_terms(fitted: FittedBaseline, x) -> Tuple[np.ndarray, np.ndarray]:
    """
    -log de las colas izquierda y derecha por dimensión

    O_L = -log((#{t <= x} + 1) / (n + 1)), O_R = -log((#{t >= x} + 1) / (n + 1))
    """
    below, above, n = _tail_counts(fitted, x)
    log_total = np.log(n + 1.0)
    return log_total - np.log(below + 1.0), log_total - np.log(above + 1.0)


def copula_observations(fitted: FittedBaseline, x) -> Tuple[np.ndarray, np.ndarray]:
    """Cópula empírica: u_j = F_j(x_j) y v_j = F_j(-x_j) con el mismo suavizado"""
    below, above, n = _tail_counts(fitted, x)
    return (below + 1.0) / (n + 1.0), (above + 1.0) / (n + 1.0)


def _aggregate(fitted: FittedBaseline, left: np.ndarray, right: np.ndarray) -> float:
    """max(sum O_L, sum O_R, sum de la cola elegida por el signo de asimetría)"""
    skewed = np.where(fitted.hyperparams["skewness"] < 0, left, right)
    return float(max(left.sum(), right.sum(), skewed.sum()))


def ecod_score(fitted: FittedBaseline, x) -> float:
    if fitted.kind != "ecod":
        raise CentinelaError(f"ecod_score sobre un baseline {fitted.kind}")
    left, right = tail_terms(fitted, x)
    return _aggregate(fitted, left, right)


def copod_score(fitted: FittedBaseline, x) -> float:
    """
    COPOD con cópula empírica de marginales independientes

    Las observaciones de cópula u_j = F_j(x_j) (izquierda) y v_j = F_j(-x_j)
    (derecha) son exactamente las colas de ECOD, así que ambos coinciden.
    """
    if fitted.kind != "copod":
        raise CentinelaError(f"copod_score sobre un baseline {fitted.kind}")
    u, v = copula_observations(fitted, x)
    return _aggregate(fitted, -np.log(u), -np.log(v))


class EcodDetector(BaseDetector):
    """ECOD: Empirical-CDF-based Outlier Detection"""

    def __init__(self):
        super().__init__(name="ecod", description="ECDF tail probabilities por dimensión")

    def fit(self, features, labels=None) -> "EcodDetector":
        self.fitted = fit_tail_model(features, "ecod")
        logger.info(f"ECOD ajustado: n={self.fitted.n}, d={self.fitted.dimension}")
        return self

    def score(self, x) -> float:
        return ecod_score(self.fitted, self.check_input(x))


class CopodDetector(BaseDetector):
    """COPOD: Copula-based Outlier Detection"""

    def __init__(self):
        super().__init__(name="copod", description="Cópula empírica de colas marginales")

    def fit(self, features, labels=None) -> "CopodDetector":
        self.fitted = fit_tail_model(features, "copod")
        logger.info(f"COPOD ajustado: n={self.fitted.n}, d={self.fitted.dimension}")
        return self

    def score(self, x) -> float:
        return copod_score(self.fitted, self.check_input(x))
