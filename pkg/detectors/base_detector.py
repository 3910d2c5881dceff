"""
Clase base para detectores
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional

import numpy as np

from src.errors import CentinelaError
from src.model_core import as_feature_vector


BaselineKind = Literal["lof", "ecod", "copod"]


@dataclass(frozen=True)
class FittedBaseline:
    """Estado ajustado de un baseline: matriz benigna de entrenamiento e hiperparámetros"""
    kind: BaselineKind
    training_matrix: np.ndarray
    hyperparams: Dict[str, Any] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return int(self.training_matrix.shape[1])

    @property
    def n(self) -> int:
        return int(self.training_matrix.shape[0])


def frozen_array(values) -> np.ndarray:
    """Copia de sólo lectura"""
    array = np.array(values, dtype=float)
    array.flags.writeable = False
    return array


def training_matrix(values) -> np.ndarray:
    """Valida la matriz de entrenamiento: no vacía, 2-D y finita"""
    X = np.asarray(values, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] == 0:
        raise CentinelaError("los datos de entrenamiento están vacíos")
    if not np.all(np.isfinite(X)):
        raise CentinelaError("los datos de entrenamiento contienen valores no finitos")
    return frozen_array(X)


class BaseDetector(ABC):
    """Clase base para todos los detectores"""

    # True si score devuelve probabilidades calibrables (habilita ECE)
    emits_probabilities = False

    def __init__(self, name: str, description: str):
        """
        Inicializa el detector base

        Args:
            name: Nombre corto del método (aparece en los reportes)
            description: Descripción del detector
        """
        self.name = name
        self.description = description
        self.fitted: Optional[FittedBaseline] = None

    @abstractmethod
    def fit(self, features, labels=None) -> "BaseDetector":
        """
        Ajusta el detector sobre el segmento de entrenamiento

        Args:
            features: Matriz (n, d)
            labels: Labels del entrenamiento (opcional)

        Returns:
            self
        """

    @abstractmethod
    def score(self, x) -> float:
        """
        Puntúa un evento (mayor = más anómalo)

        Args:
            x: FeatureVector

        Returns:
            float
        """

    @property
    def is_fitted(self) -> bool:
        return self.fitted is not None

    def check_input(self, x) -> np.ndarray:
        if self.fitted is None:
            raise CentinelaError(f"{self.name}: el detector no está ajustado")
        return as_feature_vector(x, self.fitted.dimension)

    def score_stream(self, X) -> np.ndarray:
        """
        Puntúa cada evento de un stream; el estado ajustado no cambia

        Un fallo en un punto se relanza con la misma clase y el índice del
        evento como prefijo.
        """
        rows = np.asarray(X, dtype=float)
        if rows.size == 0:
            return np.zeros(0)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        scores = np.empty(rows.shape[0])
        for index, x in enumerate(rows):
            try:
                scores[index] = self.score(x)
            except CentinelaError as e:
                raise with_event_index(e, index) from e
        return scores


def with_event_index(error: CentinelaError, index: int) -> CentinelaError:
    """Copia del error (misma clase) con el índice del evento como prefijo"""
    cls = type(error)
    # Sin pasar por __init__: las subclases tienen firmas propias
    wrapped = cls.__new__(cls)
    wrapped.__dict__.update(error.__dict__)
    wrapped.args = (f"evento {index}: {error}",)
    return wrapped

