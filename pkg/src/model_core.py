"""
Modelos generativos conjugados y hazard para la recursión BOCPD

Cada dimensión del vector de features se modela como una Normal con prior
Normal-Inversa-Gamma independiente (modelo diagonal). La predictiva posterior
es una Student-t por dimensión y toda la aritmética de verosimilitud se hace
en espacio logarítmico.

Los estados pueden llevar un eje inicial de "lote" (una fila por run length
hipotético): todas las operaciones hacen broadcasting sobre ese eje.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from models.detector import HazardFunction, NigParams
from src.errors import DimensionMismatchError, NonFiniteInputError


VARIANCE_FLOOR = 1e-6


def as_feature_vector(values, dimension: Optional[int] = None) -> np.ndarray:
    """
    Convierte y valida un FeatureVector

    Args:
        values: Secuencia de reales
        dimension: Dimensión esperada (opcional)

    Returns:
        np.ndarray 1-D de float64
    """
    x = np.asarray(values, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.size == 0:
        raise DimensionMismatchError(dimension or 1, int(x.size) if x.ndim == 1 else -1)
    if dimension is not None and x.shape[0] != dimension:
        raise DimensionMismatchError(dimension, x.shape[0])
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError(f"observación no finita: {x.tolist()}")
    return x


@dataclass(frozen=True, eq=False)
class ConjugateModel:
    """
    Estado NIG posterior por dimensión

    mu, kappa, alpha, beta tienen forma (..., d); observation_count tiene la
    forma del lote (escalar 0-d para un modelo individual).
    """
    mu: np.ndarray
    kappa: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    observation_count: np.ndarray

    @classmethod
    def from_prior(cls, prior: Sequence[NigParams]) -> "ConjugateModel":
        """Crea un modelo sin observaciones a partir de los priors por dimensión"""
        return cls(
            mu=np.array([p.mu0 for p in prior], dtype=float),
            kappa=np.array([p.kappa0 for p in prior], dtype=float),
            alpha=np.array([p.alpha0 for p in prior], dtype=float),
            beta=np.array([p.beta0 for p in prior], dtype=float),
            observation_count=np.array(0, dtype=np.int64),
        )

    @property
    def dimension(self) -> int:
        return int(self.mu.shape[-1])

    @property
    def batch_shape(self) -> tuple:
        return tuple(self.mu.shape[:-1])

    def params(self) -> List[NigParams]:
        """Parámetros actuales como NigParams (sólo modelos sin lote)"""
        if self.batch_shape:
            raise ValueError("params() requiere un modelo individual, no un lote")
        return [
            NigParams(mu0=float(m), kappa0=float(k), alpha0=float(a), beta0=float(b))
            for m, k, a, b in zip(self.mu, self.kappa, self.alpha, self.beta)
        ]

    def is_valid(self) -> bool:
        """Invariantes NIG: kappa, alpha, beta > 0 y todo finito"""
        arrays = (self.mu, self.kappa, self.alpha, self.beta)
        return (
            all(np.all(np.isfinite(a)) for a in arrays)
            and bool(np.all(self.kappa > 0))
            and bool(np.all(self.alpha > 0))
            and bool(np.all(self.beta > 0))
        )

    def allclose(self, other: "ConjugateModel", rtol: float = 1e-10, atol: float = 0.0) -> bool:
        return all(
            np.allclose(a, b, rtol=rtol, atol=atol)
            for a, b in zip(
                (self.mu, self.kappa, self.alpha, self.beta),
                (other.mu, other.kappa, other.alpha, other.beta),
            )
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConjugateModel):
            return NotImplemented
        return all(
            np.array_equal(a, b)
            for a, b in zip(
                (self.mu, self.kappa, self.alpha, self.beta, self.observation_count),
                (other.mu, other.kappa, other.alpha, other.beta, other.observation_count),
            )
        )

    # Operaciones sobre el eje de lote

    def take(self, index) -> "ConjugateModel":
        """Selecciona filas del lote"""
        return ConjugateModel(
            mu=self.mu[index],
            kappa=self.kappa[index],
            alpha=self.alpha[index],
            beta=self.beta[index],
            observation_count=self.observation_count[index],
        )

    def repeat(self, n: int) -> "ConjugateModel":
        """Lote de n copias de un modelo individual"""
        return ConjugateModel(
            mu=np.broadcast_to(self.mu, (n, self.dimension)).copy(),
            kappa=np.broadcast_to(self.kappa, (n, self.dimension)).copy(),
            alpha=np.broadcast_to(self.alpha, (n, self.dimension)).copy(),
            beta=np.broadcast_to(self.beta, (n, self.dimension)).copy(),
            observation_count=np.full(n, int(self.observation_count), dtype=np.int64),
        )

    @staticmethod
    def concat(models: Sequence["ConjugateModel"]) -> "ConjugateModel":
        """Concatena lotes a lo largo del eje de run length"""
        return ConjugateModel(
            mu=np.concatenate([m.mu for m in models]),
            kappa=np.concatenate([m.kappa for m in models]),
            alpha=np.concatenate([m.alpha for m in models]),
            beta=np.concatenate([m.beta for m in models]),
            observation_count=np.concatenate([m.observation_count for m in models]),
        )


def _check_model_input(model: ConjugateModel, x) -> np.ndarray:
    return as_feature_vector(x, model.dimension)


def weighted_update(model: ConjugateModel, x, weight=1.0) -> ConjugateModel:
    """
    Update conjugado con peso fraccional

    Con peso w: kappa' = kappa + w, mu' = (kappa mu + w x)/(kappa + w),
    alpha' = alpha + w/2, beta' = beta + kappa w (x - mu)^2 / (2 (kappa + w)).
    Peso 0 deja el estado intacto (bit a bit).

    Args:
        model: Estado actual (individual o lote)
        x: Observación de dimensión d
        weight: Escalar o arreglo con la forma del lote, en [0, 1]

    Returns:
        Nuevo ConjugateModel
    """
    x = _check_model_input(model, x)
    w_batch = np.broadcast_to(np.asarray(weight, dtype=float), model.batch_shape)
    if np.any(w_batch < 0) or not np.all(np.isfinite(w_batch)):
        raise ValueError("los pesos de update deben ser finitos y >= 0")
    w = w_batch[..., None]

    kappa_new = model.kappa + w
    mu_new = (model.kappa * model.mu + w * x) / kappa_new
    alpha_new = model.alpha + 0.5 * w
    beta_new = model.beta + model.kappa * w * (x - model.mu) ** 2 / (2.0 * kappa_new)

    active = w > 0
    return ConjugateModel(
        mu=np.where(active, mu_new, model.mu),
        kappa=np.where(active, kappa_new, model.kappa),
        alpha=np.where(active, alpha_new, model.alpha),
        beta=np.where(active, beta_new, model.beta),
        observation_count=model.observation_count + (w_batch > 0).astype(np.int64),
    )


def nig_update(model: ConjugateModel, x) -> ConjugateModel:
    """Update NIG estándar con una observación completa"""
    return weighted_update(model, x, 1.0)


def predictive_logpdf(model: ConjugateModel, x):
    """
    Log-densidad de la predictiva posterior Student-t, sumada sobre dimensiones

    df = 2 alpha, loc = mu, scale = sqrt(beta (kappa + 1) / (alpha kappa)).

    Returns:
        float para un modelo individual, np.ndarray con la forma del lote si no
    """
    x = _check_model_input(model, x)
    nu = 2.0 * model.alpha
    scale_sq = model.beta * (model.kappa + 1.0) / (model.alpha * model.kappa)
    z_sq = (x - model.mu) ** 2 / scale_sq
    log_density = (
        gammaln(0.5 * (nu + 1.0))
        - gammaln(0.5 * nu)
        - 0.5 * np.log(nu * np.pi * scale_sq)
        - 0.5 * (nu + 1.0) * np.log1p(z_sq / nu)
    )
    total = log_density.sum(axis=-1)
    if not model.batch_shape:
        return float(total)
    return total


def batch_posterior(
    prior: Sequence[NigParams],
    samples,
    weights=None,
) -> ConjugateModel:
    """
    Posterior NIG en forma cerrada a partir de media y suma de cuadrados (ponderadas)

    Args:
        prior: Prior por dimensión
        samples: Matriz (n, d)
        weights: Pesos por fila (por defecto 1)

    Returns:
        ConjugateModel individual
    """
    base = ConjugateModel.from_prior(prior)
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if X.shape[0] == 0:
        return base
    if X.shape[1] != base.dimension:
        raise DimensionMismatchError(base.dimension, X.shape[1])
    w = np.ones(X.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    n = w.sum()
    if n <= 0:
        return base
    xbar = (w[:, None] * X).sum(axis=0) / n
    ss = (w[:, None] * (X - xbar) ** 2).sum(axis=0)

    kappa_n = base.kappa + n
    return ConjugateModel(
        mu=(base.kappa * base.mu + n * xbar) / kappa_n,
        kappa=kappa_n,
        alpha=base.alpha + 0.5 * n,
        beta=base.beta + 0.5 * ss + base.kappa * n * (xbar - base.mu) ** 2 / (2.0 * kappa_n),
        observation_count=np.array(int(np.count_nonzero(w > 0)), dtype=np.int64),
    )


def fit_prior(samples, kappa0: float = 1.0, alpha0: float = 5.0) -> List[NigParams]:
    """
    Prior empírico por dimensión a partir del segmento de entrenamiento

    mu0 es la media muestral y beta0 = var (alpha0 - 1), de modo que la media a
    priori de la varianza coincide con la varianza muestral.
    """
    if alpha0 <= 1.0:
        raise ValueError(f"alpha0 debe ser > 1 para ajustar el prior, recibido {alpha0}")
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("no hay muestras para ajustar el prior")
    mean = X.mean(axis=0)
    var = X.var(axis=0, ddof=1) if X.shape[0] > 1 else np.ones(X.shape[1])
    var = np.maximum(var, VARIANCE_FLOOR)
    return [
        NigParams(mu0=float(m), kappa0=kappa0, alpha0=alpha0, beta0=float(v * (alpha0 - 1.0)))
        for m, v in zip(mean, var)
    ]


def inflate_prior(prior: Sequence[NigParams], factor: float) -> List[NigParams]:
    """Ensancha un prior multiplicando beta0 (componente difusa 'cualquier cosa rara')"""
    if factor <= 0:
        raise ValueError(f"el factor de inflación debe ser > 0, recibido {factor}")
    return [p.model_copy(update={"beta0": p.beta0 * factor}) for p in prior]


def hazard_probability(h: HazardFunction, run_length: int) -> float:
    """Hazard constante: no depende del run length"""
    if run_length < 0:
        raise ValueError(f"run length negativo: {run_length}")
    return h.hazard


def expected_run_length(h: HazardFunction) -> float:
    return 1.0 / h.hazard


def sample_run_lengths(h: HazardFunction, n: int, rng: np.random.Generator) -> np.ndarray:
    """Run lengths geométricos bajo hazard constante (media 1/h)"""
    return rng.geometric(h.hazard, size=n)
