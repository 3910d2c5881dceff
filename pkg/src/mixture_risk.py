"""
Mezcla benigno/malicioso, probabilidad de incidente y regla de decisión por costos

Contiene:
- MixtureState: par de componentes conjugadas más el peso de mezcla pi (benigno)
- responsabilidad maliciosa gamma y probabilidad posterior de incidente
- umbral óptimo T = C_FP (1 - rho) / (C_FP (1 - rho) + C_FN rho)
- aritmética de error budget SRE
"""
import math
from dataclasses import dataclass
from decimal import ROUND_FLOOR, Decimal
from typing import TYPE_CHECKING, Tuple

import numpy as np
from scipy.special import logsumexp

from models.policy import BudgetStatus, DecisionPolicy, ErrorBudget
from src.errors import CentinelaError, DegenerateModelError, DimensionMismatchError
from src.model_core import ConjugateModel, predictive_logpdf, weighted_update

if TYPE_CHECKING:
    from src.bocpd import RunLengthPosterior


@dataclass(frozen=True, eq=False)
class MixtureState:
    """Componentes benigna y maliciosa (individuales o en lote) y peso benigno pi"""
    benign: ConjugateModel
    malicious: ConjugateModel
    mixing_weight: float

    def __post_init__(self):
        if not 0.0 < self.mixing_weight < 1.0:
            raise ValueError(f"mixing_weight debe estar en (0, 1), recibido {self.mixing_weight}")
        if self.benign.dimension != self.malicious.dimension:
            raise DimensionMismatchError(self.benign.dimension, self.malicious.dimension)

    @property
    def dimension(self) -> int:
        return self.benign.dimension

    def take(self, index) -> "MixtureState":
        return MixtureState(self.benign.take(index), self.malicious.take(index), self.mixing_weight)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixtureState):
            return NotImplemented
        return (
            self.benign == other.benign
            and self.malicious == other.malicious
            and self.mixing_weight == other.mixing_weight
        )


def mixture_terms(state: MixtureState, x) -> Tuple[np.ndarray, np.ndarray]:
    """
    Log-predictiva de la mezcla y log-responsabilidad maliciosa

    Returns:
        (log p(x), log gamma) con la forma del lote del estado
    """
    log_pb = np.asarray(predictive_logpdf(state.benign, x))
    log_pm = np.asarray(predictive_logpdf(state.malicious, x))
    log_benign = math.log(state.mixing_weight) + log_pb
    log_malicious = math.log1p(-state.mixing_weight) + log_pm
    log_predictive = np.logaddexp(log_benign, log_malicious)
    if np.any(np.isneginf(log_predictive)) or np.any(np.isnan(log_predictive)):
        raise DegenerateModelError("ambas densidades de componente son cero para la observación")
    return log_predictive, log_malicious - log_predictive


def responsibilities(state: MixtureState, x) -> np.ndarray:
    """Responsabilidad maliciosa gamma por hipótesis"""
    _, log_gamma = mixture_terms(state, x)
    return np.exp(log_gamma)


def incident_probability_from_terms(log_weights, log_gamma) -> float:
    """Suma ponderada sum_r P(r) gamma_r calculada en espacio logarítmico"""
    value = float(np.exp(logsumexp(np.asarray(log_weights) + np.asarray(log_gamma))))
    return min(1.0, max(0.0, value))


def incident_probability(posterior: "RunLengthPosterior", x) -> float:
    """
    Probabilidad posterior de incidente P(y_t = 1 | x_{1:t})

    Args:
        posterior: Posterior normalizado cuyos pesos ya incorporan x
        x: Observación actual

    Returns:
        sum_r P(r | x_{1:t}) gamma_r en [0, 1]
    """
    _, log_gamma = mixture_terms(posterior.states, x)
    return incident_probability_from_terms(posterior.log_weights, log_gamma)


def incident_probability_direct(weights, benign_density, malicious_density, mixing_weight: float) -> float:
    """Versión en espacio directo (referencia para verificar la forma logarítmica)"""
    w = np.asarray(weights, dtype=float)
    pb = np.asarray(benign_density, dtype=float)
    pm = np.asarray(malicious_density, dtype=float)
    gamma = (1.0 - mixing_weight) * pm / (mixing_weight * pb + (1.0 - mixing_weight) * pm)
    return float(np.sum(w * gamma))


def mixture_update(state: MixtureState, x, hard: bool = False) -> MixtureState:
    """
    Update ponderado por responsabilidad

    La benigna recibe peso (1 - gamma) y la maliciosa gamma. Con hard=True
    gamma se redondea a {0, 1} (gamma >= 0.5 cuenta como malicioso).
    """
    gamma = responsibilities(state, x)
    return mixture_update_with(state, x, gamma, hard=hard)


def mixture_update_with(state: MixtureState, x, gamma, hard: bool = False) -> MixtureState:
    """Igual que mixture_update con gamma ya calculado"""
    gamma = np.asarray(gamma, dtype=float)
    if hard:
        gamma = (gamma >= 0.5).astype(float)
    return MixtureState(
        benign=weighted_update(state.benign, x, 1.0 - gamma),
        malicious=weighted_update(state.malicious, x, gamma),
        mixing_weight=state.mixing_weight,
    )


# ============================================================================
# Regla de decisión sensible a costos
# ============================================================================

def derive_threshold(cost_fp: float, cost_fn: float, base_rate: float) -> float:
    """
    Umbral óptimo sobre la probabilidad posterior de incidente

    Args:
        cost_fp: Costo de una falsa alarma (minutos de analista)
        cost_fn: Costo de un incidente no detectado (minutos de caída)
        base_rate: Probabilidad a priori de incidente rho

    Returns:
        T en (0, 1)
    """
    if not (math.isfinite(cost_fp) and cost_fp > 0) or not (math.isfinite(cost_fn) and cost_fn > 0):
        raise CentinelaError(f"los costos deben ser positivos: cost_fp={cost_fp}, cost_fn={cost_fn}")
    if not 0.0 < base_rate < 1.0:
        raise CentinelaError(f"base_rate debe estar en (0, 1), recibido {base_rate}")
    fp_term = cost_fp * (1.0 - base_rate)
    return fp_term / (fp_term + cost_fn * base_rate)


def decide(probability: float, policy: DecisionPolicy) -> bool:
    """Alerta sii la probabilidad supera estrictamente el umbral"""
    return probability > policy.threshold


# ============================================================================
# Error budget
# ============================================================================

def budget_capacity(budget: ErrorBudget, policy: DecisionPolicy) -> Tuple[int, int]:
    """
    Máximo de falsas alarmas y de incidentes perdidos que caben en el budget

    Returns:
        (floor(budget / C_FP), floor(budget / C_FN))
    """
    minutes = Decimal(str(budget.budget_minutes))
    if minutes <= 0:
        return 0, 0

    def capacity(cost: float) -> int:
        return int((minutes / Decimal(str(cost))).to_integral_value(rounding=ROUND_FLOOR))

    return capacity(policy.cost_fp), capacity(policy.cost_fn)


def budget_burn(false_positives: int, false_negatives: int, policy: DecisionPolicy) -> float:
    """Minutos de budget consumidos: FP * C_FP + FN * C_FN"""
    return false_positives * policy.cost_fp + false_negatives * policy.cost_fn


def budget_status(
    budget: ErrorBudget,
    policy: DecisionPolicy,
    false_positives: int,
    false_negatives: int,
) -> BudgetStatus:
    """Consumo del budget para un conteo de errores dado"""
    burn = budget_burn(false_positives, false_negatives, policy)
    max_fp, max_fn = budget_capacity(budget, policy)
    minutes = budget.budget_minutes
    return BudgetStatus(
        slo=budget.slo,
        period_minutes=budget.period_minutes,
        budget_minutes=minutes,
        burn_minutes=burn,
        remaining_minutes=minutes - burn,
        burn_fraction=burn / minutes if minutes > 0 else None,
        exhausted=burn > minutes,
        max_false_alerts=max_fp,
        max_missed_incidents=max_fn,
    )
