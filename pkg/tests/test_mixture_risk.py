"""
Pruebas unitarias para la mezcla, la regla de decisión y el error budget
"""
import math
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import numpy as np
from pydantic import ValidationError
from scipy.optimize import brentq

from models.detector import NigParams
from models.policy import DecisionPolicy, ErrorBudget
from src.bocpd import RunLengthPosterior
from src.errors import CentinelaError, DimensionMismatchError
from src.mixture_risk import (
    MixtureState,
    budget_burn,
    budget_capacity,
    budget_status,
    decide,
    derive_threshold,
    incident_probability,
    incident_probability_direct,
    incident_probability_from_terms,
    mixture_update,
    mixture_update_with,
    responsibilities,
)
from src.model_core import ConjugateModel, batch_posterior, predictive_logpdf


UNIT = NigParams(mu0=0.0, kappa0=1.0, alpha0=1.0, beta0=1.0)


def single_hypothesis(state: MixtureState) -> RunLengthPosterior:
    batched = MixtureState(state.benign.repeat(1), state.malicious.repeat(1), state.mixing_weight)
    return RunLengthPosterior(
        run_lengths=np.zeros(1, dtype=np.int64),
        log_weights=np.zeros(1),
        states=batched,
    )


class TestIncidentProbability(unittest.TestCase):
    """Pruebas para gamma y la probabilidad de incidente"""

    def test_identical_components(self):
        """Componentes iguales: la probabilidad es 1 - pi"""
        model = ConjugateModel.from_prior([UNIT, UNIT])
        for pi in (0.5, 0.9, 0.99):
            posterior = single_hypothesis(MixtureState(model, model, pi))
            for x in ([0.0, 0.0], [3.0, -1.0]):
                self.assertAlmostEqual(incident_probability(posterior, x), 1.0 - pi, places=12)

    def test_density_ratio_three(self):
        """pi = 0.5 y p_b = 3 p_m en x: probabilidad 1/4"""
        benign = ConjugateModel.from_prior([NigParams(mu0=0.0, kappa0=1.0, alpha0=2.0, beta0=2.0)])
        malicious = ConjugateModel.from_prior([NigParams(mu0=4.0, kappa0=1.0, alpha0=2.0, beta0=2.0)])

        def log_ratio(x):
            return predictive_logpdf(benign, [x]) - predictive_logpdf(malicious, [x]) - math.log(3.0)

        x = brentq(log_ratio, 0.0, 2.0, xtol=1e-14)
        posterior = single_hypothesis(MixtureState(benign, malicious, 0.5))
        self.assertAlmostEqual(incident_probability(posterior, [x]), 0.25, places=10)

    def test_two_hypotheses(self):
        """Pesos (0.6, 0.4) con gammas (0.1, 0.9): 0.42"""
        value = incident_probability_from_terms(np.log([0.6, 0.4]), np.log([0.1, 0.9]))
        self.assertAlmostEqual(value, 0.42, places=12)
        # Densidades con pi = 0.5 que producen esas mismas responsabilidades
        direct = incident_probability_direct([0.6, 0.4], [0.9, 0.1], [0.1, 0.9], 0.5)
        self.assertAlmostEqual(direct, 0.42, places=12)

    def test_log_space_matches_direct(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            n = int(rng.integers(1, 6))
            weights = rng.dirichlet(np.ones(n))
            pb = rng.uniform(0.01, 2.0, size=n)
            pm = rng.uniform(0.01, 2.0, size=n)
            pi = float(rng.uniform(0.05, 0.95))
            log_gamma = np.log((1 - pi) * pm) - np.log(pi * pb + (1 - pi) * pm)
            self.assertAlmostEqual(
                incident_probability_from_terms(np.log(weights), log_gamma),
                incident_probability_direct(weights, pb, pm, pi),
                places=12,
            )

    def test_probability_in_unit_interval(self):
        benign = ConjugateModel.from_prior([UNIT])
        malicious = ConjugateModel.from_prior([UNIT.model_copy(update={"beta0": 100.0})])
        posterior = single_hypothesis(MixtureState(benign, malicious, 0.99))
        for x in (-1e6, -3.0, 0.0, 50.0, 1e6):
            p = incident_probability(posterior, [x])
            self.assertGreaterEqual(p, 0.0)
            self.assertLessEqual(p, 1.0)

    def test_mismatched_components(self):
        with self.assertRaises(DimensionMismatchError):
            MixtureState(ConjugateModel.from_prior([UNIT]), ConjugateModel.from_prior([UNIT, UNIT]), 0.5)


class TestMixtureUpdate(unittest.TestCase):
    """Pruebas para el update ponderado por responsabilidad"""

    def setUp(self):
        self.benign = ConjugateModel.from_prior([UNIT])
        self.malicious = ConjugateModel.from_prior([UNIT])
        self.state = MixtureState(self.benign, self.malicious, 0.9)

    def test_gamma_zero(self):
        updated = mixture_update_with(self.state, [2.0], 0.0)
        self.assertEqual(updated.malicious, self.malicious)
        self.assertTrue(updated.benign.allclose(batch_posterior([UNIT], [[2.0]]), rtol=1e-15))

    def test_gamma_one(self):
        updated = mixture_update_with(self.state, [2.0], 1.0)
        self.assertEqual(updated.benign, self.benign)
        self.assertTrue(updated.malicious.allclose(batch_posterior([UNIT], [[2.0]]), rtol=1e-15))

    def test_gamma_half(self):
        """gamma = 0.5: ambas componentes con kappa 1.5, mu 2/3, alpha 1.25, beta 5/3"""
        updated = mixture_update_with(self.state, [2.0], 0.5)
        oracle = batch_posterior([UNIT], [[2.0]], weights=[0.5])
        for component in (updated.benign, updated.malicious):
            self.assertTrue(component.allclose(oracle, rtol=1e-12))
            self.assertAlmostEqual(component.beta[0], 5.0 / 3.0, places=12)

    def test_soft_update_uses_responsibility(self):
        gamma = float(responsibilities(self.state, [2.0]))
        self.assertAlmostEqual(gamma, 0.1, places=12)
        updated = mixture_update(self.state, [2.0])
        self.assertAlmostEqual(updated.malicious.kappa[0], 1.1, places=12)
        self.assertAlmostEqual(updated.benign.kappa[0], 1.9, places=12)

    def test_hard_update_rounds(self):
        updated = mixture_update(self.state, [2.0], hard=True)
        self.assertEqual(updated.malicious, self.malicious)
        self.assertAlmostEqual(updated.benign.kappa[0], 2.0)


class TestDecisionRule(unittest.TestCase):
    """Pruebas para el umbral por costos"""

    def test_threshold_examples(self):
        self.assertAlmostEqual(derive_threshold(1.0, 10.0, 0.01), 0.99 / 1.09, places=12)
        self.assertAlmostEqual(derive_threshold(3.0, 3.0, 0.5), 0.5, places=12)
        self.assertAlmostEqual(derive_threshold(2.0, 5.0, 0.1), 1.8 / 2.3, places=12)

    def test_threshold_monotone(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            cfp, cfn = rng.uniform(0.1, 10.0, size=2)
            rho = float(rng.uniform(0.01, 0.9))
            base = derive_threshold(cfp, cfn, rho)
            self.assertGreater(base, 0.0)
            self.assertLess(base, 1.0)
            self.assertGreater(derive_threshold(cfp * 1.5, cfn, rho), base)
            self.assertLess(derive_threshold(cfp, cfn * 1.5, rho), base)
            self.assertLess(derive_threshold(cfp, cfn, min(rho * 1.05, 0.95)), base)

    def test_threshold_rejects_invalid(self):
        for args in ((0.0, 1.0, 0.1), (1.0, -1.0, 0.1), (1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (math.inf, 1.0, 0.1)):
            with self.assertRaises(CentinelaError):
                derive_threshold(*args)

    def test_decide_is_strict(self):
        policy = DecisionPolicy(cost_fp=1.0, cost_fn=1.0, base_rate=0.5)
        self.assertFalse(decide(0.5, policy))
        self.assertTrue(decide(0.5000001, policy))
        self.assertFalse(decide(0.0, policy))

    def test_policy_caches_threshold(self):
        policy = DecisionPolicy.sre_example()
        self.assertAlmostEqual(policy.threshold, 0.908256880733945, places=12)
        again = DecisionPolicy.model_validate(policy.model_dump())
        self.assertEqual(again, policy)

    def test_policy_rejects_inconsistent_threshold(self):
        with self.assertRaises(ValidationError):
            DecisionPolicy(cost_fp=1.0, cost_fn=10.0, base_rate=0.01, threshold=0.5)

    def test_policy_rejects_bad_costs(self):
        with self.assertRaises(ValidationError):
            DecisionPolicy(cost_fp=0.0, cost_fn=10.0, base_rate=0.01)
        with self.assertRaises(ValidationError):
            DecisionPolicy(cost_fp=1.0, cost_fn=10.0, base_rate=1.0)


class TestErrorBudget(unittest.TestCase):
    """Pruebas para la aritmética del error budget"""

    def test_sre_example(self):
        budget = ErrorBudget(slo=0.999, period_minutes=43200.0)
        self.assertEqual(budget.budget_minutes, 43.2)
        self.assertEqual(budget_capacity(budget, DecisionPolicy.sre_example()), (43, 4))

    def test_budget_has_no_float_noise(self):
        self.assertEqual(ErrorBudget(slo=0.99, period_minutes=43200.0).budget_minutes, 432.0)
        self.assertEqual(ErrorBudget(slo=0.9, period_minutes=1.0).budget_minutes, 0.1)
        # 0.1 / 0.1 en decimal es exactamente 1
        budget = ErrorBudget(slo=0.9, period_minutes=1.0)
        policy = DecisionPolicy(cost_fp=0.1, cost_fn=0.3, base_rate=0.01)
        self.assertEqual(budget_capacity(budget, policy), (1, 0))
        budget = ErrorBudget(slo=0.7, period_minutes=1.0)
        self.assertEqual(budget_capacity(budget, policy), (3, 1))

    def test_perfect_slo(self):
        budget = ErrorBudget(slo=1.0, period_minutes=43200.0)
        self.assertEqual(budget.budget_minutes, 0.0)
        self.assertEqual(budget_capacity(budget, DecisionPolicy.sre_example()), (0, 0))

    def test_exact_multiple(self):
        budget = ErrorBudget(slo=0.99, period_minutes=43200.0)
        policy = DecisionPolicy(cost_fp=1.0, cost_fn=1.0, base_rate=0.5)
        self.assertEqual(budget_capacity(budget, policy), (432, 432))

    def test_capacity_is_floor(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            budget = ErrorBudget(slo=float(rng.uniform(0.9, 0.9999)), period_minutes=float(rng.uniform(100, 1e5)))
            policy = DecisionPolicy(
                cost_fp=float(rng.uniform(0.1, 20.0)),
                cost_fn=float(rng.uniform(0.1, 200.0)),
                base_rate=0.01,
            )
            max_fp, max_fn = budget_capacity(budget, policy)
            minutes = budget.budget_minutes
            self.assertLessEqual(max_fp * policy.cost_fp, minutes + 1e-6)
            self.assertLess(minutes, (max_fp + 1) * policy.cost_fp)
            self.assertLessEqual(max_fn * policy.cost_fn, minutes + 1e-6)
            self.assertLess(minutes, (max_fn + 1) * policy.cost_fn)

    def test_slo_domain(self):
        with self.assertRaises(ValidationError):
            ErrorBudget(slo=0.0)
        with self.assertRaises(ValidationError):
            ErrorBudget(slo=1.5)

    def test_burn(self):
        policy = DecisionPolicy.sre_example()
        self.assertEqual(budget_burn(2, 1, policy), 12.0)
        self.assertEqual(budget_burn(0, 0, policy), 0.0)

    def test_status(self):
        budget = ErrorBudget()
        policy = DecisionPolicy.sre_example()
        status = budget_status(budget, policy, 2, 1)
        self.assertEqual(status.burn_minutes, 12.0)
        self.assertAlmostEqual(status.remaining_minutes, 31.2, places=9)
        self.assertFalse(status.exhausted)
        self.assertEqual((status.max_false_alerts, status.max_missed_incidents), (43, 4))
        self.assertTrue(budget_status(budget, policy, 0, 5).exhausted)

    def test_status_without_budget(self):
        status = budget_status(ErrorBudget(slo=1.0), DecisionPolicy.sre_example(), 0, 0)
        self.assertIsNone(status.burn_fraction)
        self.assertFalse(status.exhausted)


if __name__ == '__main__':
    unittest.main()
