"""
Orchestrator - coordina ingesta, detectores, métricas y tuning

Cada comando del CLI es un método: detect, evaluate, tune. Los segmentos se
cargan y estandarizan una sola vez por corrida.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from detectors.base_detector import BaseDetector
from detectors.bocpd_detector import BocpdDetector
from detectors.ecod_detector import CopodDetector, EcodDetector
from detectors.lof_detector import LofDetector
from models.detector import DetectorSettings
from models.report import DetectSummaryV1, EvaluationReportV1, TuningResult
from models.run_config import RunConfig
from models.stream import ScoredEvent, StandardizationParams
from src.errors import CentinelaError, MetricUndefinedError
from src.metrics import MethodEvaluation, attack_intervals, evaluate_method, timeline_export
from src.mixture_risk import budget_status
from src.tuner import tune
from tools import export_tools
from tools.stream_io import EventStream, load_stream, standardize


logger = logging.getLogger("Orchestrator")


@dataclass
class PreparedStream:
    """Segmentos cronológicos estandarizados con estadísticos del entrenamiento"""
    train: EventStream
    validation: EventStream
    test: EventStream
    standardization: StandardizationParams


@dataclass
class DetectionRun:
    """Resultado del comando detect"""
    events: List[ScoredEvent]
    summary: DetectSummaryV1
    intervals: List[Tuple[int, int]] = field(default_factory=list)


@dataclass
class EvaluationRun:
    """Resultado del comando eval"""
    report: EvaluationReportV1
    evaluations: Dict[str, MethodEvaluation]


class Orchestrator:
    """
    Orchestrator - Conductor Central

    Responsabilidades:
    - Cargar y partir el stream sin fugas de test hacia el entrenamiento
    - Ajustar el detector BOCPD y los baselines
    - Correr el test evento por evento y aplicar la política de costos
    - Armar reportes y escribir salidas
    """

    BASELINES = {
        "lof": lambda config: LofDetector(k=config.baselines.lof_k),
        "ecod": lambda config: EcodDetector(),
        "copod": lambda config: CopodDetector(),
    }

    def __init__(self, config: RunConfig):
        self.config = config
        self._prepared: Optional[PreparedStream] = None
        logger.info("Orchestrator inicializado")
        logger.info(f"Seed: {config.seed}, salida: {config.output_dir}")

    @property
    def output_dir(self) -> Path:
        return Path(self.config.output_dir)

    def prepare(self) -> PreparedStream:
        """Carga, parte y estandariza (una vez por corrida)"""
        if self._prepared is None:
            train, validation, test = load_stream(self.config.resolved_stream())
            params, (train, validation, test) = standardize(train, validation, test)
            self._prepared = PreparedStream(train, validation, test, params)
        return self._prepared

    def build_detector(self, settings: Optional[DetectorSettings] = None) -> BocpdDetector:
        """Detector BOCPD ajustado sobre el entrenamiento"""
        prepared = self.prepare()
        detector = BocpdDetector(settings or self.config.detector, self.config.mixing_weight())
        return detector.fit(prepared.train.features, prepared.train.labels)

    def build_baselines(self) -> List[BaseDetector]:
        """Baselines seleccionados, ajustados sobre las filas benignas del entrenamiento"""
        benign = self.prepare().train.benign()
        if len(benign) == 0:
            raise CentinelaError("el entrenamiento no tiene eventos benignos para los baselines")
        return [self.BASELINES[name](self.config).fit(benign.features) for name in self.config.baselines.methods]

    # ------------------------------------------------------------------
    # detect
    # ------------------------------------------------------------------

    def detect(self) -> DetectionRun:
        """Procesa el test evento por evento con la política de costos"""
        prepared = self.prepare()
        test = prepared.test
        policy = self.config.policy
        detector = self.build_detector()
        events = detector.detect(test.t, test.features, test.labels, policy)

        tp = sum(1 for e in events if e.alert and e.label == 1)
        fp = sum(1 for e in events if e.alert and e.label == 0)
        fn = sum(1 for e in events if not e.alert and e.label == 1)
        summary = DetectSummaryV1(
            seed=self.config.seed,
            n_events=len(events),
            positives=test.positives,
            alerts=tp + fp,
            true_positives=tp,
            false_positives=fp,
            false_negatives=fn,
            threshold=policy.threshold,
            cost_fp=policy.cost_fp,
            cost_fn=policy.cost_fn,
            base_rate=policy.base_rate,
            mixing_weight=detector.mixing_weight,
            budget=budget_status(self.config.budget, policy, fp, fn),
        )
        self._log_detect_summary(summary)
        return DetectionRun(events=events, summary=summary, intervals=attack_intervals(test.labels, test.t))

    def write_detect(self, run: DetectionRun) -> List[str]:
        out = self.output_dir
        lines = [f"t={e.t} p={e.score:.6f} r_map={e.map_run_length}" for e in run.events if e.alert]
        results = [
            export_tools.write_frame(timeline_export(run.events, self.config.policy), out / "timeline.csv"),
            export_tools.write_lines(lines, out / "alerts.log"),
            export_tools.write_intervals_csv(run.intervals, out / "attacks.csv"),
            export_tools.write_json(run.summary, out / "summary.json"),
        ]
        return self._check(results)

    # ------------------------------------------------------------------
    # eval
    # ------------------------------------------------------------------

    def evaluate(self, debug_oracle: bool = False) -> EvaluationRun:
        """
        AUPRC, AUC y curvas para el detector y cada baseline seleccionado

        Args:
            debug_oracle: Agrega un método 'oracle' con scores iguales a los labels

        Returns:
            EvaluationRun
        """
        prepared = self.prepare()
        test = prepared.test
        positives = test.positives
        if positives == 0 or positives == len(test):
            raise MetricUndefinedError(
                f"el test tiene una sola clase ({positives} positivos de {len(test)} eventos)"
            )

        detectors: List[BaseDetector] = [self.build_detector(), *self.build_baselines()]

        def score(detector: BaseDetector) -> np.ndarray:
            logger.info(f"Puntuando test con {detector.name}")
            return detector.score_stream(test.features)

        if self.config.n_jobs > 1:
            with ThreadPoolExecutor(max_workers=self.config.n_jobs) as executor:
                all_scores = list(executor.map(score, detectors))
        else:
            all_scores = [score(d) for d in detectors]

        evaluations: Dict[str, MethodEvaluation] = {}
        for detector, scores in zip(detectors, all_scores):
            evaluations[detector.name] = evaluate_method(
                detector.name,
                scores,
                test.labels,
                probabilities=detector.emits_probabilities,
                bins=self.config.reliability_bins,
            )
        if debug_oracle:
            evaluations["oracle"] = evaluate_method("oracle", test.labels.astype(float), test.labels)

        for name, evaluation in evaluations.items():
            m = evaluation.metrics
            ece = f"{m.ece:.4f}" if m.ece is not None else "-"
            logger.info(f"{name}: AUPRC={m.auprc:.4f} AUC={m.auc:.4f} ECE={ece}")

        report = EvaluationReportV1(
            seed=self.config.seed,
            methods={name: e.metrics for name, e in evaluations.items()},
        )
        return EvaluationRun(report=report, evaluations=evaluations)

    def write_evaluation(self, run: EvaluationRun) -> List[str]:
        out = self.output_dir
        results = [export_tools.write_json(run.report, out / "metrics.json")]
        for name, evaluation in run.evaluations.items():
            results.append(export_tools.write_curve_csv(evaluation.pr, out / f"pr_{name}.csv"))
            results.append(export_tools.write_curve_csv(evaluation.roc, out / f"roc_{name}.csv"))
            if evaluation.reliability:
                results.append(
                    export_tools.write_reliability_csv(evaluation.reliability, out / f"reliability_{name}.csv")
                )
        return self._check(results)

    # ------------------------------------------------------------------
    # tune
    # ------------------------------------------------------------------

    def tune(self) -> Tuple[TuningResult, RunConfig]:
        """
        Grilla sobre la ventana de validación

        Returns:
            (resultado, RunConfig con los hiperparámetros elegidos)
        """
        prepared = self.prepare()
        result = tune(
            self.config.tuning,
            prepared.train,
            prepared.validation,
            base_settings=self.config.detector,
            default_mixing_weight=self.config.mixing_weight(),
            n_jobs=self.config.n_jobs,
        )
        update: Dict[str, Any] = {
            "hazard": result.best.hazard,
            "scale_inflation": result.best.scale_inflation,
        }
        if self.config.tuning.mixing_weights is not None:
            update["mixing_weight"] = result.best.mixing_weight
        detector = self.config.detector.model_copy(update=update)
        tuned = RunConfig.model_validate({**self.config.model_dump(), "detector": detector.model_dump()})
        return result, tuned

    def write_tuning(self, result: TuningResult, tuned: RunConfig) -> List[str]:
        out = self.output_dir
        results = [
            export_tools.write_tuning_csv(result.table, out / "tuning.csv"),
            export_tools.write_json(tuned, out / "tuned_config.json"),
        ]
        return self._check(results)

    # ------------------------------------------------------------------

    @staticmethod
    def _check(results: List[Dict[str, Any]]) -> List[str]:
        """Rutas escritas; si alguna escritura falló lanza CentinelaError con todas"""
        failures = [r["error"] for r in results if not r["success"]]
        if failures:
            raise CentinelaError("no se pudieron escribir salidas: " + "; ".join(failures))
        paths = [r["path"] for r in results]
        for path in paths:
            logger.info(f"Escrito: {path}")
        return paths

    def _log_detect_summary(self, summary: DetectSummaryV1) -> None:
        """Registra resumen de la detección"""
        logger.info("=" * 50)
        logger.info("RESUMEN DE DETECCIÓN")
        logger.info("=" * 50)
        logger.info(f"Eventos: {summary.n_events} ({summary.positives} ataques)")
        logger.info(f"Umbral: {summary.threshold:.6f}")
        logger.info(f"Alertas: {summary.alerts} (TP={summary.true_positives}, FP={summary.false_positives})")
        logger.info(f"Incidentes perdidos: {summary.false_negatives}")
        budget = summary.budget
        logger.info(
            f"Budget: {budget.burn_minutes:.1f} de {budget.budget_minutes:.1f} min"
            + (" (AGOTADO)" if budget.exhausted else "")
        )
        logger.info("=" * 50)
