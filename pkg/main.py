"""
CENTINELA - Detección de intrusiones con BOCPD calibrado por riesgo
Punto de entrada principal
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import settings
from detectors.orchestrator import Orchestrator
from models.policy import BudgetReportV1, DecisionPolicy, ErrorBudget
from models.run_config import RunConfig
from src.errors import CentinelaError
from src.mixture_risk import budget_capacity
from tools import export_tools
from tools.stream_io import write_stream_csv
from tools.synthetic import generate_synthetic


logger = logging.getLogger("Centinela")


# ============================================================================
# Configuración de la corrida
# ============================================================================

def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Archivo (si se pasa) y luego flags del CLI por encima"""
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    return config.with_overrides(
        seed=args.seed,
        output_dir=args.out,
        input_path=getattr(args, "input", None),
        n_jobs=getattr(args, "n_jobs", None),
    )


# ============================================================================
# Comandos
# ============================================================================

def cmd_detect(args: argparse.Namespace) -> int:
    orchestrator = Orchestrator(load_run_config(args))
    run = orchestrator.detect()
    orchestrator.write_detect(run)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    orchestrator = Orchestrator(load_run_config(args))
    run = orchestrator.evaluate(debug_oracle=args.debug_oracle)
    orchestrator.write_evaluation(run)
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    orchestrator = Orchestrator(load_run_config(args))
    result, tuned = orchestrator.tune()
    orchestrator.write_tuning(result, tuned)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    stream = config.resolved_stream()
    if not stream.is_synthetic:
        raise CentinelaError("synth requiere una fuente sintética en stream.source")
    overrides = {
        key: value
        for key, value in (("length", args.length), ("dimension", args.dimension), ("attack_rate", args.attack_rate))
        if value is not None
    }
    source = stream.source.model_validate({**stream.source.model_dump(), **overrides})
    output = Path(config.output_dir) / "synthetic.csv"
    output.parent.mkdir(parents=True, exist_ok=True)
    write_stream_csv(generate_synthetic(source), output)
    logger.info(f"Escrito: {output}")
    return 0


def budget_report(slo: float, period_minutes: float, cost_fp: float, cost_fn: float, base_rate: float) -> BudgetReportV1:
    """Budget, umbral y capacidades para un SLO y una política de costos"""
    budget = ErrorBudget(slo=slo, period_minutes=period_minutes)
    policy = DecisionPolicy.from_costs(cost_fp, cost_fn, base_rate)
    max_false_alerts, max_missed = budget_capacity(budget, policy)
    return BudgetReportV1(
        slo=budget.slo,
        period_minutes=budget.period_minutes,
        budget_minutes=budget.budget_minutes,
        cost_fp=policy.cost_fp,
        cost_fn=policy.cost_fn,
        base_rate=policy.base_rate,
        threshold=policy.threshold,
        max_false_alerts=max_false_alerts,
        max_missed_incidents=max_missed,
    )


def format_budget_report(report: BudgetReportV1) -> str:
    return "\n".join(
        [
            f"SLO: {report.slo} sobre {report.period_minutes:g} min",
            f"Error budget: {report.budget_minutes:.2f} min",
            f"Costos: C_FP={report.cost_fp:g} min, C_FN={report.cost_fn:g} min, rho={report.base_rate:g}",
            f"Umbral T: {report.threshold:.6f} ({report.threshold:.2f})",
            f"Máx. falsas alarmas: {report.max_false_alerts}",
            f"Máx. incidentes perdidos: {report.max_missed_incidents}",
        ]
    )


def cmd_budget(args: argparse.Namespace) -> int:
    report = budget_report(args.slo, args.period_minutes, args.cost_fp, args.cost_fn, args.base_rate)
    print(format_budget_report(report))
    output_dir = Path(args.out or settings.OUTPUT_DIR)
    result = export_tools.write_json(report, output_dir / "budget.json")
    if not result["success"]:
        raise CentinelaError(result["error"])
    return 0


# ============================================================================
# Parser
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="centinela",
        description="Detección online de intrusiones con BOCPD y umbrales derivados del error budget",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Nivel de logging (stderr)")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser, with_stream: bool = True) -> None:
        sub.add_argument("--config", help="RunConfig JSON (o preset)")
        sub.add_argument("--out", help="Directorio de salida")
        sub.add_argument("--seed", type=int, help="Semilla de la corrida")
        if with_stream:
            sub.add_argument("--input", help="CSV etiquetado (reemplaza stream.source)")
            sub.add_argument("--n-jobs", type=int, dest="n_jobs", help="Hilos para tareas independientes")

    detect = commands.add_parser("detect", help="Detección online sobre el segmento de test")
    common(detect)
    detect.set_defaults(handler=cmd_detect)

    evaluate = commands.add_parser("eval", help="AUPRC, AUC y calibración del detector y baselines")
    common(evaluate)
    evaluate.add_argument("--debug-oracle", action="store_true", help="Agrega un método con scores perfectos")
    evaluate.set_defaults(handler=cmd_eval)

    tune = commands.add_parser("tune", help="Búsqueda en grilla sobre la ventana de validación")
    common(tune)
    tune.set_defaults(handler=cmd_tune)

    synth = commands.add_parser("synth", help="Genera un stream sintético etiquetado")
    common(synth, with_stream=False)
    synth.add_argument("--length", type=int)
    synth.add_argument("--dimension", type=int)
    synth.add_argument("--attack-rate", type=float, dest="attack_rate")
    synth.set_defaults(handler=cmd_synth)

    budget = commands.add_parser("budget", help="Error budget, umbral y capacidades de alerta")
    budget.add_argument("--out", help="Directorio de salida")
    budget.add_argument("--slo", type=float, default=0.999)
    budget.add_argument("--period-minutes", type=float, dest="period_minutes", default=43200.0)
    budget.add_argument("--cost-fp", type=float, dest="cost_fp", default=1.0)
    budget.add_argument("--cost-fn", type=float, dest="cost_fn", default=10.0)
    budget.add_argument("--base-rate", type=float, dest="base_rate", default=0.01)
    budget.set_defaults(handler=cmd_budget)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Función principal; devuelve el código de salida"""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    # CentinelaError y pydantic.ValidationError son ValueError
    try:
        return args.handler(args)
    except (ValueError, OSError) as e:
        message = " ".join(str(e).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
