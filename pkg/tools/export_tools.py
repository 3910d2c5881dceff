"""
Escritura de resultados: CSV de curvas, timeline, confiabilidad, tuning y JSON

Cada función devuelve un dict {"success", "path", "error"} y nunca lanza
por problemas de I/O; quien llama decide qué hacer con los fallos.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel

from models.report import CurvePoint, ReliabilityBin, TuningCell


FLOAT_FORMAT = "%.17g"

CURVE_COLUMNS = ["threshold", "x", "y"]
RELIABILITY_COLUMNS = ["bin_low", "bin_high", "mean_pred", "emp_freq", "count"]
TUNING_COLUMNS = ["hazard", "scale_inflation", "mixing_weight", "objective", "value", "status", "reason"]


def _result(path: str | Path, error: Exception | None = None) -> Dict[str, Any]:
    if error is not None:
        return {"success": False, "path": None, "error": f"{path}: {error}"}
    return {"success": True, "path": str(path), "error": None}


def write_frame(frame: pd.DataFrame, path: str | Path) -> Dict[str, Any]:
    """CSV con formato de float fijo (salidas idénticas byte a byte)"""
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
        return _result(path)
    except (OSError, ValueError) as e:
        return _result(path, e)


def write_curve_csv(curve: Sequence[CurvePoint], path: str | Path) -> Dict[str, Any]:
    """Curva PR o ROC con encabezado threshold,x,y"""
    frame = pd.DataFrame(
        [(p.threshold, p.x, p.y) for p in curve],
        columns=CURVE_COLUMNS,
    )
    return write_frame(frame, path)


def write_reliability_csv(bins: Sequence[ReliabilityBin], path: str | Path) -> Dict[str, Any]:
    """Bins de confiabilidad; los bins vacíos dejan mean_pred y emp_freq en blanco"""
    frame = pd.DataFrame(
        [(b.bin_low, b.bin_high, b.mean_predicted, b.empirical_frequency, b.count) for b in bins],
        columns=RELIABILITY_COLUMNS,
    )
    frame["count"] = frame["count"].astype("int64")
    return write_frame(frame, path)


def write_tuning_csv(table: Sequence[TuningCell], path: str | Path) -> Dict[str, Any]:
    """Tabla de tuning en orden de grilla; las celdas excluidas llevan value vacío y su motivo"""
    frame = pd.DataFrame(
        [
            (c.hazard, c.scale_inflation, c.mixing_weight, c.objective, c.value, c.status, c.reason or "")
            for c in table
        ],
        columns=TUNING_COLUMNS,
    )
    return write_frame(frame, path)


def write_intervals_csv(intervals: Sequence[Tuple[int, int]], path: str | Path) -> Dict[str, Any]:
    frame = pd.DataFrame(list(intervals), columns=["start", "end"], dtype="int64")
    return write_frame(frame, path)


def write_lines(lines: List[str], path: str | Path) -> Dict[str, Any]:
    """Archivo de texto, una línea por elemento"""
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for line in lines:
                f.write(line + "\n")
        return _result(path)
    except OSError as e:
        return _result(path, e)


def write_json(payload: BaseModel | Dict[str, Any], path: str | Path) -> Dict[str, Any]:
    """Serializa un modelo pydantic (o un dict) con indentación 2"""
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        if isinstance(payload, BaseModel):
            text = payload.model_dump_json(indent=2)
        else:
            text = json.dumps(payload, indent=2)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text + "\n")
        return _result(path)
    except (OSError, TypeError, ValueError) as e:
        return _result(path, e)
