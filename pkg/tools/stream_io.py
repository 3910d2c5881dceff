"""
Ingesta de streams etiquetados, partición cronológica y estandarización
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from models.stream import StandardizationParams, StreamSettings
from src.errors import StreamFormatError


logger = logging.getLogger("StreamIO")

# Columna de índice que escribe write_stream_csv; no es una feature
INDEX_COLUMN = "t"
FLOAT_FORMAT = "%.17g"


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class EventStream:
    """Secuencia inmutable de eventos etiquetados, en orden cronológico"""
    t: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    feature_names: Tuple[str, ...]

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.int64).ravel()
        features = np.asarray(self.features, dtype=float)
        if features.ndim == 1:
            features = features.reshape(-1, len(self.feature_names))
        labels = np.asarray(self.labels, dtype=np.int8).ravel()
        if not (t.shape[0] == features.shape[0] == labels.shape[0]):
            raise StreamFormatError(
                f"longitudes inconsistentes: t={t.shape[0]}, features={features.shape[0]}, labels={labels.shape[0]}"
            )
        if features.shape[1] != len(self.feature_names):
            raise StreamFormatError(
                f"{features.shape[1]} columnas de features para {len(self.feature_names)} nombres"
            )
        object.__setattr__(self, "t", _read_only(t))
        object.__setattr__(self, "features", _read_only(features))
        object.__setattr__(self, "labels", _read_only(labels))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def dimension(self) -> int:
        return len(self.feature_names)

    @property
    def positives(self) -> int:
        return int(self.labels.sum())

    def slice(self, start: int, stop: int) -> "EventStream":
        return EventStream(self.t[start:stop], self.features[start:stop], self.labels[start:stop], self.feature_names)

    def benign(self) -> "EventStream":
        """Sólo las filas con label 0"""
        mask = self.labels == 0
        return EventStream(self.t[mask], self.features[mask], self.labels[mask], self.feature_names)

    def with_features(self, features) -> "EventStream":
        return EventStream(self.t, features, self.labels, self.feature_names)

    @staticmethod
    def concat(streams: Sequence["EventStream"]) -> "EventStream":
        if not streams:
            raise StreamFormatError("no hay streams para concatenar")
        names = streams[0].feature_names
        return EventStream(
            t=np.concatenate([s.t for s in streams]),
            features=np.concatenate([s.features for s in streams]),
            labels=np.concatenate([s.labels for s in streams]),
            feature_names=names,
        )


def parse_labels(values: Iterable[str], benign_values: Sequence[str], column: str = "label") -> np.ndarray:
    """
    Convierte labels heterogéneos a {0, 1}

    Benigno si el valor (sin espacios) está en benign_values, con comparación
    insensible a mayúsculas, o si es numérico e igual a 0. Todo lo demás es ataque.
    """
    benign_set = {v.strip().lower() for v in benign_values}
    parsed = []
    for row, raw in enumerate(values, start=1):
        value = str(raw).strip()
        if not value:
            raise StreamFormatError("label vacío", row=row, column=column)
        if value.lower() in benign_set:
            parsed.append(0)
            continue
        try:
            parsed.append(0 if float(value) == 0.0 else 1)
        except ValueError:
            parsed.append(1)
    return np.asarray(parsed, dtype=np.int8)


def _numeric_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    """Columna numérica finita; informa la primera celda inválida con fila y columna"""
    raw = frame[column].astype(str).str.strip()
    values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0])
        raise StreamFormatError(f"valor no numérico '{raw.iloc[row]}'", row=row + 1, column=column)
    return values


def _chronological_order(frame: pd.DataFrame, column: str) -> np.ndarray:
    """Orden estable por timestamp: numérico si se puede, si no fecha"""
    raw = frame[column].astype(str).str.strip()
    numeric = pd.to_numeric(raw, errors="coerce")
    if not numeric.isna().any():
        keys = numeric.to_numpy(dtype=float)
    else:
        parsed = pd.to_datetime(raw, errors="coerce")
        missing = np.flatnonzero(parsed.isna().to_numpy())
        if missing.size:
            row = int(missing[0])
            raise StreamFormatError(f"timestamp no interpretable '{raw.iloc[row]}'", row=row + 1, column=column)
        keys = parsed.to_numpy(dtype="datetime64[ns]").astype(np.int64)
    return np.argsort(keys, kind="stable")


def read_stream_csv(path: str | Path, settings: StreamSettings) -> EventStream:
    """
    Lee un CSV etiquetado (UTF-8, separado por comas, con encabezado)

    Si settings.feature_columns está vacío se usan todas las columnas salvo el
    label, el timestamp y la columna índice 't'.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise StreamFormatError(f"archivo vacío: {path}") from None
    frame.columns = [str(c).strip() for c in frame.columns]
    if frame.shape[0] == 0:
        raise StreamFormatError(f"el archivo no tiene filas de datos: {path}")

    excluded = {settings.label_column, INDEX_COLUMN}
    if settings.timestamp_column:
        excluded.add(settings.timestamp_column)
    feature_columns = list(settings.feature_columns) or [c for c in frame.columns if c not in excluded]
    if not feature_columns:
        raise StreamFormatError("no hay columnas de features")

    required = feature_columns + [settings.label_column] + ([settings.timestamp_column] if settings.timestamp_column else [])
    for column in required:
        if column not in frame.columns:
            raise StreamFormatError("columna inexistente en el archivo", column=column)

    features = np.column_stack([_numeric_column(frame, c) for c in feature_columns])
    labels = parse_labels(frame[settings.label_column], settings.benign_values, settings.label_column)

    if settings.timestamp_column:
        order = _chronological_order(frame, settings.timestamp_column)
        features = features[order]
        labels = labels[order]

    logger.info(f"Leídas {features.shape[0]} filas ({len(feature_columns)} features) de {path}")
    return EventStream(
        t=np.arange(features.shape[0]),
        features=features,
        labels=labels,
        feature_names=tuple(feature_columns),
    )


def split_stream(stream: EventStream, fractions: Sequence[float]) -> Tuple[EventStream, EventStream, EventStream]:
    """
    Partición cronológica en train / validación / test

    Los cortes están en floor(n * fracción acumulada); el resto va a test.
    """
    n = len(stream)
    first = int(np.floor(n * fractions[0] + 1e-9))
    second = int(np.floor(n * (fractions[0] + fractions[1]) + 1e-9))
    second = max(first, min(second, n))
    return stream.slice(0, first), stream.slice(first, second), stream.slice(second, n)


def load_stream(settings: StreamSettings) -> Tuple[EventStream, EventStream, EventStream]:
    """
    Carga el stream descrito por settings y lo parte cronológicamente

    Returns:
        (train, validation, test)
    """
    if settings.is_synthetic:
        from tools.synthetic import generate_synthetic

        stream = generate_synthetic(settings.source)
    else:
        stream = read_stream_csv(settings.source, settings)

    train, validation, test = split_stream(stream, settings.split_fractions)
    logger.info(
        f"Segmentos: train={len(train)} ({train.positives} ataques), "
        f"validación={len(validation)} ({validation.positives}), test={len(test)} ({test.positives})"
    )
    return train, validation, test


def fit_standardization(train: EventStream) -> StandardizationParams:
    """Media y desvío (ddof=0) por feature sobre el segmento de entrenamiento"""
    if len(train) == 0:
        raise StreamFormatError("el segmento de entrenamiento está vacío")
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    zero = std <= 1e-12 * np.maximum(1.0, np.abs(mean))
    params = StandardizationParams(
        feature_names=list(train.feature_names),
        mean=mean.tolist(),
        std=std.tolist(),
        zero_variance=zero.tolist(),
    )
    if params.flagged_features:
        logger.warning(f"Features de varianza cero (quedan en 0): {params.flagged_features}")
    return params


def standardize(train: EventStream, *others: EventStream) -> Tuple[StandardizationParams, List[EventStream]]:
    """
    Estandariza todos los segmentos con estadísticos del entrenamiento

    Los parámetros se calculan antes de tocar validación o test.

    Returns:
        (parámetros, [train, *others] transformados)
    """
    params = fit_standardization(train)
    transformed = [segment.with_features(params.apply(segment.features)) for segment in (train, *others)]
    return params, transformed


def stream_frame(stream: EventStream) -> pd.DataFrame:
    """DataFrame con columnas t, f0..f{d-1}, label"""
    frame = pd.DataFrame(stream.features, columns=[f"f{j}" for j in range(stream.dimension)])
    frame.insert(0, INDEX_COLUMN, stream.t)
    frame["label"] = stream.labels.astype(np.int64)
    return frame


def write_stream_csv(stream: EventStream, path: str | Path) -> None:
    """Escribe el stream en el mismo dialecto CSV que read_stream_csv consume"""
    stream_frame(stream).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
