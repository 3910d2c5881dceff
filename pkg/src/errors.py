"""
Excepciones del detector

Todas heredan de ValueError para que el CLI las trate igual que los
errores de validación de pydantic.
"""
from typing import Optional


class CentinelaError(ValueError):
    """Error base del sistema"""


class DimensionMismatchError(CentinelaError):
    """La dimensión de una observación no coincide con la del modelo"""

    def __init__(self, expected: int, got: int):
        super().__init__(f"dimensión esperada {expected}, recibida {got}")
        self.expected = expected
        self.got = got


class NonFiniteInputError(CentinelaError):
    """Observación con NaN o Inf"""


class DegenerateModelError(CentinelaError):
    """La masa predictiva total (o ambas densidades) cae a -inf"""


class StreamFormatError(CentinelaError):
    """Error de ingesta de CSV, con fila y columna cuando se conocen"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = []
        if row is not None:
            location.append(f"fila {row}")
        if column is not None:
            location.append(f"columna '{column}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(prefix + message)
        self.row = row
        self.column = column


class ChronologyError(CentinelaError):
    """Eventos fuera de orden cronológico"""


class MetricUndefinedError(CentinelaError):
    """La métrica no está definida para los datos (p. ej. sin positivos)"""


class NoValidCellsError(CentinelaError):
    """Ninguna celda de la grilla produjo un objetivo válido"""
