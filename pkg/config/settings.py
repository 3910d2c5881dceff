"""
Configuración de la aplicación
"""
import os
from dotenv import load_dotenv

# Cargar variables de entorno
load_dotenv()


def _optional_int(name: str, default: str) -> int | None:
    """Lee un entero opcional; vacío o 0 significa 'sin límite'"""
    raw = os.getenv(name, default).strip()
    if not raw or int(raw) == 0:
        return None
    return int(raw)


# Salida y reproducibilidad
OUTPUT_DIR = os.getenv("CENTINELA_OUTPUT_DIR", "out")
DEFAULT_SEED = int(os.getenv("CENTINELA_SEED", "0"))
N_JOBS = int(os.getenv("CENTINELA_N_JOBS", "1"))

# Motor BOCPD
PRUNE_THRESHOLD = float(os.getenv("CENTINELA_PRUNE_THRESHOLD", "-30.0"))
MAX_RUN_LENGTH = _optional_int("CENTINELA_MAX_RUN_LENGTH", "500")

# Baselines y métricas
LOF_K = int(os.getenv("CENTINELA_LOF_K", "20"))
RELIABILITY_BINS = int(os.getenv("CENTINELA_RELIABILITY_BINS", "10"))

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
