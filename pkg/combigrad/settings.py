import os

from dotenv import load_dotenv

load_dotenv()

# === Configuración desde variables de entorno ===

APP_ENV = os.getenv("APP_ENV", "development")
API_VERSION = os.getenv("API_VERSION", "0.1.0")
GIT_COMMIT = os.getenv("GIT_COMMIT", "unknown")
ROOT_PATH = os.getenv("COMBIGRAD_ROOT_PATH", "")

LOG_LEVEL = os.getenv("COMBIGRAD_LOG_LEVEL", "INFO").upper()

# Hilos para generar datasets y renderizar paisajes (1 = secuencial)
WORKERS = max(1, int(os.getenv("COMBIGRAD_WORKERS", "1")))

# Máximo de candidatos que el oráculo de fuerza bruta acepta enumerar
ORACLE_BUDGET = int(os.getenv("COMBIGRAD_ORACLE_BUDGET", str(10**7)))

# Resolución máxima por eje de un paisaje f_lambda (512 -> 512x512)
LANDSCAPE_MAX_RES = int(os.getenv("COMBIGRAD_LANDSCAPE_MAX_RES", "512"))

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
