import os

from loguru import logger


def _float_env(name: str, default: str) -> float:
    raw = os.getenv(name, default)
    try:
        return float(raw)
    except ValueError:
        logger.error(f"Invalid {name} value '{raw}', using default {default}")
        return float(default)


def _log_level_env(name: str, default: str) -> str:
    raw = os.getenv(name, default).strip().upper()
    try:
        logger.level(raw)
    except ValueError:
        logger.error(f"Invalid {name} value '{raw}', using default {default}")
        return default
    return raw


# NORMALIZATION CHECKS
DEFAULT_TOLERANCE = _float_env("CATP_TOLERANCE", "1e-4")
STRICT_VALIDATION = os.getenv("CATP_STRICT", "false").lower() == "true"

# DIAGNOSTICS
LOG_LEVEL = _log_level_env("CATP_LOG_LEVEL", "WARNING")

# FIXTURES
FIXTURE_DIR = os.getenv("CATP_FIXTURE_DIR", "./fixtures")

# CATP-ATTN FILE FORMAT
FORMAT_MAGIC = b"CATP"
FORMAT_VERSION = 1
HEADER_SIZE = 28

# IMAGE WEIGHTS
WEIGHT_SUM_TOLERANCE = 1e-9

# REPORTS
REPORT_SCHEMA = "catp-report/1"
PROXY_NOTE = (
    "jaccard and retained_mass are desk-scale proxies; "
    "downstream accuracy is not measured"
)
