"""
Configuration
Numeric tolerances and resource limits, read from the environment (.env supported)
"""

import os
import logging
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


def _positive_float(name: str, default: str) -> float:
    raw = os.getenv(name, default)
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}")
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def _positive_int(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


# -----------------------------
# Configuration
# -----------------------------
DEFAULT_TOL = _positive_float("MUTATION_TOL", "1e-9")
LOG_LEVEL = os.getenv("MUTATION_LOG_LEVEL", "INFO").upper()
QUAD_LIMIT = _positive_int("QUAD_LIMIT", "200")
WINDING_SAMPLES = _positive_int("WINDING_SAMPLES", "512")
FIXTURE_MAX_ATTEMPTS = _positive_int("FIXTURE_MAX_ATTEMPTS", "50")
MAX_ENUMERATED_TYPES = _positive_int("MAX_ENUMERATED_TYPES", "1000000")

# Paths closer than this to the origin are treated as hitting it
ORIGIN_CLEARANCE = 1e-12
