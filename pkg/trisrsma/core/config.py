# trisrsma/core/config.py
import os


class RuntimeConfig:
    """Process-wide runtime configuration management"""

    # Environment settings
    ENVIRONMENT = os.getenv("ENVIRONMENT", "development")
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "trisrsma.log")

    # Execution settings
    SWEEP_WORKERS = max(1, int(os.getenv("SWEEP_WORKERS", "1")))
    OUTPUT_DIR = os.getenv("OUTPUT_DIR", "results")

    # Feature flags
    RECORD_WALL_TIME = os.getenv("RECORD_WALL_TIME", "true").lower() == "true"

    # System information
    VERSION = "1.0.0"
    BUILD_DATE = os.getenv("BUILD_DATE", "2026-10-19")
