# trisrsma/core/logger.py
import logging

from .config import RuntimeConfig

_configured = False


def setup_logging():
    """Configure toolkit-wide logging"""
    global _configured
    logger = logging.getLogger("trisrsma")
    if _configured:
        return logger

    log_format = '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s'

    logging.basicConfig(
        format=log_format,
        level=getattr(logging, RuntimeConfig.LOG_LEVEL.upper(), logging.INFO),
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(RuntimeConfig.LOG_FILE) if RuntimeConfig.ENVIRONMENT == 'production' else logging.NullHandler()
        ]
    )

    _configured = True
    logger.info(f"TRIS-RSMA toolkit v{RuntimeConfig.VERSION} ({RuntimeConfig.BUILD_DATE}) starting...")
    logger.info(f"Environment: {RuntimeConfig.ENVIRONMENT}")

    return logger
