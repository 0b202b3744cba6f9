# trisrsma/__init__.py
from .core.config import RuntimeConfig

__version__ = RuntimeConfig.VERSION
