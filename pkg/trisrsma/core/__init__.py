# trisrsma/core/__init__.py
from .config import RuntimeConfig
from .logger import setup_logging
from .messages import ReportMessages
from .timing import Stopwatch, timed
from .errors import (
    TrisError,
    ConfigError,
    ConfigParseError,
    ConfigValidationError,
    ChannelError,
    TmaRangeError,
    RatesError,
    ConeProgramError,
    SolverBreakdown,
    ModelingError,
    InfeasibleError,
    RecoveryError,
    SchemeError,
    SweepError,
)

__all__ = [
    'RuntimeConfig', 'setup_logging', 'ReportMessages', 'Stopwatch', 'timed',
    'TrisError', 'ConfigError', 'ConfigParseError', 'ConfigValidationError', 'ChannelError',
    'TmaRangeError', 'RatesError', 'ConeProgramError', 'SolverBreakdown', 'ModelingError',
    'InfeasibleError', 'RecoveryError', 'SchemeError', 'SweepError',
]
