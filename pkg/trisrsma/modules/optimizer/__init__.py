from .config import MIN_SROC_STEP, OptimizerSettings
from .manager import (
    OptimizationManager,
    SrocrSchedule,
    dinkelbach_update,
    max_se,
    optimize,
    sroc_update,
)
from .solution import TRACE_COLUMNS, IterationRecord, IterationTrace, RsmaSolution

__all__ = [
    'MIN_SROC_STEP', 'OptimizerSettings',
    'OptimizationManager', 'SrocrSchedule', 'dinkelbach_update', 'max_se', 'optimize', 'sroc_update',
    'TRACE_COLUMNS', 'IterationRecord', 'IterationTrace', 'RsmaSolution',
]
