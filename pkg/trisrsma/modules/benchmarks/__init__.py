from .config import BenchmarkConfig
from .manager import BenchmarkManager, SchemeId, parse_schemes, random_directions, run_scheme

__all__ = ['BenchmarkConfig', 'BenchmarkManager', 'SchemeId', 'parse_schemes', 'random_directions', 'run_scheme']
