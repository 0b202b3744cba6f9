from .config import SweepConfig
from .manager import SweepKind, SweepManager, SweepRow, SweepSpec, run_point, run_sweep, summarize, upa_shape
from .output import emit_csv, format_csv, summary_path, write_summary

__all__ = [
    'SweepConfig', 'SweepKind', 'SweepManager', 'SweepRow', 'SweepSpec', 'run_point', 'run_sweep',
    'summarize', 'upa_shape', 'emit_csv', 'format_csv', 'summary_path', 'write_summary',
]
