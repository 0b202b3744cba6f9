import csv
import io
import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

from ...core.errors import SweepError
from .config import SweepConfig
from .manager import SweepRow

logger = logging.getLogger(__name__)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, SweepConfig.FLOAT_FORMAT)
    return str(value)


def format_csv(rows: Sequence[SweepRow]) -> str:
    if not rows:
        raise SweepError("result table is empty")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SweepConfig.CSV_HEADER)
    for row in rows:
        writer.writerow([_cell(v) for v in (
            float(row.sweep_value), row.scheme, row.realization, float(row.se), float(row.ee),
            bool(row.feasible), float(row.rank_ratio), int(row.iters), float(row.wall_ms),
        )])
    return buffer.getvalue()


def emit_csv(rows: Sequence[SweepRow], path: Union[str, Path]) -> Path:
    """UTF-8 CSV with the fixed header, 9 significant digits and LF line endings"""
    text = format_csv(rows)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as e:
        raise SweepError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def write_summary(summary: List[Dict[str, object]], path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise SweepError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote summary of {len(summary)} group(s) to {path}")
    return path


def summary_path(csv_path: Union[str, Path]) -> Path:
    """JSON summary sits next to the CSV"""
    return Path(csv_path).with_suffix(".summary.json")
