import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...core.config import RuntimeConfig
from ...core.errors import SweepError, TrisError
from ...core.timing import Stopwatch
from ..benchmarks.manager import BenchmarkManager, SchemeId, parse_schemes
from ..channel.models import generate_channels
from ..modeling.builder import AccessScheme
from ..optimizer.config import OptimizerSettings
from ..rates.evaluator import Precoders, noma_rate_report, rate_report
from ..scenario.config import SystemConfig
from ..scenario.geometry import substreams
from ..scenario.units import dbw_to_watts
from .config import SweepConfig

logger = logging.getLogger(__name__)


class SweepKind(Enum):
    ELEMENTS = "elements"
    POWER = "power"
    PARETO = "pareto"

    @classmethod
    def parse(cls, name: str) -> "SweepKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise SweepError(f"unknown sweep kind '{name}' (known: elements, power, pareto)") from None


def upa_shape(elements: int) -> Tuple[int, int]:
    """Most nearly square rows × cols factorization of an element count"""
    if elements < 1 or int(elements) != elements:
        raise SweepError(f"element count must be a positive integer, got {elements}")
    elements = int(elements)
    rows = int(math.isqrt(elements))
    while elements % rows:
        rows -= 1
    return rows, elements // rows


@dataclass(frozen=True)
class SweepSpec:
    kind: SweepKind
    grid: Tuple[float, ...]
    realizations: int
    schemes: Tuple[SchemeId, ...]
    base: SystemConfig
    output: Optional[Path] = None
    settings: OptimizerSettings = field(default_factory=OptimizerSettings)
    workers: int = 1
    record_wall_time: bool = True

    def __post_init__(self):
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise SweepError("sweep grid is empty")
        if any(not math.isfinite(v) for v in grid):
            raise SweepError("sweep grid values must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise SweepError(f"sweep grid must be strictly increasing, got {list(grid)}")
        if self.realizations < 1:
            raise SweepError(f"realizations must be at least 1, got {self.realizations}")
        if not self.schemes:
            raise SweepError("scheme list is empty")
        if self.workers < 1:
            raise SweepError(f"workers must be at least 1, got {self.workers}")
        if self.kind is SweepKind.ELEMENTS:
            for value in grid:
                upa_shape(value)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "schemes", tuple(parse_schemes(self.schemes)))
        if self.output is not None:
            object.__setattr__(self, "output", Path(self.output))

    @classmethod
    def for_study(cls, kind: SweepKind, base: SystemConfig, grid: Optional[Sequence[float]] = None,
                  **kwargs) -> "SweepSpec":
        """Spec with the default grid and the fixed settings of one study applied to base"""
        if kind is SweepKind.ELEMENTS:
            base = base.with_updates(
                p_max_watts=float(dbw_to_watts(SweepConfig.ELEMENTS_P_MAX_DBW)),
                eta0_fraction=SweepConfig.ELEMENTS_ETA0_FRACTION,
            )
            default_grid = SweepConfig.ELEMENT_GRID
        else:
            rows, cols = upa_shape(SweepConfig.FIXED_ELEMENTS)
            fraction = SweepConfig.POWER_ETA0_FRACTION if kind is SweepKind.POWER else SweepConfig.PARETO_ETA0_FRACTION
            base = base.with_updates(m_rows=rows, m_cols=cols, eta0_fraction=fraction)
            default_grid = SweepConfig.POWER_GRID_DBW
        kwargs.setdefault("realizations", SweepConfig.DEFAULT_REALIZATIONS)
        return cls(kind=kind, grid=tuple(grid if grid is not None else default_grid), base=base, **kwargs)

    def config_at(self, value: float) -> SystemConfig:
        if self.kind is SweepKind.ELEMENTS:
            rows, cols = upa_shape(value)
            return self.base.with_updates(m_rows=rows, m_cols=cols)
        return self.base.with_updates(p_max_watts=float(dbw_to_watts(value)))

    @property
    def tasks(self) -> List[Tuple[int, int]]:
        return [(point, realization) for point in range(len(self.grid)) for realization in range(self.realizations)]


@dataclass(frozen=True, eq=False)
class SweepRow:
    sweep_value: float
    scheme: str
    realization: int
    se: float
    ee: float
    feasible: bool
    rank_ratio: float
    iters: int
    wall_ms: float
    point: int = 0
    precoders: Optional[Precoders] = None
    c_split: Optional[np.ndarray] = None
    error: Optional[str] = None

    @property
    def flagged(self) -> bool:
        return not self.feasible or self.error is not None


def run_point(spec: SweepSpec, point: int, realization: int) -> List[SweepRow]:
    """Every scheme at one grid point and realization, on one shared channel draw"""
    value = spec.grid[point]
    cfg = spec.config_at(value)
    channels = generate_channels(cfg, substreams(cfg.rng_seed, realization, point))
    manager = BenchmarkManager(cfg, spec.settings)

    rows = []
    for scheme in spec.schemes:
        watch = Stopwatch()
        try:
            # fresh streams per scheme so scheme order never changes a result
            solution = manager.run_scheme(scheme, channels, substreams(cfg.rng_seed, realization, point))
        except TrisError as e:
            logger.error(f"{scheme.value} failed at {spec.kind.value}={value:g}, realization {realization}: {e}")
            rows.append(SweepRow(
                sweep_value=value, scheme=scheme.value, realization=realization, se=0.0, ee=0.0,
                feasible=False, rank_ratio=float("nan"), iters=0,
                wall_ms=watch.elapsed_ms if spec.record_wall_time else 0.0, point=point, error=str(e),
            ))
            continue
        rows.append(SweepRow(
            sweep_value=value,
            scheme=scheme.value,
            realization=realization,
            se=solution.se,
            ee=solution.ee,
            feasible=solution.feasible,
            rank_ratio=solution.rank_ratio,
            iters=solution.iterations,
            wall_ms=watch.elapsed_ms if spec.record_wall_time else 0.0,
            point=point,
            precoders=solution.precoders,
            c_split=solution.c_split,
            error=solution.error,
        ))
    return rows


def _run_task(args) -> List[SweepRow]:
    return run_point(*args)


def summarize(rows: Sequence[SweepRow]) -> List[Dict[str, object]]:
    """Mean and standard error of SE and EE per (grid value, scheme)"""
    groups: Dict[Tuple[float, str], List[SweepRow]] = {}
    for row in rows:
        groups.setdefault((row.sweep_value, row.scheme), []).append(row)

    def stats(values: np.ndarray) -> Tuple[float, float]:
        mean = float(values.mean())
        stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
        return mean, stderr

    summary = []
    for (value, scheme), group in sorted(groups.items(), key=lambda item: (item[0][0], item[0][1])):
        se_mean, se_err = stats(np.array([row.se for row in group]))
        ee_mean, ee_err = stats(np.array([row.ee for row in group]))
        summary.append({
            "sweep_value": value,
            "scheme": scheme,
            "runs": len(group),
            "se_mean": se_mean,
            "se_stderr": se_err,
            "ee_mean": ee_mean,
            "ee_stderr": ee_err,
            "feasible_fraction": sum(row.feasible for row in group) / len(group),
        })
    return summary


class SweepManager:
    """Runs a sweep over grid points × realizations × schemes"""

    def __init__(self, spec: SweepSpec):
        self.spec = spec
        self.config = SweepConfig

    @classmethod
    def from_runtime(cls, spec: SweepSpec) -> "SweepManager":
        """Apply the process-level worker count and timing flag"""
        return cls(replace(spec, workers=RuntimeConfig.SWEEP_WORKERS, record_wall_time=RuntimeConfig.RECORD_WALL_TIME))

    def run(self) -> List[SweepRow]:
        spec = self.spec
        tasks = [(spec, point, realization) for point, realization in spec.tasks]
        logger.info(
            f"Sweep {spec.kind.value}: {len(spec.grid)} point(s) × {spec.realizations} realization(s) × "
            f"{len(spec.schemes)} scheme(s) on {spec.workers} worker(s)"
        )
        watch = Stopwatch()
        if spec.workers > 1:
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                batches = list(pool.map(_run_task, tasks))
        else:
            batches = [_run_task(task) for task in tasks]

        rows = [row for batch in batches for row in batch]
        flagged = sum(row.flagged for row in rows)
        log = logger.warning if flagged else logger.info
        log(f"Sweep {spec.kind.value} finished: {len(rows)} rows, {flagged} flagged, {watch.elapsed_ms / 1e3:.1f} s")
        return rows

    def verify_rows(self, rows: Sequence[SweepRow]) -> List[int]:
        """
        Re-evaluate every VERIFY_STRIDE-th feasible row from its stored
        precoders; returns the indices whose SE or EE disagree.
        """
        spec = self.spec
        mismatched = []
        for index in range(0, len(rows), self.config.VERIFY_STRIDE):
            row = rows[index]
            if row.precoders is None or not row.feasible:
                continue
            cfg = spec.config_at(row.sweep_value)
            channels = generate_channels(cfg, substreams(cfg.rng_seed, row.realization, row.point))
            scheme = SchemeId.parse(row.scheme)
            manager = BenchmarkManager(cfg, spec.settings)
            link = manager.scheme_channels(scheme, channels)
            link_cfg = manager.scheme_config(scheme)
            if manager.scheme_access(scheme) is AccessScheme.NOMA:
                report = noma_rate_report(link, row.precoders, link_cfg)
            else:
                report = rate_report(link, row.precoders, row.c_split, link_cfg)
            tol = self.config.VERIFY_TOL
            if not (math.isclose(report.se, row.se, rel_tol=tol, abs_tol=tol)
                    and math.isclose(report.ee, row.ee, rel_tol=tol, abs_tol=tol)):
                logger.warning(
                    f"Row {index} ({row.scheme}, {spec.kind.value}={row.sweep_value:g}) does not re-verify: "
                    f"SE {row.se:.9g} vs {report.se:.9g}, EE {row.ee:.9g} vs {report.ee:.9g}"
                )
                mismatched.append(index)
        return mismatched


def run_sweep(spec: SweepSpec) -> List[SweepRow]:
    return SweepManager(spec).run()
