import csv
import io
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from ..channel.models import ChannelSet
from ..rates.evaluator import Precoders, RateReport, rate_report
from ..scenario.config import SystemConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IterationRecord:
    stage: str
    iteration: int
    lam: float
    omega: float
    objective: float
    r_tot: float
    p_tot: float
    se: float
    ee: float
    max_rank_ratio: float
    min_rank_ratio: float
    primal_residual: float
    dual_residual: float
    gap: float
    status: str
    wall_ms: float


TRACE_COLUMNS = tuple(f.name for f in fields(IterationRecord))


@dataclass
class IterationTrace:
    records: List[IterationRecord] = field(default_factory=list)

    def append(self, record: IterationRecord) -> None:
        self.records.append(record)

    def extend(self, other: "IterationTrace") -> None:
        self.records.extend(other.records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def stage(self, name: str) -> List[IterationRecord]:
        return [record for record in self.records if record.stage == name]

    def lambda_non_decreasing(self, stage: str = "ee", slack: float = 1e-9) -> bool:
        lams = [record.lam for record in self.stage(stage)]
        return all(b >= a - slack * max(1.0, abs(a)) for a, b in zip(lams, lams[1:]))

    def to_csv(self, path: Union[str, Path, None] = None) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in self.records:
            writer.writerow(
                [f"{value:.9g}" if isinstance(value, float) else value
                 for value in (getattr(record, name) for name in TRACE_COLUMNS)]
            )
        text = buffer.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
            logger.info(f"Wrote {len(self.records)} trace rows to {path}")
        return text


@dataclass(frozen=True, eq=False)
class RsmaSolution:
    """Verified outcome of one scheme on one channel realization"""

    scheme: str
    precoders: Precoders
    c_split: np.ndarray
    lam: float
    report: RateReport
    eta0: float = 0.0
    eta_se_max: Optional[float] = None
    rank_ratio: float = 1.0
    rank_relaxed: bool = False
    converged: bool = True
    feasible: bool = True
    iterations: int = 0
    trace: IterationTrace = field(default_factory=IterationTrace)
    channel_digest: str = ""
    error: Optional[str] = None

    @property
    def se(self) -> float:
        return self.report.se

    @property
    def ee(self) -> float:
        return self.report.ee

    @classmethod
    def infeasible(cls, scheme: str, channels: ChannelSet, cfg: SystemConfig, reason: str,
                   digest: str = "", iterations: int = 0) -> "RsmaSolution":
        """Zero-rate placeholder for a scheme that found no feasible point"""
        zeros = Precoders.zeros(channels.num_elements, channels.num_cus)
        report = rate_report(channels, zeros, None, cfg)
        return cls(
            scheme=scheme,
            precoders=zeros,
            c_split=np.zeros(channels.num_cus),
            lam=0.0,
            report=report,
            rank_ratio=1.0,
            converged=False,
            feasible=False,
            iterations=iterations,
            channel_digest=digest,
            error=reason,
        )

    def to_record(self) -> Dict[str, object]:
        record = {
            "scheme": self.scheme,
            "se": self.se,
            "ee": self.ee,
            "feasible": self.feasible,
            "lam": self.lam,
            "eta0": self.eta0,
            "eta_se_max": self.eta_se_max,
            "rank_ratio": self.rank_ratio,
            "rank_relaxed": self.rank_relaxed,
            "converged": self.converged,
            "iterations": self.iterations,
            "channel_digest": self.channel_digest,
            "error": self.error,
        }
        record.update(self.report.to_record())
        record["feasible"] = self.feasible
        return record
