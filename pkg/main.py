#!/usr/bin/env python3
"""
TRIS-RSMA toolkit - command line entry point

    python main.py solve --config scenario.cfg [--scheme proposed] [--trace trace.csv]
    python main.py sweep --kind power --config scenario.cfg --schemes proposed,sdma --out power.csv
"""

import argparse
import logging
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import List, Optional

import numpy as np
import psutil
from dotenv import load_dotenv

# Load environment variables before the runtime config is read
load_dotenv()

from trisrsma.core import ReportMessages, RuntimeConfig, TrisError, setup_logging, timed  # noqa: E402
from trisrsma.modules.benchmarks import BenchmarkConfig, BenchmarkManager, SchemeId, parse_schemes  # noqa: E402
from trisrsma.modules.channel import export_channels, generate_channels  # noqa: E402
from trisrsma.modules.conic import dump_program  # noqa: E402
from trisrsma.modules.experiments import (  # noqa: E402
    SweepConfig,
    SweepKind,
    SweepManager,
    SweepSpec,
    emit_csv,
    summarize,
    summary_path,
    write_summary,
)
from trisrsma.modules.modeling import ScaState, build_subproblem  # noqa: E402
from trisrsma.modules.scenario import load_config, substreams  # noqa: E402
from trisrsma.modules.tma import TmaParams, dump_frame_csv, precode_frame  # noqa: E402

logger = logging.getLogger(__name__)


class RunMetrics:
    """Track run counts and resource use of one CLI invocation"""

    def __init__(self):
        self.start_time = datetime.now(timezone.utc)
        self.runs = 0
        self.flagged = 0
        self.errors = 0

    def log_run(self, flagged: bool = False):
        self.runs += 1
        if flagged:
            self.flagged += 1

    def log_error(self, error: str):
        self.errors += 1
        logger.error(f"Run error: {error}")

    def get_uptime(self) -> timedelta:
        return datetime.now(timezone.utc) - self.start_time

    def peak_memory_mb(self) -> float:
        memory = psutil.Process().memory_info()
        return getattr(memory, "peak_wset", memory.rss) / 2**20

    def report(self) -> str:
        return ReportMessages.STATUS.format(
            uptime=self.get_uptime(),
            runs=self.runs,
            flagged=self.flagged,
            errors=self.errors,
            memory_mb=self.peak_memory_mb(),
        )


def _grid(text: Optional[str]) -> Optional[List[float]]:
    if not text:
        return None
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trisrsma", description="TRIS-transmitter cognitive RSMA toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a parameter sweep and write CSV/JSON results")
    sweep.add_argument("--kind", required=True, choices=[k.value for k in SweepKind])
    sweep.add_argument("--config", help="scenario config file (defaults when omitted)")
    sweep.add_argument("--schemes", default=",".join(BenchmarkConfig.DEFAULT_SCHEMES))
    sweep.add_argument("--realizations", type=int, default=SweepConfig.DEFAULT_REALIZATIONS)
    sweep.add_argument("--grid", help="comma-separated grid values (element counts or dBW)")
    sweep.add_argument("--seed", type=int, help="override the scenario rng_seed")
    sweep.add_argument("--workers", type=int, default=RuntimeConfig.SWEEP_WORKERS)
    sweep.add_argument("--no-timing", action="store_true", help="write wall_ms as 0 for byte-stable output")
    sweep.add_argument("--out", help="output CSV path")

    solve = sub.add_parser("solve", help="solve a single instance")
    solve.add_argument("--config", help="scenario config file (defaults when omitted)")
    solve.add_argument("--seed", type=int, help="override the scenario rng_seed")
    solve.add_argument("--scheme", default=SchemeId.PROPOSED.value, choices=[s.value for s in SchemeId])
    solve.add_argument("--trace", help="write the iteration trace CSV here")
    solve.add_argument("--dump-cone", help="write the final subproblem in the sparse triplet format")
    solve.add_argument("--dump-tma", help="write one TMA control frame of the solution as CSV")
    solve.add_argument("--export-channels", help="write the channel realization in the binary dump format")
    return parser


def _scenario(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_updates(rng_seed=args.seed)
    return cfg


def run_sweep_command(args, metrics: RunMetrics) -> int:
    kind = SweepKind.parse(args.kind)
    cfg = _scenario(args)
    out = Path(args.out) if args.out else Path(RuntimeConfig.OUTPUT_DIR) / f"sweep_{kind.value}.csv"
    spec = SweepSpec.for_study(
        kind,
        cfg,
        grid=_grid(args.grid),
        realizations=args.realizations,
        schemes=tuple(parse_schemes(args.schemes)),
        output=out,
        workers=max(1, args.workers),
        record_wall_time=RuntimeConfig.RECORD_WALL_TIME and not args.no_timing,
    )
    manager = SweepManager(spec)
    with timed(f"sweep {kind.value}"):
        rows = manager.run()
    for row in rows:
        metrics.log_run(row.flagged)

    emit_csv(rows, out)
    summary_file = write_summary(summarize(rows), summary_path(out))
    mismatched = manager.verify_rows(rows)
    flagged = sum(row.flagged for row in rows) + len(mismatched)

    print(ReportMessages.SWEEP.format(
        version=RuntimeConfig.VERSION,
        kind=kind.value,
        points=len(spec.grid),
        realizations=spec.realizations,
        schemes=",".join(s.value for s in spec.schemes),
        rows=len(rows),
        flagged=flagged,
        csv_path=out,
        summary_path=summary_file,
    ))
    return SweepConfig.EXIT_FLAGGED if flagged else SweepConfig.EXIT_OK


def run_solve_command(args, metrics: RunMetrics) -> int:
    cfg = _scenario(args)
    scheme = SchemeId.parse(args.scheme)
    streams = substreams(cfg.rng_seed)
    channels = generate_channels(cfg, streams)
    if args.export_channels:
        export_channels(channels, args.export_channels)

    benchmarks = BenchmarkManager(cfg)
    solution = benchmarks.run_scheme(scheme, channels, substreams(cfg.rng_seed))
    if args.trace:
        solution.trace.to_csv(args.trace)
    metrics.log_run(not solution.feasible)

    link = benchmarks.scheme_channels(scheme, channels)
    if args.dump_cone:
        state = ScaState.from_precoders(solution.precoders, lam=solution.lam, eta_floor=solution.eta0)
        program, layout = build_subproblem(state, link, benchmarks.scheme_config(scheme), benchmarks.scheme_access(scheme))
        dump_program(program, args.dump_cone)
        Path(args.dump_cone).with_suffix(".layout.json").write_text(layout.to_json() + "\n", encoding="utf-8")

    if args.dump_tma:
        # one unit-power symbol per stream
        symbols = np.exp(1j * np.pi / 4) * np.ones(solution.precoders.num_users + 1)
        a_max = float(np.abs(solution.precoders.matrix @ symbols).max()) or 1.0
        params = TmaParams(t_p=cfg.tma_code_time_s, a_max=a_max)
        x, timings = precode_frame(solution.precoders.matrix, symbols, params)
        dump_frame_csv(x, timings, params, args.dump_tma)

    report = solution.report
    print(ReportMessages.SOLVE.format(
        version=RuntimeConfig.VERSION,
        scheme=solution.scheme,
        elements=link.num_elements,
        num_cus=link.num_cus,
        num_pus=link.num_pus,
        feasible=solution.feasible,
        rank_relaxed=solution.rank_relaxed,
        se=report.se,
        ee=report.ee,
        r_tot=report.r_tot,
        p_tot=report.p_tot,
        iterations=solution.iterations,
        rank_ratio=solution.rank_ratio,
    ))
    return SweepConfig.EXIT_OK if solution.feasible else SweepConfig.EXIT_FLAGGED


def main(argv: Optional[List[str]] = None) -> int:
    """Main function"""
    args = build_parser().parse_args(argv)
    setup_logging()
    metrics = RunMetrics()
    try:
        if args.command == "sweep":
            code = run_sweep_command(args, metrics)
        else:
            code = run_solve_command(args, metrics)
    except TrisError as e:
        metrics.log_error(str(e))
        code = SweepConfig.EXIT_ERROR
    logger.info(metrics.report())
    return code


if __name__ == "__main__":
    sys.exit(main())
