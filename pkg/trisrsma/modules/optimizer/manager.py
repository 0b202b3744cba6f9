import dataclasses
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ...core.errors import ConfigValidationError, InfeasibleError, RecoveryError
from ...core.timing import Stopwatch
from ..channel.models import ChannelSet
from ..conic.program import ConeProgram, ConeSolution, SolverStatus
from ..conic.solver import ConeSolver
from ..modeling.builder import AccessScheme, build_subproblem
from ..modeling.embedding import rank_one_ratio
from ..modeling.recovery import Recovery, block_rank_ratio, fit_to_limits, recover_from_blocks
from ..modeling.state import ScaState
from ..rates.evaluator import Precoders, RateReport, lifted_noma_rate_report, lifted_rate_report, sic_order
from ..scenario.config import SystemConfig
from .config import MIN_SROC_STEP, OptimizerSettings
from .solution import IterationRecord, IterationTrace, RsmaSolution

logger = logging.getLogger(__name__)


def dinkelbach_update(report: RateReport) -> float:
    """λ = R_tot / P_tot of the current iterate"""
    return report.r_tot / report.p_tot


def sroc_update(omega: float, q_blocks: Sequence[np.ndarray], step: float,
                active: Optional[Sequence[int]] = None) -> float:
    """ω' = min(1, max_l λ_max(Q_l)/Tr(Q_l) + δ), never below ω"""
    indices = range(len(q_blocks)) if active is None else active
    ratios = [rank_one_ratio(q_blocks[l]) for l in indices
              if float(np.real(np.trace(q_blocks[l]))) > 0.0]
    if not ratios:
        return omega
    return max(omega, min(1.0, max(ratios) + step))


class SrocrSchedule:
    """ω with its step, and the value used by the last feasible subproblem"""

    def __init__(self, step: float = 0.1, omega: float = 0.0, min_step: float = MIN_SROC_STEP):
        self.omega = omega
        self.step = step
        self.min_step = min_step
        self.last_feasible = omega
        self.backtracks = 0

    def advance(self, q_blocks: Sequence[np.ndarray], active: Optional[Sequence[int]] = None) -> float:
        self.last_feasible = self.omega
        self.omega = sroc_update(self.omega, q_blocks, self.step, active)
        return self.omega

    def backtrack(self) -> bool:
        """Halve the step and retreat; False once the step is exhausted"""
        self.step /= 2.0
        self.omega = self.last_feasible
        self.backtracks += 1
        return self.step >= self.min_step


class OptimizationManager:
    """Energy-efficiency maximization: SE pre-solve, then the joint SCA/SROCR/Dinkelbach loop"""

    def __init__(self, cfg: SystemConfig, settings: Optional[OptimizerSettings] = None):
        self.cfg = cfg
        self.settings = settings or OptimizerSettings()
        self.eps0 = self.settings.resolved_eps0(cfg)

    @property
    def access(self) -> AccessScheme:
        return self.settings.access

    def _active(self, channels: ChannelSet) -> List[int]:
        k = channels.num_cus
        return list(range(k + 1)) if self.access is AccessScheme.RSMA else list(range(1, k + 1))

    def initial_precoders(self, channels: ChannelSet) -> Precoders:
        """Matched beams with a 50/50 common/private power split, shrunk for PU limits"""
        budget = self.cfg.transmit_budget_watts
        vectors = channels.cu_vectors
        k = channels.num_cus
        norms = np.linalg.norm(vectors, axis=1)
        directions = np.where(norms[:, None] > 0, vectors / np.where(norms > 0, norms, 1.0)[:, None], 0.0)

        if self.access is AccessScheme.RSMA:
            private_power = budget / 2.0
            combined = vectors.sum(axis=0)
            if np.linalg.norm(combined) == 0:
                combined = vectors[0]
            norm = np.linalg.norm(combined)
            p_c = combined / norm * np.sqrt(budget / 2.0) if norm > 0 else np.zeros(channels.num_elements, dtype=complex)
        else:
            private_power = budget
            p_c = np.zeros(channels.num_elements, dtype=complex)

        p_private = directions * np.sqrt(private_power / k)
        return fit_to_limits(channels, Precoders(p_c=p_c.astype(complex), p_private=p_private.astype(complex)), self.cfg)

    def _lifted_report(self, channels, q_blocks, c_split, order) -> RateReport:
        if self.access is AccessScheme.NOMA:
            return lifted_noma_rate_report(channels, q_blocks, self.cfg, order=np.asarray(order))
        return lifted_rate_report(channels, q_blocks, c_split, self.cfg)

    def _usable(self, solution: ConeSolution) -> bool:
        if solution.status is SolverStatus.OPTIMAL:
            return True
        residuals = (solution.primal_residual, solution.dual_residual, solution.gap)
        return solution.status is SolverStatus.ITERATION_LIMIT and max(residuals) <= self.settings.inexact_tol

    def _solve_subproblem(self, program: ConeProgram, warm: Optional[ConeSolution] = None) -> ConeSolution:
        """
        One subproblem solve. An iteration-limited run that is not yet usable is
        resumed from its last iterate with four times the budget, up to
        solver_retries times.
        """
        solver_settings = self.settings.solver_settings
        if warm is not None and (warm.x.shape[0] != program.num_variables
                                 or warm.s.shape[0] != program.num_constraints):
            warm = None
        solution = ConeSolver(program, solver_settings).solve(warm_start=warm)
        for _ in range(self.settings.solver_retries):
            if solution.status is not SolverStatus.ITERATION_LIMIT or self._usable(solution):
                break
            solver_settings = dataclasses.replace(solver_settings, max_iters=4 * solver_settings.max_iters)
            logger.debug(f"Subproblem hit the iteration limit, resuming with {solver_settings.max_iters} iterations")
            solution = ConeSolver(program, solver_settings).solve(warm_start=solution)
        return solution

    def _diagnose(self, state: ScaState, channels: ChannelSet, order) -> str:
        """Constraint family behind an infeasible first subproblem"""
        if state.eta_floor <= 0:
            return "qos_or_interference"
        relaxed = state.with_updates(eta_floor=0.0)
        program, _ = build_subproblem(relaxed, channels, self.cfg, self.access, order)
        solution = self._solve_subproblem(program)
        return "se_floor" if self._usable(solution) else "qos_or_interference"

    def _iterate(self, channels: ChannelSet, start: Sequence[np.ndarray], maximize_ee: bool,
                 eta0: float, rng: np.random.Generator, stage: str) -> Tuple[Recovery, bool, bool, int, IterationTrace]:
        settings = self.settings
        cfg = self.cfg
        active = self._active(channels)
        order = tuple(int(k) for k in sic_order(channels)) if self.access is AccessScheme.NOMA else None
        model_floor = eta0 * (1.0 + settings.floor_margin) if eta0 > 0 else 0.0

        state = ScaState(q_prev=tuple(start), omega=0.0, lam=0.0, eta_floor=model_floor)
        schedule = SrocrSchedule(step=settings.sroc_step)
        trace = IterationTrace()
        best: Optional[Recovery] = None
        best_value = -np.inf
        previous_objective = None
        converged = False
        warm = None
        blocks = list(start)
        iteration = 0

        for iteration in range(settings.max_outer_iters):
            watch = Stopwatch()
            program, layout = build_subproblem(state, channels, cfg, self.access, order)
            solution = self._solve_subproblem(program, warm)

            usable = self._usable(solution)
            if not usable and iteration == 0:
                if solution.status in (SolverStatus.PRIMAL_INFEASIBLE, SolverStatus.DUAL_INFEASIBLE):
                    family = self._diagnose(state, channels, order)
                    raise InfeasibleError(
                        f"first {stage} subproblem ended {solution.status.value}", family=family
                    )
                # no certificate: keep the iterate, recovery verifies the true rates anyway
                logger.warning(
                    f"First {stage} subproblem stopped at {solution.status.value} "
                    f"(residuals {solution.primal_residual:.2e}, {solution.dual_residual:.2e}, gap {solution.gap:.2e})"
                )
                usable = True

            if not usable:
                trace.append(IterationRecord(
                    stage=stage, iteration=iteration, lam=state.lam, omega=state.omega,
                    objective=float("nan"), r_tot=float("nan"), p_tot=float("nan"), se=float("nan"),
                    ee=float("nan"), max_rank_ratio=float("nan"), min_rank_ratio=float("nan"),
                    primal_residual=solution.primal_residual, dual_residual=solution.dual_residual,
                    gap=solution.gap, status=solution.status.value, wall_ms=watch.elapsed_ms,
                ))
                logger.debug(f"{stage} iteration {iteration}: {solution.status.value} at omega={state.omega:.3f}, backtracking")
                if solution.status is SolverStatus.ITERATION_LIMIT:
                    warm = solution
                if not schedule.backtrack():
                    break
                state = state.with_updates(omega=schedule.omega)
                continue

            blocks = layout.q_blocks(solution)
            c_split = layout.c_split(solution)
            lifted = self._lifted_report(channels, blocks, c_split, order)
            min_ratio, max_ratio = block_rank_ratio(blocks, active)
            objective = layout.objective_value(solution)

            lam = max(state.lam, dinkelbach_update(lifted)) if maximize_ee else 0.0

            candidate_ok = False
            if min_ratio >= settings.sroc_ratio_target:
                try:
                    candidate = recover_from_blocks(
                        blocks, channels, cfg, access=self.access, lam=lam if maximize_ee else 0.0,
                        eta_floor=eta0, rng=rng, count=settings.randomization_count, order=order,
                    )
                    candidate_ok = True
                    value = candidate.report.ee if maximize_ee else candidate.report.se
                    if value > best_value:
                        best, best_value = candidate, value
                except RecoveryError as e:
                    logger.debug(f"{stage} iteration {iteration}: {e}")

            trace.append(IterationRecord(
                stage=stage, iteration=iteration, lam=state.lam, omega=state.omega, objective=objective,
                r_tot=lifted.r_tot, p_tot=lifted.p_tot, se=lifted.se, ee=lifted.ee,
                max_rank_ratio=max_ratio, min_rank_ratio=min_ratio,
                primal_residual=solution.primal_residual, dual_residual=solution.dual_residual,
                gap=solution.gap, status=solution.status.value, wall_ms=watch.elapsed_ms,
            ))
            logger.debug(
                f"{stage} iteration {iteration}: objective {objective:.6g}, SE {lifted.se:.4f}, "
                f"EE {lifted.ee:.4g}, ratio {min_ratio:.4f}, omega {state.omega:.3f}, "
                f"{solution.iterations} ADMM steps"
            )

            if previous_objective is not None:
                change = abs(objective - previous_objective) / max(1.0, abs(previous_objective))
                if change < self.eps0 and min_ratio >= settings.sroc_ratio_target and candidate_ok:
                    converged = True
                    break
            previous_objective = objective

            schedule.advance(blocks, active)
            state = ScaState(q_prev=tuple(blocks), omega=schedule.omega, lam=lam, eta_floor=model_floor)
            warm = solution

        rank_relaxed = False
        if best is None:
            # the rank target was never met: randomize around the last lifted point
            best = recover_from_blocks(
                blocks, channels, cfg, access=self.access, lam=state.lam, eta_floor=eta0,
                rng=rng, count=max(settings.randomization_count, 1), order=order,
            )
            rank_relaxed = True
        return best, converged, rank_relaxed, iteration + 1, trace

    def _solution(self, scheme: str, recovery: Recovery, converged: bool, rank_relaxed: bool,
                  iterations: int, trace: IterationTrace, channels: ChannelSet,
                  eta0: float = 0.0, eta_se_max: Optional[float] = None) -> RsmaSolution:
        report = recovery.report
        return RsmaSolution(
            scheme=scheme,
            precoders=recovery.precoders,
            c_split=recovery.c_split,
            lam=dinkelbach_update(report),
            report=report,
            eta0=eta0,
            eta_se_max=eta_se_max,
            rank_ratio=recovery.rank_ratio,
            rank_relaxed=rank_relaxed,
            converged=converged,
            feasible=report.feasible and report.meets_se_floor(eta0),
            iterations=iterations,
            trace=trace,
            channel_digest=channels.digest(),
        )

    def default_stream(self, channels: ChannelSet) -> np.random.Generator:
        """Recovery stream keyed on the seed and the channel digest, used when the caller passes none"""
        key = int(channels.digest()[:16], 16)
        return np.random.default_rng(np.random.SeedSequence(entropy=self.cfg.rng_seed, spawn_key=(key,)))

    def max_se(self, channels: ChannelSet, rng: Optional[np.random.Generator] = None,
               start: Optional[Sequence[np.ndarray]] = None) -> Tuple[float, RsmaSolution]:
        """Largest achievable SE (bps/Hz) under every constraint but the SE floor"""
        rng = rng if rng is not None else self.default_stream(channels)
        if start is None:
            start = self.initial_precoders(channels).lifted()
        recovery, converged, relaxed, iterations, trace = self._iterate(
            channels, start, maximize_ee=False, eta0=0.0, rng=rng, stage="se"
        )
        eta = recovery.report.se
        solution = self._solution("max_se", recovery, converged, relaxed, iterations, trace, channels, eta_se_max=eta)
        logger.info(f"SE maximization: eta_se_max={eta:.4f} bps/Hz after {iterations} iterations")
        return eta, solution

    def optimize(self, channels: ChannelSet, rng: Optional[np.random.Generator] = None,
                 scheme: str = "proposed") -> Tuple[RsmaSolution, IterationTrace]:
        cfg = self.cfg
        if cfg.eta0_fraction >= 1.0:
            raise ConfigValidationError(f"eta0_fraction must be below 1, got {cfg.eta0_fraction}")
        rng = rng if rng is not None else self.default_stream(channels)

        start = self.initial_precoders(channels).lifted()
        trace = IterationTrace()
        eta_se_max = None
        eta0 = 0.0
        if cfg.eta0_fraction > 0:
            eta_se_max, se_solution = self.max_se(channels, rng=rng, start=start)
            eta0 = cfg.eta0_fraction * eta_se_max
            start = se_solution.precoders.lifted()
            trace.extend(se_solution.trace)

        recovery, converged, relaxed, iterations, ee_trace = self._iterate(
            channels, start, maximize_ee=True, eta0=eta0, rng=rng, stage="ee"
        )
        trace.extend(ee_trace)
        solution = self._solution(scheme, recovery, converged, relaxed, iterations, trace, channels,
                                  eta0=eta0, eta_se_max=eta_se_max)
        log = logger.info if solution.feasible else logger.warning
        log(
            f"{scheme}: SE {solution.se:.4f} bps/Hz, EE {solution.ee:.4g} bps/W, "
            f"lambda* {solution.lam:.4g}, {iterations} iterations, converged={converged}"
        )
        return solution, trace


def max_se(channels: ChannelSet, cfg: SystemConfig, settings: Optional[OptimizerSettings] = None,
           rng: Optional[np.random.Generator] = None) -> Tuple[float, RsmaSolution]:
    return OptimizationManager(cfg, settings).max_se(channels, rng=rng)


def optimize(channels: ChannelSet, cfg: SystemConfig, settings: Optional[OptimizerSettings] = None,
             rng: Optional[np.random.Generator] = None) -> Tuple[RsmaSolution, IterationTrace]:
    return OptimizationManager(cfg, settings).optimize(channels, rng=rng)
