"""
Rank-one precoders from the lifted blocks of a solved subproblem.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ...core.errors import ModelingError, RecoveryError
from ..channel.models import ChannelSet
from ..conic.program import ConeSolution
from ..rates.evaluator import (
    Precoders,
    RateReport,
    gain_matrix,
    noma_rate_report,
    rate_report,
    split_common_rate,
)
from ..scenario.config import SystemConfig
from .builder import AccessScheme, SubproblemLayout
from .config import NEGLIGIBLE_BLOCK_FRACTION, RANDOMIZATION_COUNT, RANK_ONE_TARGET
from .embedding import principal_component, rank_one_ratio
from .state import ScaState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Recovery:
    precoders: Precoders
    c_split: np.ndarray
    report: RateReport
    rank_ratio: float
    randomized: bool
    candidates: int


def evaluate_precoders(channels: ChannelSet, precoders: Precoders, cfg: SystemConfig,
                       access: AccessScheme = AccessScheme.RSMA,
                       order: Optional[Sequence[int]] = None) -> Tuple[np.ndarray, RateReport]:
    """Verified report of a precoder set; RSMA re-splits the common rate QoS-first"""
    if access is AccessScheme.NOMA:
        report = noma_rate_report(channels, precoders, cfg, order=None if order is None else np.asarray(order))
        return report.c_split, report
    if access is AccessScheme.SDMA:
        report = rate_report(channels, precoders, None, cfg)
        return report.c_split, report
    base = rate_report(channels, precoders, None, cfg)
    split = split_common_rate(base.r_c, base.private_rates, cfg.r_th_bps)
    return split, rate_report(channels, precoders, split, cfg)


def fit_to_limits(channels: ChannelSet, precoders: Precoders, cfg: SystemConfig) -> Precoders:
    """Uniformly shrink precoders until power and PU interference limits hold"""
    factor = 1.0
    power = precoders.transmit_power
    if power > cfg.transmit_budget_watts:
        factor = min(factor, cfg.transmit_budget_watts / power)
    if channels.num_pus:
        gains = gain_matrix(channels.pu_vectors, precoders)
        common = float(gains[:, 0].max())
        private = float(gains[:, 1:].sum(axis=1).max())
        if common > cfg.i_c_th_watts:
            factor = min(factor, cfg.i_c_th_watts / common)
        if private > cfg.i_p_th_watts:
            factor = min(factor, cfg.i_p_th_watts / private)
    if factor >= 1.0:
        return precoders
    return precoders.scaled(np.sqrt(factor))


def _significant(q_blocks: Sequence[np.ndarray], active: Sequence[int]) -> List[int]:
    traces = np.array([float(np.real(np.trace(Q))) for Q in q_blocks])
    total = float(traces[list(active)].sum()) if active else 0.0
    return [l for l in active if traces[l] > NEGLIGIBLE_BLOCK_FRACTION * total]


def block_rank_ratio(q_blocks: Sequence[np.ndarray], active: Sequence[int]) -> Tuple[float, float]:
    """(min, max) of λ_max/Tr over the blocks that carry power"""
    ratios = [rank_one_ratio(q_blocks[l]) for l in _significant(q_blocks, active)]
    if not ratios:
        return 1.0, 1.0
    return min(ratios), max(ratios)


def recover_from_blocks(q_blocks: Sequence[np.ndarray], channels: ChannelSet, cfg: SystemConfig,
                        access: AccessScheme = AccessScheme.RSMA, lam: float = 0.0, eta_floor: float = 0.0,
                        rng: Optional[np.random.Generator] = None, count: int = RANDOMIZATION_COUNT,
                        order: Optional[Sequence[int]] = None) -> Recovery:
    """
    Eigen extraction for blocks that are already rank one, Gaussian
    randomization (rescaled to Tr(Q_l)) for the others; the best feasible
    candidate by R_tot − λ·P_tot wins. Randomization draws from rng only, so the
    caller passes the recovery stream of its (realization, point).
    """
    m = channels.num_elements
    k_users = channels.num_cus
    active = list(range(k_users + 1)) if access is AccessScheme.RSMA else list(range(1, k_users + 1))
    significant = set(_significant(q_blocks, active))

    principal = []
    roots = []
    ratios = []
    for l, Q in enumerate(q_blocks):
        if l not in active:
            principal.append(np.zeros(m, dtype=complex))
            roots.append(None)
            ratios.append(1.0)
            continue
        top, u = principal_component(Q)
        principal.append(np.sqrt(max(top, 0.0)) * u)
        w, U = np.linalg.eigh((Q + Q.conj().T) / 2.0)
        roots.append((U * np.sqrt(np.maximum(w, 0.0))) @ U.conj().T)
        ratios.append(rank_one_ratio(Q) if l in significant else 1.0)

    min_ratio = min(ratios[l] for l in significant) if significant else 1.0
    randomize = [l for l in active if ratios[l] < RANK_ONE_TARGET]
    if randomize and count > 0 and rng is None:
        raise ModelingError(
            f"blocks {randomize} need Gaussian randomization but no recovery stream was given"
        )

    candidates = [np.column_stack(principal)]
    for _ in range(count if randomize else 0):
        columns = list(principal)
        for l in randomize:
            xi = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2.0)
            p = roots[l] @ xi
            norm = float(np.real(np.vdot(p, p)))
            trace = float(np.real(np.trace(q_blocks[l])))
            columns[l] = p * np.sqrt(trace / norm) if norm > 0 else p
        candidates.append(np.column_stack(columns))

    best: Optional[Recovery] = None
    best_any: Optional[Recovery] = None
    best_value = -np.inf
    best_any_value = -np.inf
    for P in candidates:
        precoders = fit_to_limits(channels, Precoders.from_matrix(P), cfg)
        split, report = evaluate_precoders(channels, precoders, cfg, access, order)
        candidate = Recovery(
            precoders=precoders,
            c_split=split,
            report=report,
            rank_ratio=min_ratio,
            randomized=bool(randomize),
            candidates=len(candidates),
        )
        value = report.dinkelbach_value(lam)
        if value > best_any_value:
            best_any, best_any_value = candidate, value
        if report.feasible and report.meets_se_floor(eta_floor) and value > best_value:
            best, best_value = candidate, value

    if best is None:
        raise RecoveryError(
            f"none of {len(candidates)} rank-one candidates is feasible (min rank ratio {min_ratio:.4f})",
            best_candidate=best_any,
        )
    logger.debug(
        f"Recovered precoders from {len(candidates)} candidate(s): SE {best.report.se:.4f} bps/Hz, "
        f"EE {best.report.ee:.4g} bps/W, rank ratio {min_ratio:.4f}"
    )
    return best


def recover_precoders(solution: ConeSolution, layout: SubproblemLayout, state: ScaState,
                      channels: ChannelSet, cfg: SystemConfig,
                      rng: Optional[np.random.Generator] = None, count: int = RANDOMIZATION_COUNT) -> Recovery:
    return recover_from_blocks(
        layout.q_blocks(solution), channels, cfg,
        access=layout.access, lam=state.lam, eta_floor=state.eta_floor,
        rng=rng, count=count, order=layout.sic_order or None,
    )
