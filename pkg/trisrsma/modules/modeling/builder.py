"""
Cone-program model of one convexified energy-efficiency step.

All trace coefficients are divided by the noise power (so the noise is 1 inside
the program) and rates are expressed in bps/Hz. Every rate expression has the
DC form log2(1 + Σ_{signal ∪ interferers} Tr(F Q)) − log2(1 + Σ_{interferers} Tr(F Q)):
the first log is encoded by an exponential-cone hypograph, the second is
replaced by its tangent at the anchor.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...core.errors import InfeasibleError, ModelingError
from ..channel.models import ChannelSet
from ..conic.cones import PSD, Exp, NonNeg, Zero, smat
from ..conic.program import ConeProgram, ConeSolution, ProgramBuilder
from ..rates.evaluator import sic_order
from ..scenario.config import SystemConfig
from .config import NEGLIGIBLE_BLOCK_FRACTION
from .embedding import (
    complex_from_embedding,
    embedding_operator,
    pack_hermitian,
    psd_clamp,
    trace_coefficients,
    unpack_hermitian,
)
from .state import LN2, ScaState, linearize_log_term, log_term

logger = logging.getLogger(__name__)


class AccessScheme(Enum):
    RSMA = "rsma"
    SDMA = "sdma"
    NOMA = "noma"


@dataclass(frozen=True)
class RateTerm:
    """Rate of the ``signal`` blocks at CU ``receiver`` with ``interferers`` left as noise"""

    receiver: int
    signal: Tuple[int, ...]
    interferers: Tuple[int, ...]

    @property
    def blocks(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.signal) | set(self.interferers)))


@dataclass(frozen=True)
class BoundedTerm:
    """A rate term and the rate variable it caps ('r' of a user, or the common sum)"""

    name: str
    term: RateTerm
    bounds: str
    user: int = -1


def rate_terms(num_users: int, access: AccessScheme, order: Optional[Sequence[int]] = None) -> List[BoundedTerm]:
    privates = [1 + k for k in range(num_users)]
    terms = []
    if access is AccessScheme.NOMA:
        order = list(range(num_users)) if order is None else [int(k) for k in order]
        position = {user: rank for rank, user in enumerate(order)}
        for j in range(num_users):
            stronger = tuple(1 + l for l in range(num_users) if position[l] < position[j])
            for i in [j] + [l - 1 for l in stronger]:
                terms.append(BoundedTerm(f"noma{j}_{i}", RateTerm(i, (1 + j,), stronger), "private", j))
        return terms

    for k in range(num_users):
        others = tuple(p for p in privates if p != 1 + k)
        terms.append(BoundedTerm(f"private{k}", RateTerm(k, (1 + k,), others), "private", k))
    if access is AccessScheme.RSMA:
        for k in range(num_users):
            terms.append(BoundedTerm(f"common{k}", RateTerm(k, (0,), tuple(privates)), "common", k))
    return terms


@dataclass(eq=False)
class SubproblemLayout:
    """Where every named quantity lives inside the program vectors"""

    access: AccessScheme
    num_elements: int
    num_users: int
    active_blocks: Tuple[int, ...]
    variables: Dict[str, slice]
    row_map: Dict[str, List[slice]]
    terms: List[BoundedTerm]
    bandwidth_hz: float
    noise_power_watts: float
    lam_hat: float
    objective_constant: float
    eta_floor: float
    sic_order: Tuple[int, ...] = field(default_factory=tuple)

    def block_variable(self, block: int) -> slice:
        return self.variables[f"q{block}"]

    def q_blocks(self, solution: ConeSolution) -> List[np.ndarray]:
        """K+1 PSD blocks read from the PSD slacks; inactive blocks are zero"""
        m = self.num_elements
        blocks = []
        for l in range(self.num_users + 1):
            if l not in self.active_blocks:
                blocks.append(np.zeros((m, m), dtype=complex))
                continue
            rows = self.row_map[f"psd{l}"][0]
            blocks.append(psd_clamp(complex_from_embedding(smat(solution.s[rows]))))
        return blocks

    def q_blocks_from_x(self, x: np.ndarray) -> List[np.ndarray]:
        m = self.num_elements
        blocks = []
        for l in range(self.num_users + 1):
            if l not in self.active_blocks:
                blocks.append(np.zeros((m, m), dtype=complex))
            else:
                blocks.append(unpack_hermitian(x[self.block_variable(l)], m))
        return blocks

    def c_split(self, solution: ConeSolution) -> np.ndarray:
        """Common-rate split in bps"""
        if "c" not in self.variables:
            return np.zeros(self.num_users)
        return np.maximum(solution.x[self.variables["c"]], 0.0) * self.bandwidth_hz

    def model_rates(self, solution: ConeSolution) -> np.ndarray:
        """Private-rate surrogates in bps"""
        return solution.x[self.variables["r"]] * self.bandwidth_hz

    def objective_value(self, solution: ConeSolution) -> float:
        """Model value of R_tot − λ·P_tot in bps/Hz"""
        return -solution.objective + self.objective_constant

    def to_json(self) -> str:
        payload = {
            "access": self.access.value,
            "num_elements": self.num_elements,
            "num_users": self.num_users,
            "active_blocks": list(self.active_blocks),
            "variables": {name: [var.start, var.stop] for name, var in self.variables.items()},
            "rows": {tag: [[rows.start, rows.stop] for rows in slices] for tag, slices in self.row_map.items()},
            "terms": [
                {
                    "name": t.name,
                    "receiver": t.term.receiver,
                    "signal": list(t.term.signal),
                    "interferers": list(t.term.interferers),
                    "bounds": t.bounds,
                    "user": t.user,
                }
                for t in self.terms
            ],
            "bandwidth_hz": self.bandwidth_hz,
            "noise_power_watts": self.noise_power_watts,
            "lam_hat": self.lam_hat,
            "objective_constant": self.objective_constant,
            "eta_floor": self.eta_floor,
            "sic_order": list(self.sic_order),
        }
        return json.dumps(payload, indent=2)


def _negligible_blocks(state: ScaState) -> set:
    traces = state.traces
    total = float(traces.sum())
    if total <= 0:
        return set(range(len(traces)))
    return {l for l, tr in enumerate(traces) if tr <= NEGLIGIBLE_BLOCK_FRACTION * total}


def check_qos_reachable(channels: ChannelSet, cfg: SystemConfig) -> None:
    """Raise when some CU cannot reach r_th even with the whole budget beamed at it"""
    budget = cfg.transmit_budget_watts
    for k, eff in enumerate(channels.cu_effective):
        ceiling = cfg.bandwidth_hz * math.log2(1.0 + budget * eff.gain / cfg.noise_power_watts)
        if cfg.r_th_bps > ceiling:
            raise InfeasibleError(
                f"CU {k} needs {cfg.r_th_bps:.4g} bps but its single-user ceiling is {ceiling:.4g} bps",
                family="qos",
            )


def build_subproblem(state: ScaState, channels: ChannelSet, cfg: SystemConfig,
                     access: AccessScheme = AccessScheme.RSMA,
                     order: Optional[Sequence[int]] = None) -> Tuple[ConeProgram, SubproblemLayout]:
    m = channels.num_elements
    k_users = channels.num_cus
    if state.num_users != k_users or state.num_elements != m:
        raise ModelingError(
            f"anchor describes M={state.num_elements}, K={state.num_users} but channels have M={m}, K={k_users}"
        )
    check_qos_reachable(channels, cfg)

    noise = cfg.noise_power_watts
    w = cfg.bandwidth_hz
    lam_hat = state.lam / w
    log_noise = math.log2(noise)
    if access is AccessScheme.NOMA and order is None:
        order = sic_order(channels)
    order = tuple(int(k) for k in order) if order is not None else ()

    active = tuple(range(k_users + 1)) if access is AccessScheme.RSMA else tuple(range(1, k_users + 1))
    cu_coeffs = [trace_coefficients(eff.F / noise) for eff in channels.cu_effective]
    pu_coeffs = [trace_coefficients(eff.F / noise) for eff in channels.pu_effective]
    trace_row = trace_coefficients(np.eye(m))
    embed = embedding_operator(m)

    builder = ProgramBuilder()
    q = {}
    gauge = {}
    for l in active:
        q[l] = builder.add_variable(f"q{l}", m * m)
        gauge[l] = builder.add_variable(f"gauge{l}", m)
    unit = builder.add_variable("unit")
    c = builder.add_variable("c", k_users) if access is AccessScheme.RSMA else None
    r = builder.add_variable("r", k_users)

    terms = rate_terms(k_users, access, order)
    t_vars = {bt.name: builder.add_variable(f"t_{bt.name}") for bt in terms}

    # structural rows
    builder.constrain("unit", Zero(1), [(unit, np.ones((1, 1)))], 1.0)
    for l in active:
        builder.constrain(f"gauge{l}", Zero(m), [(gauge[l], np.eye(m))], 0.0)
        builder.constrain(f"psd{l}", PSD(2 * m), [(q[l], -embed[:, :m * m]), (gauge[l], -embed[:, m * m:])], 0.0)

    # hypographs and rate bounds
    for bt in terms:
        term = bt.term
        t = t_vars[bt.name]
        coeff = cu_coeffs[term.receiver]
        exp_terms = [(t, np.array([[-LN2], [0.0], [0.0]])), (unit, np.array([[0.0], [-1.0], [-1.0]]))]
        for l in term.blocks:
            exp_terms.append((q[l], np.vstack((np.zeros((2, m * m)), -coeff))))
        builder.constrain(f"exp_{bt.name}", Exp(1), exp_terms)

        tangent = linearize_log_term(state, channels.cu_effective[term.receiver].F, term.interferers, noise)
        tangent = tangent.shifted(-log_noise)
        bound_terms = [(t, -np.ones((1, 1)))]
        bound_terms += [(q[l], coeff_row[None, :]) for l, coeff_row in tangent.coeffs.items()]
        if bt.bounds == "common":
            bound_terms.append((c, np.ones((1, k_users))))
        else:
            row = np.zeros((1, k_users))
            row[0, bt.user] = 1.0
            bound_terms.append((r, row))
        builder.constrain(f"bound_{bt.name}", NonNeg(1), bound_terms, -tangent.constant)

    # power budget
    builder.constrain("power", NonNeg(1), [(q[l], trace_row[None, :]) for l in active], cfg.transmit_budget_watts)

    # primary-user interference, in noise units
    for n, coeff in enumerate(pu_coeffs):
        if access is AccessScheme.RSMA and math.isfinite(cfg.i_c_th_watts):
            builder.constrain(f"interference_common{n}", NonNeg(1), [(q[0], coeff[None, :])], cfg.i_c_th_watts / noise)
        if math.isfinite(cfg.i_p_th_watts):
            builder.constrain(
                f"interference_private{n}", NonNeg(1),
                [(q[l], coeff[None, :]) for l in active if l > 0], cfg.i_p_th_watts / noise,
            )

    # QoS, SE floor and common-rate sign
    qos_terms = [(r, -np.eye(k_users))]
    floor_terms = [(r, -np.ones((1, k_users)))]
    if c is not None:
        qos_terms.append((c, -np.eye(k_users)))
        floor_terms.append((c, -np.ones((1, k_users))))
        builder.constrain("c_nonneg", NonNeg(k_users), [(c, -np.eye(k_users))], 0.0)
    builder.constrain("qos", NonNeg(k_users), qos_terms, -cfg.r_th_bps / w)
    if state.eta_floor > 0:
        builder.constrain("se_floor", NonNeg(1), floor_terms, -state.eta_floor)

    # rank-one cuts u_maxᴴ Q u_max >= ω Tr(Q)
    if state.omega > 0 and m > 1:
        skipped = _negligible_blocks(state)
        for l in active:
            if l in skipped:
                continue
            u = state.eigvecs[l]
            cut = trace_coefficients(state.omega * np.eye(m) - np.outer(u, u.conj()))
            builder.constrain(f"srocr{l}", NonNeg(1), [(q[l], cut[None, :])], 0.0)

    objective = [(r, -np.ones(k_users))]
    if c is not None:
        objective.append((c, -np.ones(k_users)))
    objective += [(q[l], lam_hat * trace_row) for l in active]

    program, row_map = builder.build(objective)
    layout = SubproblemLayout(
        access=access,
        num_elements=m,
        num_users=k_users,
        active_blocks=active,
        variables=builder.variables,
        row_map=row_map,
        terms=terms,
        bandwidth_hz=w,
        noise_power_watts=noise,
        lam_hat=lam_hat,
        objective_constant=-lam_hat * cfg.p_cir_watts,
        eta_floor=state.eta_floor,
        sic_order=order,
    )
    logger.debug(
        f"Subproblem {access.value}: {program.num_variables} variables, {program.num_constraints} rows, "
        f"omega={state.omega:.3f}, lam={state.lam:.4g}"
    )
    return program, layout


def model_point(state: ScaState, layout: SubproblemLayout, channels: ChannelSet,
                c_split: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Program coordinates of the anchor: Q = Q^(r), the given common split, and
    tight hypographs. At this point every tangent is exact, so the rate
    variables equal the true rates.
    """
    noise = layout.noise_power_watts
    log_noise = math.log2(noise)
    total = max(var.stop for var in layout.variables.values())
    x = np.zeros(total)
    x[layout.variables["unit"]] = 1.0

    for l in layout.active_blocks:
        x[layout.block_variable(l)] = pack_hermitian(state.q_prev[l])

    if "c" in layout.variables:
        split = np.zeros(layout.num_users) if c_split is None else np.asarray(c_split, dtype=float)
        x[layout.variables["c"]] = split / layout.bandwidth_hz

    rates = np.full(layout.num_users, np.inf)
    for bt in layout.terms:
        F = channels.cu_effective[bt.term.receiver].F
        t = log_term(state.q_prev, F, bt.term.blocks, noise) - log_noise
        x[layout.variables[f"t_{bt.name}"]] = t
        if bt.bounds == "private":
            exact = t - (log_term(state.q_prev, F, bt.term.interferers, noise) - log_noise)
            rates[bt.user] = min(rates[bt.user], exact)
    x[layout.variables["r"]] = rates
    return x


def model_objective(program: ConeProgram, layout: SubproblemLayout, x: np.ndarray) -> float:
    """R_tot − λ·P_tot of the model at x, in bps/Hz"""
    return float(-(program.c @ x)) + layout.objective_constant
