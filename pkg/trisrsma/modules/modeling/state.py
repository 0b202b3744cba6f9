"""
Anchor of one SCA step and the tangent bounds built at it.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from ...core.errors import ModelingError
from ..channel.models import ChannelSet
from .config import HERMITIAN_TOL
from .embedding import AffineForm, check_hermitian, pack_hermitian, principal_component, trace_coefficients

LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class ScaState:
    """
    q_prev holds K+1 Hermitian PSD blocks, common first. lam is the Dinkelbach
    parameter in bps/W and eta_floor the SE floor in bps/Hz.
    """

    q_prev: Tuple[np.ndarray, ...]
    omega: float = 0.0
    lam: float = 0.0
    eta_floor: float = 0.0

    def __post_init__(self):
        blocks = tuple(check_hermitian(Q, f"anchor block {l}") for l, Q in enumerate(self.q_prev))
        if not blocks:
            raise ModelingError("anchor needs at least one block")
        m = blocks[0].shape[0]
        for l, Q in enumerate(blocks):
            if Q.shape != (m, m):
                raise ModelingError(f"anchor block {l} has shape {Q.shape}, expected ({m}, {m})")
            floor = -HERMITIAN_TOL * max(1.0, float(np.real(np.trace(Q))))
            if np.linalg.eigvalsh((Q + Q.conj().T) / 2.0)[0] < floor:
                raise ModelingError(f"anchor block {l} is not positive semidefinite")
        if not 0.0 <= self.omega <= 1.0:
            raise ModelingError(f"omega must lie in [0, 1], got {self.omega}")
        if self.lam < 0 or not math.isfinite(self.lam):
            raise ModelingError(f"lambda must be finite and nonnegative, got {self.lam}")
        object.__setattr__(self, "q_prev", blocks)

    @property
    def num_elements(self) -> int:
        return self.q_prev[0].shape[0]

    @property
    def num_users(self) -> int:
        return len(self.q_prev) - 1

    @cached_property
    def eigvecs(self) -> Tuple[np.ndarray, ...]:
        """u_max of every anchor block"""
        return tuple(principal_component(Q)[1] for Q in self.q_prev)

    @cached_property
    def traces(self) -> np.ndarray:
        return np.array([float(np.real(np.trace(Q))) for Q in self.q_prev])

    def with_updates(self, **changes) -> "ScaState":
        values = dict(q_prev=self.q_prev, omega=self.omega, lam=self.lam, eta_floor=self.eta_floor)
        values.update(changes)
        return ScaState(**values)

    @classmethod
    def from_precoders(cls, precoders, **kwargs) -> "ScaState":
        return cls(q_prev=tuple(precoders.lifted()), **kwargs)


def linearize_log_term(state: ScaState, F: np.ndarray, blocks: Iterable[int], noise_power: float) -> AffineForm:
    """
    Tangent of Q ↦ log2(Σ_{l∈blocks} Tr(F Q_l) + noise_power) at the anchor.
    The function is concave, so the tangent is a global upper bound.
    """
    blocks = sorted(set(blocks))
    anchor = noise_power + sum(float(np.real(np.trace(F @ state.q_prev[l]))) for l in blocks)
    value = math.log2(anchor)
    if not blocks:
        return AffineForm(constant=value, coeffs={})
    gradient = trace_coefficients(F) / (LN2 * anchor)
    coeffs = {l: gradient for l in blocks}
    constant = value - sum(float(gradient @ pack_hermitian(state.q_prev[l])) for l in blocks)
    return AffineForm(constant=constant, coeffs=coeffs)


def linearize_vk(state: ScaState, channels: ChannelSet, k: int, noise_power: float,
                 interferers: Optional[Sequence[int]] = None) -> AffineForm:
    """
    Upper bound of v_k(Q) = log2(Σ_{i≠k} Tr(F_k Q_i) + σ²) over the private
    blocks (indices 1..K), exact at the anchor.
    """
    if not 0 <= k < channels.num_cus:
        raise ModelingError(f"CU index {k} outside [0, {channels.num_cus})")
    if interferers is None:
        interferers = [1 + i for i in range(channels.num_cus) if i != k]
    return linearize_log_term(state, channels.cu_effective[k].F, interferers, noise_power)


def log_term(q_blocks: Sequence[np.ndarray], F: np.ndarray, blocks: Iterable[int], noise_power: float) -> float:
    """Exact log2(Σ Tr(F Q_l) + noise_power)"""
    total = noise_power + sum(float(np.real(np.trace(F @ q_blocks[l]))) for l in blocks)
    return math.log2(total)
