"""
Exact RSMA rate algebra.

Every quantity is evaluated from a gain matrix G[k, l] = |f_kᴴ p_l|² (vector
form) or G[k, l] = Tr(F_k Q_l) (lifted form); column 0 is the common stream and
columns 1..K the private streams. Rates are in bits/s, powers in watts.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from ...core.errors import RatesError
from ..channel.models import ChannelSet
from ..scenario.config import SystemConfig, default_config

logger = logging.getLogger(__name__)

# relative tolerance on every feasibility check
FEASIBILITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Precoders:
    """Columns of P = [p_c, p_1, ..., p_K]"""

    p_c: np.ndarray
    p_private: np.ndarray

    def __post_init__(self):
        if self.p_private.ndim != 2 or self.p_private.shape[1] != self.p_c.shape[0]:
            raise RatesError(f"private precoders shape {self.p_private.shape} does not match M={self.p_c.shape[0]}")
        if not (np.all(np.isfinite(self.p_c)) and np.all(np.isfinite(self.p_private))):
            raise RatesError("precoders contain non-finite entries")

    @classmethod
    def from_matrix(cls, P: np.ndarray) -> "Precoders":
        P = np.asarray(P, dtype=complex)
        return cls(p_c=P[:, 0].copy(), p_private=P[:, 1:].T.copy())

    @classmethod
    def zeros(cls, num_elements: int, num_users: int) -> "Precoders":
        return cls(p_c=np.zeros(num_elements, dtype=complex),
                   p_private=np.zeros((num_users, num_elements), dtype=complex))

    @property
    def matrix(self) -> np.ndarray:
        return np.column_stack([self.p_c, self.p_private.T])

    @property
    def num_elements(self) -> int:
        return self.p_c.shape[0]

    @property
    def num_users(self) -> int:
        return self.p_private.shape[0]

    @property
    def transmit_power(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def lifted(self) -> list:
        """Q_l = p_l p_lᴴ, common first"""
        return [np.outer(p, p.conj()) for p in self.matrix.T]

    def scaled(self, factor: float) -> "Precoders":
        return Precoders(p_c=self.p_c * factor, p_private=self.p_private * factor)


@dataclass(frozen=True, eq=False)
class RateReport:
    common_rates: np.ndarray
    private_rates: np.ndarray
    r_c: float
    c_split: np.ndarray
    r_tot: float
    p_tot: float
    se: float
    ee: float
    bandwidth_hz: float
    interference_common: np.ndarray
    interference_private: np.ndarray
    split_ok: bool
    power_ok: bool
    qos_ok: bool
    interference_ok: bool

    @property
    def feasible(self) -> bool:
        return self.split_ok and self.power_ok and self.qos_ok and self.interference_ok

    @property
    def user_rates(self) -> np.ndarray:
        return self.c_split + self.private_rates

    def meets_se_floor(self, eta0: float) -> bool:
        return self.se >= eta0 * (1.0 - FEASIBILITY_TOL)

    def dinkelbach_value(self, lam: float) -> float:
        return self.r_tot - lam * self.p_tot

    def to_record(self) -> Dict[str, object]:
        """Flat record for tables and JSON"""
        record = {
            "r_c": self.r_c,
            "r_tot": self.r_tot,
            "p_tot": self.p_tot,
            "se": self.se,
            "ee": self.ee,
            "feasible": self.feasible,
            "split_ok": self.split_ok,
            "power_ok": self.power_ok,
            "qos_ok": self.qos_ok,
            "interference_ok": self.interference_ok,
        }
        for k, (rc, rp, c) in enumerate(zip(self.common_rates, self.private_rates, self.c_split)):
            record[f"common_rate_{k}"] = float(rc)
            record[f"private_rate_{k}"] = float(rp)
            record[f"c_split_{k}"] = float(c)
        for n, (ic, ip) in enumerate(zip(self.interference_common, self.interference_private)):
            record[f"interference_common_{n}"] = float(ic)
            record[f"interference_private_{n}"] = float(ip)
        return record


def _within(lhs: float, rhs: float, scale: float) -> bool:
    """lhs <= rhs up to the relative feasibility tolerance"""
    return lhs <= rhs + FEASIBILITY_TOL * max(abs(rhs), scale)


def gain_matrix(vectors: np.ndarray, precoders: Precoders) -> np.ndarray:
    """G[k, l] = |f_kᴴ p_l|²"""
    return np.abs(vectors.conj() @ precoders.matrix) ** 2


def lifted_gain_matrix(vectors: np.ndarray, q_blocks: Sequence[np.ndarray]) -> np.ndarray:
    """G[k, l] = Tr(F_k Q_l) = f_kᴴ Q_l f_k"""
    out = np.empty((vectors.shape[0], len(q_blocks)))
    for l, Q in enumerate(q_blocks):
        out[:, l] = np.real(np.einsum("km,mn,kn->k", vectors.conj(), Q, vectors))
    return out


def _check_index(index: int, count: int, what: str) -> None:
    if not 0 <= index < count:
        raise RatesError(f"{what} index {index} outside [0, {count})")


def _noise(cfg: Optional[SystemConfig]) -> float:
    return (cfg if cfg is not None else default_config()).noise_power_watts


def common_sinr(ch: ChannelSet, pre: Precoders, k: int, cfg: Optional[SystemConfig] = None) -> float:
    """SINR of the common stream at CU k; noise comes from cfg, the defaults when omitted"""
    _check_index(k, ch.num_cus, "CU")
    gains = gain_matrix(ch.cu_vectors[k:k + 1], pre)[0]
    return float(gains[0] / (gains[1:].sum() + _noise(cfg)))


def private_sinr(ch: ChannelSet, pre: Precoders, k: int, cfg: Optional[SystemConfig] = None) -> float:
    _check_index(k, ch.num_cus, "CU")
    gains = gain_matrix(ch.cu_vectors[k:k + 1], pre)[0]
    interference = gains[1:].sum() - gains[1 + k]
    return float(gains[1 + k] / (interference + _noise(cfg)))


def interference_at_pu(ch: ChannelSet, pre: Precoders, n: int):
    """(common, private) interference power received by PU n, watts"""
    _check_index(n, ch.num_pus, "PU")
    gains = gain_matrix(ch.pu_vectors[n:n + 1], pre)[0]
    return float(gains[0]), float(gains[1:].sum())


def split_common_rate(r_c: float, private_rates: np.ndarray, r_th: float) -> np.ndarray:
    """
    Share the common rate: cover each user's QoS deficit first, then split
    the remainder uniformly. When the deficits exceed r_c they are scaled down
    proportionally.
    """
    private_rates = np.asarray(private_rates, dtype=float)
    k = private_rates.shape[0]
    r_c = max(float(r_c), 0.0)
    deficits = np.maximum(r_th - private_rates, 0.0)
    need = deficits.sum()
    if need <= r_c:
        return deficits + (r_c - need) / k
    return deficits * (r_c / need)


def _report_from_gains(cu_gains: np.ndarray, pu_gains: np.ndarray, transmit_power: float,
                       c_split: np.ndarray, cfg: SystemConfig) -> RateReport:
    w = cfg.bandwidth_hz
    noise = cfg.noise_power_watts
    private_total = cu_gains[:, 1:].sum(axis=1)
    own = np.diag(cu_gains[:, 1:])

    common_rates = w * np.log2(1.0 + cu_gains[:, 0] / (private_total + noise))
    private_rates = w * np.log2(1.0 + own / (private_total - own + noise))
    r_c = float(common_rates.min()) if common_rates.size else 0.0

    r_tot = float(np.sum(c_split + private_rates))
    p_tot = transmit_power + cfg.p_cir_watts
    interference_common = pu_gains[:, 0]
    interference_private = pu_gains[:, 1:].sum(axis=1)

    user_rates = c_split + private_rates
    return RateReport(
        common_rates=common_rates,
        private_rates=private_rates,
        r_c=r_c,
        c_split=c_split,
        r_tot=r_tot,
        p_tot=p_tot,
        se=r_tot / w,
        ee=r_tot / p_tot,
        bandwidth_hz=w,
        interference_common=interference_common,
        interference_private=interference_private,
        split_ok=_within(float(c_split.sum()), r_c, w),
        power_ok=_within(p_tot, cfg.p_max_watts, cfg.p_max_watts),
        qos_ok=all(_within(cfg.r_th_bps, float(r), w) for r in user_rates),
        interference_ok=(
            all(_within(float(i), cfg.i_c_th_watts, noise) for i in interference_common)
            and all(_within(float(i), cfg.i_p_th_watts, noise) for i in interference_private)
        ),
    )


def _validated_split(c_split, num_users: int) -> np.ndarray:
    if c_split is None:
        return np.zeros(num_users)
    c_split = np.asarray(c_split, dtype=float).ravel()
    if c_split.shape[0] != num_users:
        raise RatesError(f"c_split has {c_split.shape[0]} entries for {num_users} users")
    if np.any(c_split < 0):
        raise RatesError(f"negative common-rate split: {c_split.tolist()}")
    return c_split


def rate_report(ch: ChannelSet, pre: Precoders, c_split, cfg: SystemConfig) -> RateReport:
    c_split = _validated_split(c_split, ch.num_cus)
    return _report_from_gains(gain_matrix(ch.cu_vectors, pre), gain_matrix(ch.pu_vectors, pre),
                              pre.transmit_power, c_split, cfg)


def lifted_rate_report(ch: ChannelSet, q_blocks: Sequence[np.ndarray], c_split, cfg: SystemConfig) -> RateReport:
    """rate_report evaluated on lifted blocks Q_l (common first) via trace forms"""
    c_split = _validated_split(c_split, ch.num_cus)
    if len(q_blocks) != ch.num_cus + 1:
        raise RatesError(f"expected {ch.num_cus + 1} lifted blocks, got {len(q_blocks)}")
    power = float(sum(np.real(np.trace(Q)) for Q in q_blocks))
    return _report_from_gains(lifted_gain_matrix(ch.cu_vectors, q_blocks),
                              lifted_gain_matrix(ch.pu_vectors, q_blocks), power, c_split, cfg)


def sic_order(ch: ChannelSet) -> np.ndarray:
    """NOMA decoding order: users sorted by descending effective gain ‖f_k‖ (stable)"""
    gains = np.array([eff.gain for eff in ch.cu_effective])
    return np.argsort(-gains, kind="stable")


def _noma_report_from_gains(cu_gains: np.ndarray, pu_gains: np.ndarray, transmit_power: float,
                            order: np.ndarray, cfg: SystemConfig) -> RateReport:
    w = cfg.bandwidth_hz
    noise = cfg.noise_power_watts
    k = cu_gains.shape[0]
    position = np.empty(k, dtype=int)
    position[order] = np.arange(k)

    private = cu_gains[:, 1:]
    rates = np.empty(k)
    for j in range(k):
        stronger = [l for l in range(k) if position[l] < position[j]]
        decoders = [j] + stronger
        # user j's stream must be decodable wherever SIC removes it
        rates[j] = min(
            w * np.log2(1.0 + private[i, j] / (private[i, stronger].sum() + noise)) for i in decoders
        )

    zeros = np.zeros(k)
    extended = np.column_stack([np.zeros(cu_gains.shape[0]), private])
    report = _report_from_gains(extended, pu_gains, transmit_power, zeros, cfg)
    r_tot = float(rates.sum())
    p_tot = report.p_tot
    return RateReport(
        common_rates=zeros,
        private_rates=rates,
        r_c=0.0,
        c_split=zeros,
        r_tot=r_tot,
        p_tot=p_tot,
        se=r_tot / w,
        ee=r_tot / p_tot,
        bandwidth_hz=w,
        interference_common=report.interference_common,
        interference_private=report.interference_private,
        split_ok=True,
        power_ok=report.power_ok,
        qos_ok=all(_within(cfg.r_th_bps, float(r), w) for r in rates),
        interference_ok=report.interference_ok,
    )


def noma_rate_report(ch: ChannelSet, pre: Precoders, cfg: SystemConfig,
                     order: Optional[np.ndarray] = None) -> RateReport:
    """SIC rates of superposition coding; the common column must be empty"""
    if np.any(pre.p_c != 0):
        raise RatesError("NOMA precoders carry no common stream")
    order = sic_order(ch) if order is None else np.asarray(order)
    return _noma_report_from_gains(gain_matrix(ch.cu_vectors, pre), gain_matrix(ch.pu_vectors, pre),
                                   pre.transmit_power, order, cfg)


def lifted_noma_rate_report(ch: ChannelSet, q_blocks: Sequence[np.ndarray], cfg: SystemConfig,
                            order: Optional[np.ndarray] = None) -> RateReport:
    order = sic_order(ch) if order is None else np.asarray(order)
    power = float(sum(np.real(np.trace(Q)) for Q in q_blocks))
    return _noma_report_from_gains(lifted_gain_matrix(ch.cu_vectors, q_blocks),
                                   lifted_gain_matrix(ch.pu_vectors, q_blocks), power, order, cfg)
