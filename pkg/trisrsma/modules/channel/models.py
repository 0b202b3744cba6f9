"""
Channel synthesis for the TRIS transmitter.

The feed antenna illuminates the TRIS through a near-field line-of-sight link
(spherical wavefront, element-dependent path length). Each TRIS element then
radiates towards the receivers through a Rician channel whose LoS part is the
UPA steering vector. The optimizer only ever sees the effective vectors
f = h ⊙ g and their rank-one Gram matrices F = f fᴴ.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ...core.errors import ChannelError
from ..scenario.config import SystemConfig
from ..scenario.geometry import Geometry, Substreams, place_users, substreams

logger = logging.getLogger(__name__)

# free-space exponent inside the feed enclosure
FEED_PATHLOSS_EXPONENT = 2.0


@dataclass(frozen=True, eq=False)
class NearFieldChannel:
    h: np.ndarray
    feed_gain: complex

    @property
    def num_elements(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True, eq=False)
class UserChannel:
    g: np.ndarray
    pathloss: float
    rician_k: float
    azimuth: float
    elevation: float
    distance_m: float = float("nan")

    @property
    def num_elements(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True, eq=False)
class EffectiveChannel:
    f: np.ndarray
    F: np.ndarray

    @property
    def gain(self) -> float:
        return float(np.real(np.vdot(self.f, self.f)))


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Everything the optimizer needs about one channel realization"""

    feed: NearFieldChannel
    cu_channels: Tuple[UserChannel, ...]
    pu_channels: Tuple[UserChannel, ...]
    cu_effective: Tuple[EffectiveChannel, ...]
    pu_effective: Tuple[EffectiveChannel, ...]
    geometry: Optional[Geometry] = field(default=None, compare=False)

    @property
    def num_elements(self) -> int:
        return self.feed.num_elements

    @property
    def num_cus(self) -> int:
        return len(self.cu_channels)

    @property
    def num_pus(self) -> int:
        return len(self.pu_channels)

    @property
    def cu_vectors(self) -> np.ndarray:
        """K×M matrix whose rows are the effective CU vectors f_k"""
        return np.array([eff.f for eff in self.cu_effective]).reshape(self.num_cus, self.num_elements)

    @property
    def pu_vectors(self) -> np.ndarray:
        return np.array([eff.f for eff in self.pu_effective]).reshape(self.num_pus, self.num_elements)

    def digest(self) -> str:
        """SHA-256 of the portable dump; equal digests mean identical channels"""
        from .io import channels_to_bytes
        return hashlib.sha256(channels_to_bytes(self)).hexdigest()


def path_gain(ref_gain_db: float, exponent: float, distance_m: float) -> float:
    """Amplitude factor ξ with ξ² = G₀·d^(−exponent)"""
    if not distance_m > 0:
        raise ChannelError(f"path loss undefined at distance {distance_m!r} m")
    return float(np.sqrt(10.0 ** (ref_gain_db / 10.0) * distance_m ** (-exponent)))


def path_loss(cfg: SystemConfig, distance_m: float) -> float:
    return path_gain(cfg.pathloss_ref_gain_db, cfg.pathloss_exponent, distance_m)


def element_offsets(count: int) -> np.ndarray:
    """Centered element index Δ = (2m − count − 1)/2 for m = 1..count"""
    m = np.arange(1, count + 1)
    return (2.0 * m - count - 1.0) / 2.0


def feed_to_ris(cfg: SystemConfig) -> NearFieldChannel:
    lam = cfg.wavelength_m
    d_f = cfg.element_spacing_m
    delta_r = element_offsets(cfg.m_rows)
    delta_c = element_offsets(cfg.m_cols)

    # row-major over (m_r, m_c)
    d = d_f * np.sqrt(delta_r[:, None] ** 2 + delta_c[None, :] ** 2)
    d_fr = np.sqrt(cfg.feed_distance_m ** 2 + d ** 2).ravel()

    alpha = complex(path_gain(cfg.pathloss_ref_gain_db, FEED_PATHLOSS_EXPONENT, cfg.feed_distance_m))
    h = alpha * np.exp(-2j * np.pi * d_fr / lam)
    return NearFieldChannel(h=h, feed_gain=alpha)


def steering_vector(m_rows: int, m_cols: int, spacing_wavelengths: float, elevation: float, azimuth: float) -> np.ndarray:
    """UPA steering vector, Kronecker product of the row and column responses"""
    delta_r = spacing_wavelengths * np.sin(elevation) * np.cos(azimuth)
    delta_c = spacing_wavelengths * np.sin(elevation) * np.sin(azimuth)
    a_r = np.exp(-2j * np.pi * delta_r * np.arange(m_rows))
    a_c = np.exp(-2j * np.pi * delta_c * np.arange(m_cols))
    return np.kron(a_r, a_c)


def ris_to_receiver(cfg: SystemConfig, position: Sequence[float], rng: np.random.Generator) -> UserChannel:
    """Rician TRIS→receiver channel for a ground receiver at ``position`` (x, y)"""
    x, y = float(position[0]), float(position[1])
    offset = np.array([x, y, -cfg.tris_height_m])
    distance = float(np.linalg.norm(offset))
    if distance <= 0.0:
        raise ChannelError("receiver coincides with the TRIS centre")

    elevation = float(np.arctan2(np.hypot(x, y), cfg.tris_height_m))
    azimuth = float(np.arctan2(y, x))
    xi = path_loss(cfg, distance)

    m = cfg.num_elements
    g_los = steering_vector(cfg.m_rows, cfg.m_cols, cfg.element_spacing_m / cfg.wavelength_m, elevation, azimuth)
    g_nlos = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2.0)

    kappa = cfg.rician_k
    g = xi * (np.sqrt(kappa / (kappa + 1.0)) * g_los + np.sqrt(1.0 / (kappa + 1.0)) * g_nlos)
    return UserChannel(g=g, pathloss=xi, rician_k=kappa, azimuth=azimuth, elevation=elevation, distance_m=distance)


def effective(h, g) -> EffectiveChannel:
    """f = diag(h)·g and F = f fᴴ"""
    h_vec = np.asarray(getattr(h, "h", h), dtype=complex).ravel()
    g_vec = np.asarray(getattr(g, "g", g), dtype=complex).ravel()
    if h_vec.shape != g_vec.shape:
        raise ChannelError(f"length mismatch: h has {h_vec.size} entries, g has {g_vec.size}")
    f = h_vec * g_vec
    return EffectiveChannel(f=f, F=np.outer(f, f.conj()))


def assemble(feed: NearFieldChannel, cu: Sequence[UserChannel], pu: Sequence[UserChannel],
             geometry: Optional[Geometry] = None) -> ChannelSet:
    cu = tuple(cu)
    pu = tuple(pu)
    return ChannelSet(
        feed=feed,
        cu_channels=cu,
        pu_channels=pu,
        cu_effective=tuple(effective(feed, ch) for ch in cu),
        pu_effective=tuple(effective(feed, ch) for ch in pu),
        geometry=geometry,
    )


def generate_channels(cfg: SystemConfig, streams: Optional[Substreams] = None) -> ChannelSet:
    """Draw one channel realization; a fixed seed gives bit-identical output"""
    if streams is None:
        streams = substreams(cfg.rng_seed)

    geometry = place_users(cfg, streams.geometry)
    feed = feed_to_ris(cfg)
    cu = [ris_to_receiver(cfg, pos, streams.fading) for pos in geometry.cu_positions]
    pu = [ris_to_receiver(cfg, pos, streams.fading) for pos in geometry.pu_positions]

    channels = assemble(feed, cu, pu, geometry)
    logger.debug(f"Generated channels M={channels.num_elements} K={channels.num_cus} N={channels.num_pus}")
    return channels


def single_element_equivalent(channels: ChannelSet, cfg: SystemConfig) -> ChannelSet:
    """
    The same realization seen through one element only: the centre feed path
    and the first element's fading draw per receiver. Used when the transmitter
    has no aperture to steer with.
    """
    feed = feed_to_ris(cfg.with_updates(m_rows=1, m_cols=1))

    def reduce(ch: UserChannel) -> UserChannel:
        return UserChannel(
            g=ch.g[:1].copy(),
            pathloss=ch.pathloss,
            rician_k=ch.rician_k,
            azimuth=ch.azimuth,
            elevation=ch.elevation,
            distance_m=ch.distance_m,
        )

    return assemble(
        feed,
        [reduce(ch) for ch in channels.cu_channels],
        [reduce(ch) for ch in channels.pu_channels],
        channels.geometry,
    )
