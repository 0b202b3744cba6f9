import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import SystemConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Substreams:
    """Independent random streams of one experiment realization"""

    geometry: np.random.Generator
    fading: np.random.Generator
    precoding: np.random.Generator
    recovery: np.random.Generator


def substreams(seed: int, realization: int = 0, point: int = 0) -> Substreams:
    """
    Split a base seed into the streams used by one realization.

    The user drop depends on (seed, realization) only, so every sweep point of a
    realization sees the same placement; fading and scheme randomness also
    depend on the sweep point.
    """
    drop = np.random.SeedSequence(entropy=seed, spawn_key=(realization,))
    run = np.random.SeedSequence(entropy=seed, spawn_key=(realization, point, 1))
    fading, precoding, recovery = run.spawn(3)
    return Substreams(
        geometry=np.random.default_rng(drop),
        fading=np.random.default_rng(fading),
        precoding=np.random.default_rng(precoding),
        recovery=np.random.default_rng(recovery),
    )


@dataclass(frozen=True, eq=False)
class Geometry:
    """Ground positions of the receivers and the transmitter layout (meters, CBS at origin)"""

    cu_positions: np.ndarray
    pu_positions: np.ndarray
    feed_position: np.ndarray
    tris_position: np.ndarray

    @property
    def cu_distances(self) -> np.ndarray:
        return np.linalg.norm(self.cu_positions, axis=1)

    @property
    def pu_distances(self) -> np.ndarray:
        return np.linalg.norm(self.pu_positions, axis=1)


def uniform_disk(rng: np.random.Generator, count: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * np.pi * rng.random(count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def place_users(cfg: SystemConfig, rng: Optional[np.random.Generator] = None) -> Geometry:
    """Drop K cognitive users and N primary users uniformly over their disks"""
    if rng is None:
        rng = substreams(cfg.rng_seed).geometry

    cu = uniform_disk(rng, cfg.num_cus, cfg.cu_radius_m)
    pu = uniform_disk(rng, cfg.num_pus, cfg.pu_radius_m)
    tris = np.array([0.0, 0.0, cfg.tris_height_m])
    feed = tris + np.array([0.0, 0.0, cfg.feed_distance_m])

    logger.debug(f"Placed {cfg.num_cus} CUs within {cfg.cu_radius_m} m and {cfg.num_pus} PUs within {cfg.pu_radius_m} m")
    return Geometry(cu_positions=cu, pu_positions=pu, feed_position=feed, tris_position=tris)
