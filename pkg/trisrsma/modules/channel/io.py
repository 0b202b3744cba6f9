"""
Portable channel dump.

Layout (all little-endian): 8-byte magic, three uint32 counts (M, K, N), the
complex feed gain, h (M), the CU rows of g (K×M, row-major), the PU rows
(N×M), then five float64 metadata values per receiver
(pathloss, rician_k, azimuth, elevation, distance_m), CUs first. Complex
entries are stored as (real, imag) float64 pairs.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from ...core.errors import ChannelError
from .models import ChannelSet, NearFieldChannel, UserChannel, assemble

logger = logging.getLogger(__name__)

MAGIC = b"TRISCH01"
_COMPLEX = np.dtype("<c16")
_REAL = np.dtype("<f8")
_COUNT = np.dtype("<u4")


def _meta(ch: UserChannel) -> list:
    return [ch.pathloss, ch.rician_k, ch.azimuth, ch.elevation, ch.distance_m]


def channels_to_bytes(channels: ChannelSet) -> bytes:
    m, k, n = channels.num_elements, channels.num_cus, channels.num_pus
    g_cu = np.array([ch.g for ch in channels.cu_channels], dtype=complex).reshape(k, m)
    g_pu = np.array([ch.g for ch in channels.pu_channels], dtype=complex).reshape(n, m)
    meta = np.array([_meta(ch) for ch in channels.cu_channels + channels.pu_channels], dtype=float).reshape(k + n, 5)

    parts = [
        MAGIC,
        np.array([m, k, n], dtype=_COUNT).tobytes(),
        np.array([channels.feed.feed_gain], dtype=_COMPLEX).tobytes(),
        np.asarray(channels.feed.h, dtype=_COMPLEX).tobytes(),
        g_cu.astype(_COMPLEX).tobytes(),
        g_pu.astype(_COMPLEX).tobytes(),
        meta.astype(_REAL).tobytes(),
    ]
    return b"".join(parts)


def channels_from_bytes(data: bytes) -> ChannelSet:
    if data[:len(MAGIC)] != MAGIC:
        raise ChannelError("not a channel dump (bad magic)")
    offset = len(MAGIC)
    try:
        m, k, n = (int(v) for v in np.frombuffer(data, dtype=_COUNT, count=3, offset=offset))
        offset += 3 * _COUNT.itemsize

        def take(dtype, count):
            nonlocal offset
            values = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
            offset += count * dtype.itemsize
            return values.astype(dtype.newbyteorder("="))

        feed_gain = complex(take(_COMPLEX, 1)[0])
        h = take(_COMPLEX, m)
        g_cu = take(_COMPLEX, k * m).reshape(k, m)
        g_pu = take(_COMPLEX, n * m).reshape(n, m)
        meta = take(_REAL, (k + n) * 5).reshape(k + n, 5)
    except ValueError as e:
        raise ChannelError(f"truncated channel dump: {e}") from e
    if offset != len(data):
        raise ChannelError(f"channel dump has {len(data) - offset} trailing bytes")

    def user(g, row):
        return UserChannel(g=g.copy(), pathloss=float(row[0]), rician_k=float(row[1]),
                           azimuth=float(row[2]), elevation=float(row[3]), distance_m=float(row[4]))

    cu = [user(g_cu[i], meta[i]) for i in range(k)]
    pu = [user(g_pu[i], meta[k + i]) for i in range(n)]
    return assemble(NearFieldChannel(h=h.copy(), feed_gain=feed_gain), cu, pu)


def export_channels(channels: ChannelSet, path: Union[str, Path]) -> None:
    Path(path).write_bytes(channels_to_bytes(channels))
    logger.info(f"Exported channels (M={channels.num_elements}, K={channels.num_cus}, N={channels.num_pus}) to {path}")


def import_channels(path: Union[str, Path]) -> ChannelSet:
    return channels_from_bytes(Path(path).read_bytes())
