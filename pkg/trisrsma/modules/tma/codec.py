"""
Time-modulated array codec.

Each TRIS element is driven by an on/off control signal within one code
element period T_p. The 0-state duration tau sets the radiated amplitude,
A/A_max = sin(pi tau/T_p), and the 0-state start time t_on together with tau
sets the phase, -pi (2 t_on + tau)/T_p = phi + 2 k pi.
"""

import csv
import logging
import math
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from ...core.errors import TmaRangeError
from .config import ControlTiming, TmaParams

logger = logging.getLogger(__name__)


def wrap_phase(phase: float) -> float:
    """Wrap into (-pi, pi]"""
    return math.pi - (math.pi - phase) % (2.0 * math.pi)


def encode(amplitude: float, phase: float, params: TmaParams) -> ControlTiming:
    if not 0.0 <= amplitude <= params.a_max:
        raise TmaRangeError(f"amplitude {amplitude!r} outside [0, {params.a_max!r}]")

    # ascending branch of the sine keeps tau in [0, T_p/2]
    ratio = min(amplitude / params.a_max, 1.0)
    tau = params.t_p * math.asin(ratio) / math.pi
    t_on = (-phase * params.t_p / (2.0 * math.pi) - tau / 2.0) % params.t_p
    if t_on >= params.t_p:
        t_on = 0.0
    return ControlTiming(t_on=t_on, tau=tau)


def decode(timing: ControlTiming, params: TmaParams) -> Tuple[float, float]:
    amplitude = params.a_max * math.sin(math.pi * timing.tau / params.t_p)
    phase = wrap_phase(-math.pi * (2.0 * timing.t_on + timing.tau) / params.t_p)
    return amplitude, phase


def precode_frame(P: np.ndarray, s: np.ndarray, params: TmaParams) -> Tuple[np.ndarray, List[ControlTiming]]:
    """Precode one symbol vector (x = P s) and map every element to its control timing"""
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    if P.shape[0] == 1 and np.ndim(s) == 0:
        P = P.T
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if P.shape[1] != s.shape[0]:
        raise TmaRangeError(f"precoder has {P.shape[1]} streams but {s.shape[0]} symbols were given")

    x = P @ s
    timings = []
    for m, value in enumerate(x):
        amplitude = abs(value)
        if amplitude > params.a_max:
            raise TmaRangeError(f"amplitude {amplitude:.6g} exceeds a_max {params.a_max:.6g}", element=m)
        phase = float(np.angle(value)) if amplitude > 0 else 0.0
        timings.append(encode(amplitude, phase, params))
    return x, timings


def dump_frame_csv(x: np.ndarray, timings: List[ControlTiming], params: TmaParams, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["element", "amplitude", "phase_rad", "t_on_s", "tau_s"])
        for m, (value, timing) in enumerate(zip(x, timings)):
            amplitude, phase = decode(timing, params)
            writer.writerow([m, f"{amplitude:.9g}", f"{phase:.9g}", f"{timing.t_on:.9g}", f"{timing.tau:.9g}"])
    logger.info(f"Wrote TMA frame with {len(timings)} elements to {path}")
