"""
Scenario configuration: the system constants of one simulated downlink.

The on-disk format is a flat UTF-8 document of ``key: value [unit]`` lines with
``#`` comments. Powers, frequencies, rates, gains, lengths and times carry an
explicit unit suffix; bare numbers are read in SI base units.
"""

import dataclasses
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from ...core.errors import ConfigError, ConfigParseError, ConfigValidationError
from .units import (
    FREQUENCY_UNITS,
    LENGTH_UNITS,
    POWER_UNITS,
    RATE_UNITS,
    SPEED_OF_LIGHT,
    TIME_UNITS,
    db_to_linear,
    dbm_to_watts,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SystemConfig:
    """All scenario constants; immutable once built"""

    m_rows: int = 3
    m_cols: int = 3
    num_cus: int = 5
    num_pus: int = 5
    carrier_freq_hz: float = 3e9
    bandwidth_hz: float = 20e6
    p_max_watts: float = 10.0
    p_cir_watts: float = 1.0
    noise_power_watts: float = float(dbm_to_watts(-90.0))
    i_c_th_watts: float = float(dbm_to_watts(-80.0))
    i_p_th_watts: float = float(dbm_to_watts(-60.0))
    r_th_bps: float = 1e6
    eta0_fraction: float = 0.5
    rician_k: float = 1.0
    pathloss_exponent: float = 2.5
    pathloss_ref_gain_db: float = -30.0
    cu_radius_m: float = 350.0
    pu_radius_m: float = 500.0
    feed_distance_m: float = 0.5
    tris_height_m: float = 10.0
    eps0: float = 1e-3
    rng_seed: int = 1
    tma_code_time_s: float = 1e-6

    def __post_init__(self):
        for name in ("m_rows", "m_cols", "num_cus", "num_pus"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigValidationError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.rng_seed, bool) or not isinstance(self.rng_seed, int) or self.rng_seed < 0:
            raise ConfigValidationError(f"rng_seed must be an unsigned integer, got {self.rng_seed!r}")

        positive = (
            "carrier_freq_hz", "bandwidth_hz", "p_max_watts", "p_cir_watts", "noise_power_watts",
            "i_c_th_watts", "i_p_th_watts", "pathloss_exponent", "cu_radius_m", "pu_radius_m",
            "feed_distance_m", "eps0", "tma_code_time_s",
        )
        for name in positive:
            value = getattr(self, name)
            if math.isnan(value) or value <= 0:
                raise ConfigValidationError(f"{name} must be strictly positive, got {value!r}")
        for name in ("r_th_bps", "rician_k", "tris_height_m"):
            value = getattr(self, name)
            if math.isnan(value) or value < 0:
                raise ConfigValidationError(f"{name} must be nonnegative, got {value!r}")
        if not 0.0 <= self.eta0_fraction <= 1.0:
            raise ConfigValidationError(f"eta0_fraction must lie in [0, 1], got {self.eta0_fraction!r}")
        if not math.isfinite(self.pathloss_ref_gain_db):
            raise ConfigValidationError("pathloss_ref_gain_db must be finite")
        if self.p_max_watts <= self.p_cir_watts:
            raise ConfigValidationError(
                f"p_max_watts ({self.p_max_watts}) must exceed p_cir_watts ({self.p_cir_watts})"
            )

    @property
    def num_elements(self) -> int:
        return self.m_rows * self.m_cols

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq_hz

    @property
    def element_spacing_m(self) -> float:
        """Half-wavelength spacing d_f; derived, never stored"""
        return self.wavelength_m / 2.0

    @property
    def transmit_budget_watts(self) -> float:
        return self.p_max_watts - self.p_cir_watts

    @property
    def ref_gain_linear(self) -> float:
        return float(db_to_linear(self.pathloss_ref_gain_db))

    def with_updates(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)


def default_config() -> SystemConfig:
    return SystemConfig()


# document key -> (field, value kind)
_KEYS = {
    "m_rows": ("m_rows", "int"),
    "m_cols": ("m_cols", "int"),
    "num_cus": ("num_cus", "int"),
    "num_pus": ("num_pus", "int"),
    "carrier_freq": ("carrier_freq_hz", "frequency"),
    "bandwidth": ("bandwidth_hz", "frequency"),
    "p_max": ("p_max_watts", "power"),
    "p_cir": ("p_cir_watts", "power"),
    "noise_power": ("noise_power_watts", "power"),
    "i_c_th": ("i_c_th_watts", "power"),
    "i_p_th": ("i_p_th_watts", "power"),
    "r_th": ("r_th_bps", "rate"),
    "eta0_fraction": ("eta0_fraction", "float"),
    "rician_k": ("rician_k", "float"),
    "pathloss_exponent": ("pathloss_exponent", "float"),
    "pathloss_ref_gain": ("pathloss_ref_gain_db", "gain"),
    "cu_radius": ("cu_radius_m", "length"),
    "pu_radius": ("pu_radius_m", "length"),
    "feed_distance": ("feed_distance_m", "length"),
    "tris_height": ("tris_height_m", "length"),
    "eps0": ("eps0", "float"),
    "rng_seed": ("rng_seed", "int"),
    "tma_code_time": ("tma_code_time_s", "time"),
}

# unit written by serialize_config per kind
_CANONICAL_UNIT = {
    "frequency": "Hz",
    "power": "W",
    "rate": "bps",
    "gain": "dB",
    "length": "m",
    "time": "s",
}

_VALUE = re.compile(r"\s*(\S+?)\s*([A-Za-z]+)?\s*")


def _convert(key: str, kind: str, raw: str, line: int):
    match = _VALUE.fullmatch(raw)
    if not match:
        raise ConfigParseError("malformed value", key=key, line=line)
    number, unit = match.group(1), match.group(2)

    if kind == "int":
        if unit is not None:
            raise ConfigParseError(f"unexpected unit '{unit}'", key=key, line=line)
        try:
            return int(number)
        except ValueError:
            raise ConfigParseError(f"expected an integer, got '{number}'", key=key, line=line) from None

    try:
        value = float(number)
    except ValueError:
        raise ConfigParseError(f"expected a number, got '{number}'", key=key, line=line) from None

    if kind == "float":
        if unit is not None:
            raise ConfigParseError(f"unexpected unit '{unit}'", key=key, line=line)
        return value
    if kind == "gain":
        if unit is not None and unit.lower() != "db":
            raise ConfigParseError(f"unknown gain unit '{unit}'", key=key, line=line)
        return value

    table = {
        "power": POWER_UNITS,
        "frequency": FREQUENCY_UNITS,
        "rate": RATE_UNITS,
        "length": LENGTH_UNITS,
        "time": TIME_UNITS,
    }[kind]
    if unit is None:
        return value
    scale = table.get(unit.lower())
    if scale is None:
        raise ConfigParseError(f"unknown {kind} unit '{unit}'", key=key, line=line)
    return scale(value) if callable(scale) else value * scale


def parse_config(text: str) -> SystemConfig:
    """Parse a scenario document; missing keys fall back to default_config()"""
    values = {}
    seen = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        if ":" not in content:
            raise ConfigParseError("expected 'key: value'", line=number)
        key, raw = (part.strip() for part in content.split(":", 1))
        if key not in _KEYS:
            raise ConfigParseError("unknown key", key=key, line=number)
        if key in seen:
            raise ConfigParseError(f"duplicate key (first on line {seen[key]})", key=key, line=number)
        seen[key] = number
        field, kind = _KEYS[key]
        values[field] = _convert(key, kind, raw, number)

    cfg = SystemConfig(**values)
    logger.debug(f"Parsed scenario config with {len(values)} explicit keys")
    return cfg


def serialize_config(cfg: SystemConfig) -> str:
    """Render a config as a document that parses back to an equal SystemConfig"""
    lines = ["# trisrsma scenario configuration"]
    for key, (field, kind) in _KEYS.items():
        value = getattr(cfg, field)
        if kind == "int":
            lines.append(f"{key}: {value}")
        elif kind == "float":
            lines.append(f"{key}: {value!r}")
        else:
            lines.append(f"{key}: {value!r} {_CANONICAL_UNIT[kind]}")
    return "\n".join(lines) + "\n"


def load_config(path: Union[str, Path, None]) -> SystemConfig:
    if path is None:
        return default_config()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read scenario config {path}: {e}") from e
    logger.info(f"Loading scenario config from {path}")
    return parse_config(text)
