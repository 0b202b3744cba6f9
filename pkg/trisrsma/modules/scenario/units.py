import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


def dbm_to_watts(dbm):
    return np.power(10.0, (np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(watts):
    return 10.0 * np.log10(watts) + 30.0


def dbw_to_watts(dbw):
    return db_to_linear(dbw)


def watts_to_dbw(watts):
    return linear_to_db(watts)


# Suffix tables for the scenario document, lower-cased
POWER_UNITS = {
    "w": lambda v: v,
    "mw": lambda v: v * 1e-3,
    "dbw": lambda v: float(dbw_to_watts(v)),
    "dbm": lambda v: float(dbm_to_watts(v)),
}
FREQUENCY_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
RATE_UNITS = {"bps": 1.0, "kbps": 1e3, "mbps": 1e6}
LENGTH_UNITS = {"m": 1.0}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6}
