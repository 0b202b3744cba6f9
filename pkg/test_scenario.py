"""
Scenario configuration and user placement
"""

import math

import numpy as np
import pytest

from trisrsma.core.errors import ConfigError, ConfigParseError, ConfigValidationError
from trisrsma.modules.scenario import (
    SystemConfig,
    default_config,
    load_config,
    parse_config,
    place_users,
    serialize_config,
    substreams,
)
from trisrsma.modules.scenario.units import db_to_linear, dbm_to_watts, dbw_to_watts, watts_to_dbm


def test_default_config_matches_simulation_table():
    cfg = default_config()
    assert cfg.noise_power_watts == pytest.approx(1e-12, rel=1e-12)
    assert cfg.bandwidth_hz == 2.0e7
    assert cfg.i_p_th_watts == pytest.approx(1e-9, rel=1e-12)
    assert cfg.i_c_th_watts == pytest.approx(1e-11, rel=1e-12)
    assert cfg.r_th_bps == 1e6
    assert cfg.num_cus == cfg.num_pus == 5
    assert cfg.num_elements == 9
    assert (cfg.cu_radius_m, cfg.pu_radius_m) == (350.0, 500.0)
    assert cfg.pathloss_exponent == 2.5
    assert cfg.eps0 == 1e-3


def test_derived_quantities():
    cfg = default_config()
    assert cfg.wavelength_m == pytest.approx(299_792_458.0 / 3e9)
    assert cfg.element_spacing_m == pytest.approx(cfg.wavelength_m / 2)
    assert cfg.transmit_budget_watts == pytest.approx(9.0)


def test_empty_document_gives_defaults():
    assert parse_config("") == default_config()
    assert parse_config("# only a comment\n\n") == default_config()


def test_units_are_converted():
    cfg = parse_config(
        "noise_power: -90 dBm\n"
        "p_max: 10 dBW\n"
        "bandwidth: 10 MHz\n"
        "r_th: 500 kbps\n"
        "tma_code_time: 2 us\n"
        "i_c_th: inf W  # no common-stream limit\n"
    )
    assert cfg.noise_power_watts == pytest.approx(1e-12, rel=1e-12)
    assert cfg.p_max_watts == pytest.approx(10.0, rel=1e-12)
    assert cfg.bandwidth_hz == 1e7
    assert cfg.r_th_bps == 5e5
    assert cfg.tma_code_time_s == pytest.approx(2e-6)
    assert math.isinf(cfg.i_c_th_watts)


def test_bare_numbers_are_si():
    cfg = parse_config("p_cir: 2\ncarrier_freq: 2.4e9")
    assert cfg.p_cir_watts == 2.0
    assert cfg.carrier_freq_hz == 2.4e9


def test_zero_elements_rejected():
    with pytest.raises(ConfigValidationError):
        parse_config("m_rows: 0")


def test_negative_power_rejected():
    with pytest.raises(ConfigValidationError):
        parse_config("p_cir: -1 W")


def test_p_max_must_exceed_p_cir():
    with pytest.raises(ConfigValidationError):
        SystemConfig(p_max_watts=1.0, p_cir_watts=1.0)


def test_eta0_fraction_range():
    with pytest.raises(ConfigValidationError):
        SystemConfig(eta0_fraction=1.5)


def test_malformed_value_names_key_and_line():
    with pytest.raises(ConfigParseError) as info:
        parse_config("m_rows: 3\np_max: ten W\n")
    assert info.value.key == "p_max"
    assert info.value.line == 2


def test_unknown_key_and_unit():
    with pytest.raises(ConfigParseError):
        parse_config("antennas: 4")
    with pytest.raises(ConfigParseError):
        parse_config("p_max: 10 furlongs")
    with pytest.raises(ConfigParseError):
        parse_config("m_rows: 3 m")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigParseError) as info:
        parse_config("m_rows: 3\nm_rows: 4\n")
    assert info.value.line == 2


def test_serialized_config_reparses_equal():
    cfg = default_config().with_updates(m_rows=2, p_max_watts=20.0, i_c_th_watts=float("inf"), rng_seed=7)
    assert parse_config(serialize_config(cfg)) == cfg


def test_load_config(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text("num_cus: 2\nnum_pus: 1\n", encoding="utf-8")
    cfg = load_config(path)
    assert (cfg.num_cus, cfg.num_pus) == (2, 1)
    assert load_config(None) == default_config()
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_db_conversions():
    db = np.linspace(-120.0, 40.0, 33)
    np.testing.assert_allclose(db_to_linear(db), 10.0 ** (db / 10.0), rtol=1e-12)
    np.testing.assert_allclose(dbw_to_watts(db), 10.0 ** (db / 10.0), rtol=1e-12)
    np.testing.assert_allclose(dbm_to_watts(db), 10.0 ** ((db - 30.0) / 10.0), rtol=1e-12)
    np.testing.assert_allclose(watts_to_dbm(dbm_to_watts(db)), db, atol=1e-9)


def test_placement_is_deterministic():
    cfg = default_config()
    a = place_users(cfg, substreams(cfg.rng_seed).geometry)
    b = place_users(cfg, substreams(cfg.rng_seed).geometry)
    np.testing.assert_array_equal(a.cu_positions, b.cu_positions)
    np.testing.assert_array_equal(a.pu_positions, b.pu_positions)


def test_placement_stays_in_disks():
    cfg = default_config()
    geometry = place_users(cfg)
    assert np.all(geometry.cu_distances <= cfg.cu_radius_m)
    assert np.all(geometry.pu_distances <= cfg.pu_radius_m)
    np.testing.assert_allclose(geometry.feed_position, [0.0, 0.0, cfg.tris_height_m + cfg.feed_distance_m])


def test_uniform_disk_mean_radius():
    cfg = default_config().with_updates(num_cus=10_000, num_pus=1)
    geometry = place_users(cfg)
    mean = geometry.cu_distances.mean()
    assert mean == pytest.approx(2.0 / 3.0 * cfg.cu_radius_m, rel=0.02)


def test_drop_shared_across_points_fading_not():
    a = substreams(5, realization=2, point=0)
    b = substreams(5, realization=2, point=3)
    np.testing.assert_array_equal(a.geometry.random(4), b.geometry.random(4))
    assert not np.array_equal(a.fading.random(4), b.fading.random(4))
    c = substreams(5, realization=3, point=0)
    assert not np.array_equal(substreams(5, 2, 0).geometry.random(4), c.geometry.random(4))
