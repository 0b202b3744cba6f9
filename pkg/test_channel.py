"""
Channel synthesis and the portable channel dump
"""

import numpy as np
import pytest

from trisrsma.core.errors import ChannelError
from trisrsma.modules.channel import (
    effective,
    export_channels,
    feed_to_ris,
    generate_channels,
    import_channels,
    path_gain,
    path_loss,
    ris_to_receiver,
    single_element_equivalent,
    steering_vector,
)
from trisrsma.modules.channel.io import channels_from_bytes, channels_to_bytes
from trisrsma.modules.scenario import default_config, substreams


@pytest.fixture
def cfg():
    return default_config()


def test_center_element_feed(cfg):
    single = cfg.with_updates(m_rows=1, m_cols=1)
    feed = feed_to_ris(single)
    expected = feed.feed_gain * np.exp(-2j * np.pi * single.feed_distance_m / single.wavelength_m)
    np.testing.assert_allclose(feed.h, [expected], rtol=1e-12)


def test_symmetric_pair_feed(cfg):
    feed = feed_to_ris(cfg.with_updates(m_rows=1, m_cols=2))
    np.testing.assert_allclose(feed.h[0], feed.h[1], rtol=1e-12)


def test_feed_matches_per_element_distances(cfg):
    feed = feed_to_ris(cfg)
    expected = []
    for m_r in range(1, cfg.m_rows + 1):
        for m_c in range(1, cfg.m_cols + 1):
            delta_r = (2 * m_r - cfg.m_rows - 1) / 2
            delta_c = (2 * m_c - cfg.m_cols - 1) / 2
            d = cfg.element_spacing_m * np.hypot(delta_r, delta_c)
            d_fr = np.sqrt(cfg.feed_distance_m ** 2 + d ** 2)
            expected.append(feed.feed_gain * np.exp(-2j * np.pi * d_fr / cfg.wavelength_m))
    np.testing.assert_allclose(feed.h, expected, rtol=1e-12)
    np.testing.assert_allclose(np.abs(feed.h), abs(feed.feed_gain), rtol=1e-12)


def test_path_loss_law(cfg):
    assert path_loss(cfg, 1.0) ** 2 == pytest.approx(1e-3, rel=1e-12)
    ratio = path_loss(cfg, 20.0) ** 2 / path_loss(cfg, 10.0) ** 2
    assert ratio == pytest.approx(2 ** -2.5, rel=1e-12)
    log_oracle = -3.0 - 2.5 * np.log10(350.0)
    assert np.log10(path_loss(cfg, 350.0) ** 2) == pytest.approx(log_oracle, rel=1e-12)


def test_path_loss_rejects_nonpositive_distance():
    with pytest.raises(ChannelError):
        path_gain(-30.0, 2.5, 0.0)


def test_steering_vector_is_phase_only():
    a = steering_vector(3, 4, 0.5, 0.7, 1.9)
    assert a.shape == (12,)
    np.testing.assert_allclose(np.abs(a), 1.0, rtol=1e-12)


def test_pure_los_limit(cfg):
    los = cfg.with_updates(rician_k=1e12)
    rng = np.random.default_rng(3)
    ch = ris_to_receiver(los, (120.0, -40.0), rng)
    g_los = steering_vector(los.m_rows, los.m_cols, 0.5, ch.elevation, ch.azimuth)
    assert np.linalg.norm(ch.g / ch.pathloss - g_los) <= 1e-5


def test_receiver_geometry(cfg):
    ch = ris_to_receiver(cfg, (0.0, 100.0), np.random.default_rng(0))
    assert ch.azimuth == pytest.approx(np.pi / 2)
    assert ch.elevation == pytest.approx(np.arctan2(100.0, cfg.tris_height_m))
    assert ch.distance_m == pytest.approx(np.hypot(100.0, cfg.tris_height_m))


def test_receiver_at_tris_rejected(cfg):
    flat = cfg.with_updates(tris_height_m=0.0)
    with pytest.raises(ChannelError):
        ris_to_receiver(flat, (0.0, 0.0), np.random.default_rng(0))


def test_rician_second_moment(cfg):
    single = cfg.with_updates(m_rows=1, m_cols=1)
    rng = np.random.default_rng(11)
    samples = np.array([ris_to_receiver(single, (80.0, 60.0), rng).g[0] for _ in range(20_000)])
    xi = path_loss(single, np.linalg.norm([80.0, 60.0, -single.tris_height_m]))
    # unit-modulus LoS plus unit-variance NLoS, weighted 1/2 each at kappa = 1
    assert np.mean(np.abs(samples) ** 2) == pytest.approx(xi ** 2, rel=0.03)


def test_effective_channel():
    rng = np.random.default_rng(4)
    h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    g = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    eff = effective(h, g)
    np.testing.assert_allclose(eff.f, h * g)
    assert np.trace(eff.F).real == pytest.approx(np.linalg.norm(eff.f) ** 2, rel=1e-12)
    w = np.linalg.eigvalsh(eff.F)
    assert w[-1] / w.sum() == pytest.approx(1.0, abs=1e-12)

    zero = effective(h, np.zeros(4))
    np.testing.assert_array_equal(zero.F, np.zeros((4, 4)))

    single = effective(np.array([2.0]), np.array([1j]))
    assert single.F.shape == (1, 1)
    assert single.F[0, 0].real == pytest.approx(4.0)


def test_effective_length_mismatch():
    with pytest.raises(ChannelError):
        effective(np.ones(3), np.ones(4))


def test_generated_channels_are_rank_one(cfg):
    channels = generate_channels(cfg)
    assert (channels.num_elements, channels.num_cus, channels.num_pus) == (9, 5, 5)
    for eff in channels.cu_effective + channels.pu_effective:
        F = eff.F
        trace = np.trace(F).real
        np.testing.assert_allclose(F, F.conj().T, atol=1e-14 * max(trace, 1e-300))
        w = np.linalg.eigvalsh(F)
        assert w[0] >= -1e-12 * trace
        assert w[-1] / trace >= 1 - 1e-12


def test_fixed_seed_is_bit_identical(cfg):
    a = generate_channels(cfg, substreams(cfg.rng_seed))
    b = generate_channels(cfg, substreams(cfg.rng_seed))
    assert channels_to_bytes(a) == channels_to_bytes(b)
    assert a.digest() == b.digest()
    other = generate_channels(cfg.with_updates(rng_seed=cfg.rng_seed + 1))
    assert other.digest() != a.digest()


def test_export_import(cfg, tmp_path):
    channels = generate_channels(cfg)
    path = tmp_path / "channels.bin"
    export_channels(channels, path)
    loaded = import_channels(path)
    assert loaded.digest() == channels.digest()
    np.testing.assert_array_equal(loaded.cu_vectors, channels.cu_vectors)


def test_corrupt_dump_rejected(cfg):
    data = channels_to_bytes(generate_channels(cfg))
    with pytest.raises(ChannelError):
        channels_from_bytes(b"NOTADUMP" + data[8:])
    with pytest.raises(ChannelError):
        channels_from_bytes(data[:-8])
    with pytest.raises(ChannelError):
        channels_from_bytes(data + b"\x00")


def test_single_element_equivalent(cfg):
    channels = generate_channels(cfg)
    reduced = single_element_equivalent(channels, cfg)
    assert reduced.num_elements == 1
    assert (reduced.num_cus, reduced.num_pus) == (channels.num_cus, channels.num_pus)
    np.testing.assert_array_equal(reduced.cu_channels[0].g, channels.cu_channels[0].g[:1])
