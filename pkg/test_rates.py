"""
Rate algebra: SINRs, rate reports, common-rate split and SIC rates
"""

import math

import numpy as np
import pytest

from trisrsma.core.errors import RatesError
from trisrsma.modules.rates import (
    Precoders,
    common_sinr,
    interference_at_pu,
    lifted_rate_report,
    noma_rate_report,
    private_sinr,
    rate_report,
    sic_order,
    split_common_rate,
)
from trisrsma.modules.scenario import default_config


def random_instance(make_channels, rng, m, k, n):
    def draw(count):
        return rng.standard_normal((count, m)) + 1j * rng.standard_normal((count, m))
    channels = make_channels(draw(k) * 1e-5, draw(n) * 1e-5)
    P = (rng.standard_normal((m, k + 1)) + 1j * rng.standard_normal((m, k + 1))) * 0.3
    return channels, Precoders.from_matrix(P)


def test_precoders_layout():
    P = np.arange(6).reshape(2, 3).astype(complex)
    pre = Precoders.from_matrix(P)
    np.testing.assert_array_equal(pre.p_c, P[:, 0])
    np.testing.assert_array_equal(pre.p_private[1], P[:, 2])
    np.testing.assert_array_equal(pre.matrix, P)
    assert (pre.num_elements, pre.num_users) == (2, 2)
    assert pre.transmit_power == pytest.approx(np.sum(np.abs(P) ** 2))
    for p, Q in zip(P.T, pre.lifted()):
        np.testing.assert_allclose(Q, np.outer(p, p.conj()))


def test_precoders_validation():
    with pytest.raises(RatesError):
        Precoders(p_c=np.zeros(3, dtype=complex), p_private=np.zeros((2, 4), dtype=complex))
    with pytest.raises(RatesError):
        Precoders(p_c=np.array([np.nan, 0]), p_private=np.zeros((1, 2)))


def test_common_sinr_edge_cases(make_channels, cfg):
    channels = make_channels([[1e-5, 2e-5j], [3e-5, 0]])
    noise = cfg.noise_power_watts
    p_c = np.array([1.0, 0.5j])
    silent = Precoders(p_c=np.zeros(2, dtype=complex), p_private=np.ones((2, 2), dtype=complex))
    assert common_sinr(channels, silent, 0, cfg) == 0.0

    alone = Precoders(p_c=p_c, p_private=np.zeros((2, 2), dtype=complex))
    f = channels.cu_vectors[1]
    assert common_sinr(channels, alone, 1, cfg) == pytest.approx(abs(np.vdot(f, p_c)) ** 2 / noise, rel=1e-12)


def test_private_sinr_single_user(make_channels, cfg):
    channels = make_channels([[2e-5, 1e-5]])
    p_1 = np.array([0.3, -0.4j])
    pre = Precoders(p_c=np.array([1.0, 1.0], dtype=complex), p_private=p_1[None, :])
    f = channels.cu_vectors[0]
    expected = abs(np.vdot(f, p_1)) ** 2 / cfg.noise_power_watts
    assert private_sinr(channels, pre, 0, cfg) == pytest.approx(expected, rel=1e-12)

    muted = Precoders(p_c=pre.p_c, p_private=np.zeros((1, 2), dtype=complex))
    assert private_sinr(channels, muted, 0, cfg) == 0.0


def test_sinr_noise_from_config(make_channels, cfg):
    channels = make_channels([[2e-5, 1e-5]])
    pre = Precoders(p_c=np.array([1.0, 1.0], dtype=complex), p_private=np.array([[0.3, -0.4j]]))
    assert common_sinr(channels, pre, 0) == common_sinr(channels, pre, 0, default_config())
    assert private_sinr(channels, pre, 0) == private_sinr(channels, pre, 0, default_config())
    noisier = cfg.with_updates(noise_power_watts=10 * cfg.noise_power_watts)
    assert private_sinr(channels, pre, 0, noisier) == pytest.approx(private_sinr(channels, pre, 0, cfg) / 10, rel=1e-12)
    assert common_sinr(channels, pre, 0, noisier) < common_sinr(channels, pre, 0, cfg)



def test_bad_indices(make_channels, cfg):
    channels = make_channels([[1.0]], [[1.0]])
    pre = Precoders.from_matrix(np.ones((1, 2)))
    with pytest.raises(RatesError):
        common_sinr(channels, pre, 1, cfg)
    with pytest.raises(RatesError):
        interference_at_pu(channels, pre, -1)


def test_vector_and_trace_forms_agree(make_channels, cfg):
    rng = np.random.default_rng(21)
    noise = cfg.noise_power_watts
    for _ in range(100):
        m = int(rng.integers(1, 7))
        k = int(rng.integers(1, 4))
        channels, pre = random_instance(make_channels, rng, m, k, 2)
        Q = pre.lifted()
        for user in range(k):
            F = channels.cu_effective[user].F
            traces = [np.trace(F @ Q_l).real for Q_l in Q]
            common = traces[0] / (sum(traces[1:]) + noise)
            private = traces[1 + user] / (sum(traces[1:]) - traces[1 + user] + noise)
            assert common_sinr(channels, pre, user, cfg) == pytest.approx(common, rel=1e-10)
            assert private_sinr(channels, pre, user, cfg) == pytest.approx(private, rel=1e-10)
        for n in range(2):
            F = channels.pu_effective[n].F
            common, private = interference_at_pu(channels, pre, n)
            assert common == pytest.approx(np.trace(F @ Q[0]).real, rel=1e-10)
            assert private == pytest.approx(sum(np.trace(F @ Q_l).real for Q_l in Q[1:]), rel=1e-10)

        vector = rate_report(channels, pre, None, cfg)
        lifted = lifted_rate_report(channels, Q, None, cfg)
        np.testing.assert_allclose(lifted.common_rates, vector.common_rates, rtol=1e-10)
        np.testing.assert_allclose(lifted.private_rates, vector.private_rates, rtol=1e-10)
        assert lifted.p_tot == pytest.approx(vector.p_tot, rel=1e-12)


def test_interference_edge_cases(make_channels):
    channels = make_channels([[1.0, 0.0]], [[1.0, 1.0]])
    assert interference_at_pu(channels, Precoders.zeros(2, 1), 0) == (0.0, 0.0)
    orthogonal = Precoders(p_c=np.array([1.0, -1.0], dtype=complex), p_private=np.array([[1.0, 0.0]], dtype=complex))
    common, private = interference_at_pu(channels, orthogonal, 0)
    assert common == pytest.approx(0.0, abs=1e-30)
    assert private == pytest.approx(1.0)


def test_zero_precoders_report(make_channels, cfg):
    channels = make_channels([[1e-5, 0.0], [0.0, 1e-5]])
    report = rate_report(channels, Precoders.zeros(2, 2), None, cfg)
    assert report.r_c == 0.0
    assert report.r_tot == 0.0
    assert report.p_tot == cfg.p_cir_watts
    assert report.ee == 0.0
    assert report.split_ok
    assert not report.qos_ok

    greedy = rate_report(channels, Precoders.zeros(2, 2), [1e6, 0.0], cfg)
    assert not greedy.split_ok


def test_unit_sinr_gives_one_bit(make_channels, cfg):
    unit = cfg.with_updates(noise_power_watts=1.0, p_max_watts=100.0)
    channels = make_channels([[1.0]])
    pre = Precoders(p_c=np.zeros(1, dtype=complex), p_private=np.ones((1, 1), dtype=complex))
    report = rate_report(channels, pre, None, unit)
    assert report.private_rates[0] == pytest.approx(unit.bandwidth_hz, rel=1e-12)


def test_report_matches_scalar_evaluation(make_channels, cfg):
    rng = np.random.default_rng(5)
    channels, pre = random_instance(make_channels, rng, 4, 3, 2)
    w, noise = cfg.bandwidth_hz, cfg.noise_power_watts
    F = channels.cu_vectors
    P = pre.matrix

    common, private = [], []
    for k in range(3):
        g = [abs(np.vdot(F[k], P[:, l])) ** 2 for l in range(4)]
        common.append(w * math.log2(1 + g[0] / (g[1] + g[2] + g[3] + noise)))
        private.append(w * math.log2(1 + g[1 + k] / (sum(g[1:]) - g[1 + k] + noise)))
    r_c = min(common)
    split = split_common_rate(r_c, np.array(private), cfg.r_th_bps)

    report = rate_report(channels, pre, split, cfg)
    assert report.r_c == pytest.approx(r_c, rel=1e-10)
    assert report.r_tot == pytest.approx(sum(private) + split.sum(), rel=1e-10)
    assert report.r_c <= report.common_rates.min()
    assert report.split_ok
    assert report.ee * report.p_tot == pytest.approx(report.r_tot, rel=1e-12)
    assert report.se * cfg.bandwidth_hz == pytest.approx(report.r_tot, rel=1e-12)
    np.testing.assert_allclose(report.user_rates, split + np.array(private), rtol=1e-10)


def test_negative_split_rejected(make_channels, cfg):
    channels = make_channels([[1.0]])
    with pytest.raises(RatesError):
        rate_report(channels, Precoders.zeros(1, 1), [-1.0], cfg)
    with pytest.raises(RatesError):
        rate_report(channels, Precoders.zeros(1, 1), [1.0, 2.0], cfg)


def test_feasibility_flags(make_channels, cfg):
    channels = make_channels([[1e-5, 0.0]], [[1e-5, 1e-5]])
    loud = Precoders(p_c=np.zeros(2, dtype=complex), p_private=np.array([[5.0, 0.0]], dtype=complex))
    report = rate_report(channels, loud, None, cfg)
    assert not report.power_ok
    assert not report.interference_ok
    assert report.qos_ok
    assert not report.feasible


def test_common_sinr_grows_with_common_power(make_channels, cfg):
    rng = np.random.default_rng(17)
    channels, pre = random_instance(make_channels, rng, 3, 2, 1)
    for k in range(2):
        base = common_sinr(channels, pre, k, cfg)
        louder = Precoders(p_c=pre.p_c * 1.5, p_private=pre.p_private)
        assert common_sinr(channels, louder, k, cfg) >= base


def test_split_covers_deficits_first():
    split = split_common_rate(3.0, np.array([0.0, 2.0, 5.0]), 2.0)
    np.testing.assert_allclose(split, [2.0 + 1.0 / 3, 1.0 / 3, 1.0 / 3])
    assert split.sum() == pytest.approx(3.0)


def test_split_scales_when_short():
    split = split_common_rate(1.0, np.array([0.0, 1.0]), 2.0)
    np.testing.assert_allclose(split, [2.0 / 3, 1.0 / 3])
    np.testing.assert_array_equal(split_common_rate(-1.0, np.array([0.0]), 1.0), [0.0])


def test_lifted_report_needs_all_blocks(make_channels, cfg):
    channels = make_channels([[1.0], [1.0]])
    with pytest.raises(RatesError):
        lifted_rate_report(channels, [np.eye(1), np.eye(1)], None, cfg)


def test_sic_order_descending_and_stable(make_channels):
    channels = make_channels([[1.0], [3.0], [1.0], [2.0]])
    np.testing.assert_array_equal(sic_order(channels), [1, 3, 0, 2])


def test_noma_two_users(make_channels, cfg):
    unit = cfg.with_updates(noise_power_watts=1.0, r_th_bps=0.0, p_max_watts=100.0)
    channels = make_channels([[1.0], [2.0]])
    pre = Precoders(p_c=np.zeros(1, dtype=complex), p_private=np.array([[1.0], [0.5]], dtype=complex))
    report = noma_rate_report(channels, pre, unit)
    w = unit.bandwidth_hz
    # user 1 is stronger: its stream sees no interference after SIC
    strong = w * math.log2(1 + 4 * 0.25)
    # user 0's stream must decode at user 0 and at user 1, both hearing user 1's stream
    weak = w * min(math.log2(1 + 1 / (0.25 + 1)), math.log2(1 + 4 / (1 + 1)))
    assert report.private_rates[1] == pytest.approx(strong, rel=1e-12)
    assert report.private_rates[0] == pytest.approx(weak, rel=1e-12)
    assert report.r_tot == pytest.approx(strong + weak, rel=1e-12)
    np.testing.assert_array_equal(report.c_split, [0.0, 0.0])
    assert report.feasible


def test_noma_rejects_common_stream(make_channels, cfg):
    channels = make_channels([[1.0]])
    with pytest.raises(RatesError):
        noma_rate_report(channels, Precoders.from_matrix(np.ones((1, 2))), cfg)


def test_report_record(make_channels, cfg):
    channels = make_channels([[1e-5], [2e-5]], [[1e-5]])
    record = rate_report(channels, Precoders.from_matrix(np.ones((1, 3)) * 0.1), None, cfg).to_record()
    for key in ("se", "ee", "r_tot", "feasible", "private_rate_1", "c_split_0", "interference_private_0"):
        assert key in record
