"""
Time-modulated array codec
"""

import math

import numpy as np
import pytest

from trisrsma.core.errors import TmaRangeError
from trisrsma.modules.tma import ControlTiming, TmaParams, decode, dump_frame_csv, encode, precode_frame, wrap_phase

T_P = 1e-6


@pytest.fixture
def params():
    return TmaParams(t_p=T_P, a_max=2.0)


def _residuals(amplitude, phase, timing, params):
    amp_res = abs(amplitude / params.a_max - math.sin(math.pi * timing.tau / params.t_p))
    phase_res = abs(wrap_phase(-math.pi * (2 * timing.t_on + timing.tau) / params.t_p - phase))
    return amp_res, phase_res


def test_peak_amplitude(params):
    timing = encode(params.a_max, 0.3, params)
    assert timing.tau == pytest.approx(T_P / 2, rel=1e-12)


def test_zero_amplitude_phase_from_start_time(params):
    timing = encode(0.0, 1.0, params)
    assert timing.tau == 0.0
    assert wrap_phase(-2 * math.pi * timing.t_on / T_P) == pytest.approx(1.0, abs=1e-12)


def test_half_power_quadrature(params):
    timing = encode(params.a_max / math.sqrt(2), -math.pi / 2, params)
    assert timing.tau == pytest.approx(T_P / 4, rel=1e-12)
    assert timing.t_on == pytest.approx(T_P / 8, rel=1e-12)
    amp_res, phase_res = _residuals(params.a_max / math.sqrt(2), -math.pi / 2, timing, params)
    assert amp_res < 1e-12
    assert phase_res < 1e-12


def test_decode_fixed_points(params):
    assert decode(ControlTiming(t_on=0.0, tau=0.0), params) == (0.0, 0.0)
    amplitude, phase = decode(ControlTiming(t_on=0.0, tau=T_P / 2), params)
    assert amplitude == pytest.approx(params.a_max)
    assert phase == pytest.approx(-math.pi / 2)


def test_encoded_timings_satisfy_both_mappings(params):
    rng = np.random.default_rng(7)
    for amplitude, phase in zip(rng.uniform(0, params.a_max, 200), rng.uniform(-3 * math.pi, 3 * math.pi, 200)):
        timing = encode(amplitude, phase, params)
        assert 0.0 <= timing.t_on < T_P
        assert 0.0 <= timing.tau <= T_P / 2
        amp_res, phase_res = _residuals(amplitude, phase, timing, params)
        assert amp_res < 1e-12
        assert min(phase_res, 2 * math.pi - phase_res) < 1e-9


def test_decode_inverts_encode(params):
    rng = np.random.default_rng(8)
    for amplitude, phase in zip(rng.uniform(0.01, params.a_max, 1000), rng.uniform(-math.pi, math.pi, 1000)):
        got_amp, got_phase = decode(encode(amplitude, phase, params), params)
        assert got_amp == pytest.approx(amplitude, abs=1e-9)
        diff = abs(wrap_phase(got_phase - phase))
        assert min(diff, 2 * math.pi - diff) < 1e-9


def test_wrap_phase_range():
    assert wrap_phase(math.pi) == pytest.approx(math.pi)
    assert wrap_phase(-math.pi) == pytest.approx(math.pi)
    assert wrap_phase(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_out_of_range_amplitude(params):
    with pytest.raises(TmaRangeError):
        encode(params.a_max * 1.01, 0.0, params)
    with pytest.raises(TmaRangeError):
        encode(-0.1, 0.0, params)


def test_invalid_params():
    with pytest.raises(TmaRangeError):
        TmaParams(t_p=0.0, a_max=1.0)
    with pytest.raises(TmaRangeError):
        TmaParams(t_p=1e-6, a_max=-1.0)


def test_zero_symbols(params):
    P = np.ones((3, 2), dtype=complex)
    x, timings = precode_frame(P, np.zeros(2), params)
    np.testing.assert_array_equal(x, np.zeros(3))
    assert all(t == ControlTiming(t_on=0.0, tau=0.0) for t in timings)


def test_single_stream(params):
    p_c = np.array([0.5, 0.25j, -0.1])
    x, timings = precode_frame(p_c, 1.0 + 1.0j, params)
    np.testing.assert_allclose(x, p_c * (1.0 + 1.0j))
    assert len(timings) == 3


def test_frame_decodes_to_signal():
    rng = np.random.default_rng(9)
    P = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    s = np.exp(2j * np.pi * rng.random(3))
    x = P @ s
    params = TmaParams(t_p=T_P, a_max=float(np.abs(x).max()))
    got, timings = precode_frame(P, s, params)
    np.testing.assert_allclose(got, x)
    for value, timing in zip(x, timings):
        amplitude, phase = decode(timing, params)
        np.testing.assert_allclose(amplitude * np.exp(1j * phase), value, atol=1e-9)


def test_overflow_names_element():
    P = np.array([[0.1], [3.0], [0.2]], dtype=complex)
    with pytest.raises(TmaRangeError) as info:
        precode_frame(P, np.ones(1), TmaParams(t_p=T_P, a_max=1.0))
    assert info.value.element == 1


def test_stream_count_mismatch(params):
    with pytest.raises(TmaRangeError):
        precode_frame(np.ones((3, 2)), np.ones(3), params)


def test_frame_csv(params, tmp_path):
    P = np.array([[0.5, 0.5], [0.2j, 0.1]])
    x, timings = precode_frame(P, np.ones(2), params)
    path = tmp_path / "frame.csv"
    dump_frame_csv(x, timings, params, path)
    lines = path.read_bytes().decode("utf-8").split("\n")
    assert lines[0] == "element,amplitude,phase_rad,t_on_s,tau_s"
    assert len([line for line in lines if line]) == 3
