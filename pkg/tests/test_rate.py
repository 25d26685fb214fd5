import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermoresp import BreathingSignal, TooShortError, estimate_rate
from thermoresp.rate import MIN_FFT, pick_peak, read_rate_csv, write_rate_csv

from .oracles import dft_power

FS = 9.0
BIN_BPM = 60.0 * FS / MIN_FFT  # one frequency-bin width in bpm


def uniform(values, fs=FS):
    return BreathingSignal(times=np.arange(len(values)) / fs, values=values,
                           stage="uniform", fs=fs)


class TestEstimateRate:
    def test_pure_tone_every_window(self):
        t = np.arange(int(60 * FS)) / FS
        sig = uniform(np.sin(2 * np.pi * 0.25 * t))
        rates = estimate_rate(sig)
        assert len(rates) == 31  # (540 - 270) / 9 + 1 windows
        for r in rates:
            assert abs(r.bpm - 15.0) <= BIN_BPM
            assert 0 < r.confidence <= 1

    def test_two_tone_dominance(self):
        # 0.2 Hz at amplitude 1.0 dominates 0.5 Hz at 0.3 -> 12 bpm; frozen
        # against an explicit-sum DFT of the same tapered window
        t = np.arange(int(40 * FS)) / FS
        x = 1.0 * np.sin(2 * np.pi * 0.2 * t) + 0.3 * np.sin(2 * np.pi * 0.5 * t)
        rates = estimate_rate(uniform(x), window_s=30.0)
        for r in rates:
            assert abs(r.bpm - 12.0) <= BIN_BPM

        n_win = int(30 * FS)
        w = x[:n_win] * np.hanning(n_win)
        p_02 = dft_power(w, 0.2, FS)
        p_05 = dft_power(w, 0.5, FS)
        assert p_02 > p_05

    def test_too_short_is_an_error(self):
        t = np.arange(int(29 * FS)) / FS
        sig = uniform(np.sin(t))
        with pytest.raises(TooShortError):
            estimate_rate(sig, window_s=30.0)

    def test_exactly_one_window_length_is_enough(self):
        sig = uniform(np.sin(np.arange(int(30 * FS)) / 4.0))
        assert len(estimate_rate(sig, window_s=30.0)) == 1

    def test_estimates_confined_to_band(self):
        rng = np.random.default_rng(0)
        sig = uniform(rng.normal(size=int(45 * FS)))
        for r in estimate_rate(sig, band=(0.1, 0.85)):
            assert 6.0 <= r.bpm <= 51.0

    def test_window_centers_advance_by_hop(self):
        t = np.arange(int(45 * FS)) / FS
        rates = estimate_rate(uniform(np.sin(2 * np.pi * 0.3 * t)), hop_s=2.0)
        centers = np.array([r.t_center for r in rates])
        assert np.allclose(np.diff(centers), 2.0, atol=1e-9)

    @given(scale=st.floats(min_value=1e-6, max_value=1e6))
    def test_amplitude_equivariance(self, scale):
        t = np.arange(int(35 * FS)) / FS
        x = np.sin(2 * np.pi * 0.21 * t) + 0.2 * np.sin(2 * np.pi * 0.44 * t)
        base = estimate_rate(uniform(x))
        scaled = estimate_rate(uniform(scale * x))
        assert [r.bpm for r in base] == [r.bpm for r in scaled]

    def test_requires_uniform_stage(self):
        sig = BreathingSignal(times=np.sort(np.random.default_rng(1).uniform(0, 40, 300)),
                              values=np.zeros(300))
        with pytest.raises(ValueError):
            estimate_rate(sig)


def test_pick_peak_breaks_ties_toward_lowest():
    power = np.array([1.0, 5.0, 5.0, 2.0])
    assert pick_peak(power) == 1


def test_rate_csv_round_trip(tmp_path):
    t = np.arange(int(31 * FS)) / FS
    rates = estimate_rate(uniform(np.sin(2 * np.pi * 0.25 * t)))
    path = tmp_path / "rate.csv"
    write_rate_csv(rates, path)
    assert path.read_text().splitlines()[0] == "t_center_s,bpm,confidence"
    back = read_rate_csv(path)
    assert back == rates
