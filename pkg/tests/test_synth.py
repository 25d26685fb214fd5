import numpy as np
import pytest
from scipy.integrate import quad

from thermoresp import Roi, encode_sequence
from thermoresp.synth import (
    RateProfile,
    SynthConfig,
    read_ground_truth,
    synthesize_sequence,
    write_ground_truth,
)

ROI = Roi(4, 3, 8, 6)


def cfg_with(**kw):
    base = dict(
        duration=10.0, rate_profile=RateProfile(15.0), fps=9.0, amplitude=0.3,
        noise_sd=0.0, nostril_roi=ROI, width=24, height=18, seed=1,
    )
    base.update(kw)
    return SynthConfig(**base)


class TestRateProfile:
    def test_constant_profile(self):
        p = RateProfile(12.0)
        assert p.rate_bpm(0.0, 60.0) == 12.0
        assert p.rate_bpm(30.0, 60.0) == 12.0

    def test_chirp_endpoints(self):
        p = RateProfile(12.0, 24.0)
        assert p.rate_bpm(0.0, 180.0) == 12.0
        assert p.rate_bpm(180.0, 180.0) == 24.0

    @pytest.mark.parametrize("bad", [0.0, -3.0, 61.0])
    def test_rates_outside_range_rejected(self, bad):
        with pytest.raises(ValueError):
            RateProfile(bad)

    @pytest.mark.parametrize("profile", [RateProfile(15.0), RateProfile(12.0, 24.0),
                                         RateProfile(30.0, 8.0)])
    def test_phase_matches_quadrature_of_rate(self, profile):
        # the closed-form phase must integrate the instantaneous rate
        duration = 120.0
        for t in (0.0, 7.3, 55.0, 120.0):
            expected, err = quad(
                lambda u: 2 * np.pi * profile.rate_bpm(u, duration) / 60.0, 0.0, t
            )
            assert profile.phase_rad(t, duration) == pytest.approx(expected, abs=1e-9)


class TestSynthesize:
    def test_degenerate_waveform_is_exact_baseline(self):
        cfg = cfg_with(amplitude=0.0, drift=0.6, baseline=305.0)
        seq, _ = synthesize_sequence(cfg)
        for fr in seq.frames:
            expected = 305.0 + 0.6 * (fr.timestamp / 60.0)
            block = ROI.block(fr.pixels)
            assert np.all(block == expected)

    def test_constant_rate_gives_pure_sinusoid(self):
        cfg = cfg_with(duration=20.0, rate_profile=RateProfile(15.0))
        seq, _ = synthesize_sequence(cfg)
        t = np.array([fr.timestamp for fr in seq.frames])
        vals = np.array([fr.pixels[ROI.y, ROI.x] for fr in seq.frames])
        expected = cfg.baseline + cfg.amplitude * np.sin(2 * np.pi * 0.25 * t)
        assert np.allclose(vals, expected, atol=1e-12)

    def test_outside_roi_is_ambient(self):
        cfg = cfg_with()
        seq, _ = synthesize_sequence(cfg)
        assert seq.frames[0].pixels[0, 0] == cfg.ambient

    def test_same_seed_identical_tseq_bytes(self):
        cfg = cfg_with(noise_sd=0.05, jitter_sd=0.01, seed=99)
        a = encode_sequence(synthesize_sequence(cfg)[0])
        b = encode_sequence(synthesize_sequence(cfg)[0])
        assert a == b

    def test_different_seed_differs(self):
        base = cfg_with(noise_sd=0.05)
        other = cfg_with(noise_sd=0.05, seed=2)
        a = encode_sequence(synthesize_sequence(base)[0])
        b = encode_sequence(synthesize_sequence(other)[0])
        assert a != b

    def test_frame_count_rule(self):
        seq, _ = synthesize_sequence(cfg_with(duration=60.0, fps=9.0))
        assert len(seq) == 540  # floor(duration * fps)

    def test_roi_outside_bounds_rejected(self):
        with pytest.raises(ValueError, match="nostril_roi"):
            cfg_with(nostril_roi=Roi(20, 3, 8, 6))

    def test_jittered_timestamps_strictly_increase(self):
        cfg = cfg_with(duration=30.0, jitter_sd=0.02, seed=11)
        seq, _ = synthesize_sequence(cfg)
        t = np.array([fr.timestamp for fr in seq.frames])
        assert t[0] >= 0.0
        assert np.all(np.diff(t) > 0)

    def test_ground_truth_matches_frames(self):
        cfg = cfg_with(duration=15.0, rate_profile=RateProfile(10.0, 20.0))
        seq, truth = synthesize_sequence(cfg)
        assert len(truth.times_s) == len(seq)
        for i, fr in enumerate(seq.frames):
            assert truth.times_s[i] == fr.timestamp
            assert truth.rate_bpm[i] == truth.rate_at(fr.timestamp)
            assert truth.phase_rad[i] == truth.phase_at(fr.timestamp)

    def test_amplitude_must_be_non_negative(self):
        with pytest.raises(ValueError):
            cfg_with(amplitude=-0.1)


class TestGroundTruthCsv:
    def test_round_trip(self, tmp_path):
        cfg = cfg_with(duration=5.0, rate_profile=RateProfile(8.0, 16.0))
        _, truth = synthesize_sequence(cfg)
        path = tmp_path / "truth.csv"
        write_ground_truth(truth, path)
        header = path.read_text().splitlines()[0]
        assert header == "t_s,phase_rad,rate_bpm"
        t, p, r = read_ground_truth(path)
        assert np.array_equal(t, truth.times_s)
        assert np.array_equal(p, truth.phase_rad)
        assert np.array_equal(r, truth.rate_bpm)
