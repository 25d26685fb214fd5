import numpy as np
import pytest

from thermoresp import (
    BreathingSignal,
    Rvs,
    RvsBuilder,
    RvsParams,
    TooShortError,
    compute_rvs,
    rvs_to_pgm,
    rvs_to_png,
)
from thermoresp.rvs import read_rvs_csv, write_rvs_csv

from .oracles import dft_power

FS = 9.0


def uniform(values, fs=FS, stage="filtered"):
    return BreathingSignal(times=np.arange(len(values)) / fs, values=values,
                           stage=stage, fs=fs)


def tone(freq, duration_s, amp=1.0, fs=FS):
    t = np.arange(int(duration_s * fs)) / fs
    return amp * np.sin(2 * np.pi * freq * t)


class TestComputeRvs:
    def test_all_zero_signal_gives_all_zero_matrix(self):
        rvs = compute_rvs(uniform(np.zeros(int(40 * FS))))
        assert rvs.magnitudes.shape[1] > 0
        assert np.all(rvs.magnitudes == 0.0)

    def test_pure_tone_ridge_and_normalization(self):
        rvs = compute_rvs(uniform(tone(0.25, 60)))
        target_bin = int(np.argmin(np.abs(rvs.freqs_hz - 0.25)))
        for col in range(rvs.magnitudes.shape[1]):
            assert int(np.argmax(rvs.magnitudes[:, col])) == target_bin
        assert rvs.magnitudes.max() == 1.0
        assert rvs.magnitudes.min() >= 0.0

    def test_columns_match_independent_dft(self):
        # every magnitude re-derived with an explicit DFT sum at the bin
        # centers, then min-max normalized the same way
        params = RvsParams(win_s=4.0, hop_s=2.0, pad_to=64, f_lo=0.1, f_hi=1.5)
        sig = uniform(tone(0.3, 10))
        rvs = compute_rvs(sig, params)
        win_n = int(round(params.win_s * FS))
        hop_n = int(round(params.hop_s * FS))
        taper = np.hanning(win_n)

        raw = np.empty_like(rvs.magnitudes)
        for c, off in enumerate(range(0, len(sig) - win_n + 1, hop_n)):
            seg = sig.values[off : off + win_n]
            w = np.zeros(params.pad_to)
            w[:win_n] = (seg - seg.mean()) * taper
            raw[:, c] = [np.sqrt(dft_power(w, f, FS)) for f in rvs.freqs_hz]
        expect = (raw - raw.min()) / (raw.max() - raw.min())
        assert expect.shape == rvs.magnitudes.shape
        assert np.allclose(rvs.magnitudes, expect, atol=1e-9)

    def test_chirp_ridge_is_nondecreasing(self):
        t = np.arange(int(90 * FS)) / FS
        # linear chirp 0.2 -> 0.4 Hz over the sequence
        phase = 2 * np.pi * (0.2 * t + 0.5 * (0.2 / 90.0) * t * t)
        rvs = compute_rvs(uniform(np.sin(phase)))
        ridge = np.argmax(rvs.magnitudes, axis=0)
        assert np.all(np.diff(ridge) >= 0)

    def test_too_short_signal(self):
        with pytest.raises(TooShortError):
            compute_rvs(uniform(np.zeros(int(10 * FS))))

    def test_band_crop_and_axes(self):
        rvs = compute_rvs(uniform(tone(0.3, 30)))
        assert rvs.freqs_hz[0] >= rvs.params.f_lo
        assert rvs.freqs_hz[-1] <= rvs.params.f_hi
        assert np.all(np.diff(rvs.freqs_hz) > 0)
        assert np.allclose(np.diff(rvs.times_s), rvs.params.hop_s, atol=1e-9)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            RvsParams(win_s=-1)
        with pytest.raises(ValueError):
            RvsParams(f_lo=0.5, f_hi=0.2)
        with pytest.raises(ValueError):
            compute_rvs(uniform(tone(0.3, 30)), RvsParams(f_hi=5.0))

    def test_exactly_one_unit_cell_on_noisy_input(self, rng):
        sig = uniform(rng.normal(size=int(50 * FS)))
        rvs = compute_rvs(sig)
        assert np.all((rvs.magnitudes >= 0) & (rvs.magnitudes <= 1))
        assert int((rvs.magnitudes == 1.0).sum()) == 1
        assert int((rvs.magnitudes == 0.0).sum()) >= 1


class TestPushWindow:
    def test_too_few_samples_emit_nothing(self):
        builder = RvsBuilder(RvsParams(), FS, t0=0.0)
        cols = builder.push(np.zeros(int(20 * FS) - 1))
        assert cols == []

    def test_win_plus_two_hops_gives_three_columns(self):
        params = RvsParams(win_s=20.0, hop_s=1.0)
        builder = RvsBuilder(params, FS, t0=0.0)
        n = int(round((params.win_s + 2 * params.hop_s) * FS))
        cols = builder.push(tone(0.25, 60)[:n])
        assert len(cols) == 3

    def test_incremental_equals_batch_before_normalization(self, rng):
        sig = uniform(rng.normal(size=int(45 * FS)) + tone(0.3, 45))
        params = RvsParams()
        batch = compute_rvs(sig, params)

        builder = RvsBuilder(params, FS, t0=float(sig.times[0]))
        cols = []
        for v in sig.values:  # sample by sample
            cols.extend(builder.push([v]))
        assert len(cols) == batch.magnitudes.shape[1]

        raw = np.column_stack([c.magnitudes for c in cols])
        lo, hi = raw.min(), raw.max()
        renorm = (raw - lo) / (hi - lo)
        assert np.allclose(renorm, batch.magnitudes, rtol=1e-9, atol=1e-12)
        assert np.allclose([c.t_center for c in cols], batch.times_s, atol=1e-9)

    def test_running_max_normalization_stays_bounded(self, rng):
        builder = RvsBuilder(RvsParams(), FS, t0=0.0)
        cols = builder.push(rng.normal(size=int(40 * FS)))
        for c in cols:
            assert np.all(c.normalized <= 1.0 + 1e-12)
            assert np.all(c.normalized >= 0.0)

    def test_time_shift_covariance(self):
        # shifting the input by k hops shifts the column pattern by k columns
        params = RvsParams()
        hop_n = int(round(params.hop_s * FS))
        k = 3
        rng = np.random.default_rng(7)
        x = rng.normal(size=int(50 * FS)) + tone(0.25, 50)

        b_full = RvsBuilder(params, FS, t0=0.0)
        cols_full = b_full.push(x)
        b_shift = RvsBuilder(params, FS, t0=0.0)
        cols_shift = b_shift.push(x[k * hop_n:])

        for i, col in enumerate(cols_shift):
            ref = cols_full[i + k]
            assert np.allclose(col.magnitudes, ref.magnitudes, rtol=1e-6, atol=1e-12)


class TestImages:
    def _rvs(self, mags):
        mags = np.asarray(mags, dtype=float)
        return Rvs(magnitudes=mags,
                   freqs_hz=np.linspace(0.05, 1.0, mags.shape[0]),
                   times_s=np.arange(mags.shape[1], dtype=float),
                   params=RvsParams())

    def test_single_half_cell_rounds_up_to_128(self):
        pgm = rvs_to_pgm(self._rvs([[0.5]]))
        assert pgm == b"P5\n1 1\n255\n" + bytes([128])

    def test_all_zero_matrix_renders_black(self):
        pgm = rvs_to_pgm(self._rvs(np.zeros((4, 3))))
        header, _, pixels = pgm.partition(b"255\n")
        assert pixels == bytes(12)

    def test_deterministic_bytes(self):
        rvs = compute_rvs(uniform(tone(0.25, 40)))
        assert rvs_to_pgm(rvs) == rvs_to_pgm(rvs)
        assert rvs_to_png(rvs) == rvs_to_png(rvs)

    def test_frequency_increases_upward(self):
        mags = np.array([[0.0], [1.0]])  # row 1 = higher frequency
        pgm = rvs_to_pgm(self._rvs(mags))
        pixels = pgm.split(b"255\n", 1)[1]
        assert pixels == bytes([255, 0])  # top row is the high-frequency bin

    def test_png_pixels_match_pgm(self):
        from PIL import Image
        import io

        rvs = compute_rvs(uniform(tone(0.25, 40)))
        pgm = rvs_to_pgm(rvs)
        png = rvs_to_png(rvs)
        pgm_pixels = np.frombuffer(pgm.split(b"255\n", 1)[1], dtype=np.uint8)
        png_pixels = np.asarray(Image.open(io.BytesIO(png))).ravel()
        assert np.array_equal(pgm_pixels, png_pixels)

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError):
            rvs_to_pgm(self._rvs(np.zeros((0, 0))))


def test_rvs_csv_round_trip(tmp_path):
    rvs = compute_rvs(uniform(tone(0.25, 30)))
    path = tmp_path / "rvs.csv"
    write_rvs_csv(rvs, path)
    first = path.read_text().splitlines()[0]
    assert first.startswith("f_hz,")
    freqs, times, mags = read_rvs_csv(path)
    assert np.array_equal(freqs, rvs.freqs_hz)
    assert np.array_equal(times, rvs.times_s)
    assert np.array_equal(mags, rvs.magnitudes)
