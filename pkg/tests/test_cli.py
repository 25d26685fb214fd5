import numpy as np
import pytest

from thermoresp.cli import main
from thermoresp.rate import read_rate_csv
from thermoresp.signals import read_signal_csv
from thermoresp.synth import read_ground_truth


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def synth_args(path, duration=40, extra=()):
    return ["synth", "--out", str(path), "--duration", str(duration),
            "--fps", "9", "--rate-bpm", "15", "--seed", "7",
            "--size", "48x36", "--nostril-roi", "10,8,12,8",
            "--noise-sd", "0.02", *extra]


class TestSynth:
    def test_frame_count_and_summary(self, tmp_path, capsys):
        out = tmp_path / "a.tseq"
        code, stdout, _ = run(["synth", "--out", str(out), "--duration", "60",
                               "--fps", "9", "--rate-bpm", "15", "--seed", "7"],
                              capsys)
        assert code == 0
        assert "540 frames" in stdout
        from thermoresp.tseq import read_tseq
        assert len(read_tseq(out)) == 540
        t, p, r = read_ground_truth(tmp_path / "a.gt.csv")
        assert len(t) == 540
        assert np.all(r == 15.0)

    def test_zero_rate_is_usage_error(self, tmp_path, capsys):
        code, _, err = run(["synth", "--out", str(tmp_path / "x.tseq"),
                            "--duration", "10", "--rate-bpm", "0"], capsys)
        assert code == 2
        assert "rate-bpm" in err

    def test_rate_required(self, tmp_path, capsys):
        code, _, _ = run(["synth", "--out", str(tmp_path / "x.tseq"),
                          "--duration", "10"], capsys)
        assert code == 2

    def test_same_flags_identical_files(self, tmp_path, capsys):
        a, b = tmp_path / "a.tseq", tmp_path / "b.tseq"
        assert run(synth_args(a, extra=("--jitter-sd", "0.01")), capsys)[0] == 0
        assert run(synth_args(b, extra=("--jitter-sd", "0.01")), capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_chirp_profile(self, tmp_path, capsys):
        out = tmp_path / "c.tseq"
        code, stdout, _ = run(["synth", "--out", str(out), "--duration", "20",
                               "--rate-chirp", "12,24", "--size", "32x24",
                               "--nostril-roi", "4,4,8,6"], capsys)
        assert code == 0
        _, _, rates = read_ground_truth(tmp_path / "c.gt.csv")
        assert rates[0] == pytest.approx(12.0)
        assert rates[-1] == pytest.approx(24.0, abs=0.2)


@pytest.fixture(scope="module")
def synth_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "seq.tseq"
    code = main(synth_args(path))
    assert code == 0
    return path


class TestProcess:
    def test_full_outputs_and_rates(self, synth_file, tmp_path, capsys):
        out = tmp_path / "out"
        code, stdout, _ = run(["process", str(synth_file), "--roi", "10,8,12,8",
                               "--out-dir", str(out)], capsys)
        assert code == 0
        for name in ("signal.csv", "rate.csv", "rvs.csv", "rvs.pgm"):
            assert (out / name).exists()
        rates = read_rate_csv(out / "rate.csv")
        assert rates
        for r in rates:
            assert abs(r.bpm - 15.0) <= 1.0
        t, v = read_signal_csv(out / "signal.csv")
        assert len(t) == len(v) > 0

    def test_missing_roi_is_usage_error(self, synth_file, capsys):
        code, _, err = run(["process", str(synth_file)], capsys)
        assert code == 2
        assert "ROI required" in err

    def test_out_of_bounds_roi_names_edge(self, synth_file, tmp_path, capsys):
        code, _, err = run(["process", str(synth_file), "--roi", "200,0,8,6",
                            "--out-dir", str(tmp_path)], capsys)
        assert code == 4
        assert "width" in err

    def test_missing_input_is_input_error(self, tmp_path, capsys):
        code, _, err = run(["process", str(tmp_path / "nope.tseq"),
                            "--roi", "0,0,4,4"], capsys)
        assert code == 3

    def test_corrupt_input_is_format_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.tseq"
        bad.write_bytes(b"not a tseq stream")
        code, _, err = run(["process", str(bad), "--roi", "0,0,4,4"], capsys)
        assert code == 3
        assert "bad_magic" in err

    def test_rate_subcommand_writes_only_rate(self, synth_file, tmp_path, capsys):
        out = tmp_path / "rateonly"
        code, _, _ = run(["rate", str(synth_file), "--roi", "10,8,12,8",
                          "--out-dir", str(out)], capsys)
        assert code == 0
        assert (out / "rate.csv").exists()
        assert not (out / "signal.csv").exists()
        assert not (out / "rvs.csv").exists()

    def test_rvs_subcommand_writes_images(self, synth_file, tmp_path, capsys):
        out = tmp_path / "rvsonly"
        code, _, _ = run(["rvs", str(synth_file), "--roi", "10,8,12,8",
                          "--out-dir", str(out), "--png"], capsys)
        assert code == 0
        assert (out / "rvs.csv").exists()
        assert (out / "rvs.pgm").read_bytes().startswith(b"P5\n")
        assert (out / "rvs.png").read_bytes().startswith(b"\x89PNG")
        assert not (out / "rate.csv").exists()

    def test_too_short_sequence_is_processing_error(self, tmp_path, capsys):
        short = tmp_path / "short.tseq"
        assert main(synth_args(short, duration=10)) == 0
        code, _, err = run(["process", str(short), "--roi", "10,8,12,8",
                            "--out-dir", str(tmp_path / "o")], capsys)
        assert code == 4


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert main(["synth", "--help"]) == 0
