import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

from thermoresp import Roi, ThermalFrame, ThermalSequence  # noqa: E402
from thermoresp.synth import RateProfile, SynthConfig, synthesize_sequence  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_frame(pixels, t=0.0):
    return ThermalFrame(timestamp=t, pixels=np.asarray(pixels, dtype=float))


def make_sequence(frames, fps=9.0, emissivity=0.98):
    return ThermalSequence.from_frames(frames, nominal_fps=fps, emissivity=emissivity)


def small_synth(duration=40.0, bpm=15.0, bpm_end=None, noise_sd=0.02, jitter_sd=0.0,
                seed=3, fps=9.0, width=48, height=36, roi=Roi(10, 8, 12, 8),
                amplitude=0.3, drift=0.0):
    cfg = SynthConfig(
        duration=duration, rate_profile=RateProfile(bpm, bpm_end), fps=fps,
        amplitude=amplitude, noise_sd=noise_sd, drift=drift, nostril_roi=roi,
        jitter_sd=jitter_sd, seed=seed, width=width, height=height,
    )
    seq, truth = synthesize_sequence(cfg)
    return cfg, seq, truth


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                name = nodeid.split("::")[-1]
                lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in sorted(set(lines)):
            terminalreporter.write_line(f"{outcome:>6}  {name}")
