"""Command-line interface.

Subcommands: ``synth`` (generate a sequence + ground truth), ``process``
(full batch pipeline to CSV/PGM), ``rate`` and ``rvs`` (single outputs),
``serve`` (real-time replay server with a browser UI).

Exit codes: 0 ok, 2 usage error, 3 input-format error, 4 processing error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    EmptySignalError,
    RoiBoundsError,
    TooShortError,
    TseqDecodeError,
    UnusableFrameError,
)
from .pipeline import PipelineConfig, apply_emissivity
from .rate import estimate_rate, write_rate_csv
from .rvs import RvsParams, compute_rvs, rvs_to_pgm, rvs_to_png, write_rvs_csv
from .signals import BandpassSpec, bandpass, resample_uniform, write_signal_csv
from .synth import RateProfile, SynthConfig, synthesize_sequence, write_ground_truth
from .thermal import Roi
from .tseq import read_tseq, write_tseq
from .voxel import FLOOR_FIXED, FLOOR_WINDOW_MIN, VoxelParams, integrate_sequence

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT_FORMAT = 3
EXIT_PROCESSING = 4


def _roi_arg(text: str) -> Roi:
    try:
        x, y, w, h = (int(p) for p in text.split(","))
        return Roi(x, y, w, h)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected x,y,w,h integers: {exc}") from exc


def _band_arg(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(","))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected lo,hi in Hz: {exc}") from exc
    if not (0 < lo < hi):
        raise argparse.ArgumentTypeError(f"need 0 < lo < hi, got {text}")
    return lo, hi


def _chirp_arg(text: str) -> tuple[float, float]:
    try:
        a, b = (float(p) for p in text.split(","))
        return a, b
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected start,end bpm: {exc}") from exc


def _positive(text: str) -> float:
    v = float(text)
    if not (v > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--roi", type=_roi_arg, metavar="x,y,w,h",
                   help="nostril region of interest in pixel coordinates")
    p.add_argument("--band", type=_band_arg, metavar="lo,hi", default=(0.1, 0.85),
                   help="bandpass edges in Hz (default 0.1,0.85)")
    p.add_argument("--quantum", type=_positive, metavar="K", default=0.01,
                   help="voxel temperature quantum in kelvin (default 0.01)")
    p.add_argument("--window-s", type=_positive, metavar="N", default=30.0,
                   help="rate estimation window in seconds (default 30)")
    p.add_argument("--fs", type=_positive, metavar="N", default=9.0,
                   help="uniform resampling rate in Hz (default 9)")
    p.add_argument("--speed", type=float, metavar="X", default=1.0,
                   help="replay speed multiplier; 0 = as fast as possible")
    p.add_argument("--port", type=int, metavar="N", default=8765,
                   help="server port (default 8765)")


def _processing_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hop-s", type=_positive, default=1.0, help="rate hop seconds")
    p.add_argument("--order", type=int, default=6, help="bandpass order per pass")
    p.add_argument("--causal", action="store_true",
                   help="single-pass causal filtering instead of zero-phase")
    p.add_argument("--emissivity", type=float,
                   help="override the emissivity stored in the file")
    p.add_argument("--floor", type=float,
                   help="fixed integration floor in kelvin (default: sliding minimum)")
    p.add_argument("--floor-window-s", type=_positive, default=30.0)
    p.add_argument("--rvs-win-s", type=_positive, default=20.0)
    p.add_argument("--rvs-hop-s", type=_positive, default=1.0)
    p.add_argument("--rvs-pad", type=int, default=2048)
    p.add_argument("--rvs-band", type=_band_arg, metavar="lo,hi", default=(0.05, 1.0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoresp",
        description="Breathing-rate recovery from radiometric thermal sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic .tseq + ground truth")
    _common_flags(p_synth)
    p_synth.add_argument("--out", required=True, help="output .tseq path")
    p_synth.add_argument("--gt-out", help="ground-truth CSV path (default: <out>.gt.csv)")
    p_synth.add_argument("--duration", type=_positive, required=True, help="seconds")
    p_synth.add_argument("--fps", type=_positive, default=9.0)
    rate_group = p_synth.add_mutually_exclusive_group(required=True)
    rate_group.add_argument("--rate-bpm", type=float, help="constant breathing rate")
    rate_group.add_argument("--rate-chirp", type=_chirp_arg, metavar="start,end",
                            help="linear rate ramp over the sequence")
    p_synth.add_argument("--amplitude", type=float, default=0.3, help="kelvin swing")
    p_synth.add_argument("--baseline", type=float, default=306.0, help="skin kelvin")
    p_synth.add_argument("--ambient", type=float, default=295.0, help="background kelvin")
    p_synth.add_argument("--noise-sd", type=float, default=0.0, help="pixel noise kelvin")
    p_synth.add_argument("--drift", type=float, default=0.0, help="kelvin per minute")
    p_synth.add_argument("--jitter-sd", type=float, default=0.0, help="timestamp jitter s")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--nostril-roi", type=_roi_arg, metavar="x,y,w,h",
                         default=Roi(70, 70, 20, 12))
    p_synth.add_argument("--size", metavar="WxH", default="160x120",
                         help="frame size (default 160x120)")

    for name, helptext in (
        ("process", "run the full pipeline; writes signal/rate/rvs CSVs and a PGM"),
        ("rate", "estimate breathing rate only; writes a rate CSV"),
        ("rvs", "compute the spectrogram only; writes CSV and PGM"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common_flags(p)
        _processing_flags(p)
        p.add_argument("input", help="input .tseq file")
        p.add_argument("--out-dir", default=".", help="output directory (default: .)")
        p.add_argument("--png", action="store_true", help="also write a PNG image")

    p_serve = sub.add_parser("serve", help="replay a .tseq over WebSocket with a web UI")
    _common_flags(p_serve)
    _processing_flags(p_serve)
    p_serve.add_argument("input", help="input .tseq file")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--ui-dir", help="static UI bundle directory (default: auto-detect)")

    return parser


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    if args.floor is not None:
        voxel = VoxelParams(quantum=args.quantum, floor_mode=FLOOR_FIXED,
                            fixed_floor=args.floor, window_s=args.floor_window_s)
    else:
        voxel = VoxelParams(quantum=args.quantum, floor_mode=FLOOR_WINDOW_MIN,
                            window_s=args.floor_window_s)
    band = BandpassSpec(low_hz=args.band[0], high_hz=args.band[1],
                        order=args.order, zero_phase=not args.causal)
    rvs = RvsParams(win_s=args.rvs_win_s, hop_s=args.rvs_hop_s, pad_to=args.rvs_pad,
                    f_lo=args.rvs_band[0], f_hi=args.rvs_band[1])
    return PipelineConfig(
        roi=args.roi, voxel=voxel, band=band, rate_window_s=args.window_s,
        rate_hop_s=args.hop_s, rvs=rvs, fs=args.fs, emissivity=args.emissivity,
        speed=args.speed, port=args.port,
    )


def _cmd_synth(args: argparse.Namespace) -> int:
    if args.rate_bpm is not None:
        if not (0 < args.rate_bpm <= 60):
            print(f"error: --rate-bpm must be in (0, 60], got {args.rate_bpm}",
                  file=sys.stderr)
            return EXIT_USAGE
        profile = RateProfile(args.rate_bpm)
    else:
        lo, hi = args.rate_chirp
        if not (0 < lo <= 60 and 0 < hi <= 60):
            print(f"error: --rate-chirp values must be in (0, 60], got {lo},{hi}",
                  file=sys.stderr)
            return EXIT_USAGE
        profile = RateProfile(lo, hi)
    try:
        w, h = (int(p) for p in args.size.split("x"))
        cfg = SynthConfig(
            duration=args.duration, rate_profile=profile, fps=args.fps,
            amplitude=args.amplitude, baseline=args.baseline, ambient=args.ambient,
            noise_sd=args.noise_sd, drift=args.drift, nostril_roi=args.nostril_roi,
            jitter_sd=args.jitter_sd, seed=args.seed, width=w, height=h,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    seq, truth = synthesize_sequence(cfg)
    write_tseq(seq, args.out)
    gt_path = args.gt_out or str(Path(args.out).with_suffix(".gt.csv"))
    write_ground_truth(truth, gt_path)
    print(f"wrote {args.out}: {len(seq)} frames, {args.duration:g} s @ "
          f"{args.fps:g} fps, rate {profile.describe()} (truth: {gt_path})")
    return EXIT_OK


def _require_roi(args: argparse.Namespace) -> int | None:
    if args.roi is None:
        print("error: ROI required (--roi x,y,w,h); the nostril region is "
              "selected manually and never guessed", file=sys.stderr)
        return EXIT_USAGE
    return None


def _cmd_process(args: argparse.Namespace, what: str) -> int:
    missing = _require_roi(args)
    if missing is not None:
        return missing
    seq = read_tseq(args.input)
    cfg = _pipeline_config(args)

    corrected = apply_emissivity(seq, cfg.emissivity)
    raw = integrate_sequence(corrected, args.roi, cfg.voxel)
    uniform = resample_uniform(raw, cfg.fs)
    filtered = bandpass(uniform, cfg.band)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    wrote = []
    summary = []
    if what == "process":
        write_signal_csv(uniform, out / "signal.csv")
        wrote.append("signal.csv")
    if what in ("process", "rate"):
        rates = estimate_rate(filtered, window_s=cfg.rate_window_s,
                              hop_s=cfg.rate_hop_s,
                              band=(cfg.band.low_hz, cfg.band.high_hz))
        write_rate_csv(rates, out / "rate.csv")
        wrote.append("rate.csv")
        summary.append(f"{len(rates)} rate estimates")
    if what in ("process", "rvs"):
        spectrogram = compute_rvs(filtered, cfg.rvs)
        write_rvs_csv(spectrogram, out / "rvs.csv")
        with open(out / "rvs.pgm", "wb") as f:
            f.write(rvs_to_pgm(spectrogram))
        wrote += ["rvs.csv", "rvs.pgm"]
        if args.png:
            with open(out / "rvs.png", "wb") as f:
                f.write(rvs_to_png(spectrogram))
            wrote.append("rvs.png")
        summary.append(f"{spectrogram.magnitudes.shape[1]} spectrogram columns")
    print(f"processed {args.input}: {', '.join(summary)} -> "
          f"{out}/{{{','.join(wrote)}}}")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import run_server  # deferred: keeps batch CLI import-light

    seq = read_tseq(args.input)
    cfg = _pipeline_config(args)
    return run_server(seq, cfg, host=args.host, ui_dir=args.ui_dir)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 for --help
        return 0 if exc.code in (0, None) else EXIT_USAGE

    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command in ("process", "rate", "rvs"):
            return _cmd_process(args, args.command)
        if args.command == "serve":
            return _cmd_serve(args)
        parser.error(f"unknown command {args.command}")
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_FORMAT
    except TseqDecodeError as exc:
        print(f"input format error: {exc}", file=sys.stderr)
        return EXIT_INPUT_FORMAT
    except (RoiBoundsError, UnusableFrameError, EmptySignalError, TooShortError,
            ValueError, OSError) as exc:
        print(f"processing error: {exc}", file=sys.stderr)
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
