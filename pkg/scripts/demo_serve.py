#!/usr/bin/env python3
"""Generate a demo breathing sequence and serve it for the browser UI.

Creates a 3-minute chirp (12 -> 24 bpm) with mild noise and timestamp jitter,
then starts the replay server. Open http://127.0.0.1:<port>/ and drag a box
over the warm patch to watch the signal, rate, and spectrogram build up.

Usage: python scripts/demo_serve.py [--port 8765] [--speed 1.0]
"""

import argparse
import tempfile
from pathlib import Path

from thermoresp.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--port", type=int, default=8765)
    ap.add_argument("--speed", type=float, default=1.0)
    ap.add_argument("--out", help="where to keep the .tseq (default: temp dir)")
    args = ap.parse_args()

    out = Path(args.out) if args.out else Path(tempfile.mkdtemp()) / "demo.tseq"
    code = cli([
        "synth", "--out", str(out), "--duration", "180", "--fps", "9",
        "--rate-chirp", "12,24", "--noise-sd", "0.05", "--jitter-sd", "0.02",
        "--seed", "42",
    ])
    if code != 0:
        return code
    print("hint: the synthetic nostril patch sits at roi 70,70,20,12")
    return cli(["serve", str(out), "--port", str(args.port),
                "--speed", str(args.speed)])


if __name__ == "__main__":
    raise SystemExit(main())
