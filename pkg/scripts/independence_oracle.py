#!/usr/bin/env python3
"""Monte Carlo estimate of the confidence score between independent patches.

Uses the loop-based reference in tests/brute.py, not the package, so the
number it prints can pin thresholds for the package's own tests.

    python scripts/independence_oracle.py --samples 4000 --patch 7 --bins 16
"""

import argparse
import statistics
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
import brute  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=4000)
    ap.add_argument("--patch", "-W", type=int, default=7)
    ap.add_argument("--bins", "-B", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n = args.patch * args.patch
    cases = {
        "uniform vs uniform": lambda: (rng.random(n), rng.random(n)),
        # a two-level edge patch with mild texture against uniform noise
        "edge vs uniform": lambda: (
            np.clip(np.where(np.arange(n) % args.patch < args.patch // 2, 0.2, 0.7) + rng.normal(0, 0.04, n), 0, 1),
            rng.random(n),
        ),
    }
    for name, draw in cases.items():
        scores = []
        for _ in range(args.samples):
            src, tgt = draw()
            xs = [brute.quantize(v, args.bins) for v in src]
            ys = [brute.quantize(v, args.bins) for v in tgt]
            scores.append(brute.score(xs, ys, args.bins))
        mean = statistics.fmean(scores)
        sem = statistics.stdev(scores) / len(scores) ** 0.5
        q99 = float(np.quantile(scores, 0.99))
        print(f"{name:20s} mean={mean:.4f} sem={sem:.4f} q99={q99:.4f} max={max(scores):.4f}")


if __name__ == "__main__":
    main()
