#!/usr/bin/env python3
"""Brute-force calibration of the width-dichotomy test thresholds.

Runs scenarios 1 and 3 over many seeds and reports the observed
distribution of the two statistics the acceptance suite bounds:

* scenario 1: max IQR / min IQR across samples (near-constant widths)
* scenario 3: Pearson correlation of per-sample IQR with the magnitude
  of the centered additive sample effect (width variation)

Usage: python scripts/calibrate_thresholds.py [n_seeds]
"""

import sys

import numpy as np

from rlekit import rle_summary, scenario, simulate


def main(n_seeds: int = 200) -> None:
    ratios = []
    corrs = []
    for seed in range(1, n_seeds + 1):
        ds1 = simulate(scenario(1, seed=seed))
        iqr1 = np.array([s.iqr for s in rle_summary(ds1.matrix)])
        ratios.append(iqr1.max() / iqr1.min())

        ds3 = simulate(scenario(3, seed=seed))
        iqr3 = np.array([s.iqr for s in rle_summary(ds3.matrix)])
        spread = np.abs(ds3.sample_effects - ds3.sample_effects.mean())
        corrs.append(np.corrcoef(iqr3, spread)[0, 1])

    ratios = np.array(ratios)
    corrs = np.array(corrs)
    print(f"seeds: {n_seeds}")
    print("scenario 1 IQR ratio:   mean %.4f  sd %.4f  min %.4f  max %.4f"
          % (ratios.mean(), ratios.std(ddof=1), ratios.min(), ratios.max()))
    print("  share below 1.25: %.3f" % (ratios < 1.25).mean())
    print("scenario 3 width corr:  mean %.4f  sd %.4f  min %.4f  max %.4f"
          % (corrs.mean(), corrs.std(ddof=1), corrs.min(), corrs.max()))
    print("  mean - 5 sd = %.4f (threshold 0.8 is %s)"
          % (corrs.mean() - 5 * corrs.std(ddof=1),
             "outside" if 0.8 < corrs.mean() - 5 * corrs.std(ddof=1) else "inside 5 sd"))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
