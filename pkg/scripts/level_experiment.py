"""Null behaviour of the statistic on compliant chains.

Prints empirical rejection rates at 0.01 and 0.05 next to their 3-sigma
binomial bands, the 95th percentile of eta against the chi-square(5) value,
and the Kolmogorov-Smirnov distance to chi-square(5).

    python scripts/level_experiment.py scripts/configs/level_markov.cfg
"""

import argparse
import dataclasses
import math

import numpy as np

from cspr.experiments import ExperimentSpec, run_replicates
from cspr.numerics import chi2_cdf, chi2_quantile


def ks_distance(sample):
    x = np.sort(sample)
    cdf = np.array([chi2_cdf(v, 5) for v in x])
    i = np.arange(1, len(x) + 1)
    return float(max(np.max(i / len(x) - cdf), np.max(cdf - (i - 1) / len(x))))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--replicates", type=int)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    spec = ExperimentSpec.from_file(args.config)
    if args.replicates is not None:
        spec = dataclasses.replace(spec, replicates=args.replicates)
    reports = run_replicates(spec, workers=args.workers)
    ok = [r for r in reports if r.status == "ok"]
    R = len(ok)
    print(f"replicates {len(reports)}  usable {R}  capped m {sum(r.truncated_at_cap for r in reports)}")
    if not R:
        return
    p = np.array([r.p_value for r in ok])
    eta = np.array([r.eta for r in ok])
    for alpha in (0.01, 0.05):
        band = 3 * math.sqrt(alpha * (1 - alpha) / R)
        print(f"alpha {alpha:.2f}: rate {np.mean(p <= alpha):.4f}  band [{alpha - band:.4f}, {alpha + band:.4f}]")
    print(f"q95(eta) {np.quantile(eta, 0.95):.3f}  chi2_5 {chi2_quantile(0.95, 5):.3f}")
    print(f"KS distance {ks_distance(eta):.4f}")
    print(f"median m(n) {int(np.median([r.m_used for r in ok]))}")


if __name__ == "__main__":
    main()
