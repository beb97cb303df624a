"""Symmetric versus perturbed clique energies: acceptance rate and k-mer parity.

    python scripts/mrf_experiment.py scripts/configs/mrf_k3.cfg --replicates 10
"""

import argparse
import dataclasses
import math

from cspr.experiments import ExperimentSpec, simulate_replicate
from cspr.simulation import kmer_parity_report
from cspr.testkit import run_test


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--replicates", type=int)
    ap.add_argument("--k-max", type=int, default=3)
    args = ap.parse_args()

    spec = ExperimentSpec.from_file(args.config)
    if args.replicates is not None:
        spec = dataclasses.replace(spec, replicates=args.replicates)

    for perturbation in spec.grid or (spec.perturbation,):
        point = dataclasses.replace(spec, perturbation=perturbation)
        accepted, worst = 0, {k: 0.0 for k in range(1, args.k_max + 1)}
        for r in range(point.replicates):
            s = simulate_replicate(point, r)
            accepted += not run_test(s, point.test_config()).reject
            for k, d in kmer_parity_report(s, args.k_max).items():
                worst[k] = max(worst[k], d)
        disc = "  ".join(f"k{k}={d:.1e}" for k, d in worst.items())
        print(
            f"perturbation {perturbation:<6g} acceptance {accepted / point.replicates:.2f}  "
            f"max |freq - rc freq|: {disc}  (10/sqrt(n) = {10 / math.sqrt(point.n):.0e})"
        )


if __name__ == "__main__":
    main()
