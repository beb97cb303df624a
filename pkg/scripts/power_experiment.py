"""Rejection rate against effect size for perturbed Markov chains or MRFs.

    python scripts/power_experiment.py scripts/configs/power_markov.cfg
    python scripts/power_experiment.py scripts/configs/mrf_k3.cfg --replicates 20
"""

import argparse
import dataclasses
import time

from cspr.experiments import ExperimentSpec, run_power


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--replicates", type=int)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    spec = ExperimentSpec.from_file(args.config)
    if args.replicates is not None:
        spec = dataclasses.replace(spec, replicates=args.replicates)

    print(f"# {spec.model}  n={spec.n}  replicates={spec.replicates}  alpha={spec.alpha}")
    print(f"{'effect':>8} {'rate':>7} {'se':>7} {'singular':>8} {'sec':>6}")
    grid = spec.grid or ((spec.epsilon if spec.model == "markov" else spec.perturbation),)
    for effect in grid:
        t0 = time.perf_counter()
        (row,) = run_power(dataclasses.replace(spec, grid=(effect,)), workers=args.workers)
        print(f"{row.effect:8.4f} {row.rate:7.3f} {row.std_error:7.3f} {row.singular:8d} {time.perf_counter() - t0:6.1f}")


if __name__ == "__main__":
    main()
