"""Plain-text experiment configs and the replicate/power drivers built on them.

A config is a sequence of ``key = value`` lines; ``#`` starts a comment.
Example::

    model = markov
    n = 1000000
    replicates = 200
    seed = 1
    epsilon = 0.05
"""

from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from functools import partial
from pathlib import Path
from typing import Iterator

import numpy as np

from cspr.simulation import (
    CliqueEnergy,
    MarkovModel,
    gibbs_sample_mrf,
    perturb_energy,
    perturb_joint,
    random_joint,
    sample_markov,
    symmetrize_energy,
    symmetrize_joint,
)
from cspr.sequence_io import Sequence
from cspr.testkit import TestConfig, TestReport, run_test

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class ExperimentSpec:
    model: str = "markov"
    n: int = 1000
    replicates: int = 1
    seed: int = 0
    # markov chains
    joint: str = "uniform"
    joint_seed: int = 0
    concentration: float = 1.0
    epsilon: float = 0.0
    pair: str = "AC"
    # markov random fields
    k: int = 3
    sweeps: int = 50
    energy_seed: int = 0
    energy_scale: float = 0.5
    symmetric: bool = True
    perturbation: float = 0.0
    psi1: tuple[float, ...] = ()
    psi2: tuple[float, ...] = ()
    psi3: tuple[float, ...] = ()
    psi4: tuple[float, ...] = ()
    # power experiments: values substituted for epsilon (markov) or perturbation (mrf)
    grid: tuple[float, ...] = ()
    alpha: float = 0.05
    max_m: int = 1000
    threshold_frac: float = 0.01

    def __post_init__(self):
        if self.model not in ("markov", "mrf"):
            raise ConfigError(f"model must be 'markov' or 'mrf', got {self.model!r}", "model")
        if self.joint not in ("uniform", "random"):
            raise ConfigError(f"joint must be 'uniform' or 'random', got {self.joint!r}", "joint")
        if self.n < 2:
            raise ConfigError("n must be >= 2", "n")
        if self.replicates < 0:
            raise ConfigError("replicates must be >= 0", "replicates")
        if not 1 <= self.k <= 4:
            raise ConfigError("k must lie in 1..4", "k")
        for j in range(1, 5):
            values = getattr(self, f"psi{j}")
            if values and len(values) != 4**j:
                raise ConfigError(f"psi{j} needs {4**j} values, got {len(values)}", f"psi{j}")

    @classmethod
    def from_text(cls, text: str) -> "ExperimentSpec":
        kinds = {f.name: f for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep:
                raise ConfigError(f"line {lineno}: expected 'key = value'", key or None)
            if key not in kinds:
                raise ConfigError(f"unknown config key {key!r}", key)
            values[key] = _convert(key, kinds[key].type, value)
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentSpec":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                if not v:
                    continue
                v = ", ".join(repr(float(x)) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    def test_config(self) -> TestConfig:
        return TestConfig(alpha=self.alpha, max_m=self.max_m, threshold_frac=self.threshold_frac)


def _convert(key: str, kind: str, value: str):
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "bool":
            low = value.lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(value)
            return low in ("true", "yes", "1")
        if kind.startswith("tuple"):
            return tuple(float(v) for v in value.replace(",", " ").split())
        return value
    except ValueError:
        raise ConfigError(f"bad value {value!r} for key {key!r}", key) from None


def markov_model(spec: ExperimentSpec) -> MarkovModel:
    """Compliant chain from the configured joint, perturbed when ``epsilon != 0``."""
    if spec.joint == "uniform":
        q = np.full((4, 4), 1 / 16)
    else:
        q = random_joint(np.random.default_rng(spec.joint_seed), spec.concentration)
    base = symmetrize_joint(q)
    if spec.epsilon == 0:
        return base
    return perturb_joint(base.stationary_joint(), spec.epsilon, spec.pair)


def clique_energy(spec: ExperimentSpec) -> CliqueEnergy:
    explicit = [getattr(spec, f"psi{j}") for j in range(1, spec.k + 1)]
    if any(explicit):
        tables = tuple(
            np.reshape(t, (4,) * j) if t else np.zeros((4,) * j) for j, t in enumerate(explicit, start=1)
        )
        energy = CliqueEnergy(tables)
    else:
        energy = CliqueEnergy.random(spec.k, spec.energy_scale, spec.energy_seed)
    if spec.symmetric:
        energy = symmetrize_energy(energy)
    if spec.perturbation:
        energy = perturb_energy(energy, spec.perturbation)
    return energy


def replicate_id(spec: ExperimentSpec, r: int) -> str:
    effect = f"eps{spec.epsilon:g}" if spec.model == "markov" else f"k{spec.k}_pert{spec.perturbation:g}"
    return f"{spec.model}_{effect}_seed{spec.seed + r}_rep{r}"


def simulate_replicate(spec: ExperimentSpec, r: int) -> Sequence:
    seed = spec.seed + r
    if spec.model == "markov":
        return sample_markov(markov_model(spec), spec.n, seed, id=replicate_id(spec, r))
    return gibbs_sample_mrf(clique_energy(spec), spec.n, spec.sweeps, seed, id=replicate_id(spec, r))


def generate(spec: ExperimentSpec) -> Iterator[Sequence]:
    for r in range(spec.replicates):
        yield simulate_replicate(spec, r)


def _simulate_and_test(r: int, spec: ExperimentSpec) -> TestReport:
    return run_test(simulate_replicate(spec, r), spec.test_config())


def run_replicates(spec: ExperimentSpec, workers: int = 1) -> list[TestReport]:
    """Simulate and test every replicate; results are in replicate order."""
    job = partial(_simulate_and_test, spec=spec)
    if workers > 1 and spec.replicates > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, range(spec.replicates)))
    return [job(r) for r in range(spec.replicates)]


@dataclass(frozen=True)
class PowerRow:
    effect: float
    n: int
    replicates: int
    alpha: float
    rejections: int
    singular: int
    rate: float
    std_error: float


def run_power(spec: ExperimentSpec, workers: int = 1) -> list[PowerRow]:
    """Rejection rate at each grid value of the effect size.

    The effect is ``epsilon`` for Markov chains and ``perturbation`` for MRFs.
    An empty grid means the single configured effect.
    """
    if spec.replicates == 0:
        log.warning("replicates = 0: nothing to simulate, returning an empty table")
        return []
    effect_key = "epsilon" if spec.model == "markov" else "perturbation"
    grid = spec.grid or (getattr(spec, effect_key),)
    rows = []
    for effect in grid:
        point = dataclasses.replace(spec, **{effect_key: effect})
        reports = run_replicates(point, workers)
        rejections = sum(r.reject for r in reports)
        rate = rejections / len(reports)
        rows.append(
            PowerRow(
                effect=float(effect),
                n=spec.n,
                replicates=len(reports),
                alpha=spec.alpha,
                rejections=rejections,
                singular=sum(r.status != "ok" for r in reports),
                rate=rate,
                std_error=math.sqrt(rate * (1 - rate) / len(reports)),
            )
        )
    return rows
