"""The chi-square parity test for single sequences and corrected batches."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Iterable, Literal, Sequence as Seq

import numpy as np

from cspr.counting import FVector, count_pairs, f_vector
from cspr.covariance import DEFAULT_MAX_M, DEFAULT_THRESHOLD_FRAC, VEstimate, estimate_covariance, v_hat
from cspr.numerics import NotPositiveDefinite, chi2_sf, solve_spd
from cspr.sequence_io import Sequence, gc_content

DF = 5
MIN_TEST_LENGTH = 100

Status = Literal["ok", "singular-covariance"]


@dataclass(frozen=True)
class TestConfig:
    __test__ = False

    alpha: float = 0.01
    max_m: int = DEFAULT_MAX_M
    threshold_frac: float = DEFAULT_THRESHOLD_FRAC
    min_length: int = MIN_TEST_LENGTH

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.max_m < 1:
            raise ValueError(f"max_m must be >= 1, got {self.max_m}")
        if not self.threshold_frac > 0:
            raise ValueError(f"threshold_frac must be > 0, got {self.threshold_frac}")


@dataclass(frozen=True)
class TestReport:
    __test__ = False

    id: str
    n: int
    eta: float | None
    p_value: float | None
    m_used: int
    truncated_at_cap: bool
    status: Status
    gc: float
    skipped_positions: int
    alpha: float
    f: tuple[float, ...] = field(default=(), compare=False)

    @property
    def reject(self) -> bool:
        """Unadjusted decision at the report's ``alpha``."""
        return self.p_value is not None and self.p_value <= self.alpha

    def to_dict(self) -> dict:
        d = asdict(self)
        d["f"] = list(self.f)
        return d


@dataclass(frozen=True)
class BatchDecision:
    alpha: float
    reports: list[TestReport]
    adjusted_reject: list[bool]

    @property
    def counts(self) -> dict[str, int]:
        ok = [r for r in self.reports if r.status == "ok"]
        rejected = sum(self.adjusted_reject)
        return {
            "tested": len(self.reports),
            "accepted": len(ok) - rejected,
            "rejected": rejected,
            "singular": len(self.reports) - len(ok),
        }


def eta_statistic(f: FVector | np.ndarray, v: VEstimate | np.ndarray, n: int) -> float:
    """``n * f' V^{-1} f``; raises :class:`NotPositiveDefinite` for a singular ``V``."""
    fv = np.asarray(f.values if isinstance(f, FVector) else f, dtype=float)
    vm = v.matrix if isinstance(v, VEstimate) else np.asarray(v, dtype=float)
    x = solve_spd(vm, fv)
    return max(float(n * (fv @ x)), 0.0)


def run_test(s: Sequence, config: TestConfig | None = None) -> TestReport:
    """Run the full test on one sequence, treated as circular."""
    config = config or TestConfig()
    if len(s) < config.min_length:
        raise ValueError(
            f"sequence {s.id!r} has length {len(s)}; the chi-square approximation needs >= {config.min_length}"
        )
    circ = s if s.topology == "circular" else Sequence(s.id, s.bases, "circular", s.skipped_positions)
    fv = f_vector(count_pairs(circ))
    sig = estimate_covariance(circ, max_m=config.max_m, threshold_frac=config.threshold_frac)
    common = dict(
        id=s.id,
        n=fv.n,
        m_used=sig.m_used,
        truncated_at_cap=sig.truncated_at_cap,
        gc=gc_content(s),
        skipped_positions=s.skipped_positions,
        alpha=config.alpha,
        f=tuple(float(x) for x in fv.values),
    )
    try:
        eta = eta_statistic(fv, v_hat(sig), fv.n)
    except NotPositiveDefinite:
        return TestReport(eta=None, p_value=None, status="singular-covariance", **common)
    return TestReport(eta=eta, p_value=chi2_sf(eta, DF), status="ok", **common)


def holm_bonferroni(p_values: Seq[float | None], alpha: float) -> list[bool]:
    """Holm's step-down procedure.

    ``None`` (or NaN) entries are left out of the family size and never rejected.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    valid = [(p, i) for i, p in enumerate(p_values) if p is not None and not math.isnan(p)]
    valid.sort()
    family = len(valid)
    flags = [False] * len(p_values)
    for rank, (p, i) in enumerate(valid):
        if p > alpha / (family - rank):
            break
        flags[i] = True
    return flags


def run_batch(sequences: Iterable[Sequence], config: TestConfig | None = None, workers: int = 1) -> BatchDecision:
    """Test every sequence and apply Holm-Bonferroni across the whole batch.

    Reports come back in input order regardless of ``workers``.
    """
    config = config or TestConfig()
    seqs = list(sequences)
    if workers > 1 and len(seqs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(partial(run_test, config=config), seqs))
    else:
        reports = [run_test(s, config) for s in seqs]
    flags = holm_bonferroni([r.p_value for r in reports], config.alpha)
    return BatchDecision(alpha=config.alpha, reports=reports, adjusted_reject=flags)
