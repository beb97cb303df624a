"""Truncated long-run covariance of dinucleotide frequencies.

The 16x16 estimate at truncation lag ``m`` is

    diag(p) - p p' + sum_{i=1..m} [C_i/n - p p'] + sum_{i=1..m} [C_i'/n - p p']

where ``p`` are the pair frequencies and ``C_i`` the lag-``i`` quadruple counts
of the circular sequence. All estimators here wrap the sequence end to its
start regardless of the declared topology.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from cspr.counting import K_COLUMNS, RC_PAIR, lag_counts_from_codes, pair_codes
from cspr.numerics import sym
from cspr.sequence_io import Sequence

DEFAULT_MAX_M = 1000
DEFAULT_THRESHOLD_FRAC = 0.01


class MSelection(NamedTuple):
    m: int
    truncated_at_cap: bool


@dataclass(frozen=True)
class SigmaEstimate:
    matrix: np.ndarray
    m_used: int
    truncated_at_cap: bool
    n: int
    frequencies: np.ndarray


@dataclass(frozen=True)
class VEstimate:
    matrix: np.ndarray
    source: SigmaEstimate


def _lag_condition(lag_table: np.ndarray, p: np.ndarray, n: int, threshold_frac: float) -> bool:
    lag_term = np.abs(np.diag(lag_table) / n - p * p)
    var = p - p * p
    # 0 * inf must read as 0 so that absent or constant pairs never block the rule
    bound = np.multiply(threshold_frac, var, out=np.zeros_like(var), where=var > 0)
    return bool(np.all(lag_term <= bound))


def _max_lag(n: int, max_m: int) -> int:
    return min(max_m, n - 2)


def _check_circular_length(s: Sequence, minimum: int) -> None:
    if len(s) < minimum:
        raise ValueError(f"sequence {s.id!r} of length {len(s)} is shorter than {minimum}")


def _estimate(codes: np.ndarray, m: int | None, max_m: int, threshold_frac: float) -> SigmaEstimate:
    n = len(codes)
    counts = np.bincount(codes, minlength=16).astype(np.int64)
    p = counts / n
    lag_sum = np.zeros((16, 16), dtype=np.int64)
    capped = False
    if m is None:
        cap = _max_lag(n, max_m)
        used = 0
        for i in range(1, cap + 1):
            table = lag_counts_from_codes(codes, i)
            lag_sum += table
            used = i
            if _lag_condition(table, p, n, threshold_frac):
                break
        else:
            capped = True
        m = used
    else:
        for i in range(1, m + 1):
            lag_sum += lag_counts_from_codes(codes, i)
    pp = np.outer(p, p)
    matrix = np.diag(p) - (1 + 2 * m) * pp + (lag_sum + lag_sum.T) / n
    return SigmaEstimate(matrix=sym(matrix), m_used=m, truncated_at_cap=capped, n=n, frequencies=p)


def select_m(
    s: Sequence, max_m: int = DEFAULT_MAX_M, threshold_frac: float = DEFAULT_THRESHOLD_FRAC
) -> MSelection:
    """Smallest lag whose self-pair lag covariances all fall under the threshold.

    At lag ``i`` every pair ``ab`` must satisfy
    ``|N_i(ab;ab)/n - p_ab^2| <= threshold_frac * (p_ab - p_ab^2)``. If no lag
    up to ``max_m`` qualifies, ``max_m`` is returned with the cap flag set.
    """
    _check_circular_length(s, 4)
    if max_m < 1:
        raise ValueError(f"max_m must be >= 1, got {max_m}")
    if not threshold_frac > 0:
        raise ValueError(f"threshold_frac must be > 0, got {threshold_frac}")
    codes = pair_codes(s, circular=True)
    n = len(codes)
    p = np.bincount(codes, minlength=16) / n
    cap = _max_lag(n, max_m)
    for i in range(1, cap + 1):
        if _lag_condition(lag_counts_from_codes(codes, i), p, n, threshold_frac):
            return MSelection(i, False)
    return MSelection(cap, True)


def sigma_hat(s: Sequence, m: int) -> SigmaEstimate:
    if not 0 <= m <= len(s) - 2:
        raise ValueError(f"lag m={m} outside 0..{len(s) - 2}")
    return _estimate(pair_codes(s, circular=True), m, m, DEFAULT_THRESHOLD_FRAC)


def estimate_covariance(
    s: Sequence,
    max_m: int = DEFAULT_MAX_M,
    threshold_frac: float = DEFAULT_THRESHOLD_FRAC,
) -> SigmaEstimate:
    """Adaptive-lag estimate in one pass over lags.

    Equivalent to ``sigma_hat(s, select_m(s, ...).m)`` but every lag table is
    counted once and reused for both the stopping rule and the sum.
    """
    _check_circular_length(s, 4)
    if max_m < 1:
        raise ValueError(f"max_m must be >= 1, got {max_m}")
    if not threshold_frac > 0:
        raise ValueError(f"threshold_frac must be > 0, got {threshold_frac}")
    return _estimate(pair_codes(s, circular=True), None, max_m, threshold_frac)


def v_from_sigma(sigma: np.ndarray) -> np.ndarray:
    """Covariance of the K-indexed parity differences from a 16x16 pair covariance.

    Entry ``(ab, cd)`` is ``S[ab,cd] + S[ab*,cd*] - S[ab*,cd] - S[ab,cd*]``
    where ``*`` is the reverse-complement pair.
    """
    k = K_COLUMNS
    kr = RC_PAIR[K_COLUMNS]
    v = (
        sigma[np.ix_(k, k)]
        + sigma[np.ix_(kr, kr)]
        - sigma[np.ix_(kr, k)]
        - sigma[np.ix_(k, kr)]
    )
    return sym(v)


def v_hat(sig: SigmaEstimate) -> VEstimate:
    return VEstimate(matrix=v_from_sigma(sig.matrix), source=sig)
