"""Dinucleotide counts, lagged pair counts and the parity-difference vector.

Dinucleotides are indexed ``4*a + b`` with base codes A=0, C=1, G=2, T=3, so
the reverse complement of pair index ``p = 4a + b`` is ``4(3-b) + (3-a)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from cspr.sequence_io import ALPHABET, Sequence

PAIRS: tuple[str, ...] = tuple(a + b for a, b in product(ALPHABET, repeat=2))
K_INDEX: tuple[tuple[str, str], ...] = (("A", "A"), ("A", "C"), ("A", "G"), ("C", "A"), ("C", "C"))
K_LABELS: tuple[str, ...] = tuple(a + b for a, b in K_INDEX)


def pair_index(pair: str | tuple[str, str]) -> int:
    a, b = pair
    return 4 * ALPHABET.index(a) + ALPHABET.index(b)


def _rc_pair_index(p: np.ndarray | int):
    a, b = np.divmod(p, 4)
    return 4 * (3 - b) + (3 - a)


# position of the reverse-complement pair, for all 16 pairs
RC_PAIR = np.array([_rc_pair_index(p) for p in range(16)], dtype=np.intp)
K_COLUMNS = np.array([pair_index(k) for k in K_INDEX], dtype=np.intp)


@dataclass(frozen=True)
class PairCounts:
    """Dinucleotide counts ``N_n(a,b)`` over ``n`` windows, as a length-16 vector."""

    n: int
    counts: np.ndarray

    def __getitem__(self, pair) -> int:
        return int(self.counts[pair_index(pair)])

    @property
    def matrix(self) -> np.ndarray:
        return self.counts.reshape(4, 4)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.n


@dataclass(frozen=True)
class LagPairCounts:
    """Quadruple counts ``N^{(i)}(a,b;c,d)`` at a fixed lag as a 16x16 table.

    Row index is the pair starting at ``j``, column index the pair starting at
    ``j + lag``.
    """

    lag: int
    n: int
    counts: np.ndarray

    def __getitem__(self, key) -> int:
        ab, cd = key
        return int(self.counts[pair_index(ab), pair_index(cd)])


@dataclass(frozen=True)
class FVector:
    values: np.ndarray
    n: int

    def as_dict(self) -> dict[str, float]:
        return dict(zip(K_LABELS, map(float, self.values)))


def pair_codes(s: Sequence, circular: bool | None = None) -> np.ndarray:
    """Dinucleotide index at every window start.

    Circular sequences yield ``len(s)`` windows (the last wraps to position 0),
    linear ones ``len(s) - 1``.
    """
    x = s.codes.astype(np.intp)
    if circular is None:
        circular = s.topology == "circular"
    if circular:
        return 4 * x + np.roll(x, -1)
    return 4 * x[:-1] + x[1:]


def count_pairs(s: Sequence) -> PairCounts:
    if len(s) < 2:
        raise ValueError("need at least 2 bases to count dinucleotides")
    codes = pair_codes(s)
    return PairCounts(n=len(codes), counts=np.bincount(codes, minlength=16).astype(np.int64))


def lag_counts_from_codes(codes: np.ndarray, lag: int, circular: bool = True) -> np.ndarray:
    """16x16 quadruple counts at ``lag`` from precomputed pair codes."""
    if circular:
        shifted = np.roll(codes, -(lag % len(codes))) if lag else codes
        quad = 16 * codes + shifted
    else:
        quad = 16 * codes[: len(codes) - lag] + codes[lag:]
    return np.bincount(quad, minlength=256).astype(np.int64).reshape(16, 16)


def count_lag_pairs(s: Sequence, i: int) -> LagPairCounts:
    """Count ``(X_j, X_{j+1}, X_{j+i}, X_{j+i+1})`` patterns.

    Circular sequences wrap indices mod ``len(s)`` so every one of the ``n``
    start positions contributes. Linear sequences only count quadruples that
    fit inside the sequence.
    """
    if len(s) < 2:
        raise ValueError("need at least 2 bases to count dinucleotides")
    if i < 0:
        raise ValueError(f"lag must be non-negative, got {i}")
    circular = s.topology == "circular"
    if not circular and i > len(s) - 2:
        raise ValueError(f"lag {i} too large for a linear sequence of length {len(s)}")
    codes = pair_codes(s)
    table = lag_counts_from_codes(codes, i, circular)
    return LagPairCounts(lag=i, n=int(table.sum()), counts=table)


def lambda_matrix() -> np.ndarray:
    """The 5x16 matrix mapping pair counts to ``n`` times the K-indexed f vector."""
    lam = np.zeros((5, 16))
    for row, col in enumerate(K_COLUMNS):
        lam[row, col] = 1.0
        lam[row, RC_PAIR[col]] = -1.0
    return lam


def f_full(pc: PairCounts) -> np.ndarray:
    """All 16 parity differences ``N(a,b)/n - N(rc(a,b))/n`` as a 4x4 array."""
    if pc.n < 1:
        raise ValueError("no dinucleotide windows")
    c = pc.counts
    return ((c - c[RC_PAIR]) / pc.n).reshape(4, 4)


def f_vector(pc: PairCounts) -> FVector:
    if pc.n < 1:
        raise ValueError("no dinucleotide windows")
    c = pc.counts
    # integer difference first, so each entry is a single correctly rounded division
    diff = c[K_COLUMNS] - c[RC_PAIR[K_COLUMNS]]
    return FVector(values=diff / pc.n, n=pc.n)
