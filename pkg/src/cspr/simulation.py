"""Samplers for sequences of known parity status.

Two model families are provided: order-1 Markov chains built from a joint
dinucleotide law, and Markov random fields on the circle whose energy is a sum
of clique tables ``psi_j`` over windows of ``j`` adjacent sites. Both draw
their randomness from ``numpy.random.default_rng(seed)`` (PCG64); replicate
``r`` of an experiment with base seed ``s`` uses seed ``s + r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from cspr import _kernels
from cspr.counting import RC_PAIR, pair_index
from cspr.sequence_io import Sequence

_ROW_TOL = 1e-12
_COMPLIANT_TOL = 1e-10


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Left Perron vector of a row-stochastic matrix, normalised to sum 1."""
    k = P.shape[0]
    system = np.vstack([P.T - np.eye(k), np.ones(k)])
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def rc_joint(q: np.ndarray) -> np.ndarray:
    """``q(rc(a,b))`` laid out as a 4x4 array, i.e. ``q(G(b), G(a))``."""
    return np.asarray(q, dtype=float).reshape(16)[RC_PAIR].reshape(4, 4)


def is_compliant_joint(q: np.ndarray, tol: float = _COMPLIANT_TOL) -> bool:
    return bool(np.max(np.abs(q - rc_joint(q))) <= tol)


@dataclass(frozen=True)
class MarkovModel:
    pi: np.ndarray
    P: np.ndarray
    compliant: bool

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        if P.shape != (4, 4) or pi.shape != (4,):
            raise ValueError("expected a 4-vector pi and a 4x4 transition matrix")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > _ROW_TOL):
            raise ValueError("transition matrix rows must be non-negative and sum to 1")
        if np.any(pi < 0) or abs(pi.sum() - 1.0) > _ROW_TOL:
            raise ValueError("initial distribution must be a probability vector")
        if self.compliant and not is_compliant_joint(self.stationary_joint()):
            raise ValueError("model declared compliant but its stationary joint is not rc-symmetric")

    def stationary_joint(self) -> np.ndarray:
        return stationary_distribution(self.P)[:, None] * self.P


def model_from_joint(q: np.ndarray, compliant: bool) -> MarkovModel:
    """Chain with ``P(a,b) = q(a,b) / sum_c q(a,c)`` started from its stationary law."""
    q = np.asarray(q, dtype=float)
    rows = q.sum(axis=1)
    if np.any(rows <= 0):
        raise ValueError(f"degenerate joint: zero row for base {'ACGT'[int(np.argmin(rows))]}")
    P = q / rows[:, None]
    return MarkovModel(pi=stationary_distribution(P), P=P, compliant=compliant)


def symmetrize_joint(q: np.ndarray) -> MarkovModel:
    """Project a joint law onto rc-symmetric joints and return its Markov chain.

    ``q`` must have equal row and column marginals; the average with its
    reverse-complement keeps that property, so the result is the stationary
    joint of the returned chain.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (4, 4) or np.any(q < 0) or abs(q.sum() - 1.0) > 1e-9:
        raise ValueError("q must be a 4x4 probability table")
    if np.max(np.abs(q.sum(axis=0) - q.sum(axis=1))) > 1e-9:
        raise ValueError("q must have matching row and column marginals")
    sym = (q + rc_joint(q)) / 2.0
    return model_from_joint(sym, compliant=True)


def random_joint(rng: np.random.Generator, concentration: float = 1.0) -> np.ndarray:
    """Stationary joint of a chain with Dirichlet-distributed transition rows."""
    P = rng.dirichlet(np.full(4, concentration), size=4)
    return stationary_distribution(P)[:, None] * P


def perturb_joint(q: np.ndarray, epsilon: float, pair: str = "AC") -> MarkovModel:
    """Scale one non-palindromic cell of ``q`` by ``1 + epsilon`` and renormalise."""
    idx = pair_index(pair)
    if RC_PAIR[idx] == idx:
        raise ValueError(f"pair {pair!r} is its own reverse complement")
    q = np.array(q, dtype=float).reshape(16)
    q[idx] *= 1.0 + epsilon
    q /= q.sum()
    return model_from_joint(q.reshape(4, 4), compliant=epsilon == 0 and is_compliant_joint(q.reshape(4, 4)))


def sample_markov(model: MarkovModel, n: int, seed: int, id: str | None = None) -> Sequence:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    first = int(np.searchsorted(np.cumsum(model.pi), rng.random(), side="right"))
    first = min(first, 3)
    cum = np.cumsum(model.P, axis=1)
    x = _kernels.markov_walk(first, cum, rng.random(n - 1))
    return Sequence.from_codes(id or f"markov_seed{seed}", x)


def _rc_table(t: np.ndarray) -> np.ndarray:
    # complement every coordinate (a -> 3 - a), then reverse coordinate order
    return np.flip(t).T


@dataclass(frozen=True)
class CliqueEnergy:
    """Clique tables ``psi_1 .. psi_k``; ``tables[j-1]`` has shape ``(4,) * j``."""

    tables: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not 1 <= len(self.tables) <= 4:
            raise ValueError("maximal clique size must be between 1 and 4")
        for j, t in enumerate(self.tables, start=1):
            if np.shape(t) != (4,) * j:
                raise ValueError(f"psi_{j} must have shape {(4,) * j}, got {np.shape(t)}")
            if not np.all(np.isfinite(t)):
                raise ValueError(f"psi_{j} has non-finite entries")

    @property
    def k(self) -> int:
        return len(self.tables)

    @classmethod
    def zeros(cls, k: int) -> "CliqueEnergy":
        return cls(tuple(np.zeros((4,) * j) for j in range(1, k + 1)))

    @classmethod
    def random(cls, k: int, scale: float, seed: int) -> "CliqueEnergy":
        rng = np.random.default_rng(seed)
        return cls(tuple(rng.normal(0.0, scale, size=(4,) * j) for j in range(1, k + 1)))

    def energy(self, x: np.ndarray) -> float:
        """Total circular energy of the code array ``x``."""
        n = len(x)
        total = 0.0
        for j, t in enumerate(self.tables, start=1):
            idx = tuple(np.roll(x, -o) for o in range(j))
            total += float(t[idx].sum()) if n else 0.0
        return total


def is_energy_symmetric(e: CliqueEnergy) -> bool:
    return all(np.array_equal(t, _rc_table(t)) for t in e.tables)


def symmetrize_energy(e: CliqueEnergy) -> CliqueEnergy:
    return CliqueEnergy(tuple((t + _rc_table(t)) / 2.0 for t in e.tables))


def perturb_energy(e: CliqueEnergy, magnitude: float) -> CliqueEnergy:
    """Add ``magnitude`` to the all-A word of every clique table.

    The reverse complement of ``A...A`` is ``T...T``, so any non-zero
    magnitude breaks the symmetry of a symmetric energy.
    """
    tables = []
    for t in e.tables:
        t = np.array(t, dtype=float)
        t[(0,) * t.ndim] += magnitude
        tables.append(t)
    return CliqueEnergy(tuple(tables))


def _context_offsets(k: int) -> np.ndarray:
    return np.array([o for o in range(-(k - 1), k) if o != 0], dtype=np.int64)


def conditional_table(e: CliqueEnergy) -> np.ndarray:
    """Cumulative heat-bath law of a site for every neighbour context.

    Row ``c`` encodes the ``2k - 2`` neighbours at offsets ``-(k-1)..-1, 1..k-1``
    in base 4. The weight of base ``a`` is ``exp`` of the summed clique tables
    over every window containing the site.
    """
    k = e.k
    offsets = _context_offsets(k)
    n_ctx = 4 ** len(offsets)
    ctx = np.arange(n_ctx)
    digits = {}
    for pos, o in enumerate(offsets):
        digits[int(o)] = (ctx // 4 ** (len(offsets) - 1 - pos)) % 4
    energy = np.zeros((n_ctx, 4))
    for a in range(4):
        site = np.full(n_ctx, a)
        for j, t in enumerate(e.tables, start=1):
            for start in range(-(j - 1), 1):
                idx = tuple(site if o == 0 else digits[o] for o in range(start, start + j))
                energy[:, a] += t[idx]
    energy -= energy.max(axis=1, keepdims=True)
    w = np.exp(energy)
    cum = np.cumsum(w / w.sum(axis=1, keepdims=True), axis=1)
    cum[:, -1] = 1.0
    return cum


def _exact_sweep(x: np.ndarray, e: CliqueEnergy, u: np.ndarray) -> None:
    # short rings where windows through a site can revisit it
    for i in range(len(x)):
        w = np.empty(4)
        for a in range(4):
            x[i] = a
            w[a] = e.energy(x)
        w = np.exp(w - w.max())
        cum = np.cumsum(w / w.sum())
        x[i] = min(int(np.searchsorted(cum, u[i], side="right")), 3)


class GibbsSampler:
    """Heat-bath sampler for a circular MRF, advanced one sweep at a time.

    Site ``i`` is resampled from ``P(x_i = a | rest) ∝ exp(sum of psi_j over
    windows containing i)``, sites visited in index order. The start state is
    i.i.d. uniform unless ``init`` is given.
    """

    def __init__(self, e: CliqueEnergy, n: int, seed: int = 0, init: np.ndarray | None = None):
        if n < e.k:
            raise ValueError(f"n={n} is smaller than the clique size {e.k}")
        self.energy = e
        self.rng = np.random.default_rng(seed)
        if init is None:
            self.state = self.rng.integers(0, 4, size=n).astype(np.uint8)
        else:
            self.state = np.array(init, dtype=np.uint8)
            if self.state.shape != (n,):
                raise ValueError("init must have length n")
        self._fast = n >= 2 * e.k - 1
        if self._fast:
            self._cum = conditional_table(e)
            self._offsets = _context_offsets(e.k)

    def sweep(self, count: int = 1) -> np.ndarray:
        n = len(self.state)
        for _ in range(count):
            u = self.rng.random(n)
            if self._fast:
                _kernels.heat_bath_sweep(self.state, self._cum, self._offsets, u)
            else:
                _exact_sweep(self.state, self.energy, u)
        return self.state


def gibbs_sample_mrf(
    e: CliqueEnergy,
    n: int,
    sweeps: int = 50,
    seed: int = 0,
    id: str | None = None,
    init: np.ndarray | None = None,
) -> Sequence:
    """Circular MRF sample after ``sweeps`` index-order heat-bath sweeps."""
    if sweeps < 1:
        raise ValueError("at least one sweep is required")
    sampler = GibbsSampler(e, n, seed, init)
    return Sequence.from_codes(id or f"mrf_k{e.k}_seed{seed}", sampler.sweep(sweeps))


def kmer_frequencies(s: Sequence, k: int) -> np.ndarray:
    """Circular k-mer frequencies as an array of shape ``(4,) * k``."""
    x = s.codes.astype(np.int64)
    code = np.zeros(len(x), dtype=np.int64)
    for o in range(k):
        code = 4 * code + np.roll(x, -o)
    return (np.bincount(code, minlength=4**k) / len(x)).reshape((4,) * k)


def kmer_parity_report(s: Sequence, k_max: int = 3) -> dict[int, float]:
    """Largest ``|freq(w) - freq(rc(w))|`` over all words of each length ``k <= k_max``."""
    if not 1 <= k_max <= 6:
        raise ValueError("k_max must lie in 1..6")
    if len(s) < k_max:
        raise ValueError(f"sequence shorter than k_max={k_max}")
    report = {}
    for k in range(1, k_max + 1):
        freq = kmer_frequencies(s, k)
        report[k] = float(np.max(np.abs(freq - _rc_table(freq))))
    return report


def words(k: int) -> list[str]:
    return ["".join(w) for w in product("ACGT", repeat=k)]
