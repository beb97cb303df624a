"""Compiled inner loops for the samplers."""

import numba
import numpy as np


@numba.njit(cache=True)
def markov_walk(first: int, cum_p: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Walk a 4-state chain from ``first``; ``u`` supplies one uniform per step."""
    n = u.shape[0] + 1
    x = np.empty(n, dtype=np.uint8)
    x[0] = first
    s = first
    for t in range(n - 1):
        r = u[t]
        a = 0
        while a < 3 and r >= cum_p[s, a]:
            a += 1
        x[t + 1] = a
        s = a
    return x


@numba.njit(cache=True)
def heat_bath_sweep(x: np.ndarray, cum_cond: np.ndarray, offsets: np.ndarray, u: np.ndarray) -> None:
    """One in-place index-order sweep of single-site heat-bath updates.

    ``cum_cond[c]`` is the cumulative conditional law of a site given the
    neighbour context ``c``, whose base-4 digits are the bases at ``offsets``
    (most significant first), indices taken mod ``len(x)``.
    """
    n = x.shape[0]
    w = offsets.shape[0]
    for i in range(n):
        c = 0
        for o in range(w):
            j = i + offsets[o]
            if j < 0:
                j += n
            elif j >= n:
                j -= n
            c = 4 * c + x[j]
        r = u[i]
        a = 0
        while a < 3 and r >= cum_cond[c, a]:
            a += 1
        x[i] = a
