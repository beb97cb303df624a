"""Small dense SPD solves and chi-square distribution functions."""

from __future__ import annotations

import math

import numpy as np

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Cholesky pivot fell at or below the positive-definiteness tolerance."""

    def __init__(self, pivot_index: int, pivot_value: float, tolerance: float):
        super().__init__(
            f"matrix is not positive definite: pivot {pivot_index} = {pivot_value:.3e} <= {tolerance:.3e}"
        )
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        self.tolerance = tolerance


def sym(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return (m + m.T) / 2.0


def cholesky(m: np.ndarray, pd_tolerance: float | None = None) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    A pivot ``d`` fails when ``d <= pd_tolerance``; the default tolerance is
    ``1e-12 * max(diag(m))``.
    """
    a = np.array(m, dtype=float)
    k = a.shape[0]
    if a.shape != (k, k):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if pd_tolerance is None:
        pd_tolerance = 1e-12 * max(float(np.max(np.diag(a))), 0.0) if k else 0.0
    low = np.zeros_like(a)
    for j in range(k):
        d = a[j, j] - low[j, :j] @ low[j, :j]
        if not d > pd_tolerance:
            raise NotPositiveDefinite(j, float(d), pd_tolerance)
        low[j, j] = math.sqrt(d)
        low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
    return low


def solve_spd(m: np.ndarray, b: np.ndarray, pd_tolerance: float | None = None) -> np.ndarray:
    """Solve ``m x = b`` for symmetric positive-definite ``m`` by Cholesky."""
    low = cholesky(sym(m), pd_tolerance)
    b = np.asarray(b, dtype=float)
    k = low.shape[0]
    y = np.empty(k)
    for i in range(k):
        y[i] = (b[i] - low[i, :i] @ y[:i]) / low[i, i]
    x = np.empty(k)
    for i in reversed(range(k)):
        x[i] = (y[i] - low[i + 1 :, i] @ x[i + 1 :]) / low[i, i]
    return x


def _gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)`` by its power series."""
    if x == 0.0:
        return 0.0
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x)`` by Lentz's continued fraction."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def _check_df(df: float) -> float:
    df = float(df)
    if not df > 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    return df


def chi2_cdf(x: float, df: float = 5) -> float:
    df = _check_df(df)
    if x < 0 or math.isnan(x):
        raise ValueError(f"chi-square argument must be >= 0, got {x}")
    if math.isinf(x):
        return 1.0
    a, hx = df / 2.0, x / 2.0
    if hx < a + 1.0:
        return _gamma_series(a, hx)
    return 1.0 - _gamma_cf(a, hx)


def chi2_sf(x: float, df: float = 5) -> float:
    """Upper tail ``1 - chi2_cdf(x, df)``, accurate far into the tail."""
    df = _check_df(df)
    if x < 0 or math.isnan(x):
        raise ValueError(f"chi-square argument must be >= 0, got {x}")
    if math.isinf(x):
        return 0.0
    a, hx = df / 2.0, x / 2.0
    if hx < a + 1.0:
        return 1.0 - _gamma_series(a, hx)
    return _gamma_cf(a, hx)


def chi2_pdf(x: float, df: float = 5) -> float:
    df = _check_df(df)
    if x <= 0:
        return 0.0 if (x < 0 or df > 2) else (0.5 if df == 2 else math.inf)
    a = df / 2.0
    return math.exp((a - 1.0) * math.log(x) - x / 2.0 - a * math.log(2.0) - math.lgamma(a))


def chi2_quantile(p: float, df: float = 5, tol: float = 1e-12) -> float:
    """Inverse of :func:`chi2_cdf` by bracketed Newton iteration.

    Newton steps that leave the current bracket fall back to bisection. Upper
    quantiles are solved on the survival function to keep relative accuracy.
    """
    df = _check_df(df)
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    upper = p > 0.5
    target = 1.0 - p if upper else p
    lo, hi = 0.0, max(df, 1.0)
    while chi2_cdf(hi, df) < p:
        lo, hi = hi, 2.0 * hi
    x = 0.5 * (lo + hi)
    tol = tol * target
    for _ in range(200):
        # err > 0 means x lies above the quantile
        err = target - chi2_sf(x, df) if upper else chi2_cdf(x, df) - target
        if abs(err) <= tol:
            return x
        if err > 0:
            hi = x
        else:
            lo = x
        dens = chi2_pdf(x, df)
        step = x - err / dens if dens > 0 else math.nan
        x = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4 * _EPS * hi:
            break
    return x
