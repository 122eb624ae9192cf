"""Special functions and a scalar optimizer used by the fading and rate modules.

Everything here is vectorized over its array argument and written without
scipy.special so the distribution code has no hidden numerical dependency.
"""

import functools
import math

import numpy as np

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 2000


def _gamma_series(s, x):
    """Lower regularized P(s, x) by its power series; accurate for x < s + 1."""
    term = np.full_like(x, 1.0 / s)
    total = term.copy()
    denom = s
    for _ in range(_MAX_ITER):
        denom += 1.0
        term = term * x / denom
        total += term
        if np.all(np.abs(term) <= np.abs(total) * _EPS):
            break
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    return np.exp(-x + s * logx - math.lgamma(s)) * total


def _gamma_cfrac(s, x):
    """Upper regularized Q(s, x) by modified Lentz continued fraction; x >= s + 1."""
    b = x + 1.0 - s
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= _EPS):
            break
    return np.exp(-x + s * np.log(x) - math.lgamma(s)) * h


def gammainc_pair(s, x):
    """Return ``(P(s, x), Q(s, x))``, the regularized incomplete gamma functions.

    The series is used below ``x = s + 1`` and the continued fraction above,
    so whichever of P and Q is the small one keeps full relative accuracy.
    """
    if s <= 0:
        raise ValueError("shape must be positive")
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    lower = np.zeros_like(flat)
    upper = np.ones_like(flat)
    pos = flat > 0
    use_series = pos & (flat < s + 1.0)
    use_cf = pos & ~use_series
    if np.any(use_series):
        p = _gamma_series(s, flat[use_series])
        lower[use_series] = p
        upper[use_series] = 1.0 - p
    if np.any(use_cf):
        q = _gamma_cfrac(s, flat[use_cf])
        upper[use_cf] = q
        lower[use_cf] = 1.0 - q
    inf = np.isinf(flat)
    lower[inf], upper[inf] = 1.0, 0.0
    return lower.reshape(x.shape), upper.reshape(x.shape)


@functools.lru_cache(maxsize=64)
def _log_factorials(count):
    return np.array([math.lgamma(v + 1.0) for v in range(count)])


@functools.lru_cache(maxsize=64)
def _poisson_weights(mean, count):
    """``(Pr[Poisson <= j - 1], Pr[Poisson >= j])`` for j = 0..count-1."""
    j = np.arange(count + 60, dtype=float)
    if mean == 0:
        pmf = np.zeros_like(j)
        pmf[0] = 1.0
    else:
        pmf = np.exp(-mean + j * math.log(mean) - _log_factorials(count + 60))
    upper = np.cumsum(pmf[::-1])[::-1][:count]
    lower = np.concatenate(([0.0], np.cumsum(pmf)[: count - 1]))
    return lower, upper


def _marcum_chunk(k_factor, y):
    ymax = float(y.max())
    count = int(ymax + 2.0 * math.sqrt(ymax * max(k_factor, 1.0)) + k_factor
                + 12.0 * math.sqrt(ymax + k_factor + 1.0) + 80)
    j = np.arange(count, dtype=float)
    pois = np.exp(-y[:, None] + j[None, :] * np.log(y)[:, None]
                  - _log_factorials(count)[None, :])
    lower_w, upper_w = _poisson_weights(k_factor, count)
    small_y = y <= k_factor + 1.0
    weights = np.where(small_y[:, None], lower_w[None, :], upper_w[None, :])
    total = _truncated_sum(pois * weights)
    return np.where(small_y, total, 1.0 - total), np.where(small_y, 1.0 - total, total)


def marcum_q1_pair(k_factor, y):
    """Return ``(1 - Q1, Q1)`` at ``Q1(sqrt(2 K), sqrt(2 y))``.

    Uses the Poisson-weighted series of the first-order Marcum Q function,

        Q1 = sum_{j>=0} e^{-y} y^j / j! * Pr[Poisson(K) >= j],
        1 - Q1 = sum_{j>=1} e^{-y} y^j / j! * Pr[Poisson(K) <= j - 1],

    which is the modified-Bessel series regrouped into nonnegative terms. The
    lower series is summed for ``y <= K + 1`` and the upper one otherwise, so
    the smaller of the two returned values keeps relative accuracy.
    """
    y = np.asarray(y, dtype=float)
    flat = np.atleast_1d(y).ravel()
    cdf = np.zeros_like(flat)
    sf = np.ones_like(flat)
    # Q1(a, b) <= exp(-(b - a)^2 / 2) for b > a; beyond this Q1 underflows.
    beyond = flat > (math.sqrt(k_factor) + 27.5) ** 2
    cdf[beyond], sf[beyond] = 1.0, 0.0
    idx = np.flatnonzero((flat > 0) & ~beyond)
    idx = idx[np.argsort(flat[idx], kind="stable")]
    for start in range(0, idx.size, 256):
        part = idx[start:start + 256]
        cdf[part], sf[part] = _marcum_chunk(k_factor, flat[part])
    return cdf.reshape(y.shape), sf.reshape(y.shape)


def _truncated_sum(terms):
    total = terms.sum(axis=1)
    # Relative tail bound: the trailing terms must be negligible, otherwise
    # the term count was too small.
    tail = terms[:, -20:].sum(axis=1)
    if np.any(tail > 1e-12 * np.maximum(total, _TINY)):
        raise ArithmeticError("Marcum Q series did not converge")
    return total


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol=1e-6, maximize=False):
    """Golden-section search on ``[lo, hi]``; returns ``(x, f(x))``.

    Assumes ``f`` is unimodal on the bracket. The returned point is the best
    of the final bracket midpoint and the two endpoints.
    """
    sign = -1.0 if maximize else 1.0
    g = lambda x: sign * f(x)  # noqa: E731
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc <= gd:
            b, d, gd = d, c, gc
            c = b - _INV_PHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INV_PHI * (b - a)
            gd = g(d)
    mid = 0.5 * (a + b)
    best_x, best_g = mid, g(mid)
    for x in (float(lo), float(hi)):
        gx = g(x)
        if gx < best_g:
            best_x, best_g = x, gx
    return best_x, sign * best_g
