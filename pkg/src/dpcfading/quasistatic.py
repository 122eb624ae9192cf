"""Outage behaviour of dirty-paper coding over quasi-static fading.

The gain A is drawn once per block. For a fixed inflation factor the
conditional rate ``J(alpha, a)`` is increasing in ``a``, so every outage
event ``{J <= R}`` is a threshold event ``{A <= t}`` and its probability is
one CDF evaluation.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ergodic import ChannelConfig, rate_integrand
from .errors import DomainError
from .fading import FadingModel

__all__ = [
    "OutageSpec",
    "conditional_rate",
    "dpc_alpha_for_gain",
    "min_outage_probability",
    "optimal_alpha_outage",
    "outage_probability",
    "outage_threshold",
    "rate_cdf",
    "virtual_snr",
]


@dataclass(frozen=True)
class OutageSpec:
    """Target rate in nats per use and, for broadcast users, a target outage level."""

    target_rate: float
    target_eps: Optional[float] = None

    def __post_init__(self):
        if not (self.target_rate >= 0 and math.isfinite(self.target_rate)):
            raise DomainError(f"target rate must be finite and >= 0, got {self.target_rate}")
        if self.target_eps is not None and not 0 < self.target_eps < 1:
            raise DomainError(f"target outage must lie in (0, 1), got {self.target_eps}")


def conditional_rate(cfg: ChannelConfig, alpha: float, a, clamp: bool = True):
    """Rate ``J(alpha, a)`` supported when the gain is realized at ``a``.

    With ``clamp`` the rate is floored at zero: a negative rate is
    operationally the same as not transmitting.
    """
    _check_alpha(alpha)
    j = rate_integrand(cfg, alpha, a)
    if clamp:
        j = np.maximum(j, 0.0)
    return float(j) if np.ndim(a) == 0 else j


def dpc_alpha_for_gain(snr: float, a: float) -> float:
    """Inflation factor ``a rho/(a rho + 1)`` that maximizes ``J(., a)``."""
    if math.isinf(a):
        return 1.0
    x = a * snr
    return x / (x + 1.0)


def outage_threshold(cfg: ChannelConfig, alpha: float, rate: float) -> float:
    """Gain ``t`` with ``{J(alpha, A) <= rate} = {A <= t}``.

    Returns ``inf`` when ``rate`` is at or above the supremum of ``J`` over
    all gains, ``log((P + Q) / ((1 - alpha)^2 Q))``.
    """
    cfg.require_finite_ipr()
    p, q, n = cfg.powers
    g = math.exp(rate)
    em1 = math.expm1(rate)
    den = p * (p + q - (1.0 - alpha) ** 2 * g * q)
    if den <= 0:
        return math.inf
    return (em1 * p * n + alpha * alpha * g * q * n) / den


def outage_probability(cfg: ChannelConfig, alpha: float, spec: OutageSpec, model: FadingModel) -> float:
    """Probability that the clamped rate ``J(alpha, A)`` cannot carry ``spec.target_rate``.

    A zero target is never in outage.
    """
    _check_alpha(alpha)
    rate = spec.target_rate
    if rate == 0:
        return 0.0
    t = outage_threshold(cfg, alpha, rate)
    if math.isinf(t):
        return 1.0
    return model.cdf(max(t, 0.0))


def virtual_snr(rate: float) -> float:
    """SNR at which an unfaded channel supports exactly ``rate``."""
    return math.expm1(rate)


def optimal_alpha_outage(spec: OutageSpec) -> float:
    """Outage-minimizing inflation factor ``1 - exp(-R)``."""
    return -math.expm1(-spec.target_rate)


def min_outage_probability(cfg: ChannelConfig, spec: OutageSpec, model: FadingModel) -> float:
    """Outage at the optimal inflation factor, ``Pr[A <= (e^R - 1)/rho]``.

    Identical to the outage with no interference at all, for every ``ipr``.
    """
    return model.cdf(virtual_snr(spec.target_rate) / cfg.snr)


def rate_cdf(cfg: ChannelConfig, alpha: float, model: FadingModel, rate_grid, clamp: bool = True):
    """``Pr[J(alpha, A) <= r]`` for each ``r`` in ``rate_grid``, from the model CDF.

    With ``clamp`` the value at ``r = 0`` includes the atom ``Pr[J <= 0]``.
    Returns an array aligned with ``rate_grid``.
    """
    _check_alpha(alpha)
    grid = np.asarray(rate_grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise DomainError("rate grid must be sorted ascending")
    if clamp and np.any(grid < 0):
        raise DomainError("clamped rates are nonnegative; grid must be >= 0")
    out = np.empty(grid.shape)
    for i, r in enumerate(grid):
        t = outage_threshold(cfg, alpha, float(r))
        if math.isinf(t):
            out[i] = 1.0
        elif t < 0:
            out[i] = 0.0
        else:
            out[i] = model.cdf(t)
    return out


def _check_alpha(alpha):
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
