"""Ergodic dirty-paper rates when the fading gain is known only at the decoder.

All rates are in nats per channel use. The noise power is normalized to 1,
so the signal power is ``P = snr`` and the interference power ``Q = ipr * snr``.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._special import golden_section
from .errors import DivergenceError, DomainError
from .expectation import DEFAULT_ENGINE
from .fading import DIVERGENT, FadingModel, _Divergent

__all__ = [
    "ChannelConfig",
    "DpcParams",
    "GaussianSystem",
    "HighSnrExpansion",
    "LowSnrExpansion",
    "OptimalAlpha",
    "GapBoundMax",
    "capacity_known_interference",
    "costa_capacity",
    "dpc_integrand",
    "expand_high_snr",
    "expand_low_snr",
    "gap",
    "gap_bound",
    "gap_bound_max",
    "optimal_alpha",
    "rate_dpc",
    "rate_general",
    "rate_integrand",
    "rate_via_mi_oracle",
]


@dataclass(frozen=True)
class ChannelConfig:
    """SNR ``rho = P/N`` and interference-to-power ratio ``beta = Q/P`` (linear).

    ``ipr`` may be ``math.inf``; only :func:`gap_bound` is meaningful then.
    """

    snr: float
    ipr: float = 1.0

    def __post_init__(self):
        if not (self.snr > 0 and math.isfinite(self.snr)):
            raise DomainError(f"snr must be positive and finite, got {self.snr}")
        if not self.ipr >= 0:
            raise DomainError(f"ipr must be >= 0, got {self.ipr}")

    @property
    def powers(self):
        """``(P, Q, N)`` with ``N = 1``."""
        return self.snr, self.ipr * self.snr, 1.0

    def require_finite_ipr(self):
        if math.isinf(self.ipr):
            raise DomainError("this operation needs a finite interference-to-power ratio")


@dataclass(frozen=True)
class DpcParams:
    """Inflation factor ``alpha`` of the auxiliary variable ``U = X + alpha S``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")


def costa_capacity(snr: float) -> float:
    """Capacity ``log(1 + snr)`` of the unfaded dirty-paper channel."""
    if not snr > 0:
        raise DomainError("snr must be positive")
    return math.log1p(snr)


def rate_integrand(cfg: ChannelConfig, alpha: float, a):
    """Rate achieved at gain ``a`` by DPC with inflation factor ``alpha`` (unclamped)."""
    cfg.require_finite_ipr()
    p, q, n = cfg.powers
    a = np.asarray(a, dtype=float)
    num = p * (a * (p + q) + n)
    den = (1.0 - alpha) ** 2 * a * p * q + (p + alpha * alpha * q) * n
    return np.log(num / den)


def dpc_integrand(cfg: ChannelConfig, a):
    """:func:`rate_integrand` at Costa's ``alpha = rho/(1 + rho)``, in closed form."""
    cfg.require_finite_ipr()
    rho, beta = cfg.snr, cfg.ipr
    a = np.asarray(a, dtype=float)
    num = (rho + 1.0) ** 2 * ((1.0 + beta) * a * rho + 1.0)
    den = (beta + 1.0) * rho * rho + (beta * a + 2.0) * rho + 1.0
    return np.log(num / den)


def rate_general(cfg, params: DpcParams, model: FadingModel, engine=DEFAULT_ENGINE) -> float:
    """Ergodic rate of DPC with a fixed inflation factor ``params.alpha``."""
    cfg.require_finite_ipr()
    alpha = params.alpha
    return engine.expect(model, lambda a: rate_integrand(cfg, alpha, a), "rate_general").value


def rate_dpc(cfg, model: FadingModel, engine=DEFAULT_ENGINE) -> float:
    """Ergodic rate of DPC precoded for the average SNR, ``alpha = rho/(1 + rho)``."""
    cfg.require_finite_ipr()
    return engine.expect(model, lambda a: dpc_integrand(cfg, a), "rate_dpc").value


def capacity_known_interference(cfg, model: FadingModel, engine=DEFAULT_ENGINE) -> float:
    """Capacity ``E[log(1 + A rho)]`` when the decoder also knows the interference."""
    rho = cfg.snr
    return engine.expect(model, lambda a: np.log1p(a * rho), "log(1+A*rho)").value


def gap(cfg, model: FadingModel, engine=DEFAULT_ENGINE) -> float:
    """Rate loss of average-SNR DPC against :func:`capacity_known_interference`.

    Evaluated as a single expectation of the log-ratio so the result is not
    the difference of two separately rounded integrals.
    """
    cfg.require_finite_ipr()
    rho = cfg.snr

    def loss(a):
        return np.log1p(a * rho) - dpc_integrand(cfg, a)

    return engine.expect(model, loss, "gap").value


def gap_bound(snr: float, model: FadingModel, engine=DEFAULT_ENGINE) -> float:
    """Upper bound on :func:`gap` over all interference powers (the ``beta -> inf`` limit).

    ``E[log(rho + 1/A)]`` is integrated directly; it is finite whenever
    ``E[|log A|]`` is, even if ``E[1/A]`` diverges.
    """
    if not snr > 0:
        raise DomainError("snr must be positive")
    rho = snr
    offset = 2.0 * math.log1p(rho)

    def bound(a):
        return np.log(rho + a) + np.log(rho + 1.0 / a) - offset

    return engine.expect(model, bound, "gap_bound").value


@dataclass(frozen=True)
class GapBoundMax:
    max_value: float
    argmax_snr: float


def gap_bound_max(model: FadingModel, snr_grid, engine=DEFAULT_ENGINE) -> GapBoundMax:
    """Largest :func:`gap_bound` over an ascending grid of linear SNRs."""
    grid = np.asarray(snr_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("SNR grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("SNR grid must be strictly ascending")
    values = np.array([gap_bound(float(rho), model, engine) for rho in grid])
    i = int(np.argmax(values))
    return GapBoundMax(float(values[i]), float(grid[i]))


@dataclass(frozen=True)
class OptimalAlpha:
    alpha_star: float
    rate: float


def optimal_alpha(cfg, model: FadingModel, engine=DEFAULT_ENGINE, tol=1e-6) -> OptimalAlpha:
    """Maximize :func:`rate_general` over ``alpha`` in [0, 1] by golden-section search.

    Costa's ``rho/(1 + rho)`` is always a candidate, so the result is never
    below :func:`rate_dpc`.
    """
    cfg.require_finite_ipr()

    def objective(alpha):
        return rate_general(cfg, DpcParams(alpha), model, engine)

    alpha, best = golden_section(objective, 0.0, 1.0, tol=tol, maximize=True)
    costa = cfg.snr / (1.0 + cfg.snr)
    costa_rate = objective(costa)
    if costa_rate > best:
        alpha, best = costa, costa_rate
    return OptimalAlpha(alpha, best)


@dataclass(frozen=True)
class HighSnrExpansion:
    """``rate ~ log(rho) + constant_term + coeff / rho`` as ``rho -> inf``.

    The ``1/rho`` coefficients are :data:`DIVERGENT` when ``E[1/A]`` is
    infinite; the expansion then has fractional-order terms that are not
    computed here.
    """

    constant_term: Union[float, _Divergent]
    rate_coeff: Union[float, _Divergent]
    capacity_coeff: Union[float, _Divergent]


def expand_high_snr(cfg, model: FadingModel) -> HighSnrExpansion:
    cfg.require_finite_ipr()
    mom = model.moments()
    beta = cfg.ipr
    inv = mom.mean_inverse
    if inv is DIVERGENT:
        return HighSnrExpansion(mom.mean_log, DIVERGENT, DIVERGENT)
    return HighSnrExpansion(mom.mean_log, (beta + inv) / (beta + 1.0), inv)


@dataclass(frozen=True)
class LowSnrExpansion:
    """``rate ~ linear_coeff * rho + quadratic_coeff * rho^2`` as ``rho -> 0``."""

    linear_coeff: float
    quadratic_coeff_R: float
    quadratic_coeff_C: float


def expand_low_snr(cfg, model: FadingModel) -> LowSnrExpansion:
    """Second-order small-SNR expansions of :func:`rate_dpc` and the known-interference capacity.

    Both quadratic coefficients carry the factor 1/2 from
    ``log(1 + x) = x - x^2/2 + ...``.
    """
    cfg.require_finite_ipr()
    second = model.moments().second_moment
    if not math.isfinite(second):
        raise DivergenceError(f"E[A^2] is not finite under {model.label}")
    beta = cfg.ipr
    return LowSnrExpansion(
        1.0,
        -0.5 * ((2.0 * beta + 1.0) * second - 2.0 * beta),
        -0.5 * second,
    )


@dataclass(frozen=True, eq=False)
class GaussianSystem:
    """Covariance of the jointly Gaussian triple ``(U, S, Y)`` given ``A = a``.

    Built from ``U = X + alpha S`` and ``Y = sqrt(a) (X + S) + Z`` with
    independent ``X ~ CN(0, P)``, ``S ~ CN(0, Q)``, ``Z ~ CN(0, N)``.
    """

    covariance: np.ndarray

    U, S, Y = 0, 1, 2

    @classmethod
    def build(cls, cfg: ChannelConfig, alpha: float, a: float) -> "GaussianSystem":
        p, q, n = cfg.powers
        r = math.sqrt(a)
        mix = np.array([[1.0, alpha, 0.0], [0.0, 1.0, 0.0], [r, r, 1.0]])
        cov = mix @ np.diag([p, q, n]) @ mix.T
        return cls(cov)

    def mutual_information(self, i: int, j: int) -> float:
        """``I(V_i; V_j)`` for circularly symmetric complex Gaussians, in nats.

        Equals ``-log(1 - |corr|^2)``; zero if either variable is degenerate.
        """
        c = self.covariance
        vv = c[i, i] * c[j, j]
        if vv == 0:
            return 0.0
        return math.log(vv / (vv - c[i, j] ** 2))


def rate_via_mi_oracle(cfg: ChannelConfig, params: DpcParams, a: float) -> float:
    """``I(U; Y | A = a) - I(U; S)`` computed from the covariance matrix.

    An independent check on :func:`rate_integrand`.
    """
    cfg.require_finite_ipr()
    if a < 0:
        raise DomainError("gain must be nonnegative")
    system = GaussianSystem.build(cfg, params.alpha, a)
    g = GaussianSystem
    return system.mutual_information(g.U, g.Y) - system.mutual_information(g.U, g.S)
