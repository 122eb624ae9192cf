"""Outage rate regions of the quasi-static fading broadcast channel without transmit CSI.

User ``k`` sees ``Y_k = sqrt(A_k) X + Z_k`` and tolerates outage probability
``eps_k``. Both schemes here reduce to an unfaded broadcast channel whose
gains are the outage quantiles ``G_k(eps_k)``:

* time division with power allocation (two users), and
* dirty-paper (superposition) coding with per-user power fractions
  ``gamma_k``, where each user pre-cancels the users encoded after it and
  treats the ones encoded before it as noise.

Rate vectors and power fractions are always indexed by user in the order
given in :class:`BroadcastConfig`; the encoding order is a separate
permutation that defaults to descending effective gain.
"""

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from ._special import golden_section
from .errors import DomainError, RegionSizeError, UnsupportedOperationError
from .fading import Constant, FadingModel

__all__ = [
    "BroadcastConfig",
    "DominanceResult",
    "PowerAllocation",
    "RegionBoundary",
    "TdParams",
    "dpc_outage_for_rates",
    "dpc_rate_point_k",
    "dpc_region",
    "effective_gains",
    "equivalent_unfaded_gains",
    "pareto_filter",
    "simplex_grid",
    "td_frontier_rate",
    "td_rate_point",
    "td_region",
    "unfaded_config",
    "verify_dominance",
]

MAX_REGION_POINTS = 10_000_000


@dataclass(frozen=True)
class BroadcastConfig:
    """Common SNR and one ``(fading model, target outage)`` pair per user.

    ``gain_scale`` multiplies each user's gain; it exists so an unfaded
    channel with arbitrary gains can be written with :class:`Constant`
    models. ``preserve_order`` encodes users in the given order instead of
    by descending effective gain.
    """

    snr: float
    users: Tuple[Tuple[FadingModel, float], ...]
    preserve_order: bool = False
    gain_scale: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "users", tuple((m, float(e)) for m, e in self.users))
        if not (self.snr > 0 and math.isfinite(self.snr)):
            raise DomainError(f"snr must be positive and finite, got {self.snr}")
        if not self.users:
            raise DomainError("need at least one user")
        for _, eps in self.users:
            if not 0 < eps < 1:
                raise DomainError(f"target outage must lie in (0, 1), got {eps}")
        if self.gain_scale is not None:
            scale = tuple(float(s) for s in self.gain_scale)
            if len(scale) != len(self.users) or any(not (s >= 0 and math.isfinite(s)) for s in scale):
                raise DomainError("gain_scale needs one finite nonnegative entry per user")
            object.__setattr__(self, "gain_scale", scale)

    @property
    def num_users(self) -> int:
        return len(self.users)

    @cached_property
    def _gains(self):
        g = np.array([model.icdf(eps) for model, eps in self.users])
        if self.gain_scale is not None:
            g = g * np.array(self.gain_scale)
        g.setflags(write=False)
        return g

    def gains(self) -> np.ndarray:
        """Effective gains ``G_k(eps_k)`` times ``gain_scale``, in user order."""
        return self._gains.copy()

    def encoding_order(self) -> np.ndarray:
        """User indices from first-encoded (pre-cancels everyone after) to last."""
        if self.preserve_order:
            return np.arange(self.num_users)
        return np.argsort(-self.gains(), kind="stable")


@dataclass(frozen=True)
class PowerAllocation:
    """Power fractions ``gamma_k`` per user, nonnegative and summing to one."""

    gamma: Tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(x) for x in self.gamma)
        if any(x < 0 for x in g) or abs(sum(g) - 1.0) > 1e-12:
            raise DomainError(f"power fractions must be >= 0 and sum to 1, got {g}")
        object.__setattr__(self, "gamma", g)


@dataclass(frozen=True)
class TdParams:
    """Time share ``mu`` of user 1 and power boosts ``eta = (eta1, eta2)``."""

    mu: float
    eta: Tuple[float, float]

    def __post_init__(self):
        eta1, eta2 = (float(x) for x in self.eta)
        if not 0 <= self.mu <= 1 or eta1 < 0 or eta2 < 0:
            raise DomainError("need mu in [0, 1] and nonnegative power boosts")
        if abs(self.mu * eta1 + (1 - self.mu) * eta2 - 1.0) > 1e-12:
            raise DomainError("average power constraint mu*eta1 + (1-mu)*eta2 = 1 violated")
        object.__setattr__(self, "eta", (eta1, eta2))


@dataclass(frozen=True, eq=False)
class RegionBoundary:
    """Pareto-filtered rate vectors with the sweep parameters that produced them.

    ``rates`` has shape ``(n, K)``; ``params`` has shape ``(n, len(param_names))``.
    """

    rates: np.ndarray
    params: np.ndarray
    param_names: Tuple[str, ...]
    scheme: str = field(default="")

    def __len__(self):
        return self.rates.shape[0]

    def points(self):
        """Iterate ``(rates, {name: value})`` pairs."""
        for r, p in zip(self.rates, self.params):
            yield r, dict(zip(self.param_names, p.tolist()))


def effective_gains(cfg: BroadcastConfig) -> np.ndarray:
    """Outage quantiles ``G_k(eps_k)``, one per user."""
    return cfg.gains()


def equivalent_unfaded_gains(cfg: BroadcastConfig) -> np.ndarray:
    """Gains of the unfaded broadcast channel with the same outage regions."""
    return effective_gains(cfg)


def unfaded_config(cfg: BroadcastConfig) -> BroadcastConfig:
    """The equivalent unfaded channel as a config of scaled :class:`Constant` users."""
    gains = equivalent_unfaded_gains(cfg)
    users = tuple((Constant(), eps) for _, eps in cfg.users)
    return BroadcastConfig(cfg.snr, users, cfg.preserve_order, tuple(gains.tolist()))


def pareto_filter(rates, params) -> Tuple[np.ndarray, np.ndarray]:
    """Keep points not weakly dominated by another point.

    Points are first sorted lexicographically by their parameters; among
    identical rate vectors the first in that order survives.
    """
    rates = np.asarray(rates, dtype=float)
    params = np.asarray(params, dtype=float)
    if rates.shape[0] == 0:
        return rates, params
    order = np.lexsort(params.T[::-1])
    rates, params = rates[order], params[order]
    if rates.shape[1] == 1:
        keep = [int(np.argmax(rates[:, 0]))]
    elif rates.shape[1] == 2:
        keep = _pareto_2d(rates)
    else:
        keep = _pareto_nd(rates)
    keep = np.sort(np.asarray(keep, dtype=int))
    return rates[keep], params[keep]


def _pareto_2d(rates):
    # Sweep by r1 descending (ties: r2 descending, then sweep order).
    idx = np.lexsort((np.arange(len(rates)), -rates[:, 1], -rates[:, 0]))
    keep = []
    best_r2 = -math.inf
    last = None
    for i in idx:
        r = rates[i]
        if last is not None and r[0] == last[0] and r[1] == last[1]:
            continue
        if r[1] > best_r2:
            keep.append(i)
            best_r2 = r[1]
        last = r
    return keep


def _pareto_nd(rates, block=512):
    n = rates.shape[0]
    keep = []
    for start in range(0, n, block):
        chunk = rates[start:start + block]
        ge = np.all(rates[None, :, :] >= chunk[:, None, :], axis=2)
        gt = np.any(rates[None, :, :] > chunk[:, None, :], axis=2)
        dominated = np.any(ge & gt, axis=1)
        for local in np.flatnonzero(~dominated):
            i = start + local
            equal = np.all(rates[:i] == rates[i], axis=1)
            if not np.any(equal):
                keep.append(i)
    return keep


def td_rate_point(cfg: BroadcastConfig, params: TdParams) -> np.ndarray:
    """Rates of time division with power allocation for two users."""
    _require_two_users(cfg)
    g1, g2 = cfg.gains()
    rho = cfg.snr
    eta1, eta2 = params.eta
    mu = params.mu
    return np.array([mu * math.log1p(eta1 * g1 * rho), (1.0 - mu) * math.log1p(eta2 * g2 * rho)])


def td_region(cfg: BroadcastConfig, mu_steps: int = 101, eta_steps: int = 101) -> RegionBoundary:
    """Pareto boundary of the time-division outage region from a ``(mu, eta1)`` grid.

    The single-user edges ``mu = 0`` and ``mu = 1`` are evaluated directly.
    """
    _require_two_users(cfg)
    if mu_steps < 2 or eta_steps < 2:
        raise DomainError("need at least two grid points per sweep dimension")
    g1, g2 = cfg.gains()
    rho = cfg.snr
    rates, params = [], []
    for mu in np.linspace(0.0, 1.0, mu_steps):
        if mu == 0.0:
            rates.append([[0.0, math.log1p(g2 * rho)]])
            params.append([[0.0, 0.0, 1.0]])
            continue
        if mu == 1.0:
            rates.append([[math.log1p(g1 * rho), 0.0]])
            params.append([[1.0, 1.0, 0.0]])
            continue
        eta1 = np.linspace(0.0, 1.0 / mu, eta_steps)
        eta2 = (1.0 - mu * eta1) / (1.0 - mu)
        eta2 = np.where((eta2 < 0) & (eta2 > -1e-12), 0.0, eta2)
        ok = eta2 >= 0
        eta1, eta2 = eta1[ok], eta2[ok]
        r1 = mu * np.log1p(eta1 * g1 * rho)
        r2 = (1.0 - mu) * np.log1p(eta2 * g2 * rho)
        rates.append(np.column_stack([r1, r2]))
        params.append(np.column_stack([np.full_like(eta1, mu), eta1, eta2]))
    r, p = pareto_filter(np.vstack(rates), np.vstack(params))
    return RegionBoundary(r, p, ("mu", "eta1", "eta2"), "td")


def _noise_fractions(cfg, gamma):
    """Power of users encoded before each user, for rows of ``gamma``."""
    order = cfg.encoding_order()
    ordered = gamma[:, order]
    before = np.cumsum(ordered, axis=1) - ordered
    out = np.empty_like(gamma)
    out[:, order] = before
    return out


def _dpc_rates(cfg, gamma):
    g = cfg.gains()[None, :]
    rho = cfg.snr
    before = _noise_fractions(cfg, gamma)
    return np.log1p(gamma * g * rho / (before * g * rho + 1.0))


def _as_gamma(cfg, alloc):
    gamma = np.asarray(alloc.gamma if isinstance(alloc, PowerAllocation) else alloc, dtype=float)
    if gamma.shape != (cfg.num_users,):
        raise DomainError(f"need {cfg.num_users} power fractions, got {gamma.shape[0]}")
    return gamma


def dpc_rate_point_k(cfg: BroadcastConfig, alloc: PowerAllocation) -> np.ndarray:
    """Rates achieved by dirty-paper coding at outage levels ``eps_k`` for one allocation."""
    gamma = _as_gamma(cfg, alloc)
    return _dpc_rates(cfg, gamma[None, :])[0]


def simplex_grid(num_users: int, steps: int) -> np.ndarray:
    """All allocations with entries in ``{0, 1/steps, ..., 1}`` summing to one.

    Rows come out in lexicographically ascending order.
    """
    count = math.comb(steps + num_users - 1, num_users - 1)
    if count * num_users > MAX_REGION_POINTS:
        raise RegionSizeError(
            f"{count} allocations for {num_users} users at {steps} steps; use a coarser grid"
        )
    rows = []
    for bars in itertools.combinations(range(steps + num_users - 1), num_users - 1):
        edges = (-1,) + bars + (steps + num_users - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(num_users)])
    grid = np.array(rows, dtype=float) / steps
    return grid[np.lexsort(grid.T[::-1])]


def dpc_region(cfg: BroadcastConfig, steps_per_dim: Optional[int] = None) -> RegionBoundary:
    """Pareto boundary of the dirty-paper outage region over a simplex grid of allocations.

    Defaults to 512 steps for two users and 24 otherwise.
    """
    k = cfg.num_users
    steps = steps_per_dim or (512 if k <= 2 else 24)
    if steps < 1:
        raise DomainError("steps_per_dim must be positive")
    gamma = simplex_grid(k, steps)
    rates = _dpc_rates(cfg, gamma)
    r, p = pareto_filter(rates, gamma)
    return RegionBoundary(r, p, tuple(f"gamma{i + 1}" for i in range(k)), "dpc")


def dpc_outage_for_rates(cfg: BroadcastConfig, alloc: PowerAllocation, rates: Sequence[float]) -> np.ndarray:
    """Per-user outage probability when dirty-paper coding targets ``rates``.

    Each user's outage is ``Pr[A_k <= t_k]`` with
    ``t_k = (e^{R_k} - 1) / (gamma_k rho - (e^{R_k} - 1) S_k rho)`` and ``S_k``
    the power of users encoded before it; a nonpositive denominator means
    certain outage and a zero rate means none.
    """
    gamma = _as_gamma(cfg, alloc)
    rates = np.asarray(rates, dtype=float)
    if rates.shape != gamma.shape or np.any(rates < 0):
        raise DomainError("need one nonnegative rate per user")
    before = _noise_fractions(cfg, gamma[None, :])[0]
    scale = cfg.gain_scale or (1.0,) * cfg.num_users
    rho = cfg.snr
    out = np.empty_like(rates)
    for k, (model, _) in enumerate(cfg.users):
        if rates[k] == 0:
            out[k] = 0.0
            continue
        x = math.expm1(rates[k])
        den = gamma[k] * rho - x * before[k] * rho
        if den <= 0 or scale[k] == 0:
            out[k] = 1.0
            continue
        out[k] = model.cdf((x / den) / scale[k])
    return out


@dataclass(frozen=True)
class DominanceResult:
    """Containment of the time-division region in the dirty-paper region.

    ``witness_strict`` is a dirty-paper boundary point outside the
    time-division region, or ``None``; ``excess`` is how far above the
    time-division frontier its second rate lies.
    """

    dominated: bool
    witness_strict: Optional[Tuple[float, float]]
    excess: float


def td_frontier_rate(g1: float, g2: float, snr: float, r1: float) -> float:
    """Largest time-division rate for user 2 given rate ``r1`` for user 1."""
    c1 = math.log1p(g1 * snr)
    if r1 <= 0:
        return math.log1p(g2 * snr)
    if r1 >= c1:
        return 0.0
    mu_min = r1 / c1

    def r2(mu):
        if mu >= 1.0:
            return 0.0
        used = mu * math.expm1(r1 / mu) / (g1 * snr)
        if used > 1.0:
            return 0.0
        return (1.0 - mu) * math.log1p((1.0 - used) / (1.0 - mu) * g2 * snr)

    grid = np.linspace(mu_min, 1.0, 401)
    vals = np.array([r2(m) for m in grid])
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    _, best = golden_section(r2, lo, hi, tol=1e-12, maximize=True)
    return max(best, float(vals[i]))


def verify_dominance(
    cfg: BroadcastConfig,
    td: Optional[RegionBoundary] = None,
    steps: int = 512,
    margin: float = 1e-6,
    tol: float = 1e-9,
) -> DominanceResult:
    """Check that every time-division boundary point is matched by dirty-paper coding.

    For each time-division point ``(r1, r2)`` the dirty-paper allocation
    giving user 1 exactly ``r1`` must give user 2 at least ``r2 - tol``.
    Users are swapped first if user 2 has the larger effective gain. A strict
    witness is the dirty-paper point on a ``steps`` grid that lies furthest
    above the exact time-division frontier, reported if the excess exceeds
    ``margin``.
    """
    _require_two_users(cfg)
    g1, g2 = cfg.gains()
    swap = g1 < g2
    if td is None:
        td = td_region(cfg)
    td_rates = td.rates[:, ::-1] if swap else td.rates
    if swap:
        g1, g2 = g2, g1
    rho = cfg.snr
    gamma = np.clip(np.expm1(td_rates[:, 0]) / (g1 * rho), 0.0, 1.0)
    dpc_r2 = np.log1p((1.0 - gamma) * g2 * rho / (1.0 + gamma * g2 * rho))
    dominated = bool(np.all(dpc_r2 >= td_rates[:, 1] - tol))

    grid = np.linspace(0.0, 1.0, steps + 1)[1:-1]
    r1 = np.log1p(grid * g1 * rho)
    r2 = np.log1p((1.0 - grid) * g2 * rho / (1.0 + grid * g2 * rho))
    excess = np.array([b - td_frontier_rate(g1, g2, rho, a) for a, b in zip(r1, r2)])
    i = int(np.argmax(excess))
    witness = None
    if excess[i] > margin:
        witness = (float(r2[i]), float(r1[i])) if swap else (float(r1[i]), float(r2[i]))
    return DominanceResult(dominated, witness, float(excess[i]))


def _require_two_users(cfg):
    if cfg.num_users != 2:
        raise UnsupportedOperationError("time division is defined here for exactly two users")
