"""Distributions of the fading (resizing) power coefficient A.

Every model is normalized to unit mean, ``E[A] = 1``, so rate formulas can
treat ``rho`` as the average SNR. Models are immutable and hashable; the
quadrature engine caches its transformed nodes per model instance.

Example
-------
>>> model = Rayleigh()
>>> round(model.cdf(math.log(2.0)), 12)
0.5
>>> model.icdf(0.5) == math.log(2.0)
True
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np
from scipy import special

from ._special import gammainc_pair, marcum_q1_pair
from .errors import DomainError, ModelFileError, UnsupportedOperationError

__all__ = [
    "DIVERGENT",
    "Constant",
    "Empirical",
    "FadingModel",
    "Moments",
    "Nakagami",
    "Rayleigh",
    "Rician",
    "parse_model",
]

_LOG_A_MIN = -745.0  # exp() underflows below this
_BISECT_STEPS = 64


class _Divergent:
    """Marker for an expectation that is infinite, such as E[1/A] under Rayleigh."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIVERGENT"

    def __str__(self):
        return "divergent"

    def __reduce__(self):
        return (_Divergent, ())


DIVERGENT = _Divergent()


@dataclass(frozen=True)
class Moments:
    """Moments of A that appear in the SNR expansions."""

    second_moment: float
    mean_log: Union[float, _Divergent]
    mean_inverse: Union[float, _Divergent]


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("NaN argument")
    return arr


def _scalar_or_array(result, like):
    return float(result) if np.ndim(like) == 0 else result


class FadingModel(ABC):
    """Unit-mean distribution of the nonnegative power coefficient A."""

    @property
    @abstractmethod
    def label(self) -> str:
        """Model spec string accepted by :func:`parse_model`."""

    @abstractmethod
    def _pdf(self, a): ...

    @abstractmethod
    def _cdf_sf(self, a):
        """Return ``(Pr[A <= a], Pr[A > a])`` for an array ``a >= 0``."""

    @abstractmethod
    def _draw(self, rng, n): ...

    @abstractmethod
    def moments(self) -> Moments:
        """E[A^2], E[log A] and E[1/A]; infinite values are :data:`DIVERGENT`."""

    def pdf(self, a):
        a_arr = _as_array(a)
        if np.any(a_arr < 0):
            raise DomainError(f"density needs a >= 0, got {a!r}")
        return _scalar_or_array(self._pdf(a_arr), a)

    def cdf(self, a):
        """Pr[A <= a]."""
        a_arr = _as_array(a)
        if np.any(a_arr < 0):
            raise DomainError(f"cdf needs a >= 0, got {a!r}")
        return _scalar_or_array(self._cdf_sf(a_arr)[0], a)

    def sf(self, a):
        """Pr[A > a], computed without cancellation in the upper tail."""
        a_arr = _as_array(a)
        if np.any(a_arr < 0):
            raise DomainError(f"sf needs a >= 0, got {a!r}")
        return _scalar_or_array(self._cdf_sf(a_arr)[1], a)

    def icdf(self, t):
        """Generalized inverse ``inf{a : cdf(a) >= t}`` for ``0 <= t < 1``."""
        t_arr = _as_array(t)
        if np.any((t_arr < 0) | (t_arr >= 1)):
            raise DomainError(f"icdf needs 0 <= t < 1, got {t!r}")
        return _scalar_or_array(self._icdf(t_arr), t)

    def isf(self, s):
        """Smallest a with ``sf(a) <= s``, for ``0 < s <= 1``.

        Equals ``icdf(1 - s)`` but stays accurate when ``s`` is too small to
        be represented as a distance from 1.
        """
        s_arr = _as_array(s)
        if np.any((s_arr <= 0) | (s_arr > 1)):
            raise DomainError(f"isf needs 0 < s <= 1, got {s!r}")
        return _scalar_or_array(self._isf(s_arr), s)

    def sample(self, seed: int, n: int):
        """Draw ``n`` i.i.d. values of A; the same ``(seed, n)`` gives the same draws."""
        if n < 1:
            raise DomainError("sample size must be positive")
        rng = np.random.default_rng(seed)
        return self._draw(rng, int(n))

    def _icdf(self, t):
        return self._bisect(lambda x: self._cdf_sf(x)[0] >= t, t.shape, zero_at=(t == 0))

    def _isf(self, s):
        return self._bisect(lambda x: self._cdf_sf(x)[1] <= s, s.shape, zero_at=(s == 1))

    def _bisect(self, accept, shape, zero_at):
        # Bisection on log(a) so tiny quantiles keep relative precision.
        lo = np.full(shape, _LOG_A_MIN)
        hi = np.full(shape, math.log(64.0))
        for _ in range(200):
            bad = ~accept(np.exp(hi))
            if not np.any(bad):
                break
            lo = np.where(bad, hi, lo)
            hi = np.where(bad, hi + math.log(8.0), hi)
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            ok = accept(np.exp(mid))
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
        out = np.exp(hi)
        return np.where(zero_at, 0.0, out)


@dataclass(frozen=True)
class Constant(FadingModel):
    """Point mass at A = 1: the classical unfaded dirty-paper channel."""

    @property
    def label(self):
        return "constant"

    def _pdf(self, a):
        raise UnsupportedOperationError("a point mass has no density")

    def _cdf_sf(self, a):
        cdf = (a >= 1.0).astype(float)
        return cdf, 1.0 - cdf

    def _icdf(self, t):
        return np.where(t > 0, 1.0, 0.0)

    def _isf(self, s):
        return np.where(s < 1, 1.0, 0.0)

    def _draw(self, rng, n):
        return np.ones(n)

    def moments(self):
        return Moments(1.0, 0.0, 1.0)


@dataclass(frozen=True)
class Rayleigh(FadingModel):
    """Exponential power gain with unit mean."""

    @property
    def label(self):
        return "rayleigh"

    def _pdf(self, a):
        return np.exp(-a)

    def _cdf_sf(self, a):
        return -np.expm1(-a), np.exp(-a)

    def _icdf(self, t):
        return -np.log1p(-t)

    def _isf(self, s):
        return -np.log(s)

    def _draw(self, rng, n):
        return rng.exponential(1.0, n)

    def moments(self):
        return Moments(2.0, -np.euler_gamma, DIVERGENT)


@dataclass(frozen=True)
class Rician(FadingModel):
    """Power gain |h|^2 of a Rician channel with Rice factor ``k_factor``.

    The line-of-sight power is ``K/(K+1)`` and the scattered power
    ``1/(K+1)``; ``K = 0`` is Rayleigh.
    """

    k_factor: float

    def __post_init__(self):
        if not (math.isfinite(self.k_factor) and self.k_factor >= 0):
            raise DomainError(f"Rice factor must be finite and >= 0, got {self.k_factor}")
        object.__setattr__(self, "k_factor", float(self.k_factor))

    @property
    def label(self):
        return f"rician:K={self.k_factor:g}"

    def _pdf(self, a):
        k = self.k_factor
        z = 2.0 * np.sqrt(k * (k + 1.0) * a)
        return (k + 1.0) * np.exp(-k - (k + 1.0) * a + z) * special.i0e(z)

    def _cdf_sf(self, a):
        return marcum_q1_pair(self.k_factor, (self.k_factor + 1.0) * a)

    def _draw(self, rng, n):
        k = self.k_factor
        los = math.sqrt(k / (k + 1.0))
        scale = math.sqrt(0.5 / (k + 1.0))
        re = los + scale * rng.standard_normal(n)
        im = scale * rng.standard_normal(n)
        return re * re + im * im

    def moments(self):
        k = self.k_factor
        second = (k * k + 4.0 * k + 2.0) / (k + 1.0) ** 2
        # E[ln |mu + w|^2] = ln |mu|^2 + E1(|mu|^2 / var(w)).
        mean_log = -np.euler_gamma if k == 0 else math.log(k / (k + 1.0)) + float(special.exp1(k))
        return Moments(second, mean_log, DIVERGENT)


@dataclass(frozen=True)
class Nakagami(FadingModel):
    """Gamma-distributed power gain with shape ``m`` (fading figure) and unit mean."""

    m: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= 0.5):
            raise DomainError(f"Nakagami fading figure must be >= 1/2, got {self.m}")
        object.__setattr__(self, "m", float(self.m))

    @property
    def label(self):
        return f"nakagami:m={self.m:g}"

    def _pdf(self, a):
        m = self.m
        with np.errstate(divide="ignore"):
            log_pdf = m * math.log(m) + (m - 1.0) * np.log(a) - m * a - math.lgamma(m)
        return np.exp(log_pdf)

    def _cdf_sf(self, a):
        return gammainc_pair(self.m, self.m * a)

    def _draw(self, rng, n):
        return rng.gamma(self.m, 1.0 / self.m, n)

    def moments(self):
        m = self.m
        inverse = m / (m - 1.0) if m > 1 else DIVERGENT
        return Moments((m + 1.0) / m, float(special.digamma(m)) - math.log(m), inverse)


@dataclass(frozen=True)
class Empirical(FadingModel):
    """Discrete distribution on observed gains, rescaled to unit sample mean."""

    samples: tuple = field(repr=False)

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float).ravel()
        if x.size == 0:
            raise DomainError("empirical model needs at least one sample")
        if np.any(~np.isfinite(x)) or np.any(x < 0):
            raise DomainError("empirical samples must be finite and nonnegative")
        mean = x.mean()
        if mean <= 0:
            raise DomainError("empirical samples must not all be zero")
        object.__setattr__(self, "samples", tuple((x / mean).tolist()))

    @classmethod
    def from_file(cls, path):
        """Load one nonnegative real per line; blank lines are skipped."""
        values = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    v = float(text)
                except ValueError:
                    raise ModelFileError(str(path), lineno, text) from None
                if not (math.isfinite(v) and v >= 0):
                    raise ModelFileError(str(path), lineno, text)
                values.append(v)
        return cls(tuple(values))

    @cached_property
    def atoms(self):
        """Sorted normalized samples."""
        return np.sort(np.asarray(self.samples))

    @property
    def label(self):
        return f"empirical(n={len(self.samples)})"

    def _pdf(self, a):
        raise UnsupportedOperationError("an empirical model has no density")

    def _cdf_sf(self, a):
        n = self.atoms.size
        cdf = np.searchsorted(self.atoms, a, side="right") / n
        return cdf, 1.0 - cdf

    def _icdf(self, t):
        n = self.atoms.size
        levels = np.arange(1, n + 1) / n
        idx = np.minimum(np.searchsorted(levels, t, side="left"), n - 1)
        return np.where(t > 0, self.atoms[idx], 0.0)

    def _isf(self, s):
        return self._icdf(np.clip(1.0 - s, 0.0, np.nextafter(1.0, 0.0)))

    def _draw(self, rng, n):
        return rng.choice(self.atoms, size=n, replace=True)

    def moments(self):
        x = self.atoms
        if np.any(x == 0):
            return Moments(float(np.mean(x * x)), DIVERGENT, DIVERGENT)
        return Moments(float(np.mean(x * x)), float(np.mean(np.log(x))), float(np.mean(1.0 / x)))


def parse_model(text: str) -> FadingModel:
    """Build a model from a spec string.

    Accepted forms: ``constant``, ``rayleigh``, ``rician:K=2``,
    ``nakagami:m=4`` and ``empirical:<path>``.
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    if name == "constant" and not arg:
        return Constant()
    if name == "rayleigh" and not arg:
        return Rayleigh()
    if name == "empirical" and arg:
        return Empirical.from_file(Path(arg))
    if name in ("rician", "nakagami") and arg:
        key, eq, value = arg.partition("=")
        expected = "k" if name == "rician" else "m"
        if eq and key.strip().lower() != expected:
            raise DomainError(f"unknown parameter {key!r} for {name}")
        try:
            param = float(value if eq else key)
        except ValueError:
            raise DomainError(f"bad parameter in model spec {text!r}") from None
        return Rician(param) if name == "rician" else Nakagami(param)
    raise DomainError(f"unrecognized fading model spec {text!r}")
