import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from dpcfading import (
    DIVERGENT,
    Constant,
    DomainError,
    Empirical,
    ModelFileError,
    Nakagami,
    Rayleigh,
    Rician,
    UnsupportedOperationError,
    parse_model,
)
from dpcfading._special import gammainc_pair, marcum_q1_pair

CONTINUOUS = [Rayleigh(), Rician(0.5), Rician(1), Rician(5), Rician(30), Nakagami(0.5), Nakagami(2), Nakagami(8)]
ALL = CONTINUOUS + [Constant(), Empirical((0.2, 1.0, 1.0, 3.5))]


def test_pdf_examples():
    assert Rayleigh().pdf(0.0) == 1.0
    assert Nakagami(1).pdf(1.0) == pytest.approx(math.exp(-1), abs=1e-12)


def test_rician_pdf_against_histogram():
    # |h|^2 with |mean|^2 = K/(K+1) and scattered variance 1/(K+1), drawn independently of the model sampler.
    k, n, half = 1.0, 10**7, 0.01
    rng = np.random.default_rng(7)
    scale = math.sqrt(0.5 / (k + 1))
    h = math.sqrt(k / (k + 1)) + scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    power = np.abs(h) ** 2
    frac = np.mean(np.abs(power - 0.5) <= half)
    se = math.sqrt(frac * (1 - frac) / n)
    # Second-order correction for the bin average of a smooth density is negligible at this width.
    assert abs(frac / (2 * half) - Rician(k).pdf(0.5)) <= 3 * se / (2 * half)


def test_pdf_errors():
    with pytest.raises(UnsupportedOperationError):
        Empirical((1.0, 2.0)).pdf(1.0)
    with pytest.raises(DomainError):
        Rayleigh().pdf(-1.0)
    with pytest.raises(UnsupportedOperationError):
        Constant().pdf(1.0)


def test_cdf_examples():
    assert Rayleigh().cdf(math.log(2)) == pytest.approx(0.5, abs=1e-15)
    assert Constant().cdf(1.0) == 1.0
    assert Constant().cdf(0.999) == 0.0
    with pytest.raises(DomainError):
        Rayleigh().cdf(-0.1)


def test_nakagami_cdf_against_samples():
    n = 10**7
    draws = np.random.default_rng(11).gamma(2.0, 0.5, n)
    frac = np.mean(draws <= 1.0)
    se = math.sqrt(frac * (1 - frac) / n)
    assert abs(Nakagami(2).cdf(1.0) - frac) <= 3 * se


def test_icdf_examples():
    assert Rayleigh().icdf(0.5) == pytest.approx(math.log(2), abs=1e-15)
    assert Constant().icdf(0.3) == 1.0
    a = Nakagami(4).icdf(0.9)
    assert abs(Nakagami(4).cdf(a) - 0.9) <= 1e-9
    draws = np.random.default_rng(3).gamma(4.0, 0.25, 10**7)
    assert a == pytest.approx(np.quantile(draws, 0.9), abs=2e-3)
    for bad in (-0.1, 1.0, 1.5):
        with pytest.raises(DomainError):
            Rayleigh().icdf(bad)


def test_sample_examples():
    assert Constant().sample(5, 3).tolist() == [1.0, 1.0, 1.0]
    assert abs(Rayleigh().sample(1, 10**6).mean() - 1) <= 0.004
    assert abs(Rician(2).sample(1, 10**6).mean() - 1) <= 0.004
    assert np.array_equal(Nakagami(3).sample(9, 1000), Nakagami(3).sample(9, 1000))
    with pytest.raises(DomainError):
        Rayleigh().sample(0, 0)


def test_moment_examples():
    m = Rayleigh().moments()
    assert m.second_moment == 2.0
    assert m.mean_log == pytest.approx(-0.5772156649015329, abs=1e-15)
    assert m.mean_inverse is DIVERGENT
    assert tuple(vars(Constant().moments()).values()) == (1.0, 0.0, 1.0)
    m = Nakagami(2).moments()
    assert m.second_moment == 1.5
    assert m.mean_log == pytest.approx(-0.270362845461478, abs=1e-12)
    assert m.mean_inverse == pytest.approx(2.0, abs=1e-15)
    assert Nakagami(1).moments().mean_inverse is DIVERGENT
    assert Rician(3).moments().mean_inverse is DIVERGENT


@pytest.mark.parametrize("model", [Rician(0.7), Rician(4), Nakagami(0.6), Nakagami(3)], ids=lambda m: m.label)
def test_moments_against_samples(model):
    x = model.sample(21, 2 * 10**6)
    mom = model.moments()
    for value, draws in ((mom.second_moment, x * x), (mom.mean_log, np.log(x))):
        assert abs(draws.mean() - value) <= 4 * draws.std() / math.sqrt(x.size)


@pytest.mark.parametrize("model", ALL, ids=lambda m: m.label)
def test_unit_mean(model):
    assert model.sample(4, 10**6).mean() == pytest.approx(1.0, abs=0.01)
    if not isinstance(model, (Constant, Empirical)):
        from scipy.integrate import quad

        mean = quad(lambda a: a * model.pdf(a), 0, np.inf, limit=200)[0]
        assert mean == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("model", CONTINUOUS, ids=lambda m: m.label)
def test_cdf_shape_and_round_trip(model):
    a = np.concatenate([[0.0], np.logspace(-6, 1.5, 200)])
    c = model.cdf(a)
    assert c[0] == 0.0
    assert np.all(np.diff(c) >= 0)
    assert model.cdf(1e4) == pytest.approx(1.0, abs=1e-12)
    # Near cdf = 1 the rounding of c itself moves the quantile; the tail goes through isf.
    inner = (c > 0) & (c < 1 - 1e-9)
    back = model.icdf(c[inner])
    assert np.all(np.abs(back - a[inner]) <= 1e-6 * (1 + a[inner]))
    s = model.sf(a)
    tail = (s > 0) & (s < 1 - 1e-9)
    back = model.isf(s[tail])
    assert np.all(np.abs(back - a[tail]) <= 1e-6 * (1 + a[tail]))
    np.testing.assert_allclose(model.cdf(a) + model.sf(a), 1.0, atol=1e-13)


@pytest.mark.parametrize("model", ALL, ids=lambda m: m.label)
def test_icdf_is_generalized_inverse(model):
    t = np.linspace(0.01, 0.99, 99)
    g = model.icdf(t)
    assert np.all(model.cdf(g) >= t - 1e-10)
    below = np.maximum(g * (1 - 1e-7) - 1e-12, 0.0)
    assert np.all(model.cdf(below) < t)


def test_special_cases_match_rayleigh():
    a = np.linspace(0, 10, 101)
    np.testing.assert_allclose(Rician(0).cdf(a), Rayleigh().cdf(a), atol=1e-9)
    np.testing.assert_allclose(Nakagami(1).cdf(a), Rayleigh().cdf(a), atol=1e-9)


@pytest.mark.parametrize("model", CONTINUOUS, ids=lambda m: m.label)
def test_sampler_matches_cdf(model):
    x = model.sample(99, 10**5)
    res = stats.kstest(x, model.cdf)
    assert res.statistic < 1.63 / math.sqrt(x.size)


def test_nakagami_rejects_small_m():
    with pytest.raises(DomainError):
        Nakagami(0.49)
    with pytest.raises(DomainError):
        Rician(-1)


def test_empirical_normalization_and_cdf():
    model = Empirical((1.0, 2.0, 3.0))
    assert np.isclose(np.mean(model.samples), 1.0)
    assert model.cdf(0.5) == pytest.approx(1 / 3)
    assert model.icdf(1 / 3) == pytest.approx(0.5)
    assert model.icdf(0.34) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        Empirical(())
    with pytest.raises(DomainError):
        Empirical((0.0, 0.0))


def test_empirical_file(tmp_path):
    good = tmp_path / "g.txt"
    good.write_text("1.0\n\n3.0\n")
    assert parse_model(f"empirical:{good}").samples == (0.5, 1.5)
    bad = tmp_path / "b.txt"
    bad.write_text("1.0\n\nabc\n")
    with pytest.raises(ModelFileError) as info:
        Empirical.from_file(bad)
    assert info.value.lineno == 3


def test_parse_model():
    assert parse_model("rayleigh") == Rayleigh()
    assert parse_model("constant") == Constant()
    assert parse_model("rician:K=2") == Rician(2)
    assert parse_model("nakagami:m=4") == Nakagami(4)
    assert parse_model("Nakagami:4") == Nakagami(4)
    for bad in ("bogus", "rician:m=2", "nakagami:m=x", "rayleigh:1"):
        with pytest.raises(DomainError):
            parse_model(bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 80), st.floats(0.0, 300))
def test_gammainc_pair_matches_scipy(s, x):
    p, q = gammainc_pair(s, x)
    assert p == pytest.approx(float(special.gammainc(s, x)), rel=1e-10, abs=1e-300)
    assert q == pytest.approx(float(special.gammaincc(s, x)), rel=1e-10, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 60), st.floats(0.0, 200))
def test_marcum_pair_matches_noncentral_chi2(k, y):
    lower, upper = marcum_q1_pair(k, y)
    # 1 - Q1(sqrt(2K), sqrt(2y)) is the ncx2(2, 2K) CDF at 2y.
    assert lower == pytest.approx(float(stats.ncx2.cdf(2 * y, 2, 2 * k)) if k > 0 else -math.expm1(-y), rel=1e-8, abs=1e-14)
    assert upper == pytest.approx(float(stats.ncx2.sf(2 * y, 2, 2 * k)) if k > 0 else math.exp(-y), rel=1e-8, abs=1e-14)
