import math

import numpy as np
import pytest

from dpcfading import (
    ChannelConfig,
    DomainError,
    Nakagami,
    OutageSpec,
    Rayleigh,
    Rician,
    conditional_rate,
    dpc_alpha_for_gain,
    min_outage_probability,
    optimal_alpha_outage,
    outage_probability,
    outage_threshold,
    rate_cdf,
    virtual_snr,
)
from dpcfading._special import golden_section

CFG = ChannelConfig(10.0, 1.0)


def test_conditional_rate_examples():
    assert conditional_rate(ChannelConfig(1, 1), 0.5, 1.0) == pytest.approx(math.log(2), abs=1e-15)
    raw = conditional_rate(ChannelConfig(1, 1), 0.99, 0.0, clamp=False)
    assert raw == pytest.approx(math.log(1 / (1 + 0.9801)), abs=1e-15)
    assert conditional_rate(ChannelConfig(1, 1), 0.99, 0.0) == 0.0
    for a in (0.1, 1.0, 7.0):
        alpha = dpc_alpha_for_gain(CFG.snr, a)
        assert conditional_rate(CFG, alpha, a) == pytest.approx(math.log1p(a * CFG.snr), abs=1e-12)
    with pytest.raises(DomainError):
        conditional_rate(CFG, 1.2, 1.0)


def test_dpc_alpha_for_gain():
    assert dpc_alpha_for_gain(1.0, 1.0) == 0.5
    assert dpc_alpha_for_gain(3.0, 0.0) == 0.0
    assert dpc_alpha_for_gain(10.0, 1e12) == pytest.approx(1.0, abs=1e-12)
    assert dpc_alpha_for_gain(10.0, math.inf) == 1.0


def test_outage_examples():
    model = Rayleigh()
    for alpha in (0.0, 0.4, 1.0):
        assert outage_probability(CFG, alpha, OutageSpec(0.0), model) == 0.0
    spec = OutageSpec(math.log(2))
    assert outage_probability(CFG, 0.5, spec, model) == pytest.approx(-math.expm1(-0.1), abs=1e-15)
    p = outage_probability(CFG, 0.99, OutageSpec(math.log(50)), model)
    assert p == pytest.approx(1 - math.exp(-980.05 / 199.5), abs=1e-12)
    assert p == pytest.approx(0.9927, abs=1e-4)


def test_outage_against_monte_carlo():
    # Event J <= R sampled directly, without the threshold inversion.
    n = 10**7
    a = Rayleigh().sample(31, n)
    rate = math.log(50)
    j = conditional_rate(CFG, 0.99, a)
    frac = np.mean(j <= rate)
    se = math.sqrt(frac * (1 - frac) / n)
    assert abs(outage_probability(CFG, 0.99, OutageSpec(rate), Rayleigh()) - frac) <= 3 * se


def test_certain_outage_above_supremum():
    # sup_a J(alpha, a) = log((P + Q) / ((1 - alpha)^2 Q)) = log(20 / 2.5) for alpha = 0.5.
    sup = math.log(20 / 2.5)
    assert outage_threshold(CFG, 0.5, sup + 1e-9) == math.inf
    assert outage_probability(CFG, 0.5, OutageSpec(sup + 0.1), Rayleigh()) == 1.0
    assert outage_probability(CFG, 0.5, OutageSpec(sup - 0.1), Rayleigh()) < 1.0


def test_optimal_alpha_outage_examples():
    assert optimal_alpha_outage(OutageSpec(math.log(2))) == pytest.approx(0.5, abs=1e-15)
    assert optimal_alpha_outage(OutageSpec(0.0)) == 0.0
    assert optimal_alpha_outage(OutageSpec(-math.log(0.3))) == pytest.approx(0.7, abs=1e-12)
    r = 1.3
    rho_star = virtual_snr(r)
    assert optimal_alpha_outage(OutageSpec(r)) == pytest.approx(rho_star / (1 + rho_star), abs=1e-15)


def test_min_outage_examples():
    spec = OutageSpec(math.log(2))
    values = {min_outage_probability(ChannelConfig(10.0, b), spec, Rayleigh()) for b in (0, 0.5, 1, 10, 100)}
    assert len(values) == 1
    assert values.pop() == pytest.approx(0.095163, abs=1e-6)
    assert min_outage_probability(ChannelConfig(3.0), OutageSpec(0.0), Nakagami(2)) == 0.0
    ref = outage_probability(ChannelConfig(10.0, 0.0), 0.3, spec, Rayleigh())
    assert min_outage_probability(CFG, spec, Rayleigh()) == ref


@pytest.mark.parametrize("model", [Rayleigh(), Nakagami(2), Rician(3)], ids=lambda m: m.label)
def test_optimal_alpha_minimizes_outage(model):
    for rate in (0.1, math.log(2), 1.2, 2.0):
        spec = OutageSpec(rate)
        star = optimal_alpha_outage(spec)
        best = outage_probability(CFG, star, spec, model)
        assert best == pytest.approx(min_outage_probability(CFG, spec, model), abs=1e-12)
        for alpha in np.linspace(0, 1, 51):
            assert outage_probability(CFG, alpha, spec, model) >= best - 1e-12


def test_monotone_in_gain():
    a = np.linspace(0, 100, 2001)
    for beta in (0.5, 1.0, 10.0):
        cfg = ChannelConfig(10.0, beta)
        for alpha in (0.0, 0.3, 0.9, 0.999):
            j = conditional_rate(cfg, alpha, a, clamp=False)
            assert np.all(np.diff(j) > 0)


def test_pointwise_optimal_alpha():
    for a in (0.05, 0.5, 2.0, 9.0):
        alpha, best = golden_section(lambda x: conditional_rate(CFG, x, a, clamp=False), 0.0, 1.0, tol=1e-10, maximize=True)
        assert alpha == pytest.approx(dpc_alpha_for_gain(CFG.snr, a), abs=1e-4)
        assert best == pytest.approx(math.log1p(a * CFG.snr), abs=1e-9)


def test_rate_cdf_domination_and_tangency():
    grid = np.linspace(0, 4, 401)
    model = Rayleigh()
    reference = rate_cdf(ChannelConfig(10.0, 0.0), 0.0, model, grid)
    np.testing.assert_allclose(reference, model.cdf(np.expm1(grid) / 10.0), atol=1e-15)
    for alpha in (0.1, 0.3, 0.5, 0.7, 0.9):
        curve = rate_cdf(CFG, alpha, model, grid)
        assert np.all(curve >= reference - 1e-15)
        touch = -math.log(1 - alpha)
        at = rate_cdf(CFG, alpha, model, [touch])[0]
        assert at == pytest.approx(rate_cdf(ChannelConfig(10.0, 0.0), 0.0, model, [touch])[0], abs=1e-12)


def test_rate_cdf_atom_at_zero():
    model = Rayleigh()
    for alpha in (0.3, 0.7):
        atom = rate_cdf(CFG, alpha, model, [0.0])[0]
        # J(alpha, a) <= 0 exactly when a <= alpha^2 Q / (P (P + Q - (1 - alpha)^2 Q)).
        t = alpha**2 * 10 / (10 * (20 - (1 - alpha) ** 2 * 10))
        assert atom == pytest.approx(model.cdf(t), abs=1e-15)
        assert atom > 0


def test_rate_cdf_validation():
    with pytest.raises(DomainError):
        rate_cdf(CFG, 0.3, Rayleigh(), [1.0, 0.5])
    with pytest.raises(DomainError):
        rate_cdf(CFG, 0.3, Rayleigh(), [-0.1, 0.5])
    with pytest.raises(DomainError):
        OutageSpec(-1.0)
    with pytest.raises(DomainError):
        OutageSpec(1.0, 1.0)


def test_rate_cdf_against_monte_carlo():
    n = 10**6
    grid = np.linspace(0, 3, 31)
    for model in (Nakagami(0.5), Rician(2)):
        a = model.sample(8, n)
        for alpha in (0.3, 0.7):
            j = np.sort(conditional_rate(CFG, alpha, a))
            empirical = np.searchsorted(j, grid, side="right") / n
            analytic = rate_cdf(CFG, alpha, model, grid)
            se = np.sqrt(analytic * (1 - analytic) / n)
            assert np.all(np.abs(empirical - analytic) <= 4 * se + 1e-12)
