import math

import numpy as np
import pytest
from scipy.special import exp1

from dpcfading import (
    ChannelConfig,
    Constant,
    DivergenceError,
    DomainError,
    Empirical,
    MonteCarlo,
    Nakagami,
    Quadrature,
    Rayleigh,
    Rician,
    dpc_integrand,
    expect,
    rate_integrand,
)

E_E1 = math.e * float(exp1(1.0))  # E[log(1 + A)] for Rayleigh


def test_constant_is_exact():
    est = expect(Quadrature(), Constant(), np.log1p)
    assert est.value == math.log(2) and est.std_error == 0.0
    assert expect(MonteCarlo(10, 1), Constant(), np.log1p).value == math.log(2)


def test_rayleigh_second_moment():
    assert expect(Quadrature(), Rayleigh(), lambda a: a * a).value == pytest.approx(2.0, abs=1e-6)
    est = expect(MonteCarlo(10**6, 5), Rayleigh(), lambda a: a * a)
    assert abs(est.value - 2.0) <= 3 * est.std_error


def test_rayleigh_log1p():
    assert expect(Quadrature(), Rayleigh(), np.log1p).value == pytest.approx(0.596347362323194, abs=1e-9)
    assert E_E1 == pytest.approx(0.596347362323194, abs=1e-12)
    est = expect(MonteCarlo(10**7, 17), Rayleigh(), np.log1p)
    assert abs(est.value - E_E1) <= 3 * est.std_error


@pytest.mark.parametrize(
    "model, second, mean_log",
    [
        (Rayleigh(), 2.0, -np.euler_gamma),
        (Nakagami(0.5), 3.0, Nakagami(0.5).moments().mean_log),
        (Nakagami(4), 1.25, Nakagami(4).moments().mean_log),
        (Rician(3), Rician(3).moments().second_moment, Rician(3).moments().mean_log),
    ],
    ids=lambda x: getattr(x, "label", ""),
)
def test_quadrature_matches_closed_form_moments(model, second, mean_log):
    q = Quadrature()
    assert expect(q, model, lambda a: a).value == pytest.approx(1.0, abs=1e-10)
    assert expect(q, model, lambda a: a * a).value == pytest.approx(second, abs=1e-8)
    assert expect(q, model, np.log).value == pytest.approx(mean_log, abs=1e-8)


def test_divergent_integrand_raises():
    with pytest.raises(DivergenceError, match="1/A"):
        expect(Quadrature(), Rayleigh(), lambda a: 1.0 / a, "1/A")
    assert expect(Quadrature(), Nakagami(2), lambda a: 1.0 / a).value == pytest.approx(2.0, abs=1e-6)


def test_empirical_is_exact_mean():
    model = Empirical((0.5, 1.0, 2.5))
    assert expect(Quadrature(), model, np.log1p).value == pytest.approx(np.mean(np.log1p(model.atoms)), abs=1e-15)


MODELS = [Rayleigh(), Rician(1), Rician(5), Nakagami(0.5), Nakagami(1), Nakagami(2), Nakagami(4)]


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_quadrature_agrees_with_monte_carlo(model):
    cfg = ChannelConfig(3.0, 1.0)
    integrands = {
        "rate": lambda a: rate_integrand(cfg, 0.4, a),
        "dpc": lambda a: dpc_integrand(cfg, a),
        "capacity": lambda a: np.log1p(3.0 * a),
        "bound": lambda a: np.log(3.0 + a) + np.log(3.0 + 1.0 / a) - 2 * math.log(4.0),
    }
    mc = MonteCarlo(4 * 10**5, 123)
    for f in integrands.values():
        exact = expect(Quadrature(), model, f).value
        est = expect(mc, model, f)
        assert abs(exact - est.value) <= 3 * est.std_error


def test_linearity_and_determinism():
    q = Quadrature()
    f, g = np.log1p, np.sqrt
    lhs = expect(q, Rician(2), lambda a: f(a) + g(a)).value
    rhs = expect(q, Rician(2), f).value + expect(q, Rician(2), g).value
    assert abs(lhs - rhs) <= 1e-9
    assert expect(q, Nakagami(3), f) == expect(q, Nakagami(3), f)
    mc = MonteCarlo(1000, 4)
    assert expect(mc, Rayleigh(), f) == expect(mc, Rayleigh(), f)


def test_engine_validation():
    with pytest.raises(DomainError):
        Quadrature(8)
    with pytest.raises(DomainError):
        MonteCarlo(1, 0)
