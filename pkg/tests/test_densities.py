import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renyineq.densities import (
    DensityCheck,
    Exponential,
    Gaussian,
    GeneralizedGamma,
    GeneralizedNormal,
    HalfGeneralizedNormal,
    NumericDensity,
    Pareto,
    QExponential,
    Rayleigh,
    Uniform,
    Weibull,
    check_density,
    escort,
    evaluate,
    exp_tilt,
    normalize,
    parse_density,
    power_of_base,
    power_tilt,
    relative_tilt,
    spec_string,
    tail_tilt,
)
from renyineq.errors import (
    NotDifferentiable,
    NotNormalizable,
    OutsideSupport,
)
from renyineq.quadrature import probe_grid

ALL_FAMILIES = [
    Uniform(0.0, 2.0),
    Exponential(1.3),
    Gaussian(0.5, 1.2),
    GeneralizedNormal(1.6, 0.9),
    HalfGeneralizedNormal(2.0, 1.1),
    QExponential(0.5, 1.0),
    QExponential(1.5, 1.0),
    Weibull(0.8, 1.2),
    Weibull(2.5, 0.7),
    GeneralizedGamma(1.0, 2.0, 1.0),
    Pareto(1.0, 2.5),
    Rayleigh(0.8),
]

DIFFERENTIABLE = [d for d in ALL_FAMILIES if not isinstance(d, Uniform)]


@pytest.mark.parametrize("d", ALL_FAMILIES, ids=str)
def test_unit_mass(d):
    report = check_density(d)
    assert report.ok, report


def test_evaluate_exponential_point():
    assert evaluate(Exponential(1.0), 0.5, 0) == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_evaluate_uniform_point():
    assert evaluate(Uniform(0.0, 2.0), 1.0, 0) == pytest.approx(0.5)


def test_uniform_not_differentiable():
    with pytest.raises(NotDifferentiable):
        evaluate(Uniform(0.0, 1.0), 0.5, 1)


def test_evaluate_outside_support():
    with pytest.raises(OutsideSupport):
        evaluate(Exponential(1.0), -1.0, 0)
    with pytest.raises(OutsideSupport):
        evaluate(Pareto(1.0, 2.0), 0.5, 0)


def test_exponential_curvature_is_one():
    # f f''/f'^2 = 1 for any pure exponential
    d = Exponential(2.0)
    xs = np.array([0.1, 1.0, 4.0])
    f = np.array([evaluate(d, x, 0) for x in xs])
    fp = np.array([evaluate(d, x, 1) for x in xs])
    fpp = np.array([evaluate(d, x, 2) for x in xs])
    assert np.allclose(f * fpp / fp**2, 1.0, atol=1e-12)
    assert np.allclose(d.curvature(xs), 1.0, atol=1e-12)


def test_constant_curvature_families():
    xs = np.linspace(0.2, 3.0, 7)
    assert np.allclose(QExponential(1.5, 1.0).curvature(xs), 1.5, atol=1e-12)
    assert np.allclose(QExponential(0.5, 1.0).curvature(np.linspace(0.1, 1.9, 7)), 0.5, atol=1e-12)
    p = Pareto(1.0, 2.0)
    assert np.allclose(p.curvature(xs + 1.0), 1.0 + 1.0 / 3.0, atol=1e-12)


@pytest.mark.parametrize("d", DIFFERENTIABLE, ids=str)
def test_derivative_consistency(d):
    # central differences of pdf vs closed-form f', and of f' vs f''
    rng = np.random.default_rng(7)
    lo, hi = d.support.lo, d.support.hi
    if d.support.bounded:
        lo, width = lo, hi - lo
    elif math.isfinite(lo):
        width = 4.0
    else:
        lo, width = -2.0, 4.0
    xs = lo + width * rng.uniform(0.15, 0.8, size=100)
    h = 1e-5 * max(1.0, width / 4.0)
    for x in xs:
        f1 = evaluate(d, x, 1)
        num = (evaluate(d, x + h, 0) - evaluate(d, x - h, 0)) / (2 * h)
        assert num == pytest.approx(f1, rel=2e-6, abs=1e-9)
        f2 = evaluate(d, x, 2)
        num2 = (evaluate(d, x + h, 1) - evaluate(d, x - h, 1)) / (2 * h)
        assert num2 == pytest.approx(f2, rel=2e-6, abs=1e-8)


@pytest.mark.parametrize(
    "d",
    [Exponential(0.7), Pareto(1.0, 1.5), HalfGeneralizedNormal(2.0, 1.0), QExponential(0.4, 2.0)],
    ids=str,
)
def test_decreasing_flags(d):
    assert d.decreasing
    xs = probe_grid(d.support, 200)
    assert np.all(d.dlog_pdf(xs) < 0.0)


def test_escort_of_exponential_is_exponential():
    g = escort(Exponential(1.0), 2.0)
    target = Exponential(2.0)
    xs = probe_grid(g.support, 100)
    assert np.allclose(g.pdf(xs), target.pdf(xs), rtol=1e-10)


def test_escort_fractional():
    g = escort(Exponential(1.0), 1.0 / 3.0)
    xs = probe_grid(g.support, 100)
    assert np.allclose(g.pdf(xs), Exponential(1.0 / 3.0).pdf(xs), rtol=1e-10)


def test_escort_uniform_trivial():
    g = escort(Uniform(0.0, 1.0), 5.0)
    xs = np.linspace(0.05, 0.95, 20)
    assert np.allclose(g.pdf(xs), 1.0, rtol=1e-10)


def test_escort_not_normalizable():
    with pytest.raises(NotNormalizable):
        escort(Pareto(1.0, 1.0), 0.5)


def test_escort_composition():
    f = Exponential(1.0)
    once = escort(escort(f, 1.5), 2.0)
    direct = escort(f, 3.0)
    xs = probe_grid(f.support, 64)
    assert np.allclose(once.pdf(xs), direct.pdf(xs), rtol=1e-9)


def test_escort_identity():
    f = Gaussian(0.0, 1.0)
    g = escort(f, 1.0)
    assert g.normalizer == pytest.approx(1.0, abs=1e-10)
    xs = probe_grid(f.support, 64)
    assert np.allclose(g.pdf(xs), f.pdf(xs), rtol=1e-10)


def test_power_tilt_gamma():
    # e^{-x} |x| renormalized is the shape-2 gamma density x e^{-x}
    g = normalize(Exponential(1.0), power_tilt(1.0))
    xs = probe_grid(g.support, 100)
    assert np.allclose(g.pdf(xs), GeneralizedGamma(1.0, 2.0, 1.0).pdf(xs), rtol=1e-9)


def test_exp_tilt_shifts_rate():
    g = normalize(Exponential(2.0), exp_tilt(-1.0))
    xs = probe_grid(g.support, 100)
    assert np.allclose(g.pdf(xs), Exponential(3.0).pdf(xs), rtol=1e-10)


def test_relative_tilt_exponential():
    # f (f/h)^r with exponential f, h stays exponential: rate 1 + r(1-0.5)
    f, h = Exponential(1.0), Exponential(0.5)
    g = normalize(f, relative_tilt(h, 2.0))
    xs = probe_grid(f.support, 100)
    assert np.allclose(g.pdf(xs), Exponential(2.0).pdf(xs), rtol=1e-9)


def test_tail_tilt_oracle():
    # b=3 on Exp(1): Y(x) = (1+x)e^{-x}; f*Y is ∝ (1+x)e^{-2x}, mass 3/4
    g = normalize(Exponential(1.0), tail_tilt(3.0, 1.0))
    assert g.normalizer == pytest.approx(0.75, rel=1e-9)
    xs = probe_grid(g.support, 50)
    expect = (4.0 / 3.0) * (1.0 + xs) * np.exp(-2.0 * xs)
    assert np.allclose(g.pdf(xs), expect, rtol=1e-8)


def test_numeric_dlog_matches_finite_difference():
    f = Exponential(1.0)
    g = NumericDensity(f, tail_tilt(3.0, 2.0))
    xs = np.array([0.3, 1.0, 2.5])
    h = 1e-6
    num = (g.log_pdf(xs + h) - g.log_pdf(xs - h)) / (2 * h)
    assert np.allclose(g.dlog_pdf(xs), num, rtol=1e-5, atol=1e-7)
    num2 = (g.dlog_pdf(xs + h) - g.dlog_pdf(xs - h)) / (2 * h)
    assert np.allclose(g.d2log_pdf(xs), num2, rtol=1e-4, atol=1e-5)


def test_check_density_flags_unnormalized():
    class Doubled(Exponential):
        def log_pdf(self, x):
            return super().log_pdf(x) + math.log(2.0)

    report = check_density(Doubled(1.0))
    assert not report.ok
    assert report.mass == pytest.approx(2.0, rel=1e-9)


def test_qexponential_check():
    assert check_density(QExponential(1.5, 1.0)).ok


@given(
    e=st.floats(min_value=0.3, max_value=3.0),
    rate=st.floats(min_value=0.3, max_value=4.0),
)
@settings(max_examples=25, deadline=None)
def test_escort_exponential_property(e, rate):
    g = escort(Exponential(rate), e)
    xs = np.array([0.1, 0.7, 2.0])
    assert np.allclose(g.pdf(xs), Exponential(e * rate).pdf(xs), rtol=1e-8)


def test_parse_roundtrip():
    specs = [
        "exponential:rate=1.0",
        "pareto:xm=1.0,alpha=2.0",
        "uniform:lo=0.0,hi=2.0",
        "gaussian:mu=0.0,sigma=1.0",
        "qexp:q=1.5,rate=2.0",
    ]
    for s in specs:
        assert spec_string(parse_density(s)) == s


def test_parse_nested_modifier():
    g = parse_density("escort:base=(exponential:rate=1),exp=2")
    xs = np.array([0.2, 1.0])
    assert np.allclose(g.pdf(xs), Exponential(2.0).pdf(xs), rtol=1e-9)


def test_parse_relative():
    g = parse_density("tilt_rel:base=(exponential:rate=1),h=(exponential:rate=0.5),r=2")
    xs = np.array([0.2, 1.0])
    assert np.allclose(g.pdf(xs), Exponential(2.0).pdf(xs), rtol=1e-9)


def test_parse_errors():
    for bad in [
        "nosuch:rate=1",
        "exponential:rate=1,extra=2",
        "exponential:",
        "escort:base=(exponential:rate=1",
        "pareto:xm=1",
    ]:
        with pytest.raises(ValueError):
            parse_density(bad)


def test_support_equality_is_exact():
    assert Exponential(1.0).support == Weibull(1.0, 1.0).support
    assert Pareto(1.0, 2.0).support != Exponential(1.0).support
