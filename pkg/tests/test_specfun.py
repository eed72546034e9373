import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from difflab import (
    NegativeArgument,
    WaitingDistribution,
    char_fn,
    sinc_s,
    sinc_s_prime,
    sine_integral,
    sine_partial2,
    sine_tail,
)
from oracles import char_fn_quad, si_quad, sine_partial2_quad, sine_tail_quad


def test_sinc_values():
    assert sinc_s(0.0) == 1.0
    assert sinc_s(1.0) == pytest.approx(0.0, abs=1e-15)
    assert sinc_s(0.5) == pytest.approx(2.0 / np.pi, abs=1e-15)


def test_sinc_prime_values():
    assert sinc_s_prime(0.0) == 0.0
    assert sinc_s_prime(1.0) == pytest.approx(-1.0, abs=1e-14)


def test_sinc_prime_matches_finite_difference():
    r = np.linspace(-5.0, 5.0, 501)
    h = 1e-6
    fd = (sinc_s(r + h) - sinc_s(r - h)) / (2 * h)
    assert np.max(np.abs(fd - sinc_s_prime(r))) < 1e-8


@settings(deadline=None, max_examples=100)
@given(st.floats(-50.0, 50.0))
def test_sinc_parity(r):
    assert sinc_s(-r) == sinc_s(r)
    assert sinc_s_prime(-r) == pytest.approx(-sinc_s_prime(r), abs=1e-15)


def test_sine_tail_values():
    assert sine_tail(0.0) == pytest.approx(0.5, abs=1e-12)
    assert sine_tail(1.0) == pytest.approx(-0.08948987223608363, abs=1e-10)
    assert abs(sine_tail(1.0e3)) < 1e-3
    with pytest.raises(NegativeArgument):
        sine_tail(-0.5)


def test_sine_partial2_values():
    assert sine_partial2(0.0) == 0.0
    assert abs(sine_partial2(1.0e3) - 0.25) < 1e-3
    assert sine_partial2(0.5) == pytest.approx(sine_partial2_quad(0.5), abs=1e-10)
    with pytest.raises(NegativeArgument):
        sine_partial2(-1.0)


def test_sine_integral_against_quadrature_grid():
    # 200-point grid over [0, 20]: the series/continued-fraction evaluation
    # agrees with adaptive quadrature to 1e-8 (actually much better)
    grid = np.linspace(0.0, 20.0, 200)
    for r in grid:
        assert sine_integral(r) == pytest.approx(si_quad(r), abs=1e-10)
        assert sine_tail(r) == pytest.approx(sine_tail_quad(r), abs=1e-8)
        assert sine_partial2(r) == pytest.approx(sine_partial2_quad(r), abs=1e-8)


def test_sine_integral_odd_and_scipy():
    from scipy.special import sici

    xs = np.linspace(-40.0, 40.0, 801)
    assert np.max(np.abs(sine_integral(xs) - sici(xs)[0])) < 1e-12
    assert sine_integral(-3.0) == -sine_integral(3.0)


# --------------------------------------------------------------------------
# waiting-time laws
# --------------------------------------------------------------------------

ALL_KINDS = [
    WaitingDistribution.exponential(),
    WaitingDistribution.gamma(2.0),
    WaitingDistribution.uniform(0.5, 1.5),
    WaitingDistribution.discrete([(Fraction(1, 2), 0.5), (Fraction(3, 2), 0.5)]),
]


@pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.kind)
def test_mean_exactly_one(dist):
    if dist.kind == "discrete":
        mean = sum(float(l) * p for l, p in dist.params)
    else:
        mean, _ = quad(lambda x: x * dist.pdf(x), 0.0, 80.0, limit=400)
    assert mean == pytest.approx(1.0, abs=1e-10)


def test_mean_normalisation_rescales():
    d = WaitingDistribution.uniform(1.0, 3.0)  # mean 2 before rescaling
    a, b = d.params
    assert (a + b) / 2 == pytest.approx(1.0)
    g = WaitingDistribution.gamma(2.0)
    assert g.params == (2.0, 2.0)


def test_discrete_validation():
    with pytest.raises(ValueError):
        WaitingDistribution.discrete([(Fraction(0), 1.0)])
    with pytest.raises(ValueError):
        WaitingDistribution.discrete([(Fraction(1), 0.7)])
    with pytest.raises(ValueError):
        WaitingDistribution.uniform(-1.0, 2.0)


def test_char_fn_normalisation_and_atoms():
    for d in ALL_KINDS:
        assert char_fn(d, 0.0) == pytest.approx(1.0 + 0.0j, abs=1e-14)
    delta1 = WaitingDistribution.discrete([(Fraction(1), 1.0)])
    for k in (0.3, 1.7, -2.2):
        assert char_fn(delta1, k) == pytest.approx(np.exp(-2j * np.pi * k), abs=1e-14)


def test_char_fn_exponential_closed_form():
    val = char_fn(WaitingDistribution.exponential(), 1.0)
    assert val == pytest.approx(1.0 / (1.0 + 2j * np.pi), abs=1e-15)
    assert val.real == pytest.approx(0.02470, abs=5e-6)
    assert val.imag == pytest.approx(-0.15520, abs=5e-6)


@pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.kind)
def test_char_fn_against_quadrature(dist):
    for k in (0.25, 1.0, 3.5):
        if dist.kind == "discrete":
            expected = sum(p * np.exp(-2j * np.pi * k * float(l)) for l, p in dist.params)
        else:
            expected = char_fn_quad(dist.pdf, k)
        assert char_fn(dist, k) == pytest.approx(expected, abs=1e-9)


@settings(deadline=None, max_examples=80)
@given(st.sampled_from(ALL_KINDS), st.floats(-20.0, 20.0))
def test_char_fn_bound_and_conjugation(dist, k):
    v = char_fn(dist, k)
    assert abs(v) <= 1.0 + 1e-12
    assert np.conj(v) == pytest.approx(char_fn(dist, -k), abs=1e-12)


def test_waiting_sampling_matches_law():
    rng = np.random.default_rng(5)
    g = WaitingDistribution.gamma(2.0).sample(rng, 20000)
    assert g.mean() == pytest.approx(1.0, abs=0.02)
    assert g.min() > 0
    u = WaitingDistribution.uniform(0.5, 1.5).sample(rng, 1000)
    assert u.min() >= 0.5 and u.max() <= 1.5


def test_fragment_roundtrip():
    for d in ALL_KINDS:
        assert WaitingDistribution.from_fragment(d.to_fragment()) == d
