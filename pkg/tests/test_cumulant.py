import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticeprod.cumulant import bernoulli, profile, tilt
from latticeprod.errors import OutOfRange
from latticeprod.lattice_dist import detect_span, exact_pmf

# high-precision values for the fair coin on {0, 1}
PSI_1 = 0.62011450695827752463
LAMBDA_1 = 0.11094407167172735462
LAMBDA_2 = 0.32781332547273770109
ALPHA_AT_02 = 1.4189441382464550996


def bernoulli_rate(beta, p=0.5):
    return beta * math.log(beta / p) + (1 - beta) * math.log((1 - beta) / (1 - p))


def example_lambda2(p, h):
    e2 = math.exp(2 * h)
    return 2 * p * h * e2 / ((1 - p) + p * e2) - math.log((1 - p) + p * e2)


@pytest.fixture(scope="module")
def skewed():
    return profile(detect_span([(-1, 0.3), (0, 0.2), (2, 0.4), (3, 0.1)]))


def test_psi_values(fair_profile):
    assert fair_profile.psi(0.0) == 0.0
    assert fair_profile.psi(1.0) == pytest.approx(PSI_1, abs=1e-14)
    assert fair_profile.psi_d1(0.0) == pytest.approx(0.5, abs=1e-15)
    assert fair_profile.psi_d2(0.0) == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("t", [-3.0, -0.5, 0.7, 2.0, 10.0])
def test_psi_derivatives_match_finite_differences(skewed, t):
    eps = 1e-5
    d1 = (skewed.psi(t + eps) - skewed.psi(t - eps)) / (2 * eps)
    d2 = (skewed.psi_d1(t + eps) - skewed.psi_d1(t - eps)) / (2 * eps)
    assert skewed.psi_d1(t) == pytest.approx(d1, rel=1e-8)
    assert skewed.psi_d2(t) == pytest.approx(d2, rel=1e-6, abs=1e-9)
    assert skewed.psi_all(t) == pytest.approx((skewed.psi(t), skewed.psi_d1(t), skewed.psi_d2(t)))


def test_psi_array(skewed):
    t = np.linspace(-2, 2, 7)
    assert np.allclose(skewed.psi_array(t), [skewed.psi(x) for x in t])


@pytest.mark.parametrize("beta, value", [(0.75, 0.13081203594113696), (0.6, 0.020135513550688873), (0.5, 0.0)])
def test_rate_examples(fair_profile, beta, value):
    assert fair_profile.rate(beta) == pytest.approx(value, abs=1e-13)


def test_rate_outside_support(fair_profile):
    with pytest.raises(OutOfRange):
        fair_profile.rate(1.0)
    with pytest.raises(OutOfRange):
        fair_profile.rate(-0.1)


@given(st.floats(0.01, 0.99))
def test_rate_matches_closed_form(beta):
    p = profile(bernoulli(0.5))
    assert p.rate(beta) == pytest.approx(bernoulli_rate(beta), abs=1e-11)


@given(st.floats(1e-6, 0.69))
def test_rate_inverse_round_trip(c):
    p = profile(bernoulli(0.5))
    beta = p.rate_inverse(c)
    assert beta > p.beta0
    assert p.rate(beta) == pytest.approx(c, abs=1e-12)


def test_rate_inverse_examples(fair_profile):
    assert fair_profile.rate_inverse(0.130812) == pytest.approx(0.75, abs=1e-6)
    assert fair_profile.rate_inverse(0.0) == 0.5
    assert fair_profile.rate_inverse(1e-14) == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(OutOfRange):
        fair_profile.rate_inverse(math.log(2))


def test_rate_sup_is_log_top_atom(fair_profile):
    assert fair_profile.rate_sup == pytest.approx(math.log(2))


def test_critical_points(fair_profile):
    lam1, lam2 = fair_profile.critical_points()
    assert lam1 == pytest.approx(LAMBDA_1, abs=1e-14)
    assert lam2 == pytest.approx(LAMBDA_2, abs=1e-14)
    assert lam2 == pytest.approx(example_lambda2(0.5, 1.0), abs=1e-13)


@pytest.mark.parametrize("p, h", [(0.1, 1), (0.3, 2), (0.7, "1/2"), (0.5, 0.25)])
def test_lambda2_closed_form(p, h):
    prof = profile(bernoulli(p, h))
    hv = prof.h
    assert prof.lambda2 == pytest.approx(example_lambda2(p, hv), abs=1e-12)
    assert 0 < prof.lambda1 < prof.lambda2


def test_solve_alpha(fair_profile):
    assert fair_profile.solve_alpha(0.2) == pytest.approx(ALPHA_AT_02, abs=1e-12)
    assert fair_profile.solve_alpha(fair_profile.lambda1) == 1.0
    assert fair_profile.solve_alpha(fair_profile.lambda2 * (1 - 1e-9)) == pytest.approx(2.0, abs=1e-6)
    with pytest.raises(OutOfRange, match="lambda_2"):
        fair_profile.solve_alpha(0.4)
    with pytest.raises(OutOfRange):
        fair_profile.solve_alpha(0.0)


@settings(max_examples=30)
@given(st.floats(0.01, 1.99))
def test_alpha_round_trip(alpha):
    p = profile(bernoulli(0.5))
    lam = alpha * p.psi_d1(alpha) - p.psi(alpha)
    assert p.solve_alpha(lam) == pytest.approx(alpha, abs=1e-9)


def test_rate_derivative_is_tilt(fair_profile):
    # I'(psi'(a)) = a
    for a in (0.3, 1.0, 1.419):
        beta = fair_profile.psi_d1(a)
        eps = 1e-5
        d = (fair_profile.rate(beta + eps) - fair_profile.rate(beta - eps)) / (2 * eps)
        assert d == pytest.approx(a, abs=1e-6)


def test_tilt_identity(skewed):
    d = skewed.source
    assert tilt(d, 0.0).log_probs == pytest.approx(d.log_probs, abs=1e-15)
    t0 = 0.8
    tp = profile(tilt(d, t0))
    assert tp.psi(0.0) == pytest.approx(0.0, abs=1e-15)
    assert tp.psi_d1(0.0) == pytest.approx(skewed.psi_d1(t0), abs=1e-13)


@pytest.mark.parametrize("t0", [-0.7, 0.4, 2.0])
def test_tilted_rate(skewed, t0):
    tp = profile(tilt(skewed.source, t0))
    for beta in np.linspace(-0.8, 2.8, 13):
        expected = skewed.rate(beta) + skewed.psi(t0) - t0 * beta
        assert tp.rate(beta) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("t0, n", [(1.0, 30), (2.0, 60), (-1.5, 25)])
def test_tilt_at_pmf_level(skewed, t0, n):
    d = skewed.source
    base = exact_pmf(d, n)
    tilted = exact_pmf(tilt(d, t0), n)
    pred = base.log_pmf + t0 * base.values - n * skewed.psi(t0)
    assert np.allclose(tilted.log_pmf, pred, rtol=1e-10, atol=1e-10)
