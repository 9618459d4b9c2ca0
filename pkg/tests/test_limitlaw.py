import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticeprod.errors import QuadratureNotConverged, TauOnLattice
from latticeprod.limitlaw import (
    SemiStableLaw,
    auto_tau,
    levy_tail_value,
    shift_constant,
    theta,
)

SQRT_E = math.sqrt(math.e)
U = np.linspace(-10, 10, 201)

# brute-force Levy-Khintchine sums in 120-digit arithmetic over |k| <= 150..200
BRUTE_LOG_CF = [
    (1.5, 0.3, 0.7, -0.99884239448696 - 1.0180766243426496j),
    (1.5, 0.3, -3.0, -8.50864410557458 + 8.53475335505061j),
    (0.5, 0.0, 2.0, -3.6118001842294274 + 4.070533865095912j),
    (1.2, 0.75, 5.0, -9.976056006868037 - 31.502858399232135j),
]


def test_shift_constant_examples():
    assert shift_constant(1.0, 0.0, 1.0, SQRT_E) == 0.0
    assert theta(0.0, 1.0, SQRT_E) == 0.0
    assert shift_constant(0.5, 0.0, 1.0, SQRT_E) == pytest.approx(2.541494082536798, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.419, 1.9])
def test_shift_constant_equal_at_circle_ends(alpha):
    assert shift_constant(alpha, 0.0, 1.0, SQRT_E) == pytest.approx(
        shift_constant(alpha, 1.0, 1.0, SQRT_E), rel=1e-14
    )


def test_shift_constant_alpha_one_jumps_by_one_across_circle():
    # [log tau + h]_h / h = [log tau]_h / h + 1
    for h in (1.0, 0.5, 2.0):
        tau = math.exp(0.5 * h)
        assert shift_constant(1.0, h, h, tau) - shift_constant(1.0, 0.0, h, tau) == pytest.approx(1.0)


def test_tau_on_lattice_rejected():
    with pytest.raises(TauOnLattice):
        shift_constant(1.5, 0.0, 1.0, math.e)
    with pytest.raises(TauOnLattice):
        levy_tail_value(1.5, 0.25, 1.0, math.exp(-0.25))
    with pytest.raises(TauOnLattice):
        SemiStableLaw(1.5, 0.0, 1.0, 1.0)


def test_levy_tail_example():
    assert levy_tail_value(1.0, 0.0, 1.0, SQRT_E) == pytest.approx(1 / (math.e - 1), rel=1e-14)


@settings(max_examples=40)
@given(st.floats(0.5, 1.95), st.floats(0.0, 1.0), st.floats(-5.0, 5.0))
def test_levy_tail_matches_brute_force(alpha, delta, log_tau):
    s = (log_tau + delta) % 1.0
    if min(s, 1 - s) < 1e-6:
        return
    tau = math.exp(log_tau)
    k = np.arange(-60, 61)
    x = np.exp(k - delta)
    brute = math.fsum(x[x > tau] ** -alpha)
    assert levy_tail_value(alpha, delta, 1.0, tau) == pytest.approx(brute, rel=1e-12, abs=1e-12)


def test_levy_tail_decreases_to_zero():
    law = SemiStableLaw(1.2, 0.4)
    vals = [law.levy_tail(math.exp(t + 0.1)) for t in range(-3, 40)]
    assert np.all(np.diff(vals) < 0) and vals[-1] < 1e-18


@pytest.mark.parametrize("delta, log_tau", [(0.0, 0.5), (0.3, 0.2), (0.5, 0.0), (1.0, 0.5)])
def test_auto_tau(delta, log_tau):
    assert math.log(auto_tau(delta, 1.0)) == pytest.approx(log_tau, abs=1e-15)


@pytest.mark.parametrize("alpha, delta, u, expected", BRUTE_LOG_CF)
def test_log_cf_against_brute_force(alpha, delta, u, expected):
    law = SemiStableLaw(alpha, delta)
    assert abs(law.log_cf(u) - expected) < 1e-11


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.419, 1.9])
def test_log_cf_basic(alpha):
    law = SemiStableLaw(alpha, 0.2)
    assert law.log_cf(0.0) == 0
    v = law.log_cf(U)
    assert np.allclose(law.log_cf(-U), np.conj(v), atol=1e-13)
    mod = np.abs(law.cf(U))
    assert np.all(mod <= 1.0)
    assert np.all(mod[U != 0] < 1.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.419])
@pytest.mark.parametrize("taus", [(SQRT_E, math.exp(1.5)), (math.exp(-2.3), math.exp(3.7))])
def test_tau_invariance(alpha, taus):
    a = SemiStableLaw(alpha, 0.0, 1.0, taus[0]).log_cf(U)
    b = SemiStableLaw(alpha, 0.0, 1.0, taus[1]).log_cf(U)
    assert np.max(np.abs(a - b)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 1.9), st.floats(0.0, 1.0), st.floats(-3.0, 3.0), st.floats(-20, 20))
def test_tau_invariance_property(alpha, delta, log_tau, u):
    s = (log_tau + delta) % 1.0
    if min(s, 1 - s) < 1e-3:
        return
    a = SemiStableLaw(alpha, delta, 1.0, math.exp(log_tau)).log_cf(u)
    b = SemiStableLaw(alpha, delta).log_cf(u)
    assert abs(a - b) < 1e-10 * (1 + u * u)


@pytest.mark.parametrize("alpha", [0.5, 1.419, 1.8])
def test_circle_closure(alpha):
    a = SemiStableLaw(alpha, 0.0).log_cf(U)
    b = SemiStableLaw(alpha, 1.0).log_cf(U)
    assert np.max(np.abs(a - b)) < 1e-10


def test_circle_ends_at_alpha_one_differ_by_unit_drift():
    a = SemiStableLaw(1.0, 0.0).log_cf(U)
    b = SemiStableLaw(1.0, 1.0).log_cf(U)
    assert np.max(np.abs(b - a - 1j * U)) < 1e-10


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.419])
def test_continuity_in_delta(alpha):
    base = SemiStableLaw(alpha, 0.3).log_cf(U)
    gaps = [np.max(np.abs(SemiStableLaw(alpha, 0.3 + 10.0**-m).log_cf(U) - base)) for m in range(1, 5)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_distinct_offsets():
    u = np.linspace(-5, 5, 201)
    for alpha in (0.5, 1.0, 1.419):
        gap = np.max(np.abs(SemiStableLaw(alpha, 0.0).cf(u) - SemiStableLaw(alpha, 0.5).cf(u)))
        assert gap > 1e-2


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_semistability(alpha, h):
    law = SemiStableLaw(alpha, 0.37 * h, h)
    assert law.semistability_defect(U) < 1e-8
    assert law.semistability_defect([0.0]) == 0.0
    assert law.semistability_defect(U, a_factor=1.01) > 1e-4


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_truncation_is_sufficient(alpha):
    law = SemiStableLaw(alpha, 0.2)
    k_lo, k_hi = law.truncation()
    k = np.arange(k_lo - 200, k_hi + 200)
    x = np.exp(k - 0.2)
    u = 3.0
    comp = x < law.tau
    y = u * x
    br = np.where(comp, np.cos(y) - 1 + 1j * (np.sin(y) - y), np.exp(1j * y) - 1)
    outside = (k < k_lo) | (k > k_hi)
    omitted = abs(np.sum(br[outside] * x[outside] ** -alpha))
    assert omitted < 1e-12 * (1 + u * u)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_cdf_shape(alpha):
    law = SemiStableLaw(alpha, 0.0)
    x = np.linspace(-20, 200, 400)
    F, err = law.cdf(x, return_error=True)
    assert err < 1e-6
    assert np.all(np.diff(F) >= 0) and F.min() >= 0 and F.max() <= 1
    assert law.cdf(-1e6) < 1e-3


@pytest.mark.parametrize("alpha", [1.0, 1.5])
def test_cdf_far_right(alpha):
    assert SemiStableLaw(alpha, 0.0).cdf(1e6) > 1 - 1e-3


def test_cdf_far_right_heavy_tail():
    # for alpha = 1/2 the mass beyond 1e6 is still about nu(1e6, inf)
    law = SemiStableLaw(0.5, 0.0)
    tail = law.levy_tail(1e6)
    assert tail > 2e-3
    assert 1 - law.cdf(1e6) == pytest.approx(tail, rel=0.05)


def test_cdf_nonnegative_support_below_one():
    # total drift vanishes for alpha < 1, so X is a sum of positive jumps
    law = SemiStableLaw(0.7, 0.5)
    assert law.cdf(-1e-3) < 1e-6


@pytest.mark.parametrize(
    "x, expected",
    [(0.0, 0.6677367534281906), (1.0, 0.7821988692836817), (3.0, 0.8966375816411007)],
)
def test_cdf_against_dense_quadrature(x, expected):
    # values from a 2.2e6-node trapezoid rule on the inversion integral
    law = SemiStableLaw(1.5, 0.3)
    assert law.cdf(x) == pytest.approx(expected, abs=1e-7)


def test_cdf_unreachable_tolerance():
    with pytest.raises(QuadratureNotConverged) as info:
        SemiStableLaw(1.5, 0.3).cdf(0.0, tol=1e-13)
    assert info.value.error_estimate > 1e-13
