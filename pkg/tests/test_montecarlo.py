import math

import numpy as np
import pytest

from latticeprod.errors import CapExceeded
from latticeprod.montecarlo import (
    discrete_cf,
    enumerate_zn,
    ks_discrete,
    replicate_rng,
    sample_zn,
)
from latticeprod.rowarray import exact_normalized_cf, limit_law_for
from latticeprod.scheme import build_scheme, find_subsequence

R_TOY = 20000


@pytest.fixture(scope="module")
def toy(fair_profile):
    # n = 3 with N_3 = 2 summands
    return build_scheme(fair_profile, 0.2, 3, counts={3: 2})


@pytest.fixture(scope="module")
def toy_law(toy):
    return enumerate_zn(toy, 3)


def test_enumeration_is_a_law(toy_law):
    v, p = toy_law
    assert p.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.all(np.diff(v) > 0)
    # two summands, each on four values: 10 unordered pairs
    assert len(v) == 10


def test_toy_cf_matches_enumeration(toy, toy_law):
    u = np.linspace(-5, 5, 201)
    err = np.abs(exact_normalized_cf(None, toy, 3, u) - discrete_cf(*toy_law, u))
    assert err.max() < 1e-12


@pytest.mark.parametrize("method", ["multinomial", "direct"])
def test_toy_samples_match_enumeration(toy, toy_law, method):
    run = sample_zn(None, toy, 3, R_TOY, seed=11, method=method)
    assert ks_discrete(run.samples, *toy_law) <= 3 / math.sqrt(R_TOY)


def test_reproducible_scalar(scheme_02):
    a = sample_zn(None, scheme_02, 20, 1, seed=5)
    b = sample_zn(None, scheme_02, 20, 1, seed=5)
    assert a.samples.shape == (1,) and a.samples[0] == b.samples[0]


def test_replicates_independent_of_batch(scheme_02):
    # replicate r depends only on (seed, r)
    a = sample_zn(None, scheme_02, 20, 3, seed=5)
    b = sample_zn(None, scheme_02, 20, 6, seed=5)
    assert np.array_equal(a.samples, b.samples[:3])
    assert replicate_rng(5, 2).random() == replicate_rng(5, 2).random()


def test_distinct_seeds_differ(scheme_02):
    a = sample_zn(None, scheme_02, 20, 50, seed=1).samples
    b = sample_zn(None, scheme_02, 20, 50, seed=2).samples
    assert not np.array_equal(a, b)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.5


def test_single_summand(fair_profile):
    s = build_scheme(fair_profile, 0.2, 1, counts={1: 1})
    rec = s.record(1)
    run = sample_zn(None, s, 1, 400, seed=3)
    # S_1 in {0, 1}; mean case subtracts E[W]
    shift = 0.5 * (math.exp(-rec.b) + math.exp(1 - rec.b))
    atoms = {math.exp(-rec.b) - shift, math.exp(1 - rec.b) - shift}
    assert all(min(abs(x - a) for a in atoms) < 1e-12 for x in run.samples)
    assert 0.4 < np.mean(run.samples > 0) < 0.6


def test_count_cap(scheme_02):
    with pytest.raises(CapExceeded):
        sample_zn(None, scheme_02, 200, 1, seed=0, count_cap=10**6)


def test_unknown_method(scheme_02):
    with pytest.raises(ValueError):
        sample_zn(None, scheme_02, 10, 1, seed=0, method="alias")


def test_ks_discrete_exact_sample():
    v = np.array([0.0, 1.0, 2.0])
    p = np.array([0.25, 0.5, 0.25])
    assert ks_discrete(np.array([0.0, 1.0, 1.0, 2.0]), v, p) == 0.0
    assert ks_discrete(np.array([1.0 + 1e-13, 1.0, 0.0, 2.0]), v, p) == 0.0
    assert ks_discrete(np.array([0.0, 0.0, 0.0, 0.0]), v, p) == pytest.approx(0.75)


def test_ks_against_limit(fair_profile):
    s = build_scheme(fair_profile, 0.25, 60)
    n = max(m for m in find_subsequence(s, 0.3, 0.5) if s.record(m).N <= 10**5)
    law = limit_law_for(s, n)
    run = sample_zn(None, s, n, 2000, seed=9, law=law)
    assert 0.0 <= run.ks_distance <= 1.0
    assert run.cdf_error < 1e-6
    assert run.ks_distance < 0.2
