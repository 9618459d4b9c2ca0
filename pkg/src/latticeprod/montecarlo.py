"""Sampling ``(Z_n - A_n) / B_n`` and goodness of fit against the limit law.

``Z_n`` is a sum of ``N_n`` independent copies of ``exp(S_n)``.  Because
``S_n`` lives on at most ``n (kmax - kmin) + 1`` lattice points, a replicate
is determined by how many of the ``N_n`` summands land on each point, which
is a single multinomial draw.  This is equal in law to drawing every summand
and is what makes ``N_n`` in the millions cheap.  The per-summand path is kept
for small ``N_n`` and as a cross-check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import CapExceeded
from .lattice_dist import DEFAULT_CAP, LatticeDistribution, exact_pmf, sample_sn_indices
from .limitlaw import SemiStableLaw
from .scheme import Scheme, compensation_mask

DEFAULT_COUNT_CAP = 10**6
MULTINOMIAL, DIRECT = "multinomial", "direct"


@dataclass(frozen=True)
class McRun:
    n: int
    replicates: int
    seed: int
    samples: np.ndarray
    delta: float
    ks_distance: float | None = None
    ks_pvalue: float | None = None
    cdf_error: float | None = None


def replicate_rng(seed: int, r: int) -> np.random.Generator:
    """Independent stream for replicate ``r``, fixed by ``(seed, r)`` alone."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(r)]))


def _row_setup(scheme: Scheme, n: int, cap: int):
    rec = scheme.record(n)
    row = exact_pmf(scheme.profile.source, n, cap)
    s = row.values
    w = np.exp(s - rec.b)
    p = np.exp(row.log_pmf)
    p /= p.sum()
    comp = compensation_mask(scheme.case, s, rec.b)
    return rec, row, w, p, comp


def sample_zn(
    d: LatticeDistribution | None,
    scheme: Scheme,
    n: int,
    R: int,
    seed: int,
    count_cap: int = DEFAULT_COUNT_CAP,
    cap: int = DEFAULT_CAP,
    method: str = MULTINOMIAL,
    law: SemiStableLaw | None = None,
    cdf_tol: float = 1e-6,
) -> McRun:
    """``R`` replicates of ``(Z_n - A_n) / B_n``.

    The centring is subtracted summand by summand as
    ``sum_k (count_k - N p_k 1_comp(k)) w_k`` so that nothing of size
    ``A_n / B_n`` is formed and then cancelled.  With ``law`` given, the KS
    distance to its CDF is attached.

    Raises
    ------
    CapExceeded
        ``N_n`` above ``count_cap`` or the row support above ``cap``.
    """
    if d is not None and d != scheme.profile.source:
        raise ValueError("distribution differs from the one the scheme was built on")
    rec, row, w, p, comp = _row_setup(scheme, n, cap)
    N = rec.N
    if N > count_cap:
        raise CapExceeded(f"N_{n} = {N} exceeds the sampling cap {count_cap}")
    centre = N * p * comp
    out = np.empty(R)
    for r in range(R):
        rng = replicate_rng(seed, r)
        if method == MULTINOMIAL:
            counts = rng.multinomial(N, p)
            out[r] = math.fsum((counts - centre) * w)
        elif method == DIRECT:
            k = sample_sn_indices(scheme.profile.source, n, N, rng, cap) - row.kmin
            out[r] = math.fsum(w[k]) - math.fsum(centre * w)
        else:
            raise ValueError(f"unknown method {method!r}")
    ks = pv = err = None
    if law is not None:
        res = stats.kstest(out, lambda x: law.cdf(x, cdf_tol))
        ks, pv = float(res.statistic), float(res.pvalue)
        err = law.cdf_error(cdf_tol)
    return McRun(n, R, seed, out, rec.delta, ks, pv, err)


def enumerate_zn(scheme: Scheme, n: int, max_tuples: int = 10**6):
    """Exact law of ``(Z_n - A_n) / B_n`` by enumerating all ``N n`` atom tuples.

    Returns ``(values, probs)`` sorted by value with ties merged.  Only
    feasible at toy sizes.
    """
    rec = scheme.record(n)
    src = scheme.profile.source
    N = rec.N
    m = len(src.values) ** (N * n)
    if m > max_tuples:
        raise CapExceeded(f"{m} tuples exceed the enumeration cap {max_tuples}")
    vals, lps = src.values, src.log_prob_array
    # centring straight from its definition over the exact row law
    s_row = exact_pmf(src, n).values
    comp = compensation_mask(scheme.case, s_row, rec.b)
    p_row = exact_pmf(src, n).pmf
    shift = N * float(np.sum(p_row[comp] * np.exp(s_row[comp] - rec.b)))
    out_v, out_p = [], []
    for tup in itertools.product(range(len(vals)), repeat=N * n):
        idx = np.array(tup).reshape(N, n)
        z = float(np.sum(np.exp(vals[idx].sum(axis=1) - rec.b)))
        out_v.append(z - shift)
        out_p.append(math.exp(float(lps[idx].sum())))
    v = np.array(out_v)
    pr = np.array(out_p)
    order = np.argsort(v, kind="stable")
    v, pr = v[order], pr[order]
    keys = np.round(v, 12)
    uniq, start = np.unique(keys, return_index=True)
    merged = np.add.reduceat(pr, start)
    return v[start], merged


def discrete_cf(values: np.ndarray, probs: np.ndarray, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.exp(1j * np.outer(u, values)) @ probs


def ks_discrete(samples: np.ndarray, values: np.ndarray, probs: np.ndarray, rtol: float = 1e-9) -> float:
    """KS distance between an empirical sample and a finite discrete law.

    Samples within ``rtol`` (relative to the spread of ``values``) of an atom
    count as equal to it, so rounding in the summation does not split atoms.
    """
    samples = np.sort(np.asarray(samples, dtype=float))
    eps = rtol * max(1.0, float(np.max(np.abs(values))))
    cdf = np.cumsum(probs)
    cdf_left = cdf - probs
    ecdf = np.searchsorted(samples, values + eps, side="right") / len(samples)
    ecdf_left = np.searchsorted(samples, values - eps, side="left") / len(samples)
    return float(max(np.max(np.abs(ecdf - cdf)), np.max(np.abs(ecdf_left - cdf_left))))
