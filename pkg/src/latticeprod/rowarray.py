"""Exact finite-n quantities for the triangular array ``W_n = exp(S_n - b_n)``.

Each row holds ``N_n`` independent copies of ``W_n``; its law is read off the
exact pmf of ``S_n``.  Sums are formed in log space since ``N_n`` and
``exp(-b_n)`` are individually far outside double range.

The centred truncated mean ``N_n E[W 1{W <= tau}] - A_n / B_n`` is evaluated
from the indicator difference rather than by subtraction: ``A_n / B_n`` is a
sum over the same lattice points, so the difference is a sum over the points
where the two indicators disagree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._cfnum import log1p_minus_identity, log_bracket, weighted_exp_sum, scale_by_exp
from .lattice_dist import DEFAULT_CAP, LatticeDistribution, exact_pmf
from .limitlaw import SemiStableLaw
from .scheme import CRITICAL, MEAN, ZERO, Scheme, compensation_mask

DEFAULT_U_GRID = np.linspace(-5.0, 5.0, 201)


def _lse(a: np.ndarray) -> float:
    return float(logsumexp(a)) if a.size else -math.inf


def _exp(x: float) -> float:
    return math.exp(x) if x > -math.inf else 0.0


@dataclass(frozen=True)
class RowMoments:
    """Truncated moments of one row at cut level ``tau``.

    ``tail`` is ``N P[W > tau]``, ``trunc_var`` is ``N Var[W 1{W <= tau}]``,
    ``trunc_second_moment`` is ``N E[W^2 1{W <= tau}]`` and
    ``trunc_mean_centered`` is ``N E[W 1{W <= tau}] - A / B``.
    """

    n: int
    tau: float
    delta: float
    tail: float
    below: float
    trunc_mean: float
    trunc_mean_centered: float
    trunc_second_moment: float
    trunc_var: float


def _check_source(d: LatticeDistribution | None, scheme: Scheme) -> LatticeDistribution:
    src = scheme.profile.source
    if d is not None and d != src:
        raise ValueError("distribution differs from the one the scheme was built on")
    return src


def row_moments(
    d: LatticeDistribution | None, scheme: Scheme, n: int, tau: float, cap: int = DEFAULT_CAP
) -> RowMoments:
    """Exact truncated moments of row ``n`` (``d=None`` uses the scheme's law)."""
    src = _check_source(d, scheme)
    rec = scheme.record(n)
    row = exact_pmf(src, n, cap)
    s, lp = row.values, row.log_pmf
    b, log_N = rec.b, rec.log_N
    log_tau = math.log(tau)
    low = s - b <= log_tau
    lw = lp + (s - b)

    tail = _exp(log_N + _lse(lp[~low]))
    below = _exp(log_N + _lse(lp[low]))
    l1 = _lse(lw[low])
    l2 = _lse((lp + 2.0 * (s - b))[low])
    trunc_mean = _exp(log_N + l1)
    second = _exp(log_N + l2)
    if l2 == -math.inf:
        var = 0.0
    else:
        # N (E[W^2 1] - E[W 1]^2) = N E[W^2 1] (1 - E[W 1]^2 / E[W^2 1])
        var = second * -math.expm1(min(0.0, 2.0 * l1 - l2))

    if scheme.case == ZERO:
        centred = trunc_mean
    else:
        comp = compensation_mask(scheme.case, s, b)
        plus = low & ~comp
        minus = comp & ~low
        centred = _exp(log_N + _lse(lw[plus])) - _exp(log_N + _lse(lw[minus]))
    return RowMoments(n, tau, rec.delta, tail, below, trunc_mean, centred, second, var)


def truncated_second_moment_limit(law: SemiStableLaw, tau: float) -> float:
    """``int_{x <= tau} x^2 nu(dx)`` in closed form."""
    a, h, d = law.alpha, law.h, law.delta
    k = math.floor((math.log(tau) + d) / h)
    return math.exp((2.0 - a) * (h * k - d)) / -math.expm1(-(2.0 - a) * h)


@dataclass(frozen=True)
class ConditionRow:
    moments: RowMoments
    limit_tail: float
    limit_shift: float
    limit_trunc_var: float

    @property
    def n(self) -> int:
        return self.moments.n

    @property
    def tail_rel_err(self) -> float:
        return abs(self.moments.tail / self.limit_tail - 1.0)

    @property
    def shift_err(self) -> float:
        return abs(self.moments.trunc_mean_centered - self.limit_shift)

    @property
    def shift_rel_err(self) -> float:
        if self.limit_shift == 0.0:
            return math.inf if self.shift_err > 0 else 0.0
        return self.shift_err / abs(self.limit_shift)


def limit_law_for(scheme: Scheme, n: int, tau: float | str = "auto") -> SemiStableLaw:
    """Limit law at the offset ``Delta_n`` of row ``n``."""
    return SemiStableLaw(scheme.alpha, scheme.record(n).delta, scheme.h, tau)


def condition_table(
    d: LatticeDistribution | None, scheme: Scheme, tau: float, n_list, cap: int = DEFAULT_CAP
) -> list[ConditionRow]:
    """Row moments with the limits evaluated at each row's own ``Delta_n``."""
    out = []
    for n in n_list:
        m = row_moments(d, scheme, n, tau, cap)
        law = limit_law_for(scheme, n, tau)
        out.append(
            ConditionRow(m, law.levy_tail(tau), law.C, truncated_second_moment_limit(law, tau))
        )
    return out


def exact_normalized_log_cf(
    d: LatticeDistribution | None, scheme: Scheme, n: int, u_grid=None, cap: int = DEFAULT_CAP
) -> np.ndarray:
    """``log E exp(iu (Z_n - A_n) / B_n)`` for every ``u`` in the grid.

    With ``g(u) = E exp(iu W) = 1 + delta(u)`` the exact identity
    ``g^N = exp(N log(1 + delta))`` holds for integer ``N`` on any branch, and

        -iu A/B + N log(1 + delta) = N delta_c + N (log(1 + delta) - delta)

    where ``delta_c = E[e^{iuW} - 1 - iuW 1_comp]`` carries the centring.  Both
    pieces are formed without cancellation, so accuracy does not degrade with
    ``N``.  Repeated squaring of ``g`` would not work here: once ``N`` exceeds
    about ``1e16``, ``g`` rounds to a number whose power has the wrong phase.
    """
    src = _check_source(d, scheme)
    rec = scheme.record(n)
    row = exact_pmf(src, n, cap)
    s, lp = row.values, row.log_pmf
    b, log_N = rec.b, rec.log_N
    comp = compensation_mask(scheme.case, s, b)
    no_comp = np.zeros_like(comp)
    u = np.atleast_1d(np.asarray(DEFAULT_U_GRID if u_grid is None else u_grid, dtype=float))
    out = np.empty(u.shape, dtype=complex)
    for i, ui in enumerate(u):
        if ui == 0.0:
            out[i] = 0.0
            continue
        logy = math.log(abs(ui)) + (s - b)
        sign = math.copysign(1.0, ui)
        lm_c, ph_c = log_bracket(logy, sign, comp)
        main = weighted_exp_sum(log_N + lp, lm_c, ph_c)
        lm, ph = log_bracket(logy, sign, no_comp)
        delta = weighted_exp_sum(lp, lm, ph)
        corr = scale_by_exp(complex(log1p_minus_identity(np.array([delta]))[0]), log_N)
        out[i] = main + corr
    return out


def exact_normalized_cf(
    d: LatticeDistribution | None, scheme: Scheme, n: int, u_grid=None, cap: int = DEFAULT_CAP
) -> np.ndarray:
    """Characteristic function of ``(Z_n - A_n) / B_n`` on ``u_grid``."""
    return np.exp(exact_normalized_log_cf(d, scheme, n, u_grid, cap))


@dataclass(frozen=True)
class CfComparison:
    n: int
    delta: float
    u: np.ndarray
    cf_n: np.ndarray
    cf_limit: np.ndarray

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.cf_n - self.cf_limit)

    @property
    def sup_err(self) -> float:
        return float(np.max(self.abs_err))


def compare_cf(
    d: LatticeDistribution | None,
    scheme: Scheme,
    n: int,
    u_grid=None,
    limit_delta: float | None = None,
    cap: int = DEFAULT_CAP,
) -> CfComparison:
    """Exact CF of row ``n`` next to the limit CF at ``Delta_n`` (or ``limit_delta``)."""
    u = np.asarray(DEFAULT_U_GRID if u_grid is None else u_grid, dtype=float)
    delta = scheme.record(n).delta if limit_delta is None else limit_delta
    law = SemiStableLaw(scheme.alpha, delta, scheme.h)
    return CfComparison(n, delta, u, exact_normalized_cf(d, scheme, n, u, cap), law.cf(u))


__all__ = [
    "RowMoments",
    "ConditionRow",
    "CfComparison",
    "row_moments",
    "condition_table",
    "exact_normalized_cf",
    "exact_normalized_log_cf",
    "compare_cf",
    "limit_law_for",
    "truncated_second_moment_limit",
    "DEFAULT_U_GRID",
    "CRITICAL",
    "MEAN",
]
