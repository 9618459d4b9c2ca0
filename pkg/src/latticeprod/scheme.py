"""Normalising sequences ``N_n``, ``b_n``, ``A_n`` and offset subsequences.

For fixed ``lambda`` in ``(0, lambda_2)`` the per-n data are::

    c_n = (1/n) log(N_n h / sqrt(2 pi psi''(alpha) n))
    b_n = n I^{-1}(c_n),        B_n = exp(b_n),        Delta_n = {b_n}_h

and ``A_n`` follows the three-case rule: zero for ``lambda < lambda_1``, the
truncated mean ``N_n E[exp(S_n) 1{S_n < b_n}]`` at ``lambda = lambda_1`` and
``E Z_n = N_n exp(n psi(1))`` above ``lambda_1``.  ``A_n`` is kept as a log.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np
from scipy.special import logsumexp

from .cumulant import CumulantProfile
from .errors import OutOfRange
from .lattice_dist import DEFAULT_CAP, circle_distance, exact_pmf, lattice_frac

ZERO, CRITICAL, MEAN = "zero", "critical", "mean"
CASES = (ZERO, CRITICAL, MEAN)
CASE_TOL = 1e-12
# lattice points closer than this to b_n count as equal to b_n
TIE_TOL = 1e-12


def default_count(lam: float, n: int) -> int:
    """``max(1, round(exp(lambda n)))`` as an exact integer."""
    e = lam * n
    if e < 700.0:
        return max(1, round(math.exp(e)))
    with mpmath.workdps(int(e / 2.3) + 30):
        return int(mpmath.nint(mpmath.exp(mpmath.mpf(lam) * n)))


@dataclass(frozen=True)
class SchemeRecord:
    n: int
    N: int
    log_N: float
    c: float
    b: float = math.nan
    tilt: float = math.nan
    delta: float = math.nan
    log_A: float | None = None
    skipped: bool = False

    @property
    def log_B(self) -> float:
        return self.b


@dataclass(frozen=True)
class Scheme:
    """Normalisation data for one ``lambda`` and a range of ``n``."""

    profile: CumulantProfile
    lam: float
    alpha: float
    case: str
    records: Mapping[int, SchemeRecord] = field(repr=False)

    @property
    def h(self) -> float:
        return self.profile.h

    @property
    def psi2_alpha(self) -> float:
        return self.profile.psi_d2(self.alpha)

    @property
    def valid_ns(self) -> list[int]:
        return [n for n, r in sorted(self.records.items()) if not r.skipped]

    @property
    def n_min(self) -> int | None:
        ns = self.valid_ns
        return ns[0] if ns else None

    def record(self, n: int) -> SchemeRecord:
        r = self.records.get(n)
        if r is None or r.skipped:
            raise OutOfRange(f"n={n} is not a valid index of this scheme")
        return r

    def __iter__(self):
        return (self.records[n] for n in sorted(self.records))


def _log_truncated_mean_below(profile: CumulantProfile, n: int, b: float, cap: int) -> float:
    """``log E[exp(S_n) 1{S_n < b}]`` from the exact row law (strict inequality)."""
    row = exact_pmf(profile.source, n, cap)
    s = row.values
    mask = compensation_mask(CRITICAL, s, b)
    if not mask.any():
        return -math.inf
    return float(logsumexp(row.log_pmf[mask] + s[mask]))


def compensation_mask(case: str, values: np.ndarray, b: float) -> np.ndarray:
    """Lattice points ``s`` whose ``exp(s - b)`` enters the centring ``A_n / B_n``."""
    if case == MEAN:
        return np.ones(values.shape, dtype=bool)
    if case == CRITICAL:
        return values < b - TIE_TOL * max(1.0, abs(b))
    return np.zeros(values.shape, dtype=bool)


def select_case(profile: CumulantProfile, lam: float, tol: float = CASE_TOL) -> str:
    lam1 = profile.lambda1
    if abs(lam - lam1) <= tol:
        return CRITICAL
    return ZERO if lam < lam1 else MEAN


def build_scheme(
    profile: CumulantProfile,
    lam: float,
    n_max: int,
    counts: Mapping[int, int] | Callable[[int], int] | None = None,
    case: str = "auto",
    cap: int = DEFAULT_CAP,
    n_list: Sequence[int] | None = None,
) -> Scheme:
    """Build per-n records for ``n <= n_max``.

    Parameters
    ----------
    counts
        Growth rule for ``N_n``: ``None`` for ``round(exp(lambda n))``, a
        callable, or an explicit table (only its keys are used).
    case
        ``"auto"`` selects the centring by comparing ``lambda`` with
        ``lambda_1`` at absolute tolerance ``1e-12``; ``"zero"``,
        ``"critical"`` or ``"mean"`` force it.  ``"critical"`` pins ``alpha = 1``.
    n_list
        Restrict the records to these ``n`` (still capped at ``n_max``).

    Indices where ``c_n`` leaves ``(0, I(beta_plus-))`` are kept as skipped
    records.
    """
    lam1, lam2 = profile.critical_points()
    if not (0.0 < lam < lam2):
        raise OutOfRange(
            f"lambda={lam!r} outside (0, lambda_2={lam2!r}); "
            "the semi-stable regime needs 0 < lambda < lambda_2"
        )
    if case == "auto":
        case = select_case(profile, lam)
    elif case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    alpha = 1.0 if case == CRITICAL else profile.solve_alpha(lam)
    h = profile.h
    psi2 = profile.psi_d2(alpha)
    psi1 = profile.psi(1.0)

    if counts is None:
        ns = range(1, n_max + 1)
        rule = lambda n: default_count(lam, n)  # noqa: E731
    elif callable(counts):
        ns = range(1, n_max + 1)
        rule = counts
    else:
        ns = sorted(n for n in counts if n <= n_max)
        rule = counts.__getitem__
    if n_list is not None:
        wanted = set(n_list)
        ns = [n for n in ns if n in wanted]

    records = {}
    for n in ns:
        N = int(rule(n))
        if N < 1:
            raise ValueError(f"N_{n} must be a positive integer, got {N}")
        log_N = math.log(N)
        c = (log_N + math.log(h) - 0.5 * math.log(2.0 * math.pi * psi2 * n)) / n
        if not (0.0 < c < profile.rate_sup):
            records[n] = SchemeRecord(n, N, log_N, c, skipped=True)
            continue
        beta, t = profile.rate_inverse_with_tilt(c)
        b = n * beta
        if case == ZERO:
            log_A = None
        elif case == MEAN:
            log_A = log_N + n * psi1
        else:
            log_A = log_N + _log_truncated_mean_below(profile, n, b, cap)
        records[n] = SchemeRecord(n, N, log_N, c, b, t, lattice_frac(b, h), log_A)
    return Scheme(profile, lam, alpha, case, records)


@dataclass(frozen=True)
class SubsequenceQuery:
    delta_target: float
    eps: float
    n_lo: int = 1
    n_hi: int | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")


def find_subsequence(
    scheme: Scheme,
    delta_target: float | SubsequenceQuery,
    eps: float | None = None,
    n_range: tuple[int, int] | None = None,
) -> list[int]:
    """All valid ``n`` whose ``{b_n}_h`` is within ``eps`` of the target on ``R/hZ``."""
    if isinstance(delta_target, SubsequenceQuery):
        q = delta_target
    else:
        lo, hi = n_range if n_range is not None else (1, None)
        q = SubsequenceQuery(float(delta_target), float(eps), lo, hi)
    h = scheme.h
    if not (0.0 <= q.delta_target <= h):
        raise OutOfRange(f"delta target {q.delta_target!r} outside [0, {h!r}]")
    out = []
    for n in scheme.valid_ns:
        if n < q.n_lo or (q.n_hi is not None and n > q.n_hi):
            continue
        if circle_distance(scheme.records[n].delta, q.delta_target, h) < q.eps:
            out.append(n)
    return out


def lemma_aux_residual(scheme: Scheme, n: int, x: float) -> float:
    """``n I((b_n + x)/n) - log(N_n h / sqrt(2 pi psi''(alpha) n)) - alpha x``.

    Tends to zero as ``n`` grows for fixed ``x``.
    """
    r = scheme.record(n)
    p = scheme.profile
    beta = (r.b + x) / n
    if not (p.beta0 < beta < p.beta_plus):
        raise OutOfRange(f"(b_n + x)/n = {beta!r} outside (beta0, beta_plus)")
    level = r.log_N + math.log(scheme.h) - 0.5 * math.log(2.0 * math.pi * scheme.psi2_alpha * n)
    return n * p.rate(beta) - level - scheme.alpha * x


def scheme_table(scheme: Scheme) -> np.ndarray:
    """Structured array view of the valid records, for quick inspection."""
    rows = [(r.n, r.log_N, r.c, r.b, r.delta) for r in scheme if not r.skipped]
    return np.array(rows, dtype=[("n", int), ("log_N", float), ("c", float), ("b", float), ("delta", float)])
