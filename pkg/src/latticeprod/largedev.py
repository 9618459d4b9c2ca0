"""Precise lattice large deviations for ``S_n`` and their exact counterparts.

For ``beta`` in ``n^{-1} h Z`` and ``t`` solving ``psi'(t) = beta``::

    P[S_n = n beta]  ~ h exp(-n I(beta)) / sqrt(2 pi psi''(t) n)
    P[S_n >= n beta] ~ (point) / (1 - exp(-t h))      beta > beta0
    P[S_n <= n beta] ~ (point) / (1 - exp(t h))       beta < beta0, t < 0

Everything is carried in log space because ``exp(-n I)`` underflows quickly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .cumulant import CumulantProfile
from .errors import OffLattice, OutOfRange
from .lattice_dist import DEFAULT_CAP, exact_pmf

POINT, UPPER, LOWER = "point", "upper_tail", "lower_tail"
SNAP_TOL = 1e-9


@dataclass(frozen=True)
class LdEstimate:
    n: int
    beta: float
    kind: str
    log_asymptotic: float
    log_exact: float
    tilt: float

    @property
    def asymptotic(self) -> float:
        return math.exp(self.log_asymptotic)

    @property
    def exact(self) -> float:
        return math.exp(self.log_exact)

    @property
    def ratio(self) -> float:
        """Exact over asymptotic."""
        return math.exp(self.log_exact - self.log_asymptotic)

    def as_row(self) -> tuple:
        return (self.n, self.beta, self.kind, self.log_exact, self.log_asymptotic, self.ratio)


def snap_to_grid(profile: CumulantProfile, n: int, beta: float) -> tuple[float, int]:
    """Return ``(beta, k)`` with ``n beta = h k`` after snapping within ``1e-9``."""
    h = profile.h
    x = n * beta / h
    k = round(x)
    if abs(x - k) > SNAP_TOL:
        raise OffLattice(f"n*beta = {n * beta!r} is not on the lattice {h!r}*Z")
    return h * k / n, int(k)


def _log_point_asymptotic(profile: CumulantProfile, n: int, beta: float) -> tuple[float, float]:
    rate, t = profile.rate_with_tilt(beta)
    psi2 = profile.psi_d2(t)
    return math.log(profile.h) - n * rate - 0.5 * math.log(2.0 * math.pi * psi2 * n), t


def ld_point(profile: CumulantProfile, n: int, beta: float, cap: int = DEFAULT_CAP) -> LdEstimate:
    """Local estimate for ``P[S_n = n beta]`` next to the exact value."""
    beta, k = snap_to_grid(profile, n, beta)
    if not (profile.beta_minus < beta < profile.beta_plus):
        raise OutOfRange(f"beta={beta!r} outside ({profile.beta_minus!r}, {profile.beta_plus!r})")
    log_asym, t = _log_point_asymptotic(profile, n, beta)
    log_exact = exact_pmf(profile.source, n, cap).log_prob(k)
    return LdEstimate(n, beta, POINT, log_asym, log_exact, t)


def ld_upper(profile: CumulantProfile, n: int, beta: float, cap: int = DEFAULT_CAP) -> LdEstimate:
    """Estimate for ``P[S_n >= n beta]`` with ``beta0 < beta < beta_plus``."""
    beta, k = snap_to_grid(profile, n, beta)
    if not (profile.beta0 < beta < profile.beta_plus):
        raise OutOfRange(
            f"upper tail needs beta in (beta0={profile.beta0!r}, {profile.beta_plus!r}), got {beta!r}"
        )
    log_point, t = _log_point_asymptotic(profile, n, beta)
    log_asym = log_point - math.log(-math.expm1(-t * profile.h))
    log_exact = exact_pmf(profile.source, n, cap).log_tail_ge(k)
    return LdEstimate(n, beta, UPPER, log_asym, log_exact, t)


def ld_lower(profile: CumulantProfile, n: int, beta: float, cap: int = DEFAULT_CAP) -> LdEstimate:
    """Estimate for ``P[S_n <= n beta]`` with ``beta_minus < beta < beta0``."""
    beta, k = snap_to_grid(profile, n, beta)
    if not (profile.beta_minus < beta < profile.beta0):
        raise OutOfRange(
            f"lower tail needs beta in ({profile.beta_minus!r}, beta0={profile.beta0!r}), got {beta!r}"
        )
    log_point, t = _log_point_asymptotic(profile, n, beta)
    # t < 0 so 1 - exp(t h) is positive
    log_asym = log_point - math.log(-math.expm1(t * profile.h))
    log_exact = exact_pmf(profile.source, n, cap).log_tail_le(k)
    return LdEstimate(n, beta, LOWER, log_asym, log_exact, t)


def ld_table(profile: CumulantProfile, ns, betas, kinds=(POINT, UPPER, LOWER), cap: int = DEFAULT_CAP):
    """All admissible ``(n, beta, kind)`` estimates; inadmissible combinations are skipped."""
    fn = {POINT: ld_point, UPPER: ld_upper, LOWER: ld_lower}
    out = []
    for n in ns:
        for beta in betas:
            for kind in kinds:
                try:
                    out.append(fn[kind](profile, n, beta, cap))
                except (OffLattice, OutOfRange):
                    continue
    return out
