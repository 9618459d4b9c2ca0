"""Cumulant generating function, its Legendre transform and exponential tilts.

For a finite-support ``V`` the function ``psi(t) = log E exp(tV)`` is finite
and strictly convex on the whole line.  All derivatives are computed from
moments of the tilted law ``P_t[V = x] = exp(t x - psi(t)) P[V = x]``:
``psi'(t)`` is its mean and ``psi''(t)`` its variance.

The rate function ``I(beta) = sup_t (beta t - psi(t))`` is evaluated through
the maximiser ``t*`` solving ``psi'(t*) = beta``.  On the branch ``t > 0``
the map ``t -> t psi'(t) - psi(t) = I(psi'(t))`` is strictly increasing,
which gives both ``I^{-1}`` and the index ``alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from .errors import OutOfRange
from .lattice_dist import LatticeDistribution

# |psi'(t) - beta| < NEWTON_RTOL * (|beta| + 1) stops the saddle-point solver
NEWTON_RTOL = 1e-13
MAX_ITER = 400


def _solve_increasing(f, fprime, target, lo, hi, atol):
    """Newton iteration safeguarded by bisection for increasing ``f`` on ``[lo, hi]``.

    ``f(lo) <= target <= f(hi)`` must hold.  Returns the root estimate.
    """
    x = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        fx = f(x) - target
        if abs(fx) < atol:
            return x
        if fx > 0:
            hi = x
        else:
            lo = x
        d = fprime(x)
        step_ok = False
        if d > 0:
            xn = x - fx / d
            if lo < xn < hi:
                step_ok = True
        if not step_ok:
            xn = 0.5 * (lo + hi)
        if xn == x or hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            return xn
        x = xn
    return x


@dataclass(frozen=True)
class CumulantProfile:
    """Evaluator bundle for ``psi`` and the derived large-deviation objects."""

    source: LatticeDistribution
    _x: np.ndarray = field(init=False, repr=False, compare=False)
    _logp: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_x", self.source.values)
        object.__setattr__(self, "_logp", self.source.log_prob_array)

    @property
    def h(self) -> float:
        return self.source.h

    @property
    def beta_minus(self) -> float:
        return float(self._x[0])

    @property
    def beta_plus(self) -> float:
        return float(self._x[-1])

    @property
    def beta0(self) -> float:
        return self.psi_d1(0.0)

    @property
    def rate_sup(self) -> float:
        """``lim I(beta)`` as ``beta`` increases to the top atom: ``-log P[V = max]``."""
        return float(-self._logp[-1])

    @property
    def rate_inf(self) -> float:
        """``lim I(beta)`` as ``beta`` decreases to the bottom atom."""
        return float(-self._logp[0])

    # -- psi and derivatives ------------------------------------------------

    def _tilted_weights(self, t: float) -> tuple[np.ndarray, float]:
        a = self._logp + t * self._x
        lse = logsumexp(a)
        return np.exp(a - lse), float(lse)

    def psi(self, t: float) -> float:
        return float(logsumexp(self._logp + t * self._x))

    def psi_d1(self, t: float) -> float:
        w, _ = self._tilted_weights(t)
        return float(np.dot(w, self._x))

    def psi_d2(self, t: float) -> float:
        w, _ = self._tilted_weights(t)
        m = np.dot(w, self._x)
        return float(np.dot(w, (self._x - m) ** 2))

    def psi_all(self, t: float) -> tuple[float, float, float]:
        """``(psi, psi', psi'')`` at ``t`` from one tilted-weight evaluation."""
        w, lse = self._tilted_weights(t)
        m = float(np.dot(w, self._x))
        return lse, m, float(np.dot(w, (self._x - m) ** 2))

    def psi_array(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return logsumexp(self._logp[None, :] + t.reshape(-1, 1) * self._x[None, :], axis=1).reshape(t.shape)

    # -- Legendre transform ---------------------------------------------------

    def saddle_point(self, beta: float) -> float:
        """Solve ``psi'(t) = beta`` for ``t``; ``beta`` must lie strictly inside the support."""
        if not (self.beta_minus < beta < self.beta_plus):
            raise OutOfRange(
                f"beta={beta!r} outside ({self.beta_minus!r}, {self.beta_plus!r})"
            )
        atol = NEWTON_RTOL * (abs(beta) + 1.0)
        if abs(self.beta0 - beta) < atol:
            return 0.0
        lo, hi = (0.0, 1.0) if beta > self.beta0 else (-1.0, 0.0)
        if beta > self.beta0:
            while self.psi_d1(hi) < beta:
                lo, hi = hi, 2.0 * hi
                if hi > 1e300:
                    raise OutOfRange(f"beta={beta!r} too close to the upper edge")
        else:
            while self.psi_d1(lo) > beta:
                lo, hi = 2.0 * lo, lo
                if lo < -1e300:
                    raise OutOfRange(f"beta={beta!r} too close to the lower edge")
        return _solve_increasing(self.psi_d1, self.psi_d2, beta, lo, hi, atol)

    def rate_with_tilt(self, beta: float) -> tuple[float, float]:
        """Return ``(I(beta), t*)`` where ``t*`` attains the supremum."""
        t = self.saddle_point(beta)
        return beta * t - self.psi(t), t

    def rate(self, beta: float) -> float:
        """Rate function ``I(beta)`` for ``beta`` strictly inside the support."""
        return self.rate_with_tilt(beta)[0]

    def _legendre_along_tilt(self, t: float) -> float:
        """``t psi'(t) - psi(t)``, which equals ``I(psi'(t))``."""
        lse, m, _ = self.psi_all(t)
        return t * m - lse

    def _solve_tilt_for_level(self, c: float, t_max: float | None) -> float:
        """Solve ``t psi'(t) - psi(t) = c`` on ``t > 0``."""
        f = self._legendre_along_tilt

        def fprime(t):
            return t * self.psi_d2(t)

        atol = 1e-15 * max(1.0, abs(c))
        lo, hi = 0.0, 1.0 if t_max is None else t_max
        if t_max is None:
            while f(hi) < c:
                lo, hi = hi, 2.0 * hi
                if hi > 1e300:
                    raise OutOfRange(f"level {c!r} not attained")
        return _solve_increasing(f, fprime, c, lo, hi, atol)

    def rate_inverse_with_tilt(self, c: float) -> tuple[float, float]:
        """Return ``(beta, t)`` with ``beta = I^{-1}(c)`` on the branch above ``beta0``."""
        if c == 0.0:
            return self.beta0, 0.0
        if not (0.0 < c < self.rate_sup):
            raise OutOfRange(f"level c={c!r} outside (0, {self.rate_sup!r})")
        t = self._solve_tilt_for_level(c, None)
        return self.psi_d1(t), t

    def rate_inverse(self, c: float) -> float:
        """``I^{-1}(c)`` taking values in ``(beta0, beta_plus)``."""
        return self.rate_inverse_with_tilt(c)[0]

    # -- critical points and alpha -------------------------------------------

    def critical_points(self) -> tuple[float, float]:
        """``(psi'(1) - psi(1), 2 psi'(2) - psi(2))``."""
        return self._legendre_along_tilt(1.0), self._legendre_along_tilt(2.0)

    @property
    def lambda1(self) -> float:
        return self.critical_points()[0]

    @property
    def lambda2(self) -> float:
        return self.critical_points()[1]

    def solve_alpha(self, lam: float) -> float:
        """Unique ``alpha`` in ``(0, 2)`` with ``alpha psi'(alpha) - psi(alpha) = lam``."""
        lam1, lam2 = self.critical_points()
        if not (0.0 < lam < lam2):
            raise OutOfRange(
                f"lambda={lam!r} outside (0, lambda_2={lam2!r}); "
                "the semi-stable regime needs 0 < lambda < lambda_2"
            )
        if lam == lam1:
            return 1.0
        return self._solve_tilt_for_level(lam, 2.0)


@dataclass(frozen=True)
class TiltedDistribution(LatticeDistribution):
    """Exponential tilt of ``base`` by ``t0``; a lattice distribution in its own right."""

    base: LatticeDistribution | None = None
    t0: float = 0.0


def tilt(d: LatticeDistribution, t0: float) -> TiltedDistribution:
    """Exponential change of measure ``P[V~ = x] = exp(t0 x - psi(t0)) P[V = x]``."""
    a = d.log_prob_array + t0 * d.values
    a = a - logsumexp(a)
    return TiltedDistribution(
        d.indices,
        tuple(float(x) for x in a),
        d.h_exact,
        d.offset_exact,
        base=d,
        t0=float(t0),
    )


def bernoulli(p: float, h: float | Fraction | str = 1) -> LatticeDistribution:
    """``V`` equal to ``h`` with probability ``p`` and to 0 otherwise."""
    from .lattice_dist import detect_span, parse_value

    hv = parse_value(h)
    return detect_span([(Fraction(0), 1.0 - p), (hv, p)])


def profile(d: LatticeDistribution) -> CumulantProfile:
    return CumulantProfile(d)


