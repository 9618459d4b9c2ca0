"""Semi-stable limit laws ``F_{alpha, Delta}`` on the lattice ``e^{hZ - Delta}``.

The law is infinitely divisible with Levy measure
``nu = sum_{x in e^{hZ - Delta}} x^{-alpha} delta_x`` and::

    log phi(u) = i C u + sum_x (e^{iux} - 1 - iux 1{x < tau}) x^{-alpha}

where the drift ``C = C_{alpha, Delta; tau}`` depends on the regime of
``alpha`` and on ``Theta = [Delta + log tau]_h - Delta``.  Changing ``tau``
changes ``C`` and the compensator together, leaving ``phi`` unchanged.

The CDF is obtained by Gil-Pelaez inversion after splitting off the finitely
many large jumps, which are handled as an exact compound Poisson mixture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import mpmath
import numpy as np

from ._cfnum import bracket
from .errors import OutOfRange, QuadratureNotConverged, TauOnLattice
from .lattice_dist import lattice_floor

ALPHA_ONE_TOL = 1e-12
TAU_LATTICE_TOL = 1e-12
SERIES_TOL = 1e-12
# |u x| above this uses extended precision phases
PHASE_SWITCH = 1e6
PHASE_DPS = 50


def _check_alpha(alpha: float):
    if not (0.0 < alpha < 2.0):
        raise OutOfRange(f"alpha={alpha!r} outside (0, 2)")


def _check_tau(delta: float, h: float, tau: float):
    if not tau > 0:
        raise OutOfRange(f"tau must be positive, got {tau!r}")
    s = (math.log(tau) + delta) / h
    if abs(s - round(s)) < TAU_LATTICE_TOL:
        raise TauOnLattice(f"tau={tau!r} lies on the support e^(hZ - Delta)")


def theta(delta: float, h: float, tau: float) -> float:
    """``Theta_{Delta; tau} = [Delta + log tau]_h - Delta``."""
    return lattice_floor(delta + math.log(tau), h) - delta


def shift_constant(alpha: float, delta: float, h: float, tau: float) -> float:
    """Drift ``C_{alpha, Delta; tau}`` of the Levy-Khintchine representation."""
    _check_alpha(alpha)
    _check_tau(delta, h, tau)
    if abs(alpha - 1.0) < ALPHA_ONE_TOL:
        return lattice_floor(math.log(tau) + delta, h) / h
    th = theta(delta, h, tau)
    return math.exp(-(alpha - 1.0) * th) / (-math.expm1((alpha - 1.0) * h))


def levy_tail_value(alpha: float, delta: float, h: float, tau: float) -> float:
    """``nu(tau, inf) = e^{-alpha (Theta + h)} / (1 - e^{-alpha h})``."""
    _check_alpha(alpha)
    _check_tau(delta, h, tau)
    th = theta(delta, h, tau)
    return math.exp(-alpha * (th + h)) / (-math.expm1(-alpha * h))


def auto_tau(delta: float, h: float) -> float:
    """Log-midpoint between support points with ``log tau`` in ``(-h/2, h/2]``."""
    return math.exp(h * (math.floor(delta / h) + 0.5) - delta)


@dataclass(frozen=True)
class CdfPlan:
    """Precomputed pieces of the CDF evaluator; see :meth:`SemiStableLaw.cdf`."""

    jump_values: np.ndarray
    jump_probs: np.ndarray
    grid: np.ndarray
    values: np.ndarray
    lo: float
    hi: float
    error: float


@dataclass(frozen=True)
class SemiStableLaw:
    """``F_{alpha, Delta}`` on span ``h`` with truncation point ``tau``.

    ``tau="auto"`` picks the log-midpoint between support points nearest 1.
    """

    alpha: float
    delta: float
    h: float = 1.0
    tau: float | str = "auto"
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not self.h > 0:
            raise OutOfRange("h must be positive")
        if not (0.0 <= self.delta <= self.h):
            raise OutOfRange(f"delta={self.delta!r} outside [0, h]")
        if self.tau == "auto":
            object.__setattr__(self, "tau", auto_tau(self.delta, self.h))
        object.__setattr__(self, "tau", float(self.tau))
        _check_tau(self.delta, self.h, self.tau)

    # -- closed forms -------------------------------------------------------

    @property
    def theta(self) -> float:
        return theta(self.delta, self.h, self.tau)

    @property
    def C(self) -> float:
        return shift_constant(self.alpha, self.delta, self.h, self.tau)

    def levy_tail(self, tau_prime: float) -> float:
        """Levy measure of ``(tau', inf)``."""
        return levy_tail_value(self.alpha, self.delta, self.h, tau_prime)

    def support_index(self, x: float) -> float:
        """Real ``k`` with ``x = e^{hk - Delta}``."""
        return (math.log(x) + self.delta) / self.h

    @cached_property
    def k_tau(self) -> int:
        """Largest ``k`` with ``e^{hk - Delta} < tau``."""
        return math.floor(self.support_index(self.tau))

    # -- truncation -----------------------------------------------------------

    def truncation(self, tol: float = SERIES_TOL) -> tuple[int, int]:
        """Index range ``[k_lo, k_hi]`` whose omitted terms are below ``tol (1 + u^2)``.

        Large side: ``2 sum_{k > k_hi} x_k^{-alpha}``.  Small side:
        ``(u^2/2) sum_{k < k_lo} x_k^{2 - alpha}`` from ``|e^{iy} - 1 - iy| <= y^2/2``.
        """
        a, h, d = self.alpha, self.h, self.delta
        half = 0.5 * tol
        big = math.log(2.0 / (half * -math.expm1(-a * h)))
        k_hi = max(math.ceil((big / a + d) / h) - 1, self.k_tau + 1)
        small = math.log(2.0 * half * -math.expm1(-(2.0 - a) * h))
        k_lo = min(math.floor((small / (2.0 - a) + d) / h) + 1, self.k_tau)
        return k_lo, k_hi

    def _support(self, tol: float = SERIES_TOL):
        k_lo, k_hi = self.truncation(tol)
        k = np.arange(k_lo, k_hi + 1)
        logx = self.h * k - self.delta
        return k, logx, np.exp(logx), np.exp(-self.alpha * logx), k <= self.k_tau

    # -- characteristic function ---------------------------------------------

    def log_cf(self, u, precise: bool = True, log_scale: float = 0.0):
        """``log phi(e^{log_scale} u)`` for scalar or array ``u``.

        ``precise`` switches phases with ``|u x| > 1e6`` to extended precision
        so that they are reproducible under ``u -> e^{h} u``.
        """
        u = np.asarray(u, dtype=float)
        shape = u.shape
        uf = u.ravel()
        k, logx, x, wt, comp = self._support()
        scale = math.exp(log_scale)
        y = (scale * uf)[:, None] * x[None, :]
        br = bracket(y, comp[None, :])
        if precise:
            rows, cols = np.nonzero(np.abs(y) > PHASE_SWITCH)
            if rows.size:
                br[rows, cols] = self._precise_brackets(uf[rows], k[cols], log_scale, comp[cols])
        out = 1j * self.C * scale * uf + br @ wt
        return out.reshape(shape) if shape else complex(out[0])

    def _precise_brackets(self, u, k, log_scale, comp):
        res = np.empty(len(u), dtype=complex)
        with mpmath.workdps(PHASE_DPS):
            h = mpmath.mpf(self.h)
            d = mpmath.mpf(self.delta)
            ls = mpmath.mpf(log_scale)
            for i, (ui, ki, ci) in enumerate(zip(u, k, comp)):
                y = mpmath.exp(mpmath.log(abs(mpmath.mpf(ui))) + ls + h * int(ki) - d)
                if ui < 0:
                    y = -y
                c = mpmath.cos(y)
                s = mpmath.sin(y)
                res[i] = complex(float(c - 1), float(s - y) if ci else float(s))
        return res

    def cf(self, u, precise: bool = True):
        return np.exp(self.log_cf(u, precise))

    def semistability_defect(self, u_grid, a_factor: float = 1.0) -> float:
        """``max | |phi(u)|^a - |phi(e^h u)| |`` with ``a = a_factor e^{alpha h}``.

        The scaled side is evaluated at ``u a^{1/alpha}``, so ``a_factor != 1``
        gives a negative control.
        """
        u = np.asarray(u_grid, dtype=float)
        a = a_factor * math.exp(self.alpha * self.h)
        # keep the scale exactly h when unperturbed so extended phases line up
        log_scale = self.h + math.log(a_factor) / self.alpha
        lhs = np.exp(a * self.log_cf(u).real)
        rhs = np.exp(self.log_cf(u, log_scale=log_scale).real)
        return float(np.max(np.abs(lhs - rhs)))

    # -- distribution function -------------------------------------------------

    def cdf(self, x, tol: float = 1e-6, return_error: bool = False):
        """Distribution function by characteristic-function inversion.

        The result is nondecreasing and clipped to ``[0, 1]``.  With
        ``return_error`` a pair ``(values, error_bound)`` is returned.

        Raises
        ------
        QuadratureNotConverged
            The error bound could not be brought below ``tol``.
        """
        plan = self._cache.get(("cdf", tol))
        if plan is None:
            plan = _build_cdf_plan(self, tol)
            self._cache[("cdf", tol)] = plan
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.zeros(flat.shape)
        chunk = max(1, 2_000_000 // max(1, len(plan.jump_values)))
        for s in range(0, len(flat), chunk):
            z = flat[s : s + chunk, None] - plan.jump_values[None, :]
            fy = np.interp(z, plan.grid, plan.values, left=0.0, right=1.0)
            out[s : s + chunk] = fy @ plan.jump_probs
        out = np.clip(out, 0.0, 1.0).reshape(x.shape)
        if return_error:
            return out, plan.error
        return out

    def cdf_error(self, tol: float = 1e-6) -> float:
        self.cdf(0.0, tol)
        return self._cache[("cdf", tol)].error


def _enumerate_jumps(sizes: np.ndarray, rates: np.ndarray, p_min: float):
    """Compound Poisson configurations of the large jumps with probability above ``p_min``.

    Returns ``(values, probs)``; ``1 - sum(probs)`` is the omitted mass.
    """
    mu = float(rates.sum())
    vals, probs = [0.0], [math.exp(-mu)]
    # (prob, value, last index, multiplicity of last index)
    stack = [(math.exp(-mu), 0.0, 0, 0)]
    K = len(sizes)
    while stack:
        p, v, last, mult = stack.pop()
        for j in range(last, K):
            repeat = j == last and mult > 0
            q = p * rates[j] / (mult + 1 if repeat else 1)
            if q < p_min:
                # rates decrease in j, so only a repeated index can be followed by a larger child
                if repeat:
                    continue
                break
            vals.append(v + sizes[j])
            probs.append(q)
            stack.append((q, v + sizes[j], j, mult + 1 if repeat else 1))
    return np.array(vals), np.array(probs)


def _bennett_radius(var: float, jump: float, eps: float) -> float:
    """``t`` with Bennett bound ``exp(-(var/b^2) h(b t / var)) = eps``."""
    target = math.log(1.0 / eps)

    def g(t):
        s = jump * t / var
        return var / jump**2 * ((1 + s) * math.log1p(s) - s) - target

    lo, hi = 0.0, max(1.0, math.sqrt(2 * var * target))
    while g(hi) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return hi


def _build_cdf_plan(law: SemiStableLaw, tol: float) -> CdfPlan:
    a, h, d = law.alpha, law.h, law.delta
    k, logx, x, wt, comp = law._support()
    series_err = SERIES_TOL

    # smallest cutoff index k_M >= k_tau leaving jump intensity <= 1/4 above it
    k_M = law.k_tau
    while math.exp(-a * (h * (k_M + 1) - d)) / -math.expm1(-a * h) > 0.25:
        k_M += 1
    inner = k <= k_M
    big_sizes, big_rates = x[~inner], wt[~inner]

    p_min = tol * 1e-2
    for _ in range(8):
        jv, jp = _enumerate_jumps(big_sizes, big_rates, p_min)
        omitted = max(0.0, 1.0 - math.fsum(jp))
        if omitted < tol / 8:
            break
        p_min *= 0.1
    else:
        raise QuadratureNotConverged("large-jump enumeration did not converge", omitted)

    # small-jump part Y: mean, variance, tail radii
    xi, wi, ci = x[inner], wt[inner], comp[inner]
    mean_y = law.C + float(np.sum(xi[~ci] * wi[~ci]))
    var_y = math.exp((2.0 - a) * (h * k_M - d)) / -math.expm1(-(2.0 - a) * h)
    eps_tail = tol / 16
    t_right = _bennett_radius(var_y, float(xi[-1]), eps_tail)
    t_left = math.sqrt(2.0 * var_y * math.log(1.0 / eps_tail))
    T = 1.05 * (t_left + t_right)
    du = 2.0 * math.pi / T

    # frequency cutoff from |phi_Y(u)| <= exp(-(2/pi^2) u^2 sum_{x <= pi/u} x^{2-alpha})
    def log_mod_bound(u):
        ku = np.minimum(np.floor((np.log(math.pi / u) + d) / h), k_M)
        s = np.exp((2.0 - a) * (h * ku - d)) / -math.expm1(-(2.0 - a) * h)
        return -(2.0 / math.pi**2) * u * u * s

    J = 1024
    J_cap = 1 << 22
    while True:
        j = np.arange(J)
        terms = np.exp(log_mod_bound((j + 0.5) * du)) / (math.pi * (j + 0.5))
        tail = np.cumsum(terms[::-1])[::-1]
        if terms[-1] < 1e-3 * tol / J or J >= J_cap:
            break
        J *= 2
    hits = np.nonzero(tail < tol / 16)[0]
    J_use = int(hits[0]) + 1 if hits.size else J
    trunc_err = float(tail[J_use]) if J_use < J else float(tail[-1])

    uj = (np.arange(J_use) + 0.5) * du
    lo_z = mean_y - t_left
    hi_z = mean_y + t_right
    z0 = lo_z - 0.01 * T
    log_phi = np.empty(J_use, dtype=complex)
    step = max(1, 4_000_000 // len(xi))
    for s in range(0, J_use, step):
        us = uj[s : s + step]
        br = bracket(us[:, None] * xi[None, :], ci[None, :])
        log_phi[s : s + step] = 1j * law.C * us + br @ wi
    coef = np.exp(log_phi - 1j * uj * z0) / (np.arange(J_use) + 0.5)

    M = 1 << max(16, int(math.ceil(math.log2(8 * J_use))))
    for _ in range(4):
        A = np.fft.fft(coef, n=M)
        m = np.arange(M)
        F = 0.5 - np.imag(np.exp(-1j * math.pi * m / M) * A) / math.pi
        z = z0 + m * (T / M)
        keep = (z >= lo_z - 2 * T / M) & (z <= hi_z + 2 * T / M)
        grid, vals = z[keep], np.maximum.accumulate(F[keep])
        # interpolation error at cell midpoints against the direct sum
        probe = grid[:-1][:: max(1, len(grid) // 7)] + 0.5 * T / M
        direct = 0.5 - np.imag(np.exp(-1j * np.outer(probe - z0, uj)) @ coef) / math.pi
        interp_err = float(np.max(np.abs(np.interp(probe, grid, vals) - direct)))
        if interp_err < tol / 8:
            break
        M *= 4
    error = 2 * eps_tail + trunc_err + interp_err + omitted + series_err + eps_tail
    if error > tol:
        raise QuadratureNotConverged(f"CDF error bound {error:.3g} exceeds tolerance {tol:.3g}", error)
    return CdfPlan(jv, jp, grid, vals, lo_z, hi_z, error)
