"""Cancellation-free pieces of Levy-Khintchine sums.

``e^{iy} - 1`` and ``e^{iy} - 1 - iy`` lose all relative accuracy for small
``y`` when evaluated directly; below ``SMALL`` they are computed from their
Taylor series, which converges to double precision in a dozen terms.
"""
from __future__ import annotations

import math

import numpy as np

SMALL = 0.05
_TERMS = 12


def _series_compensated(y: np.ndarray) -> np.ndarray:
    """``f(y)`` with ``e^{iy} - 1 - iy = -(y**2 / 2) f(y)``."""
    iy = 1j * y
    f = np.zeros_like(iy)
    for m in range(_TERMS + 1, 1, -1):
        f = f * iy + 2.0 / math.factorial(m)
    return f


def _series_plain(y: np.ndarray) -> np.ndarray:
    """``g(y)`` with ``e^{iy} - 1 = iy g(y)``."""
    iy = 1j * y
    g = np.zeros_like(iy)
    for m in range(_TERMS + 1, 0, -1):
        g = g * iy + 1.0 / math.factorial(m)
    return g


def bracket(y: np.ndarray, compensated: np.ndarray) -> np.ndarray:
    """``e^{iy} - 1 - i y c`` with ``c`` boolean, elementwise, broadcasting."""
    y, compensated = np.broadcast_arrays(np.asarray(y, float), np.asarray(compensated, bool))
    out = np.empty(y.shape, dtype=complex)
    small = np.abs(y) < SMALL
    big = ~small
    yb = y[big]
    out[big] = -2.0 * np.sin(0.5 * yb) ** 2 + 1j * (np.sin(yb) - yb * compensated[big])
    ys = y[small]
    cs = compensated[small]
    vals = np.empty(ys.shape, dtype=complex)
    if cs.any():
        yc = ys[cs]
        vals[cs] = -0.5 * yc * yc * _series_compensated(yc)
    if (~cs).any():
        yp = ys[~cs]
        vals[~cs] = 1j * yp * _series_plain(yp)
    out[small] = vals
    return out


def log_bracket(logy: np.ndarray, sign: float, compensated: np.ndarray):
    """Log-modulus and phase of ``e^{iy} - 1 - i y c`` for ``y = sign * exp(logy)``.

    Works when ``|y|`` underflows, so that huge weights can multiply tiny
    brackets without ever forming either in double precision.
    """
    logy = np.asarray(logy, float)
    compensated = np.broadcast_to(np.asarray(compensated, bool), logy.shape)
    logmag = np.empty(logy.shape)
    phase = np.empty(logy.shape)
    small = logy < math.log(SMALL)
    y = sign * np.exp(np.minimum(logy, 700.0))

    big = ~small
    if big.any():
        yb = y[big]
        b = -2.0 * np.sin(0.5 * yb) ** 2 + 1j * (np.sin(yb) - yb * compensated[big])
        with np.errstate(divide="ignore"):
            logmag[big] = np.log(np.abs(b))
        phase[big] = np.angle(b)
    if small.any():
        ys = y[small]
        ly = logy[small]
        cs = compensated[small]
        lm = np.empty(ys.shape)
        ph = np.empty(ys.shape)
        if cs.any():
            f = _series_compensated(ys[cs])
            lm[cs] = 2.0 * ly[cs] - math.log(2.0) + np.log(np.abs(f))
            ph[cs] = math.pi + np.angle(f)
        if (~cs).any():
            g = _series_plain(ys[~cs])
            lm[~cs] = ly[~cs] + np.log(np.abs(g))
            ph[~cs] = math.copysign(0.5 * math.pi, sign) + np.angle(g)
        logmag[small] = lm
        phase[small] = ph
    return logmag, phase


def log1p_minus_identity(z: np.ndarray) -> np.ndarray:
    """``log(1 + z) - z`` for complex ``z`` with ``|z| < 1``, accurate near 0."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 0.1
    zs = z[small]
    acc = np.zeros_like(zs)
    for m in range(40, 1, -1):
        acc = acc * zs + (-1.0) ** (m + 1) / m
    out[small] = acc * zs * zs
    zb = z[~small]
    out[~small] = np.log1p(zb) - zb
    return out


def weighted_exp_sum(logweight: np.ndarray, logmag: np.ndarray, phase: np.ndarray) -> complex:
    """``sum exp(logweight + logmag + i phase)`` with negligible terms dropped."""
    le = logweight + logmag
    keep = np.isfinite(le) & (le > -745.0)
    if not keep.any():
        return 0j
    return complex(np.sum(np.exp(le[keep]) * np.exp(1j * phase[keep])))


def scale_by_exp(z: complex, logscale: float) -> complex:
    """``exp(logscale) * z`` without overflowing when ``exp(logscale)`` alone would."""
    if z == 0:
        return 0j
    return complex(np.exp(logscale + math.log(abs(z))) * np.exp(1j * np.angle(z)))
