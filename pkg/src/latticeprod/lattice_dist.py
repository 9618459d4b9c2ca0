"""Finite-support lattice distributions and exact n-fold convolutions.

Atom values are parsed as exact rationals so that the span ``h`` is found by
integer gcd rather than by a floating point search.  After construction the
distribution is shifted so that every atom lies on ``h * Z``; the removed
offset ``a`` is kept on the object.  Replacing ``V`` by ``V - a`` multiplies
every product ``prod_j exp(V_ij)`` by ``exp(-n a)``, so results for the
original variable are recovered by the factor ``exp(n a)``.
"""
from __future__ import annotations

import math
import numbers
import threading
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable

import numpy as np
from scipy.special import logsumexp

from .errors import CapExceeded, DegenerateDistribution, NotLattice

DEFAULT_CAP = 10**7
# largest support width, in lattice units, accepted from span detection
MAX_LATTICE_WIDTH = 10**6


def parse_value(value) -> Fraction:
    """Parse an atom value given as int, float, ``Fraction`` or ``"p/q"`` string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a valid atom value")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Real):
        if not math.isfinite(value):
            raise ValueError(f"atom value must be finite, got {value!r}")
        # repr gives the shortest decimal that round-trips, e.g. 0.1 -> 1/10
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"unsupported atom value {value!r}")


def lattice_floor(b: float, h: float) -> float:
    """Return ``[b]_h``, the largest multiple of ``h`` not exceeding ``b``.

    Values whose fractional part lies within ``1e-12 * h`` of ``h`` are snapped
    up, so the fractional part always lies in ``[0, h)``.
    """
    q = math.floor(b / h)
    frac = b - h * q
    if h - frac < 1e-12 * h:
        q += 1
    return h * q


def lattice_frac(b: float, h: float) -> float:
    """Return ``{b}_h = b - [b]_h`` in ``[0, h)``."""
    q = math.floor(b / h)
    frac = b - h * q
    if h - frac < 1e-12 * h or frac < 0.0:
        return 0.0
    return frac


def circle_distance(a: float, b: float, h: float) -> float:
    """Distance between ``a`` and ``b`` on the circle ``R / hZ``."""
    d = abs(a - b) % h
    return min(d, h - d)


@dataclass(frozen=True)
class LatticeDistribution:
    """Law of ``V`` on ``h * Z`` given by lattice indices and log-probabilities.

    Use :func:`detect_span` to build one from raw atoms.
    """

    indices: tuple[int, ...]
    log_probs: tuple[float, ...]
    h_exact: Fraction
    offset_exact: Fraction = Fraction(0)

    def __post_init__(self):
        if len(self.indices) != len(self.log_probs):
            raise ValueError("indices and log_probs differ in length")
        if len(self.indices) < 2:
            raise DegenerateDistribution("a lattice distribution needs at least 2 atoms")
        if list(self.indices) != sorted(set(self.indices)):
            raise ValueError("indices must be strictly increasing")
        total = logsumexp(self.log_probs)
        if abs(total) > 1e-12:
            raise ValueError(f"probabilities sum to {math.exp(total)!r}, not 1")

    @property
    def h(self) -> float:
        return float(self.h_exact)

    @property
    def offset(self) -> float:
        return float(self.offset_exact)

    @cached_property
    def index_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)

    @cached_property
    def values(self) -> np.ndarray:
        return self.h * self.index_array.astype(float)

    @cached_property
    def log_prob_array(self) -> np.ndarray:
        return np.asarray(self.log_probs, dtype=float)

    @cached_property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_prob_array)

    @property
    def kmin(self) -> int:
        return self.indices[0]

    @property
    def kmax(self) -> int:
        return self.indices[-1]

    @property
    def mean(self) -> float:
        return float(np.dot(self.probs, self.values))

    @property
    def var(self) -> float:
        return float(np.dot(self.probs, (self.values - self.mean) ** 2))

    def original_values(self) -> list[Fraction]:
        """Atom values before the offset was removed, as exact rationals."""
        return [self.h_exact * k + self.offset_exact for k in self.indices]


def detect_span(atoms: Iterable, tol: float = 1e-12) -> LatticeDistribution:
    """Build a :class:`LatticeDistribution` from ``(value, prob)`` pairs.

    The span ``h`` is the gcd of the pairwise differences, computed exactly
    after scaling every value to a common denominator.  The offset
    ``a = {min value}_h`` is subtracted so the stored atoms lie on ``h * Z``.

    Raises
    ------
    DegenerateDistribution
        Fewer than two distinct atoms.
    NotLattice
        The common span is so small relative to the support width that the
        atoms are numerically non-lattice.
    """
    pairs = []
    for item in atoms:
        if isinstance(item, dict):
            value, prob = item["value"], item["prob"]
        else:
            value, prob = item
        pairs.append((parse_value(value), float(prob)))
    if len(pairs) < 2:
        raise DegenerateDistribution("a lattice distribution needs at least 2 atoms")
    values = [v for v, _ in pairs]
    if len(set(values)) != len(values):
        raise ValueError("atom values must be distinct")
    probs = np.array([p for _, p in pairs])
    if np.any(~np.isfinite(probs)) or np.any(probs <= 0):
        raise ValueError("atom probabilities must be strictly positive")
    if abs(probs.sum() - 1.0) > tol:
        raise ValueError(f"atom probabilities sum to {probs.sum()!r}, not 1")

    denom = reduce(math.lcm, (v.denominator for v in values), 1)
    nums = [int(v * denom) for v in values]
    lo = min(nums)
    g = reduce(math.gcd, (x - lo for x in nums), 0)
    width = (max(nums) - lo) // g
    if width > MAX_LATTICE_WIDTH:
        raise NotLattice(
            f"atoms span {width} lattice steps; no common span within tolerance"
        )
    h = Fraction(g, denom)
    offset = Fraction(lo % g, denom)
    order = sorted(range(len(values)), key=lambda i: values[i])
    indices = tuple(int((values[i] - offset) / h) for i in order)
    log_probs = np.log(probs[order])
    log_probs -= logsumexp(log_probs)
    return LatticeDistribution(indices, tuple(float(x) for x in log_probs), h, offset)


@dataclass(frozen=True)
class RowLaw:
    """Exact law of ``S_n = V_1 + ... + V_n`` on ``h * [kmin, kmin + len)``."""

    n: int
    kmin: int
    log_pmf: np.ndarray
    h: float

    @property
    def kmax(self) -> int:
        return self.kmin + len(self.log_pmf) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.kmin, self.kmin + len(self.log_pmf), dtype=np.int64)

    @property
    def values(self) -> np.ndarray:
        return self.h * self.indices.astype(float)

    @property
    def pmf(self) -> np.ndarray:
        return np.exp(self.log_pmf)

    def log_prob(self, k: int) -> float:
        """``log P[S_n = h k]``."""
        i = k - self.kmin
        if i < 0 or i >= len(self.log_pmf):
            return -math.inf
        return float(self.log_pmf[i])

    def log_tail_ge(self, k: int) -> float:
        """``log P[S_n >= h k]``."""
        i = max(k - self.kmin, 0)
        if i >= len(self.log_pmf):
            return -math.inf
        return float(logsumexp(self.log_pmf[i:]))

    def log_tail_le(self, k: int) -> float:
        """``log P[S_n <= h k]``."""
        i = min(k - self.kmin, len(self.log_pmf) - 1)
        if i < 0:
            return -math.inf
        return float(logsumexp(self.log_pmf[: i + 1]))

    @property
    def mean(self) -> float:
        return float(np.dot(self.pmf, self.values))

    @property
    def var(self) -> float:
        p = self.pmf
        m = np.dot(p, self.values)
        return float(np.dot(p, (self.values - m) ** 2))


class _PmfCache:
    """Computed row laws keyed by ``(distribution, n)``, extended incrementally."""

    def __init__(self, max_points: int = 2 * 10**7):
        self.max_points = max_points
        self._rows: OrderedDict[tuple[LatticeDistribution, int], np.ndarray] = OrderedDict()
        self._points = 0
        self._lock = threading.Lock()

    def get(self, d: LatticeDistribution, n: int) -> np.ndarray:
        with self._lock:
            hit = self._rows.get((d, n))
            if hit is not None:
                self._rows.move_to_end((d, n))
                return hit
            start = max((m for (dd, m) in self._rows if m < n and dd == d), default=0)
            cur = self._rows[(d, start)] if start else np.zeros(1)
        offsets = d.index_array - d.kmin
        span = int(offsets[-1])
        logp = d.log_prob_array
        for _ in range(n - start):
            nxt = np.full(len(cur) + span, -np.inf)
            for o, lp in zip(offsets, logp):
                seg = nxt[o : o + len(cur)]
                np.logaddexp(seg, cur + lp, out=seg)
            cur = nxt
        cur.setflags(write=False)
        with self._lock:
            self._rows[(d, n)] = cur
            self._points += len(cur)
            while self._points > self.max_points and len(self._rows) > 1:
                _, old = self._rows.popitem(last=False)
                self._points -= len(old)
        return cur

    def clear(self):
        with self._lock:
            self._rows.clear()
            self._points = 0


_CACHE = _PmfCache()


def exact_pmf(d: LatticeDistribution, n: int, cap: int = DEFAULT_CAP) -> RowLaw:
    """Exact pmf of ``S_n`` by iterated log-space convolution.

    Rows already computed for the same distribution are reused as starting
    points, so scanning ``n`` upward costs one convolution step per ``n``.

    Raises
    ------
    CapExceeded
        If the support of ``S_n`` has more than ``cap`` lattice points.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    width = n * (d.kmax - d.kmin) + 1
    if width > cap:
        raise CapExceeded(f"support of S_{n} has {width} points, cap is {cap}")
    log_pmf = _CACHE.get(d, int(n))
    return RowLaw(int(n), n * d.kmin, log_pmf, d.h)


def sample_sn_indices(
    d: LatticeDistribution, n: int, count: int, seed, cap: int = DEFAULT_CAP
) -> np.ndarray:
    """Draw ``count`` lattice indices ``S_n / h`` from the exact row law."""
    row = exact_pmf(d, n, cap)
    rng = np.random.default_rng(seed)
    if count == 0:
        return np.empty(0, dtype=np.int64)
    p = np.exp(row.log_pmf - logsumexp(row.log_pmf))
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(count), side="right")
    np.minimum(idx, len(p) - 1, out=idx)
    return row.kmin + idx.astype(np.int64)


def sample_sn(
    d: LatticeDistribution, n: int, count: int, seed, cap: int = DEFAULT_CAP
) -> np.ndarray:
    """Draw ``count`` i.i.d. copies of ``S_n`` (as values ``h k``) by inversion."""
    return d.h * sample_sn_indices(d, n, count, seed, cap).astype(float)
