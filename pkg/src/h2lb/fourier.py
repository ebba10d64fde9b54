"""Truncated Fourier series on the unit circle.

Functions on the circle are stored as dense coefficient vectors over the
index range ``[-N, N]``.  Anti-analytic functions (holomorphic outside the
closed disk and vanishing at infinity) get their own lighter type holding
only the coefficients of ``z**-1 .. z**-N``; this is the input of every
bound computed by the package.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import signal

from .errors import ConvergenceError

logger = logging.getLogger(__name__)

DEFAULT_BITS = 40
DEFAULT_SAMPLES = 8000
MAX_SAMPLES = 2**20


def roots_of_unity(m: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(m) / m)


def next_pow2(k: int) -> int:
    return 1 << max(int(np.ceil(np.log2(max(k, 1)))), 0)


@dataclass(frozen=True)
class FourierSeries:
    """Trigonometric polynomial ``sum_{|k|<=N} c_k e^{ik theta}``.

    ``coeffs[k + N]`` holds ``c_k``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size % 2 == 0:
            raise ValueError("dense coefficient vector must have odd length 2N+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, order: int) -> FourierSeries:
        return cls(np.zeros(2 * order + 1, dtype=complex))

    @classmethod
    def from_dict(cls, mapping: Mapping[int, complex], order: int | None = None) -> FourierSeries:
        keys = [int(k) for k in mapping]
        need = max((abs(k) for k in keys), default=0)
        if order is None:
            order = need
        if need > order:
            raise ValueError(f"index {need} exceeds truncation order {order}")
        c = np.zeros(2 * order + 1, dtype=complex)
        for k, v in mapping.items():
            c[int(k) + order] = v
        return cls(c)

    @classmethod
    def from_parts(cls, nonneg=(), neg=()) -> FourierSeries:
        """Build from ``c_0, c_1, ...`` and ``c_{-1}, c_{-2}, ...``."""
        nonneg = np.asarray(nonneg, dtype=complex)
        neg = np.asarray(neg, dtype=complex)
        order = max(nonneg.size - 1, neg.size, 0)
        c = np.zeros(2 * order + 1, dtype=complex)
        c[order:order + nonneg.size] = nonneg
        c[order - neg.size:order] = neg[::-1]
        return cls(c)

    @property
    def order(self) -> int:
        return (self.coeffs.size - 1) // 2

    truncation_order = order

    @property
    def coeffs_neg(self) -> dict[int, complex]:
        """Sparse view ``k -> c_{-k}`` for ``k >= 1``."""
        return {k + 1: complex(v) for k, v in enumerate(self.negative()) if v != 0}

    @property
    def coeffs_nonneg(self) -> dict[int, complex]:
        """Sparse view ``k -> c_k`` for ``k >= 0``."""
        return {k: complex(v) for k, v in enumerate(self.nonnegative()) if v != 0}

    def coefficient(self, k: int) -> complex:
        n = self.order
        return complex(self.coeffs[k + n]) if -n <= k <= n else 0j

    def nonnegative(self) -> np.ndarray:
        """``c_0 .. c_N``."""
        return self.coeffs[self.order:].copy()

    def negative(self) -> np.ndarray:
        """``c_{-1} .. c_{-N}``."""
        return self.coeffs[:self.order][::-1].copy()

    def to_dict(self, tol: float = 0.0) -> dict[int, complex]:
        n = self.order
        return {k - n: complex(v) for k, v in enumerate(self.coeffs) if abs(v) > tol}

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        n = self.order
        pos = np.polynomial.polynomial.polyval(z, self.coeffs[n:])
        if n == 0:
            return pos
        neg = np.polynomial.polynomial.polyval(1.0 / z, np.concatenate([[0], self.coeffs[:n][::-1]]))
        return pos + neg

    def samples(self, m: int | None = None) -> CircleSamples:
        if m is None:
            m = next_pow2(2 * self.order + 1)
        return CircleSamples(evaluate_on_grid(self.coeffs[self.order:], self.negative(), m))

    def trimmed(self, tol: float = 0.0) -> FourierSeries:
        """Smallest-order copy; coefficients with modulus <= tol are dropped."""
        d = self.to_dict(tol)
        return FourierSeries.from_dict(d, max((abs(k) for k in d), default=0))

    def __add__(self, other: FourierSeries) -> FourierSeries:
        n = max(self.order, other.order)
        return FourierSeries(_pad(self.coeffs, n) + _pad(other.coeffs, n))

    def __sub__(self, other: FourierSeries) -> FourierSeries:
        return self + other * -1.0

    def __mul__(self, c: complex) -> FourierSeries:
        return FourierSeries(self.coeffs * c)

    __rmul__ = __mul__

    def inner(self, other: FourierSeries) -> complex:
        """L2 inner product ``<self, other>`` (linear in the first slot)."""
        n = max(self.order, other.order)
        return complex(np.vdot(_pad(other.coeffs, n), _pad(self.coeffs, n)))


def _pad(c: np.ndarray, order: int) -> np.ndarray:
    k = (c.size - 1) // 2
    return np.pad(c, (order - k, order - k))


@dataclass(frozen=True)
class AntiAnalyticFunction:
    """``f(z) = sum_{k=1}^N a_k z^{-k}``, an element of the conjugate Hardy space.

    ``declared_tail_bound`` bounds the L2 norm of the coefficients that were
    discarded when the function was truncated (floating point, not certified).
    """

    coeffs: np.ndarray
    declared_tail_bound: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=complex).ravel()
        if a.size == 0:
            a = np.zeros(1, dtype=complex)
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)
        if self.declared_tail_bound < 0:
            raise ValueError("tail bound must be nonnegative")

    @property
    def order(self) -> int:
        return self.coeffs.size

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __call__(self, z):
        w = 1.0 / np.asarray(z, dtype=complex)
        return w * np.polynomial.polynomial.polyval(w, self.coeffs)

    def to_series(self) -> FourierSeries:
        return FourierSeries.from_parts(nonneg=[0], neg=self.coeffs)

    def scaled(self, c: complex) -> AntiAnalyticFunction:
        return AntiAnalyticFunction(self.coeffs * c, self.declared_tail_bound * abs(c))

    def truncated(self, order: int) -> AntiAnalyticFunction:
        """Keep ``a_1..a_order`` (zero-padding if ``order`` exceeds the current one)."""
        a = np.zeros(order, dtype=complex)
        k = min(order, self.order)
        a[:k] = self.coeffs[:k]
        tail = float(np.linalg.norm(self.coeffs[k:]))
        return AntiAnalyticFunction(a, float(np.hypot(self.declared_tail_bound, tail)))


@dataclass(frozen=True)
class CircleSamples:
    """Values at the M-th roots of unity ``exp(2 pi i m / M)``."""

    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.size

    def to_series(self, order: int | None = None) -> FourierSeries:
        m = self.M
        if order is None:
            order = (m - 1) // 2
        if 2 * order + 1 > m:
            raise ValueError(f"{m} samples cannot resolve order {order} without aliasing")
        c = np.fft.fft(self.values) / m
        nonneg = c[:order + 1]
        neg = c[m - np.arange(1, order + 1)]
        return FourierSeries.from_parts(nonneg, neg)


def evaluate_on_grid(nonneg, neg, m: int) -> np.ndarray:
    """Evaluate ``sum c_k z^k + sum c_{-k} z^{-k}`` at the m-th roots of unity.

    Indices that collide modulo ``m`` are summed, which is exact on the grid.
    """
    buf = np.zeros(m, dtype=complex)
    nonneg = np.asarray(nonneg, dtype=complex)
    neg = np.asarray(neg, dtype=complex)
    np.add.at(buf, np.arange(nonneg.size) % m, nonneg)
    np.add.at(buf, (-np.arange(1, neg.size + 1)) % m, neg)
    return np.fft.ifft(buf) * m


def trim_tail(a: np.ndarray, bits: int) -> tuple[np.ndarray, float]:
    """Shortest prefix of ``a`` whose discarded tail has relative L2 norm < 2**-bits."""
    a = np.asarray(a, dtype=complex)
    energy = np.abs(a) ** 2
    total = energy.sum()
    if total == 0.0:
        return a[:1] * 0, 0.0
    # tail[k] = energy of a[k:]
    tail = np.concatenate([np.cumsum(energy[::-1])[::-1], [0.0]])
    limit = (2.0 ** (-bits)) ** 2 * total
    keep = int(np.argmax(tail <= limit))
    keep = max(keep, 1)
    return a[:keep].copy(), float(np.sqrt(tail[keep]))


def truncate_to_bits(
    sampler: Callable[[np.ndarray], np.ndarray],
    bits: int = DEFAULT_BITS,
    max_samples: int = MAX_SAMPLES,
    start: int = 64,
) -> AntiAnalyticFunction:
    """Coefficients of an anti-analytic function known through its values on the circle.

    The sample count doubles until the upper half of the resolved spectrum
    carries less than ``2**-bits`` of the L2 norm; the series is then cut at
    the shortest length meeting the same relative tail criterion.

    Parameters
    ----------
    sampler : callable
        Vectorized ``z -> f(z)`` for ``|z| = 1``.  The function must be
        holomorphic outside the closed disk and vanish at infinity; this is
        not checked beyond a warning on non-negligible analytic content.
    bits : int
        Relative L2 agreement between ``f`` and its truncation.

    Raises
    ------
    ConvergenceError
        If ``max_samples`` is reached first.
    """
    if bits < 8:
        raise ValueError("bits must be >= 8")
    m = next_pow2(start)
    while m <= max_samples:
        c = np.fft.fft(np.asarray(sampler(roots_of_unity(m)), dtype=complex)) / m
        a = c[m - np.arange(1, m // 2 + 1)]
        norm = np.linalg.norm(a)
        tail = np.linalg.norm(a[m // 4:])
        if norm == 0.0 or tail <= 2.0 ** (-bits) * norm:
            analytic = np.linalg.norm(c[:m // 2])
            if analytic > 2.0 ** (-bits / 2) * max(norm, 1e-300):
                logger.warning("sampler has analytic content %.3e (expected ~0)", analytic)
            coeffs, tail_bound = trim_tail(a, bits)
            return AntiAnalyticFunction(coeffs, tail_bound)
        m *= 2
    raise ConvergenceError(
        f"series does not decay at requested precision ({bits} bits) within {max_samples} samples"
    )


def riesz_project(s: FourierSeries) -> tuple[FourierSeries, AntiAnalyticFunction]:
    """Split into analytic (index >= 0) and anti-analytic (index < 0) parts."""
    return FourierSeries.from_parts(nonneg=s.nonnegative()), AntiAnalyticFunction(s.negative())


def check_transform(s: FourierSeries) -> FourierSeries:
    """``z^{-1} conj(f(1/conj z))``: coefficient ``c_k`` moves to index ``-k-1`` conjugated."""
    n = s.order
    out = np.zeros(2 * (n + 1) + 1, dtype=complex)
    ks = np.arange(-n, n + 1)
    out[(-ks - 1) + (n + 1)] = np.conj(s.coeffs)
    return FourierSeries(out)


def reduce_RA_to_RAB(f: FourierSeries, tol: float = 0.0) -> AntiAnalyticFunction:
    """Map an analytic datum to ``conj(f(1/conj z)) - conj(f(0))``.

    Best approximation of ``f`` from rationals of type (n, n) analytic in the
    disk has the same value as best approximation of the result from type
    (n-1, n) rationals vanishing at infinity.
    """
    if np.any(np.abs(f.negative()) > tol):
        raise ValueError("input must have no negative-index coefficients")
    c = f.nonnegative()
    return AntiAnalyticFunction(np.conj(c[1:]) if c.size > 1 else np.zeros(1))


def sup_norm_sample(s, samples: int = DEFAULT_SAMPLES) -> float:
    """Max modulus over ``samples`` equispaced points of the circle (a lower estimate of the sup norm)."""
    if isinstance(s, AntiAnalyticFunction):
        s = s.to_series()
    if samples < 2 * s.order:
        raise ValueError(f"{samples} samples are too few for order {s.order}")
    return float(np.abs(evaluate_on_grid(s.nonnegative(), s.negative(), samples)).max())


def hankel_apply(a: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Coefficients of ``P_-(f h)`` for ``f = sum a_k z^-k`` and ``h = sum h_j z^j``.

    Entry ``i`` (for ``z^{-(i+1)}``) is ``sum_j a_{i+j+1} h_j``.
    """
    a = np.asarray(a, dtype=complex)
    h = np.asarray(h, dtype=complex)[: a.size]
    if h.size == 0:
        return np.zeros(a.size, dtype=complex)
    full = signal.convolve(a, h[::-1], mode="full")
    return full[h.size - 1: h.size - 1 + a.size]


def analytic_part_of_product(a: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Coefficients ``d_0, d_1, ...`` of ``P_+(f h)`` for polynomial ``h``.

    ``d_m = sum_k a_k h_{m+k}``; the result has ``len(h) - 1`` entries
    (``P_+(f h)`` has degree ``deg h - 1``).
    """
    a = np.asarray(a, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if h.size <= 1:
        return np.zeros(0, dtype=complex)
    # d_m = sum_{k>=1} a_k h_{m+k}
    full = signal.convolve(h, a[::-1], mode="full")
    # index of h_{m+k} * a_k  in full: (m+k) + (a.size - k) = m + a.size
    return full[a.size: a.size + h.size - 1].copy()
