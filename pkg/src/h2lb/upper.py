"""Heuristic upper bound for best H2 rational approximation.

For ``f`` anti-analytic and a Blaschke product ``b = q / qt`` of degree
``n``, the best numerator for the denominator ``q`` leaves the error
``||P_-(f b)||_2``.  Minimizing that over the zeros of ``b`` is a smooth
but non-convex problem; we run BFGS from several starting points and keep
the best result.  The value is an upper bound on the optimum, not a
certificate of it.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal

from .errors import ConvergenceError, DomainError
from .fourier import AntiAnalyticFunction, hankel_apply
from .polynomial import ComplexPolynomial, reciprocal

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 16
FD_STEP = 1e-6


@dataclass(frozen=True)
class BlaschkeProduct:
    """``c z^k prod (-conj(a)/|a|) (z - a) / (1 - conj(a) z)`` over the nonzero zeros ``a``.

    Zeros at the origin are listed explicitly (``k`` of them).  The unit
    factors make ``b(0)`` have the argument of ``c`` when ``k = 0``.
    """

    zeros: np.ndarray
    constant: complex = 1.0

    def __post_init__(self):
        z = np.asarray(self.zeros, dtype=complex).ravel()
        if z.size and np.abs(z).max() >= 1:
            raise DomainError("Blaschke zeros must lie in the open unit disk")
        if abs(abs(self.constant) - 1) > 1e-12:
            raise ValueError("the constant must be unimodular")
        z.setflags(write=False)
        object.__setattr__(self, "zeros", z)

    @property
    def degree(self) -> int:
        return self.zeros.size

    def _unit(self) -> complex:
        nz = self.zeros[self.zeros != 0]
        return complex(self.constant * np.prod(-np.conj(nz) / np.abs(nz)))

    def numerator(self) -> ComplexPolynomial:
        """Monic ``q = prod (z - a)``."""
        return ComplexPolynomial.from_roots(self.zeros)

    def denominator(self) -> ComplexPolynomial:
        """``qt = prod (1 - conj(a) z)``."""
        return reciprocal(self.numerator(), self.degree)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self._unit() * self.numerator()(z) / self.denominator()(z)

    def taylor(self, count: int) -> np.ndarray:
        imp = np.zeros(count)
        imp[0] = 1.0
        return self._unit() * signal.lfilter(self.numerator().coeffs, self.denominator().coeffs, imp)

    def reduced_symbol(self):
        """Anti-analytic datum equivalent to approximating ``b`` itself.

        Returns the rational function ``conj(b(1/conj z)) - conj(b(0)) = 1/b - conj(b(0))``.
        """
        from .rational import RationalFunction

        u = self._unit()
        q, qt = self.numerator(), self.denominator()
        b0 = complex(self(0.0))
        return RationalFunction(qt * np.conj(u) - q * np.conj(b0), q)

    def to_json(self) -> dict:
        return {"kind": "blaschke", "zeros": [[float(v.real), float(v.imag)] for v in self.zeros],
                "constant": [float(np.real(self.constant)), float(np.imag(self.constant))]}


def disk_from_plane(u: np.ndarray) -> np.ndarray:
    """Smooth surjection of the plane onto the open disk, ``u tanh|u| / |u|``."""
    r = np.abs(u)
    scale = np.where(r > 1e-8, np.tanh(r) / np.where(r > 1e-8, r, 1.0), 1.0 - r**2 / 3)
    return u * scale


def plane_from_disk(z: np.ndarray, rmax: float = 1 - 1e-9) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    r = np.minimum(np.abs(z), rmax)
    scale = np.where(r > 1e-8, np.arctanh(r) / np.where(r > 1e-8, np.abs(z), 1.0), 1.0)
    return z * scale


def _pack(u: np.ndarray) -> np.ndarray:
    return np.concatenate([u.real, u.imag])


def _unpack(x: np.ndarray) -> np.ndarray:
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def _blaschke_taylor(zeros: np.ndarray, count: int) -> np.ndarray:
    q = np.polynomial.polynomial.polyfromroots(zeros) if zeros.size else np.ones(1, complex)
    qt = np.conj(q[::-1])
    imp = np.zeros(count)
    imp[0] = 1.0
    return signal.lfilter(q, qt, imp)


def residual(f: AntiAnalyticFunction, zeros) -> np.ndarray:
    """Coefficients of ``P_-(f b)`` for the Blaschke product with the given zeros."""
    zeros = np.asarray(zeros, dtype=complex).ravel()
    if zeros.size and np.abs(zeros).max() >= 1:
        raise DomainError("zeros must lie in the open unit disk")
    a = np.asarray(f.coeffs, dtype=complex)
    return hankel_apply(a, _blaschke_taylor(zeros, a.size))


def criterion(f: AntiAnalyticFunction, zeros) -> float:
    """``||P_-(f b)||_2``, the error of the best numerator for denominator ``prod (z - zeros)``.

    Exact for the truncated coefficient sequence (no quadrature).
    """
    return float(np.linalg.norm(residual(f, zeros)))


def recover_numerator(f: AntiAnalyticFunction, q: ComplexPolynomial) -> ComplexPolynomial:
    """Optimal numerator ``p = qt P_+(f q / qt)`` for a denominator with roots in the disk.

    Only the first ``deg q`` Taylor coefficients of ``P_+(f q/qt)`` enter,
    because the product with ``qt`` is a polynomial of degree below ``deg q``.
    """
    q = q.trimmed()
    n = q.degree
    if n <= 0:
        return ComplexPolynomial([0])
    lead = q.coeffs[-1]
    qm = q.coeffs / lead
    qt = np.conj(qm[::-1])
    a = np.asarray(f.coeffs, dtype=complex)
    N = a.size
    imp = np.zeros(N + n)
    imp[0] = 1.0
    beta = signal.lfilter(qm, qt, imp)
    # d_m = sum_k a_k beta_{m+k}
    d = np.array([np.dot(a, beta[m + 1: m + 1 + N]) for m in range(n)])
    p = np.convolve(qt, d)[:n]
    return ComplexPolynomial(p * lead)


def rational_error(f: AntiAnalyticFunction, p: ComplexPolynomial, q: ComplexPolynomial) -> float:
    """``||f - p/q||_2`` from Laurent coefficients at infinity (independent of the Blaschke route)."""
    from .rational import RationalFunction

    g = RationalFunction(p, q)
    a = np.asarray(f.coeffs, dtype=complex)
    N = a.size
    rho = max(g.poles().moduli.max(), 1e-2) if g.degree > 0 else 0.0
    extra = int(np.ceil(40 / max(-np.log10(rho), 1e-3))) if rho > 0 else 0
    c = g.laurent(N + max(extra, 0) + 1)
    diff = a - c[:N]
    return float(np.sqrt(np.vdot(diff, diff).real + np.vdot(c[N:], c[N:]).real))


@dataclass
class RABSolution:
    """Best approximant found; ``error`` is recomputed from ``p/q`` directly."""

    q: ComplexPolynomial
    p: ComplexPolynomial
    error: float
    restarts_used: int
    residual_gradient_norm: float
    seed: int
    zeros: np.ndarray
    criterion_value: float = 0.0
    runs: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"kind": "rational", "p": self.p.to_json(), "q": self.q.to_json(), "error": self.error,
                "seed": self.seed, "restarts": self.restarts_used}


def _fd_grad(fun, x, step=FD_STEP):
    g = np.empty_like(x)
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


def _random_zeros(rng: np.random.Generator, n: int, radius: float = 0.95) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=n))
    return r * np.exp(2j * np.pi * rng.uniform(size=n))


def _aak_zeros(f, n, spectrum, rational):
    from .hankel import aak_approximant, spectrum_fourier, spectrum_rational

    try:
        if spectrum is None:
            spectrum = spectrum_rational(rational) if rational is not None else spectrum_fourier(f)
        if n >= len(spectrum) or spectrum.values[n] <= 1e-14 * spectrum.values[0]:
            return None
        target = rational if spectrum.basis_tag != "fourier" and rational is not None else f
        poles = aak_approximant(target, spectrum, n).pole_list()
    except Exception as exc:  # warm start is optional
        logger.info("AAK warm start unavailable: %s", exc)
        return None
    if poles.size == 0:
        return None
    poles = poles[np.argsort(-np.abs(poles))][:n]
    return poles


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("H2LB_THREADS", "1")))
    except ValueError:
        return 1


def _disk_jacobian(u: np.ndarray):
    """Partial derivatives of ``disk_from_plane`` with respect to ``Re u`` and ``Im u``."""
    r = np.abs(u)
    small = r < 1e-6
    rs = np.where(small, 1.0, r)
    th = np.tanh(rs)
    s = np.where(small, 1.0 - r**2 / 3, th / rs)
    # sech^2 = 1 - tanh^2 avoids overflow of cosh for large |u|
    ds_over_r = np.where(small, -2.0 / 3, (rs * (1 - th**2) - th) / rs**3)
    return s + u * ds_over_r * u.real, 1j * s + u * ds_over_r * u.imag


def _objective_grad(a: np.ndarray, u: np.ndarray, norm2: float):
    """Normalized ``||P_-(f b)||^2`` and its gradient in the plane coordinates."""
    N = a.size
    z = disk_from_plane(u)
    q = np.polynomial.polynomial.polyfromroots(z) if z.size else np.ones(1, complex)
    qt = np.conj(q[::-1])
    imp = np.zeros(N)
    imp[0] = 1.0
    tau = signal.lfilter([1.0], qt, imp)
    beta = np.convolve(q, tau)[:N]
    r = hankel_apply(a, beta)
    val = float(np.vdot(r, r).real)
    # the section is complex symmetric: r^H H x = (H conj r)^T x
    w = hankel_apply(a, np.conj(r))
    A = np.empty(z.size, complex)
    B = np.empty(z.size, complex)
    zbeta = np.concatenate([[0], beta[:-1]])
    for k, zk in enumerate(z):
        qk = np.polynomial.polynomial.polyfromroots(np.delete(z, k)) if z.size > 1 else np.ones(1, complex)
        A[k] = -w @ np.convolve(qk, tau)[:N]
        B[k] = w @ signal.lfilter([1.0], [1.0, -np.conj(zk)], zbeta)
    g_re = 2 * (A + B).real
    g_im = -2 * (A - B).imag
    dx, dy = _disk_jacobian(u)
    gx = g_re * dx.real + g_im * dx.imag
    gy = g_re * dy.real + g_im * dy.imag
    return val / norm2, np.concatenate([gx, gy]) / norm2


def _run(f, x0, norm2, maxiter, gradient="analytic"):
    a = np.asarray(f.coeffs, dtype=complex)
    N = a.size

    def obj(x):
        z = disk_from_plane(_unpack(x))
        r = hankel_apply(a, _blaschke_taylor(z, N))
        return float(np.vdot(r, r).real / norm2)

    if gradient == "fd":
        fun, jac = obj, (lambda x: _fd_grad(obj, x))
    else:
        fun, jac = (lambda x: _objective_grad(a, _unpack(x), norm2)), True
    res = optimize.minimize(fun, x0, jac=jac, method="BFGS", options={"gtol": 1e-14, "maxiter": maxiter})
    x = res.x
    val = obj(x)
    grad = _fd_grad(obj, x) if gradient == "fd" else _objective_grad(a, _unpack(x), norm2)[1]
    return val, x, float(np.linalg.norm(grad)), bool(np.isfinite(val))


def solve_RAB(f: AntiAnalyticFunction, n: int, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
              warm=None, spectrum=None, rational=None, maxiter: int = 400, aak_start: bool = True,
              gradient: str = "analytic") -> RABSolution:
    """Best rational approximant of type ``(n-1, n)`` found by multistart BFGS.

    Parameters
    ----------
    f : AntiAnalyticFunction
    n : int
        Number of poles.  ``n = 0`` returns the zero approximant.
    restarts : int
        Random starting configurations, drawn from ``default_rng(seed)``.
    warm : array_like or RABSolution, optional
        Extra starting zeros (padded with random zeros up to ``n``).
    spectrum, rational : optional
        Reused for the AAK starting point.
    gradient : {"analytic", "fd"}
        Closed-form Wirtinger gradient, or central differences with
        relative step ``1e-6``.

    Raises
    ------
    ConvergenceError
        If every run produced a non-finite value.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    norm = f.l2_norm()
    if n == 0 or norm == 0.0:
        zero = ComplexPolynomial([0])
        return RABSolution(ComplexPolynomial([1.0]), zero, norm, 0, 0.0, seed, np.zeros(0, complex), norm)
    rng = np.random.default_rng(seed)
    starts = []
    if warm is not None:
        wz = np.asarray(warm.zeros if isinstance(warm, RABSolution) else warm, dtype=complex).ravel()[:n]
        if wz.size < n:
            wz = np.concatenate([wz, _random_zeros(rng, n - wz.size, 0.5)])
        starts.append(("warm", wz))
    if aak_start:
        az = _aak_zeros(f, n, spectrum, rational)
        if az is not None:
            if az.size < n:
                az = np.concatenate([az, _random_zeros(np.random.default_rng([seed, n]), n - az.size, 0.5)])
            starts.append(("aak", az))
    for k in range(restarts):
        starts.append((f"random{k}", _random_zeros(rng, n)))
    norm2 = norm**2
    x0s = [_pack(plane_from_disk(z)) for _, z in starts]
    workers = _threads()
    if workers > 1 and len(x0s) > 1:
        with ThreadPoolExecutor(workers) as ex:
            outs = list(ex.map(lambda x0: _run(f, x0, norm2, maxiter, gradient), x0s))
    else:
        outs = [_run(f, x0, norm2, maxiter, gradient) for x0 in x0s]
    runs = []
    best = None
    for (label, _), (val, x, gnorm, ok) in zip(starts, outs):
        runs.append({"start": label, "error": float(np.sqrt(max(val, 0.0)) * norm), "finite": ok})
        if ok and (best is None or val < best[0]):
            best = (val, x, gnorm)
    if best is None:
        raise ConvergenceError("all restarts diverged", partial=runs)
    val, x, gnorm = best
    zeros = disk_from_plane(_unpack(x))
    q = ComplexPolynomial.from_roots(zeros)
    p = recover_numerator(f, q)
    err = rational_error(f, p, q)
    return RABSolution(q, p, err, len(starts), gnorm, seed, zeros, float(np.sqrt(max(val, 0.0)) * norm), runs)
