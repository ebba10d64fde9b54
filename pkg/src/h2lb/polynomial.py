"""Complex polynomial algebra in the ascending-coefficient convention.

Covers Euclidean division, Bezout pairs, reciprocal polynomials, root
extraction with inside/outside/circle classification, and the spectral
factorization of nonnegative trigonometric polynomials.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import polynomial as npp

from .errors import DomainError, H2LBError, NotCoprimeError

CIRCLE_TOL = 1e-9
COPRIME_TOL = 1e-8


def _as_coeffs(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex)).ravel()
    return c if c.size else np.zeros(1, dtype=complex)


def _trim(c: np.ndarray, tol: float = 0.0) -> np.ndarray:
    nz = np.flatnonzero(np.abs(c) > tol)
    return c[: nz[-1] + 1] if nz.size else c[:1] * 0


class ComplexPolynomial:
    """``c_0 + c_1 z + ... + c_d z^d`` with an explicit nominal degree.

    The nominal degree may exceed the actual degree (trailing zero
    coefficients); this matters for :func:`reciprocal`.

    Parameters
    ----------
    coeffs : array_like
        Ascending coefficients.
    nominal_degree : int, optional
        Defaults to ``len(coeffs) - 1``.  Must be at least the actual degree.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs, nominal_degree: int | None = None):
        c = _as_coeffs(coeffs)
        if nominal_degree is not None:
            if nominal_degree < 0:
                raise ValueError("nominal_degree must be nonnegative")
            actual = _trim(c).size - 1
            if nominal_degree < actual:
                raise ValueError(f"nominal degree {nominal_degree} below actual degree {actual}")
            c = np.pad(c, (0, max(0, nominal_degree + 1 - c.size)))[: nominal_degree + 1]
        c.setflags(write=False)
        self._c = c

    @classmethod
    def from_roots(cls, roots, leading: complex = 1.0) -> ComplexPolynomial:
        roots = np.asarray(roots, dtype=complex).ravel()
        return cls(leading * npp.polyfromroots(roots) if roots.size else [leading])

    @classmethod
    def monomial(cls, k: int) -> ComplexPolynomial:
        c = np.zeros(k + 1, dtype=complex)
        c[k] = 1.0
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def nominal_degree(self) -> int:
        return self._c.size - 1

    @property
    def degree(self) -> int:
        """Actual degree; -1 for the zero polynomial."""
        t = _trim(self._c)
        return -1 if t.size == 1 and t[0] == 0 else t.size - 1

    def is_zero(self) -> bool:
        return not np.any(self._c)

    def trimmed(self, tol: float = 0.0) -> ComplexPolynomial:
        return ComplexPolynomial(_trim(self._c, tol))

    def with_degree(self, n: int) -> ComplexPolynomial:
        return ComplexPolynomial(_trim(self._c), n)

    def __call__(self, z):
        # np.polyval takes descending coefficients and skips the series checks
        return np.polyval(self._c[::-1], np.asarray(z, dtype=complex))

    def __add__(self, other):
        other = _lift(other)
        return ComplexPolynomial(npp.polyadd(self._c, other._c), max(self.nominal_degree, other.nominal_degree))

    __radd__ = __add__

    def __neg__(self):
        return ComplexPolynomial(-self._c)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        return ComplexPolynomial(npp.polymul(self._c, other._c), self.nominal_degree + other.nominal_degree)

    __rmul__ = __mul__

    def monic(self) -> ComplexPolynomial:
        t = _trim(self._c)
        if t[-1] == 0:
            raise ZeroDivisionError("zero polynomial has no monic form")
        return ComplexPolynomial(t / t[-1])

    def norm(self) -> float:
        """L2 norm on the circle, equal to the coefficient 2-norm."""
        return float(np.linalg.norm(self._c))

    def to_json(self) -> list[list[float]]:
        return [[float(v.real), float(v.imag)] for v in self._c]

    @classmethod
    def from_json(cls, data) -> ComplexPolynomial:
        return cls([complex(re, im) for re, im in data])

    def __repr__(self):
        return f"ComplexPolynomial({np.array2string(self._c, precision=6)})"

    def allclose(self, other, tol: float = 1e-10) -> bool:
        d = npp.polysub(self._c, _lift(other)._c)
        return bool(np.all(np.abs(d) <= tol * max(1.0, np.abs(self._c).max())))


def _lift(p) -> ComplexPolynomial:
    return p if isinstance(p, ComplexPolynomial) else ComplexPolynomial([p])


@dataclass(frozen=True)
class TrigPolynomial:
    """Real-valued ``T(e^{i theta}) = sum_{|k|<=n} t_k e^{ik theta}``, ``t_{-k} = conj(t_k)``.

    ``coeffs`` holds ``t_{-n} .. t_n``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size % 2 == 0:
            raise ValueError("need 2n+1 coefficients")
        scale = max(np.abs(c).max(), 1e-300)
        if np.abs(c - np.conj(c[::-1])).max() > 1e-12 * scale:
            raise ValueError("coefficients are not Hermitian symmetric")
        c = 0.5 * (c + np.conj(c[::-1]))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_nonneg(cls, t) -> TrigPolynomial:
        """From ``t_0, t_1, ..., t_n`` (``t_0`` is made real)."""
        t = _as_coeffs(t).copy()
        t[0] = t[0].real
        return cls(np.concatenate([np.conj(t[:0:-1]), t]))

    @classmethod
    def modulus_squared(cls, q: ComplexPolynomial, n: int | None = None) -> TrigPolynomial:
        """``|q|^2`` on the circle, as a trigonometric polynomial of order ``n``."""
        c = q.coeffs
        n = q.nominal_degree if n is None else n
        full = np.convolve(c, np.conj(c[::-1]))  # indices -d..d
        d = c.size - 1
        out = np.zeros(2 * n + 1, dtype=complex)
        k = min(d, n)
        out[n - k: n + k + 1] = full[d - k: d + k + 1]
        return cls(out)

    @property
    def order(self) -> int:
        return (self.coeffs.size - 1) // 2

    def __add__(self, other: TrigPolynomial) -> TrigPolynomial:
        n = max(self.order, other.order)
        pad = lambda t: np.pad(t.coeffs, (n - t.order, n - t.order))
        return TrigPolynomial(pad(self) + pad(other))

    def __sub__(self, other: TrigPolynomial) -> TrigPolynomial:
        return self + TrigPolynomial(-other.coeffs)

    def __mul__(self, c: float) -> TrigPolynomial:
        return TrigPolynomial(self.coeffs * float(c))

    __rmul__ = __mul__

    def __call__(self, z):
        """Real values at unimodular points ``z``."""
        z = np.asarray(z, dtype=complex)
        n = self.order
        return np.real(npp.polyval(z, self.coeffs) * z ** (-n))

    def on_grid(self, m: int) -> np.ndarray:
        """Values at the m-th roots of unity."""
        n = self.order
        buf = np.zeros(m, dtype=complex)
        np.add.at(buf, np.arange(-n, n + 1) % m, self.coeffs)
        return np.real(np.fft.ifft(buf) * m)


@dataclass(frozen=True)
class RootSet:
    """Distinct roots with multiplicities and circle classification.

    ``deficiency`` counts roots "at infinity", i.e. the gap between the
    nominal and the actual degree.
    """

    roots: np.ndarray
    multiplicities: np.ndarray
    deficiency: int = 0
    tol: float = CIRCLE_TOL

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.roots)

    @property
    def classification(self) -> list[str]:
        out = []
        for r in self.moduli:
            if r < 1 - self.tol:
                out.append("inside")
            elif r > 1 + self.tol:
                out.append("outside")
            else:
                out.append("circle")
        return out

    def all(self) -> np.ndarray:
        """Roots repeated by multiplicity."""
        return np.repeat(self.roots, self.multiplicities)

    def select(self, kind: str) -> np.ndarray:
        mask = np.array([c == kind for c in self.classification], dtype=bool)
        return np.repeat(self.roots[mask], self.multiplicities[mask]) if mask.size else self.roots[:0]

    inside = property(lambda self: self.select("inside"))
    outside = property(lambda self: self.select("outside"))
    on_circle = property(lambda self: self.select("circle"))

    def __len__(self):
        return int(self.multiplicities.sum())


def _newton_polish(c: np.ndarray, r: np.ndarray, steps: int = 3) -> np.ndarray:
    dc = npp.polyder(c)
    r = r.copy()
    # far roots of high-degree polynomials overflow; inf/nan candidates are never "better"
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            f = npp.polyval(r, c)
            d = npp.polyval(r, dc)
            ok = np.abs(d) > 0
            cand = np.where(ok, r - np.where(ok, f, 0) / np.where(ok, d, 1), r)
            better = np.abs(npp.polyval(cand, c)) < np.abs(f)
            r = np.where(better, cand, r)
    return r


def _cluster(r: np.ndarray, tol: float):
    """Group numerically coincident roots; each group replaced by its centroid."""
    left = list(range(r.size))
    vals, mults = [], []
    while left:
        i = left.pop(0)
        scale = max(1.0, abs(r[i]))
        grp = [i] + [j for j in left if abs(r[j] - r[i]) <= tol * scale]
        left = [j for j in left if j not in grp]
        vals.append(r[grp].mean())
        mults.append(len(grp))
    return np.array(vals, dtype=complex), np.array(mults, dtype=int)


def roots(p: ComplexPolynomial, tol: float = CIRCLE_TOL, cluster_tol: float = 1e-6) -> RootSet:
    """Roots of ``p`` from a balanced companion matrix with Newton polishing.

    Roots closer than ``cluster_tol`` (relative) are merged into one entry
    with multiplicity.  Degree-0 input yields an empty set.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    c = _trim(p.coeffs)
    d = c.size - 1
    defic = p.nominal_degree - d
    if d == 0:
        return RootSet(np.zeros(0, complex), np.zeros(0, int), defic, tol)
    # split off exact zeros at the origin
    k0 = int(np.argmax(np.abs(c) > 0))
    cc = c[k0:]
    r = np.zeros(0, dtype=complex)
    if cc.size > 1:
        comp = np.zeros((cc.size - 1, cc.size - 1), dtype=complex)
        comp[0, :] = -cc[-2::-1] / cc[-1]
        comp[np.arange(1, cc.size - 1), np.arange(cc.size - 2)] = 1.0
        r = sla.eigvals(comp, check_finite=True)
        r = _newton_polish(cc, r)
    r = np.concatenate([np.zeros(k0, dtype=complex), r])
    vals, mults = _cluster(r, cluster_tol)
    order = np.lexsort((np.angle(vals), np.abs(vals)))
    return RootSet(vals[order], mults[order], defic, tol)


def euclid_divide(P: ComplexPolynomial, q: ComplexPolynomial):
    """``(Q, R)`` with ``P = q Q + R`` and ``deg R < deg q``."""
    qc = _trim(q.coeffs)
    if not np.any(qc):
        raise ZeroDivisionError("division by the zero polynomial")
    pc = _trim(P.coeffs)
    if pc.size < qc.size:
        return ComplexPolynomial([0]), ComplexPolynomial(pc)
    quo, rem = npp.polydiv(pc, qc)
    return ComplexPolynomial(quo), ComplexPolynomial(rem)


def quotient(P, q) -> ComplexPolynomial:
    return euclid_divide(P, q)[0]


def remainder(P, q) -> ComplexPolynomial:
    return euclid_divide(P, q)[1]


def common_roots(u: ComplexPolynomial, v: ComplexPolynomial, tol: float = COPRIME_TOL) -> np.ndarray:
    ru = roots(u).all() if u.degree > 0 else np.zeros(0, complex)
    rv = roots(v).all() if v.degree > 0 else np.zeros(0, complex)
    if ru.size == 0 or rv.size == 0:
        return np.zeros(0, complex)
    dist = np.abs(ru[:, None] - rv[None, :])
    scale = np.maximum(1.0, np.abs(ru))[:, None]
    hit = np.any(dist <= tol * scale, axis=1)
    return ru[hit]


def bezout(u: ComplexPolynomial, v: ComplexPolynomial, tol: float = COPRIME_TOL):
    """Polynomials ``a, b`` with ``a u + b v = 1``, ``deg a < deg v``, ``deg b < deg u``.

    The pair is unique under the degree constraints; it is obtained from the
    Sylvester linear system, which is better conditioned in practice than the
    Euclidean recurrences for the moderate degrees used here.

    Raises
    ------
    NotCoprimeError
        If ``u`` and ``v`` share a root within ``tol``.
    """
    uc, vc = _trim(u.coeffs), _trim(v.coeffs)
    du, dv = uc.size - 1, vc.size - 1
    if not np.any(uc) or not np.any(vc):
        raise NotCoprimeError("zero polynomial in Bezout identity")
    if du == 0 and dv == 0:
        return ComplexPolynomial([1 / uc[0]]), ComplexPolynomial([0])
    shared = common_roots(u, v, tol)
    if shared.size:
        raise NotCoprimeError(f"polynomials share roots near {shared[:3]}")
    m = du + dv
    S = np.zeros((m, m), dtype=complex)
    for j in range(dv):
        S[j: j + du + 1, j] = uc
    for j in range(du):
        S[j: j + dv + 1, dv + j] = vc
    rhs = np.zeros(m, dtype=complex)
    rhs[0] = 1.0
    x = sla.solve(S, rhs)
    a = ComplexPolynomial(x[:dv]) if dv else ComplexPolynomial([0])
    b = ComplexPolynomial(x[dv:]) if du else ComplexPolynomial([0])
    return a, b


def reciprocal(q: ComplexPolynomial, n: int | None = None) -> ComplexPolynomial:
    """``z^n conj(q(1/conj z))``: coefficient ``c_k`` becomes ``conj(c_{n-k})``."""
    n = q.nominal_degree if n is None else n
    if q.degree > n:
        raise ValueError(f"degree {q.degree} exceeds n={n}")
    c = np.zeros(n + 1, dtype=complex)
    k = min(q.coeffs.size, n + 1)
    c[:k] = q.coeffs[:k]
    return ComplexPolynomial(np.conj(c[::-1]), n)


def _pair_circle_roots(r: np.ndarray) -> np.ndarray:
    """Halve a multiset of (near-)circle roots that should come in pairs."""
    if r.size % 2:
        raise H2LBError("odd number of roots on the circle; cannot pair")
    ang = np.angle(r)
    order = np.argsort(ang)
    ang = ang[order]
    # rotate the cut so a split pair does not straddle -pi/pi
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    start = (int(np.argmax(gaps)) + 1) % ang.size
    ang = np.roll(ang, -start)
    ang = np.where(np.arange(ang.size) >= ang.size - start, ang + 2 * np.pi, ang)
    ang = np.unwrap(ang)
    pairs = ang.reshape(-1, 2)
    if np.any(np.abs(pairs[:, 1] - pairs[:, 0]) > 1e-3):
        raise H2LBError("circle roots do not pair up (odd multiplicity)")
    return np.exp(1j * pairs.mean(axis=1))


def fejer_riesz(T: TrigPolynomial, slack: float = 1e-10, check_grid: int = 4096,
                pair_tol: float = 1e-7, circle_band: float = 1e-4) -> ComplexPolynomial:
    """Factor a nonnegative trigonometric polynomial as ``|q|^2``.

    ``q`` has no zero in the open disk and ``q(0) > 0``; this pins it down
    uniquely.

    Parameters
    ----------
    T : TrigPolynomial
        Nonnegative on the circle up to ``slack`` relative to its maximum.
    pair_tol : float
        Tolerance used to match roots ``r`` with ``1/conj(r)``.
    circle_band : float
        Roots within this distance of the circle are treated as (even
        multiplicity) circle roots.  Double roots perturb by about
        ``sqrt(eps)`` in floating point, so this must be generous.

    Raises
    ------
    DomainError
        ``T`` is negative beyond the slack, or identically zero.
    H2LBError
        Root pairing fails.
    """
    n = T.order
    t = T.coeffs
    scale = np.abs(t).max()
    if scale == 0:
        raise DomainError("T is identically zero")
    vals = T.on_grid(max(check_grid, 4 * n + 4))
    if vals.min() < -slack * max(vals.max(), scale):
        raise DomainError(f"T takes the negative value {vals.min():.3e} on the circle")
    # drop vanishing outer coefficients
    while n > 0 and abs(t[0]) <= 1e-15 * scale:
        t = t[1:-1]
        n -= 1
    if n == 0:
        return ComplexPolynomial([np.sqrt(max(t[0].real, 0.0))])
    # z^n T(z) has ascending coefficients t_{-n}..t_n
    r = roots(ComplexPolynomial(t), cluster_tol=0.0).all()
    mod = np.abs(r)
    near = np.abs(mod - 1) < circle_band
    circ = _pair_circle_roots(r[near]) if near.any() else np.zeros(0, complex)
    if circ.size:
        # a double root of z^n T is a simple root of its derivative
        circ = _newton_polish(npp.polyder(t), circ, steps=4)
        circ = circ / np.abs(circ)
    off = r[~near]
    outside = off[np.abs(off) > 1]
    inside = off[np.abs(off) < 1]
    if outside.size != inside.size:
        raise H2LBError("roots do not come in reflected pairs")
    mirrored = 1 / np.conj(inside)
    # check pairing with a greedy match
    if outside.size:
        d = np.abs(np.sort_complex(outside)[:, None] - mirrored[None, :]).min(axis=1)
        if np.any(d > max(pair_tol, 1e-5) * np.maximum(1, np.abs(np.sort_complex(outside)))):
            raise H2LBError("reflection pairing of roots failed")
        # average each exterior root with its mirrored partner for accuracy
        used = np.zeros(mirrored.size, bool)
        refined = []
        for z in outside:
            dd = np.where(used, np.inf, np.abs(mirrored - z))
            j = int(np.argmin(dd))
            used[j] = True
            refined.append(0.5 * (z + mirrored[j]))
        outside = np.array(refined)
    kept = np.concatenate([outside, circ])
    if kept.size != n:
        raise H2LBError(f"expected {n} factor roots, found {kept.size}")
    monic = npp.polyfromroots(kept) if kept.size else np.ones(1, complex)
    c = np.sqrt(t[n].real / np.sum(np.abs(monic) ** 2))
    q0 = monic[0]
    q = c * monic * (abs(q0) / q0)
    return ComplexPolynomial(q)
