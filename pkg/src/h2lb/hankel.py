"""Hankel operators, their singular spectra and AAK approximants.

Two constructions are provided.  The Fourier path takes a truncated
coefficient sequence and works with the finite Hankel section in monomial
coordinates.  The rational path takes ``f = p/q`` and works in the
Malmquist-Walsh basis of the model space attached to the zeros of ``q``.
Its matrix entries are contour integrals evaluated by the trapezoid rule,
which converges geometrically, so no truncation order is involved.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, H2LBError, NotCoprimeError
from .fourier import DEFAULT_SAMPLES, AntiAnalyticFunction, FourierSeries, next_pow2, roots_of_unity
from .polynomial import (
    ComplexPolynomial,
    RootSet,
    common_roots,
    roots,
)
from .rational import RationalFunction

logger = logging.getLogger(__name__)

MULT_TOL = 1e-6
RANK_RTOL = 1e-13
QUAD_TOL = 1e-18
MAX_QUAD = 2**20


@dataclass(frozen=True)
class HankelMatrix:
    """Finite section of a Hankel operator; ``entries[i, j] = a_{i+j+1}`` (0-based)."""

    entries: np.ndarray
    basis_tag: str = "fourier"

    @property
    def shape(self):
        return self.entries.shape


def hankel_matrix(f: AntiAnalyticFunction) -> HankelMatrix:
    a = np.asarray(f.coeffs, dtype=complex)
    last = np.zeros_like(a)
    return HankelMatrix(sla.hankel(a, last), "fourier")


@dataclass(frozen=True)
class MalmquistWalsh:
    """Orthonormal basis ``e_j = u_j / qt`` of the model space for the given zeros."""

    zeros: np.ndarray
    numerators: list
    denominator: ComplexPolynomial

    def __len__(self):
        return len(self.numerators)

    def combine(self, c) -> ComplexPolynomial:
        """Numerator of ``sum_j c_j e_j`` over the common denominator."""
        c = np.asarray(c, dtype=complex)
        N = len(self.numerators)
        U = np.column_stack([u.with_degree(N - 1).coeffs for u in self.numerators]) if N else np.zeros((1, 0))
        return ComplexPolynomial(U @ c)

    def evaluate(self, j: int, z):
        return self.values(z)[:, j]

    def values(self, z) -> np.ndarray:
        """Basis functions on the points ``z`` as columns, from the product form."""
        return self.values_and_blaschke(z)[0]

    def values_and_blaschke(self, z):
        """``(E, B)`` with ``E[:, j] = e_j(z)`` and ``B = q / qt`` at ``z``.

        The recursion ``e_j = sqrt(1-|z_j|^2) / (1 - conj(z_j) z) * prod_{k<j} b_k``
        with unimodular factors ``b_k`` avoids the monomial coefficients of
        ``u_j``, which lose all accuracy when zeros cluster near the circle.
        """
        z = np.asarray(z, dtype=complex).ravel()
        E = np.empty((z.size, self.zeros.size), dtype=complex)
        run = np.ones(z.size, dtype=complex)
        for j, a in enumerate(self.zeros):
            d = 1 - np.conj(a) * z
            E[:, j] = np.sqrt(1 - abs(a) ** 2) / d * run
            run = run * (z - a) / d
        return E, run


def sort_zeros(zeros) -> np.ndarray:
    """Nondecreasing modulus, ties broken by argument."""
    z = np.asarray(zeros, dtype=complex).ravel()
    return z[np.lexsort((np.angle(z), np.round(np.abs(z), 12)))]


def malmquist_walsh(zeros) -> MalmquistWalsh:
    """Basis numerators ``u_j = sqrt(1-|z_j|^2) prod_{k<j} (z - z_k) prod_{k>j} (1 - conj(z_k) z)``.

    Raises
    ------
    DomainError
        If a zero has modulus >= 1.
    """
    z = np.asarray(zeros, dtype=complex).ravel()
    if z.size and np.abs(z).max() >= 1:
        raise DomainError("Malmquist-Walsh zeros must lie in the open unit disk")
    N = z.size
    qt = ComplexPolynomial([1.0])
    for zk in z:
        qt = qt * ComplexPolynomial([1.0, -np.conj(zk)])
    nums = []
    for j in range(N):
        u = ComplexPolynomial([np.sqrt(1 - abs(z[j]) ** 2)])
        for k in range(j):
            u = u * ComplexPolynomial([-z[k], 1.0])
        for k in range(j + 1, N):
            u = u * ComplexPolynomial([1.0, -np.conj(z[k])])
        nums.append(u.with_degree(max(N - 1, 0)))
    return MalmquistWalsh(z, nums, qt)


@dataclass(frozen=True)
class Gramian:
    """``M[i, j] = <Gamma e_j, Gamma e_i>`` for a Malmquist-Walsh basis.

    ``factor`` is the matrix of the operator from the basis ``e_j`` to the
    orthonormal basis ``conj(z e_i)`` of its range, so ``M = factor^H factor``
    and the singular values come from an SVD of ``factor`` directly.
    """

    M: np.ndarray
    factor: np.ndarray
    basis: MalmquistWalsh
    q: ComplexPolynomial
    meta: dict = field(default_factory=dict)


def quadrature_size(zeros, tol: float = QUAD_TOL) -> int:
    """Circle nodes for which the trapezoid rule on the model-space integrands reaches ``tol``.

    The integrands are analytic in ``rho < |z| < 1/rho`` with ``rho`` the
    largest zero modulus, so the error decays like ``rho^m``; the factor 2
    absorbs the growth near the poles.
    """
    rho = float(np.abs(np.asarray(zeros)).max(initial=0.0))
    if rho < 1e-3:
        return 64
    m = next_pow2(max(64, int(np.ceil(2 * np.log(tol) / np.log(rho)))))
    if m > MAX_QUAD:
        raise DomainError(f"zero of modulus {rho:.12g} too close to the circle for the rational path")
    return m


def hankel_matrix_on_basis(basis: MalmquistWalsh, symbol_values: np.ndarray, z: np.ndarray, E=None) -> np.ndarray:
    """``H[i, j] = <f e_j, conj(z e_i)>`` by the trapezoid rule on the nodes ``z``.

    ``symbol_values`` are samples of an anti-analytic symbol whose poles are
    among the basis zeros.
    """
    if E is None:
        E = basis.values(z)
    w = symbol_values * z / z.size
    return E.T @ (w[:, None] * E)


def rational_on_grid(f: RationalFunction, m: int) -> np.ndarray:
    """Samples of the proper part at the ``m``-th roots of unity, from its Laurent coefficients.

    Coefficients ``a_k`` with ``k >= m`` are below the quadrature tolerance
    by the choice of ``m``; the expansion is more accurate than Horner
    evaluation of ``p`` and ``q`` when poles cluster.
    """
    c = np.zeros(m, dtype=complex)
    c[1:] = f.laurent(m - 1)
    return np.fft.fft(c)


def gramian_rational(p: ComplexPolynomial, q: ComplexPolynomial, require_coprime: bool = True,
                     pole_margin: float = 1e-9) -> Gramian:
    """Gramian of the Hankel operator with symbol ``p/q`` in the Malmquist-Walsh basis.

    Parameters
    ----------
    p, q : ComplexPolynomial
        Numerator and denominator.  ``q`` is made monic and any polynomial
        part of ``p/q`` is discarded (it does not affect the operator).
    require_coprime : bool
        Raise when ``p`` and ``q`` share a root.  The Gramian is well
        defined without this; the flag exists because a common root means
        the declared degree overstates the rank.

    Raises
    ------
    DomainError
        A root of ``q`` is not strictly inside the disk, or so close to the
        circle that the quadrature would need more than ``MAX_QUAD`` nodes.
    NotCoprimeError
        ``require_coprime`` is set and ``p, q`` share a root.
    """
    f = RationalFunction(p, q).proper()
    p, q = f.p, f.q
    N = q.degree
    if N < 1:
        raise DomainError("denominator must have positive degree")
    rs = roots(q)
    zs = rs.all()
    if np.abs(zs).max() >= 1 - pole_margin:
        raise DomainError(f"pole of modulus {np.abs(zs).max():.12g} on or outside the circle")
    if require_coprime and not p.is_zero() and common_roots(p, q).size:
        raise NotCoprimeError("numerator and denominator share a root")
    basis = malmquist_walsh(sort_zeros(zs))
    m = quadrature_size(basis.zeros)
    z = roots_of_unity(m)
    H = hankel_matrix_on_basis(basis, rational_on_grid(f, m), z)
    M = H.conj().T @ H
    M = 0.5 * (M + M.conj().T)
    return Gramian(M, H, basis, q, {"N": N, "nodes": m})


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values (nonincreasing) with right singular vectors as columns.

    Vector coordinates are in the construction basis: monomials ``z^0..z^{N-1}``
    for the Fourier path, Malmquist-Walsh functions for the rational path.
    """

    values: np.ndarray
    vectors: np.ndarray
    multiplicity_groups: list
    basis_tag: str
    basis: MalmquistWalsh | None = None
    left: np.ndarray | None = None

    def __len__(self):
        return self.values.size

    def numerator(self, k: int) -> ComplexPolynomial:
        """Polynomial ``u`` with ``v_k = u`` (Fourier) or ``v_k = u / qt`` (rational)."""
        if self.basis_tag == "fourier":
            return ComplexPolynomial(self.vectors[:, k])
        return self.basis.combine(self.vectors[:, k])

    def denominator(self) -> ComplexPolynomial:
        return ComplexPolynomial([1.0]) if self.basis is None else self.basis.denominator

    def vector_on_grid(self, k: int, m: int) -> np.ndarray:
        z = roots_of_unity(m)
        if self.basis_tag == "fourier":
            return self.numerator(k)(z)
        return self.basis.values(z) @ self.vectors[:, k]

    def rank(self, rtol: float = 1e-9) -> int:
        if self.values.size == 0 or self.values[0] == 0:
            return 0
        return int(np.sum(self.values > rtol * self.values[0]))


def multiplicity_groups(values: np.ndarray, mult_tol: float = MULT_TOL) -> list:
    """Runs of consecutive values whose gaps are below ``mult_tol`` relative to the larger one."""
    if values.size == 0:
        return []
    groups, cur = [], [0]
    for k in range(1, values.size):
        if values[k - 1] - values[k] <= mult_tol * values[k - 1]:
            cur.append(k)
        else:
            groups.append(cur)
            cur = [k]
    groups.append(cur)
    return groups


def singular_spectrum(H, mult_tol: float = MULT_TOL) -> SingularSpectrum:
    """Singular values and vectors of a Hankel section or of a Gramian.

    For a :class:`HankelMatrix` the SVD is used.  For a :class:`Gramian` the
    values are the square roots of the eigenvalues of ``M``; they are
    computed through an SVD of the Cholesky-weighted image matrix, which has
    the same right singular vectors but keeps relative accuracy for small
    values.
    """
    if isinstance(H, HankelMatrix):
        U, s, Vh = sla.svd(H.entries, lapack_driver="gesdd")
        return SingularSpectrum(s, Vh.conj().T, multiplicity_groups(s, mult_tol), "fourier", None, U)
    if isinstance(H, Gramian):
        try:
            _, s, Vh = sla.svd(H.factor)
            V = Vh.conj().T
        except np.linalg.LinAlgError:
            lam, V = sla.eigh(H.M)
            order = np.argsort(lam)[::-1]
            s, V = np.sqrt(np.clip(lam[order], 0, None)), V[:, order]
        return SingularSpectrum(s, V, multiplicity_groups(s, mult_tol), "malmquist-walsh", H.basis)
    M = np.asarray(H, dtype=complex)
    if np.allclose(M, M.conj().T):
        lam, V = sla.eigh(M)
        order = np.argsort(lam)[::-1]
        s = np.sqrt(np.clip(lam[order], 0, None))
        return SingularSpectrum(s, V[:, order], multiplicity_groups(s, mult_tol), "gramian")
    U, s, Vh = sla.svd(M)
    return SingularSpectrum(s, Vh.conj().T, multiplicity_groups(s, mult_tol), "matrix", None, U)


def spectrum_fourier(f: AntiAnalyticFunction, order: int | None = None) -> SingularSpectrum:
    g = f if order is None else f.truncated(order)
    return singular_spectrum(hankel_matrix(g))


def spectrum_rational(f: RationalFunction) -> SingularSpectrum:
    return singular_spectrum(gramian_rational(f.p, f.q))


def nehari_norm(symbol) -> float:
    """Norm of the Hankel operator with the given symbol (distance to H-infinity).

    Accepts a :class:`RationalFunction` (exact) or an
    :class:`AntiAnalyticFunction` (finite section).
    """
    if isinstance(symbol, AntiAnalyticFunction):
        if not np.any(symbol.coeffs):
            return 0.0
        return float(sla.svdvals(hankel_matrix(symbol).entries)[0])
    f = symbol.proper()
    if f.p.is_zero():
        return 0.0
    g = gramian_rational(f.p, f.q, require_coprime=False)
    return float(sla.svdvals(g.factor)[0])


def sup_norms(spectrum: SingularSpectrum, count: int, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Sampled sup norms of the first ``count`` singular vectors (each has unit L2 norm)."""
    out = np.empty(count)
    z = roots_of_unity(samples)
    if spectrum.basis_tag == "fourier":
        V = spectrum.vectors[:, :count]
        if V.shape[0] <= samples:
            vals = np.fft.ifft(V, n=samples, axis=0) * samples
        else:
            vals = np.polynomial.polynomial.polyval(z, V).T
        return np.abs(vals).max(axis=0)
    vals = spectrum.basis.values(z) @ spectrum.vectors[:, :count]
    out[:] = np.abs(vals).max(axis=0)
    return out


def quotient_norms(spectrum: SingularSpectrum, count: int) -> np.ndarray:
    """Norms of ``v_k`` in ``H^inf / ker Gamma`` for the first ``count`` vectors.

    The kernel is ``B H^inf`` with ``B = q / qt`` the Blaschke product of the
    construction zeros; by Nehari's theorem the quotient norm of ``v`` equals
    the Hankel norm of the symbol ``v conj(B) = u / q``.  In the Fourier path
    ``B = z^N``.
    """
    out = np.empty(count)
    if spectrum.basis_tag == "fourier":
        N = spectrum.vectors.shape[0]
        for k in range(count):
            v = spectrum.vectors[:, k]
            # v z^{-N}: coefficient of z^{-m} is v_{N-m}
            out[k] = nehari_norm(AntiAnalyticFunction(v[::-1]))
        return out
    basis = spectrum.basis
    m = quadrature_size(basis.zeros)
    z = roots_of_unity(m)
    E, B = basis.values_and_blaschke(z)
    V = E @ spectrum.vectors[:, :count]
    for k in range(count):
        H = hankel_matrix_on_basis(basis, V[:, k] * np.conj(B), z, E)
        out[k] = sla.svdvals(H)[0]
    return out


@dataclass(frozen=True)
class MeromorphicApproximant:
    """AAK approximant ``g_n = P_+(f v_n) / v_n`` with its poles in the disk.

    ``analytic`` and ``singular`` are the Riesz parts of the boundary values
    of ``g_n``; ``ripple`` is ``max | |f - g_n| - s_n | / s_n`` on the grid.
    """

    analytic: FourierSeries
    singular: AntiAnalyticFunction
    poles: RootSet
    level_modulus: float
    ripple: float
    warnings: list = field(default_factory=list)

    def pole_list(self) -> np.ndarray:
        return self.poles.all()


def _fourier_pole_filter(u: ComplexPolynomial, n: int, margin: float):
    rs = roots(u, cluster_tol=0.0)
    z = rs.all()
    inside = z[np.abs(z) < 1 - margin]
    return inside


def aak_approximant(f, spectrum: SingularSpectrum, n: int, grid: int | None = None,
                    margin: float = 1e-2) -> MeromorphicApproximant:
    """Best meromorphic approximant with at most ``n`` poles (AAK).

    Parameters
    ----------
    f : AntiAnalyticFunction or RationalFunction
        The symbol the spectrum was computed from.
    spectrum : SingularSpectrum
    n : int
        Number of allowed poles; ``s_n`` must exceed ``1e-13 s_0`` (smaller
        values are rounding noise of a rank-deficient symbol).
    margin : float
        Fourier path only: roots of the truncated singular vector closer
        than this to the circle are treated as truncation artifacts.

    Notes
    -----
    Poles are the zeros of ``v_n`` in the open disk.  More than ``n`` of them
    is recorded as a warning (it signals a multiplicity group or truncation
    noise) and the list is not pruned.
    """
    if n >= spectrum.rank(RANK_RTOL):
        raise H2LBError(f"s_{n} vanishes; the symbol has rank <= {n}")
    s_n = float(spectrum.values[n])
    u = spectrum.numerator(n)
    warnings = []
    if spectrum.basis_tag == "fourier":
        N = spectrum.vectors.shape[0]
        m = grid or next_pow2(8 * N)
        inside = _fourier_pole_filter(u, n, margin)
    else:
        N = len(spectrum.basis)
        m = grid or max(4096, next_pow2(16 * N), quadrature_size(spectrum.basis.zeros))
        rs = roots(u.trimmed(1e-14 * max(np.abs(u.coeffs).max(), 1e-300))) if u.degree > 0 else None
        inside = rs.inside if rs is not None else np.zeros(0, complex)
    z = roots_of_unity(m)
    fz = rational_on_grid(f, m) if isinstance(f, RationalFunction) else f(z)
    vz = spectrum.vector_on_grid(n, m)
    c = np.fft.fft(fz * vz)
    c[m // 2:] = 0
    plus = np.fft.ifft(c)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = plus / vz
    finite = np.isfinite(g)
    ripple = float(np.max(np.abs(np.abs(fz[finite] - g[finite]) - s_n)) / s_n)
    coeff = np.fft.fft(np.where(finite, g, 0)) / m
    half = m // 2
    analytic = FourierSeries.from_parts(nonneg=coeff[:half])
    singular = AntiAnalyticFunction(coeff[m - np.arange(1, half)])
    if inside.size > n:
        warnings.append(f"{inside.size} disk zeros of v_{n} exceed n={n} (multiplicity or truncation)")
    vals, mults = (np.unique(np.round(inside, 10), return_counts=True) if inside.size
                   else (np.zeros(0, complex), np.zeros(0, int)))
    poles = RootSet(np.asarray(vals), np.asarray(mults))
    return MeromorphicApproximant(analytic, singular, poles, s_n, ripple, warnings)


def spectrum_records(spectrum: SingularSpectrum, count: int | None = None,
                     samples: int = DEFAULT_SAMPLES) -> list[dict]:
    """Export rows ``{k, s_k, sup_norm, quotient_norm}``."""
    count = len(spectrum) if count is None else min(count, len(spectrum))
    sup = sup_norms(spectrum, count, samples)
    quo = quotient_norms(spectrum, count)
    return [
        {"k": k, "s_k": float(spectrum.values[k]), "sup_norm": float(sup[k]), "quotient_norm": float(quo[k])}
        for k in range(count)
    ]
