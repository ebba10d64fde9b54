"""Small dense second-order-cone programs of interpolation type.

Solves

    minimize    || R a ||_2
    subject to  e^T a = beta
                | v_i^T a | <= rho_i,   i = 1..m

over complex vectors ``a``.  The equality is eliminated through a
null-space basis, leaving a real problem in ``2 dim(a) - 2`` unknowns that
is handled by a log-barrier method with damped Newton centering.  The
Lagrange multipliers implied by the central path yield an exact dual value,
so the reported duality gap is a genuine bound on suboptimality (up to
rounding).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)


@dataclass
class SOCPResult:
    """Solution of one cone program.

    ``value`` is the optimal norm ``||R a||``; ``objective`` its square.
    ``gap`` bounds ``objective - optimum`` and ``value_gap`` bounds
    ``value - sqrt(optimum)``.
    """

    a: np.ndarray
    value: float
    objective: float
    dual: float
    gap: float
    value_gap: float
    multipliers: np.ndarray
    kkt_residual: float
    iterations: int
    info: dict = field(default_factory=dict)


def _realify(M: np.ndarray) -> np.ndarray:
    """Real matrix acting on ``[Re x; Im x]`` like complex ``M`` acts on ``x``."""
    p, q = M.shape
    out = np.empty((2 * p, 2 * q))
    out[:p, :q] = M.real
    out[:p, q:] = -M.imag
    out[p:, :q] = M.imag
    out[p:, q:] = M.real
    return out


class _Problem:
    """Real reformulation after the equality has been removed.

    The unknown ``x = [Re y; Im y]`` parametrizes ``a = a_p + Z y``; the
    constraint values ``w = d + G y`` are kept complex.
    """

    def __init__(self, R, e, beta, V, rho):
        R = np.asarray(R, dtype=complex)
        e = np.asarray(e, dtype=complex)
        V = np.asarray(V, dtype=complex)
        rho = np.asarray(rho, dtype=float)
        ne = np.vdot(e, e).real
        self.a_p = beta * np.conj(e) / ne
        Z = sla.null_space(e[None, :])
        self.Z = Z
        self.B = _realify(R @ Z)
        c = R @ self.a_p
        self.c = np.concatenate([c.real, c.imag])
        self.G = V @ Z
        self.d = V @ self.a_p
        self.k = Z.shape[1]
        self.rho2 = rho**2
        self.BtB = self.B.T @ self.B
        self.Btc = self.B.T @ self.c

    def to_complex(self, x):
        k = self.k
        return self.a_p + self.Z @ (x[:k] + 1j * x[k:])

    def from_complex(self, a):
        y = self.Z.conj().T @ (a - self.a_p)
        return np.concatenate([y.real, y.imag])

    def lin(self, x):
        """``G y`` for the real coordinates ``x``."""
        k = self.k
        return self.G @ (x[:k] + 1j * x[k:])

    def w(self, x):
        return self.d + self.lin(x)

    def slack(self, x):
        w = self.w(x)
        return self.rho2 - (w.real**2 + w.imag**2), w

    def pullback(self, u):
        """Real gradient coordinates of ``Re sum conj(u_i) w_i``, i.e. ``[Re G^H u; Im G^H u]``."""
        g = self.G.conj().T @ u
        return np.concatenate([g.real, g.imag])

    def weighted_gram(self, lam):
        """Real form of ``G^H diag(lam) G``."""
        return _realify(self.G.conj().T @ (lam[:, None] * self.G))

    def f0(self, x):
        r = self.c + self.B @ x
        return float(r @ r)

    def dual_value(self, lam):
        """``min_x f0 + sum lam_i (|w_i|^2 - rho_i^2)`` by a linear solve."""
        H = self.BtB + self.weighted_gram(lam)
        g = self.Btc + self.pullback(lam * self.d)
        xs = _solve_psd(H, -g)
        r = self.c + self.B @ xs
        w = self.w(xs)
        val = r @ r + np.sum(lam * (np.abs(w) ** 2 - self.rho2))
        return float(val), xs


def _max_step(w, dw, s):
    """Largest ``alpha`` with ``|w + alpha dw|^2 < rho^2`` for every constraint."""
    a = dw.real**2 + dw.imag**2
    b = (np.conj(w) * dw).real
    with np.errstate(divide="ignore", invalid="ignore"):
        roots_ = np.where(a > 0, s / (b + np.sqrt(b * b + a * s)), np.inf)
    roots_ = np.where(roots_ > 0, roots_, np.inf)
    return float(roots_.min()) if roots_.size else np.inf


def _lstsq_direction(A, grad):
    """``dx`` with ``A^T A dx = -grad``, where ``grad`` lies in the row space of ``A``."""
    Q, Rf = np.linalg.qr(A)
    try:
        y = sla.solve_triangular(Rf, -grad, trans="T", check_finite=False)
        return sla.solve_triangular(Rf, y, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        return sla.lstsq(A.T @ A, -grad, check_finite=False)[0]


def _solve_psd(H, g):
    try:
        cf = sla.cho_factor(H, check_finite=False)
        return sla.cho_solve(cf, g, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        return sla.lstsq(H, g, check_finite=False)[0]


def solve_socp(R, e, beta, V, rho, a0=None, gap_tol: float = 1e-9, abs_tol: float | None = None,
               max_iter: int = 400, mu: float = 20.0) -> SOCPResult:
    """Minimize ``||R a||`` under one interpolation equality and modulus constraints.

    Parameters
    ----------
    R : (p, k) complex array
    e : (k,) complex array
        Equality row, ``e @ a = beta``.
    V : (m, k) complex array
        Constraint rows, ``|V[i] @ a| <= rho[i]``.
    a0 : (k,) complex array, optional
        Strictly feasible starting point satisfying the equality.
    gap_tol, abs_tol : float
        Stop when ``objective - dual <= gap_tol * objective + abs_tol``.  If
        the slacks reach rounding level first, the iterate with the
        smallest gap is returned and ``info["precision_floor"]`` is set.
    max_iter : int
        Total Newton step budget.

    Raises
    ------
    DomainError
        ``a0`` is missing or not strictly feasible.
    ConvergenceError
        The Newton budget ran out; ``partial`` holds the last result.
    """
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    rho = np.asarray(rho, dtype=float).ravel()
    if np.any(rho <= 0):
        raise DomainError("constraint radii must be positive")
    if a0 is None:
        raise DomainError("a strictly feasible starting point is required")
    P = _Problem(R, e, beta, V, rho)
    m = rho.size
    x = P.from_complex(np.asarray(a0, dtype=complex))
    s, w = P.slack(x)
    if np.any(s <= 0):
        raise DomainError(f"starting point violates {int(np.sum(s <= 0))} constraints")
    if abs_tol is None:
        abs_tol = 1e-26 * max(P.c @ P.c + np.trace(P.BtB), 1e-300)
    f = P.f0(x)
    t = max(m / max(f, 1e-300), 1.0) if m else 1.0
    t = min(t, 1e12 * m / max(P.c @ P.c, 1e-300)) if m else t
    iters = 0
    dual = -np.inf
    lam = np.zeros(m)
    best = None
    floor_hit = False
    floor = 1e-12 * P.rho2.max() if m else 0.0
    while True:
        # centering
        for _ in range(60):
            s, w = P.slack(x)
            r = P.c + P.B @ x
            gw = 2 * P.pullback(w / s)
            grad = 2 * t * (P.B.T @ r) + gw
            # Newton system H dx = -grad with H = A^T A; solving the stacked least squares
            # problem keeps directions accurate when slacks approach rounding level
            wc = np.conj(P.G) * w[:, None]
            J = 2 * np.concatenate([wc.real, wc.imag], axis=1) / s[:, None]
            Gr = _realify(P.G)
            A = np.vstack([np.sqrt(2 * t) * P.B, np.sqrt(2 / np.tile(s, 2))[:, None] * Gr, J])
            dx = _lstsq_direction(A, grad)
            dec = -grad @ dx
            iters += 1
            # loose centering suffices: the dual value below is exact for any multipliers
            if dec <= 1e-6 or not np.isfinite(dec):
                break
            # backtracking on barrier decrease, starting inside the feasible step range
            dw = P.lin(dx)
            dr = P.B @ dx
            phi0 = t * (r @ r) - np.sum(np.log(s))
            step = min(1.0, 0.99 * _max_step(w, dw, s)) if m else 1.0
            while step > 1e-12:
                wn = w + step * dw
                sn = P.rho2 - (wn.real**2 + wn.imag**2)
                if np.all(sn > 0):
                    rn = r + step * dr
                    if t * (rn @ rn) - np.sum(np.log(sn)) <= phi0 - 0.25 * step * dec:
                        break
                step *= 0.5
            if step <= 1e-12:
                break
            x = x + step * dx
            if iters >= max_iter:
                break
        s, w = P.slack(x)
        f = P.f0(x)
        if m:
            lam = 1.0 / (t * s)
            dual, _ = P.dual_value(lam)
        else:
            dual = f
        gap = max(f - dual, 0.0)
        if best is None or gap < best[0]:
            best = (gap, x.copy(), f, dual, lam.copy(), t)
        if gap <= gap_tol * f + abs_tol:
            break
        if m and s.min() <= floor:
            # slacks are at rounding level: further barrier steps only add noise
            floor_hit = True
            break
        if iters >= max_iter:
            _, xb, fb, db, lb, tb = best
            res = _result(P, xb, fb, db, lb, iters, tb)
            raise ConvergenceError(f"interior point budget of {max_iter} Newton steps exhausted "
                                   f"(gap {best[0]:.3e})", partial=res)
        t *= mu
    _, x, f, dual, lam, t = best
    res = _result(P, x, f, dual, lam, iters, t)
    res.info["precision_floor"] = floor_hit
    return res


def _result(P, x, f, dual, lam, iters, t) -> SOCPResult:
    s, w = P.slack(x)
    r = P.c + P.B @ x
    grad_L = 2 * (P.B.T @ r) + (2 * P.pullback(lam * w) if lam.size else 0.0)
    scale = max(np.linalg.norm(P.B) * np.sqrt(max(f, 1e-300)), 1e-300)
    kkt = float(np.linalg.norm(grad_L) / scale)
    gap = max(f - dual, 0.0)
    value = np.sqrt(max(f, 0.0))
    vgap = value - np.sqrt(max(dual, 0.0))
    return SOCPResult(P.to_complex(x), float(value), float(f), float(dual), float(gap), float(vgap),
                      lam, kkt, iters, {"t": t, "min_slack": float(s.min()) if s.size else np.inf})
