"""Lower bound from the linearized approximation error.

For a weight polynomial ``pi`` without zeros in the closed disk and a
node ``xi`` on the circle, ``psi(xi)`` is the smallest value of
``||P_-(f q / pi)||_2`` over polynomials ``q`` of degree at most ``n`` with
``q(xi) = pi(xi)`` and ``|q| <= |pi|`` on the circle.  The minimum of
``psi`` over the circle bounds ``d_2(f, R_{n-1,n})`` from below.

The circle constraint is enforced on a finite point set that is refined
until the sampled violation drops below a tolerance.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy import optimize

from .errors import ConvergenceError, DomainError, H2LBError
from .fourier import AntiAnalyticFunction, hankel_apply, roots_of_unity
from .polynomial import ComplexPolynomial, TrigPolynomial, fejer_riesz, roots
from .socp import SOCPResult, solve_socp

logger = logging.getLogger(__name__)

INITIAL_GRID = 50
CHECK_GRID = 4096
VIOL_TOL = 1e-7
XI_GRID = 64
XI_RESOLUTION = 1e-4


def normalize_weight(pi: ComplexPolynomial | None, tol: float = 1e-9) -> ComplexPolynomial:
    """Reflect zeros inside the disk to the outside without changing ``|pi|`` on the circle.

    A factor ``(z - a)`` with ``|a| < 1`` becomes ``(1 - conj(a) z)``.

    Raises
    ------
    DomainError
        A zero lies within ``tol`` of the circle.
    """
    if pi is None:
        return ComplexPolynomial([1.0])
    pi = pi.trimmed()
    if pi.is_zero():
        raise DomainError("weight polynomial is zero")
    if pi.degree == 0:
        return pi
    rs = roots(pi, tol=tol, cluster_tol=0.0)
    z = rs.all()
    if np.any(np.abs(np.abs(z) - 1) <= tol):
        raise DomainError("weight polynomial vanishes on the circle")
    lead = pi.coeffs[-1]
    out = ComplexPolynomial([lead])
    for a in z:
        if abs(a) < 1:
            out = out * ComplexPolynomial([1.0, -np.conj(a)])
        else:
            out = out * ComplexPolynomial([-a, 1.0])
    return out


def taylor_inverse(pi: ComplexPolynomial, count: int) -> np.ndarray:
    """First ``count`` Taylor coefficients of ``1/pi`` at the origin."""
    from scipy import signal

    imp = np.zeros(count)
    imp[0] = 1.0
    return signal.lfilter([1.0], pi.coeffs, imp)


@dataclass(frozen=True)
class LinearizedProblem:
    """Data of the linearized problem for ``f``, weight ``pi_n`` and degree ``n``.

    ``action_matrix[:, j]`` holds the coefficients of ``P_-(f z^j / pi_n)``
    and ``reduced_matrix`` is the triangular factor of its QR decomposition.
    """

    f: AntiAnalyticFunction
    pi_n: ComplexPolynomial
    n: int
    action_matrix: np.ndarray
    reduced_matrix: np.ndarray

    def q_from(self, a) -> ComplexPolynomial:
        return ComplexPolynomial(a, self.n)

    def objective(self, a) -> float:
        return float(np.linalg.norm(self.reduced_matrix @ np.asarray(a, dtype=complex)))


def build_problem(f: AntiAnalyticFunction, pi_n: ComplexPolynomial | None, n: int) -> LinearizedProblem:
    """Assemble and QR-reduce the action matrix.

    Raises
    ------
    DomainError
        ``pi_n`` vanishes on the circle.
    ValueError
        ``deg pi_n > n``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    pi = normalize_weight(pi_n)
    if pi.degree > n:
        raise ValueError(f"weight degree {pi.degree} exceeds n={n}")
    a = np.asarray(f.coeffs, dtype=complex)
    N = a.size
    t = taylor_inverse(pi, N)
    A = np.zeros((N, n + 1), dtype=complex)
    for j in range(n + 1):
        h = np.zeros(N, dtype=complex)
        if j < N:
            h[j:] = t[: N - j]
        A[:, j] = hankel_apply(a, h)
    R = sla.qr(A, mode="r")[0][: n + 1]
    if R.shape[0] < n + 1:
        R = np.vstack([R, np.zeros((n + 1 - R.shape[0], n + 1), dtype=complex)])
    return LinearizedProblem(f, pi, n, A, np.triu(R))


@dataclass
class ConstraintSet:
    """Interpolation node ``xi`` and the circle points where ``|q| <= |pi|`` is imposed."""

    xi: complex
    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex).ravel()

    @classmethod
    def uniform(cls, xi, m: int = INITIAL_GRID) -> ConstraintSet:
        return cls(complex(xi), roots_of_unity(m))

    def extended(self, new) -> ConstraintSet:
        pts = np.concatenate([self.points, np.asarray(new, dtype=complex)])
        keep = [0]
        ang = np.angle(pts)
        for i in range(1, pts.size):
            if np.min(np.abs(pts[i] - pts[keep])) > 1e-12:
                keep.append(i)
        return ConstraintSet(self.xi, pts[keep])

    def active(self) -> np.ndarray:
        """Points with the node itself removed (there the equality already pins ``q``)."""
        return self.points[np.abs(self.points - self.xi) > 1e-12]


def _vander(z, n):
    return np.asarray(z, dtype=complex)[:, None] ** np.arange(n + 1)[None, :]


def strictly_feasible_start(pi: ComplexPolynomial, xi: complex, n: int, margin: float = 0.4) -> np.ndarray:
    """Coefficients of ``q`` with ``q(xi) = pi(xi)`` and ``|q| < |pi|`` off ``xi``.

    ``q`` is the spectral factor of ``|pi|^2 - eps^2 |z - xi|^2`` rotated to
    match ``pi`` at ``xi``, with ``eps = margin * min |pi|``.
    """
    z = roots_of_unity(4096)
    eps = margin * np.abs(pi(z)).min()
    T = TrigPolynomial.modulus_squared(pi, max(n, 1)) - TrigPolynomial.modulus_squared(
        ComplexPolynomial([-xi, 1.0]), max(n, 1)) * eps**2
    q = fejer_riesz(T)
    q = q * (pi(xi) / q(xi))
    c = np.zeros(n + 1, dtype=complex)
    c[: q.coeffs.size] = q.coeffs[: n + 1]
    return c


def socp_min(problem: LinearizedProblem, constraints: ConstraintSet, a0=None, gap_tol: float = 1e-9,
             max_iter: int = 400):
    """Solve the cone program for a fixed finite constraint set.

    Returns
    -------
    (q, result) : (ComplexPolynomial, SOCPResult)
        ``result.value`` is the optimal ``||R a||``.
    """
    n, pi, xi = problem.n, problem.pi_n, constraints.xi
    if n == 0:
        a = np.array([pi(xi)], dtype=complex)
        val = problem.objective(a)
        res = SOCPResult(a, val, val**2, val**2, 0.0, 0.0, np.zeros(0), 0.0, 0)
        return problem.q_from(a), res
    pts = constraints.active()
    e = _vander([xi], n)[0]
    V = _vander(pts, n)
    rho = np.abs(pi(pts))
    base = strictly_feasible_start(pi, xi, n)
    start = base
    if a0 is not None:
        # pull the previous optimum towards the strictly feasible point until feasible
        for theta in (0.999, 0.99, 0.9, 0.5, 0.0):
            cand = theta * np.asarray(a0) + (1 - theta) * base
            if np.all(np.abs(V @ cand) < rho):
                start = cand
                break
    res = solve_socp(problem.reduced_matrix, e, pi(xi), V, rho, a0=start, gap_tol=gap_tol, max_iter=max_iter)
    return problem.q_from(res.a), res


def _local_maxima(vals: np.ndarray) -> np.ndarray:
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    return np.flatnonzero((vals >= left) & (vals >= right))


def _refine_max(ratio, theta0: float, h: float) -> float:
    res = optimize.minimize_scalar(lambda th: -ratio(th), bounds=(theta0 - h, theta0 + h), method="bounded",
                                   options={"xatol": 1e-10})
    return res.x if -res.fun >= ratio(theta0) else theta0


@dataclass
class PsiResult:
    """Value of ``psi`` at one node and the refinement history."""

    xi: complex
    value: float
    q: ComplexPolynomial
    gap: float
    max_violation: float
    rounds: int
    history: list = field(default_factory=list)
    constraints: ConstraintSet | None = None
    kkt_residual: float = 0.0


def psi(problem: LinearizedProblem, xi, constraint_grid: int = INITIAL_GRID, check_grid: int = CHECK_GRID,
        viol_tol: float = VIOL_TOL, gap_tol: float = 1e-9, max_rounds: int = 60, stall_rounds: int = 10) -> PsiResult:
    """Evaluate ``psi(xi)`` with adaptive constraint refinement.

    Each round solves the cone program, samples ``|q/pi|`` on ``check_grid``
    points, and adds the local maxima exceeding ``1 + viol_tol`` (polished by
    a bounded scalar search) to the constraint set.

    Raises
    ------
    ConvergenceError
        The sampled violation did not decrease for ``stall_rounds``
        consecutive rounds, or ``max_rounds`` was reached.
    """
    xi = complex(xi)
    if abs(abs(xi) - 1) > 1e-12:
        raise ValueError("xi must be unimodular")
    cons = ConstraintSet.uniform(xi, constraint_grid)
    zc = roots_of_unity(check_grid)
    pi = problem.pi_n
    piz = np.abs(pi(zc))
    a_prev = None
    history = []
    best_viol, stall = np.inf, 0
    h = 2 * np.pi / check_grid
    for rnd in range(1, max_rounds + 1):
        q, res = socp_min(problem, cons, a0=a_prev, gap_tol=gap_tol)
        a_prev = res.a
        ratio_vals = np.abs(q(zc)) / piz
        viol = float(ratio_vals.max() - 1)

        def ratio(th):
            w = np.exp(1j * th)
            return float(abs(q(w)) / abs(pi(w)))

        cand = [i for i in _local_maxima(ratio_vals) if ratio_vals[i] > 1 + 0.1 * viol_tol]
        new = []
        for i in cand:
            th = _refine_max(ratio, 2 * np.pi * i / check_grid, h)
            new.append(np.exp(1j * th))
            viol = max(viol, ratio(th) - 1)
        history.append({"round": rnd, "value": res.value, "gap": res.value_gap, "violation": viol,
                        "points": int(cons.points.size)})
        if viol <= viol_tol or problem.n == 0:
            return PsiResult(xi, res.value, q, res.value_gap, max(viol, 0.0), rnd, history, cons, res.kkt_residual)
        if viol < best_viol * (1 - 1e-3):
            best_viol, stall = viol, 0
        else:
            stall += 1
            if stall >= stall_rounds:
                raise ConvergenceError(f"constraint violation stalled at {viol:.3e}", partial=history)
        cons = cons.extended(new)
    raise ConvergenceError(f"constraint refinement did not converge in {max_rounds} rounds", partial=history)


@dataclass
class LinearizedBound:
    """Minimum of ``psi`` over the circle.

    ``estimate`` is the minimum found; ``bound`` subtracts the duality gap of
    that solve.  Neither is certified.
    """

    estimate: float
    bound: float
    xi: complex
    gap: float
    max_violation: float
    grid_values: np.ndarray
    best: PsiResult
    evaluations: int


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("H2LB_THREADS", "1")))
    except ValueError:
        return 1


def linearized_bound(problem: LinearizedProblem, grid_size: int = XI_GRID, resolution: float = XI_RESOLUTION,
                     **psi_kwargs) -> LinearizedBound:
    """Minimize ``psi`` over a node grid, then refine by golden-section search.

    Parameters
    ----------
    grid_size : int
        Number of equispaced nodes (at least 8).
    resolution : float
        Final bracket width in radians.
    **psi_kwargs
        Forwarded to :func:`psi`.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be >= 8")
    thetas = 2 * np.pi * np.arange(grid_size) / grid_size
    cache: dict[float, PsiResult] = {}

    def evaluate(th):
        th = float(th) % (2 * np.pi)
        if th not in cache:
            cache[th] = psi(problem, np.exp(1j * th), **psi_kwargs)
        return cache[th]

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(lambda th: psi(problem, np.exp(1j * th), **psi_kwargs), thetas))
        for th, r in zip(thetas, results):
            cache[float(th) % (2 * np.pi)] = r
    else:
        results = [evaluate(th) for th in thetas]
    vals = np.array([r.value for r in results])
    k = int(np.argmin(vals))
    step = 2 * np.pi / grid_size
    lo, hi = thetas[k] - step, thetas[k] + step
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = evaluate(x1).value, evaluate(x2).value
    while hi - lo > resolution:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = evaluate(x1).value
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = evaluate(x2).value
    best = min(cache.values(), key=lambda r: r.value)
    return LinearizedBound(best.value, best.value - best.gap, best.xi, best.gap, best.max_violation,
                           vals, best, len(cache))
