"""Acceptance suite: one recorded PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.
"""
import time

import cvxpy as cp
import numpy as np
import pytest

from h2lb.bounds import ReportOptions, assemble_report, blaschke_bounds
from h2lb.fourier import roots_of_unity
from h2lb.functions import builtin
from h2lb.hankel import sort_zeros, spectrum_fourier, spectrum_rational
from h2lb.linearized import build_problem
from h2lb.polynomial import ComplexPolynomial, TrigPolynomial, fejer_riesz, roots
from h2lb.rational import RationalFunction
from h2lb.upper import BlaschkeProduct, solve_RAB

from conftest import disk_grid, one_pole_error, random_complex, random_disk


# published reference values and tolerances
EX1_MN, EX1_QN, EX1_LIN, EX1_UPPER_REF = 2.884744e-3, 2.887532e-3, 4.04e-3, 11.5e-3
EX7_MN, EX7_QN, EX7_LIN_ONE, EX7_LIN_UPPER, EX7_UPPER_REF = 1.780707e-4, 1.782276e-4, 0.7977e-4, 6.3409e-4, 6.3742e-4
HANKEL_RTOL = 5e-3
LIN_RTOL = 0.10
LIN_UPPER_RTOL = 0.15
UPPER_FACTOR = 1.1
RUNTIME_TARGET = 60.0


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture(scope="module")
def example1():
    t0 = time.perf_counter()
    rep = assemble_report(builtin(1), 4, ReportOptions(linearized=True, restarts=16, seed=0))
    return rep, time.perf_counter() - t0


@pytest.fixture(scope="module")
def example7():
    target = builtin(7)
    cache = {}
    rep = assemble_report(target, 4, ReportOptions(linearized=True, restarts=16, seed=0), spectrum_cache=cache)
    sol = cache["solution"]
    # heuristic denominator as weight; warm start only, the upper solve is already done
    rep_up = assemble_report(target, 4, ReportOptions(linearized=True, pi="upper", restarts=0, seed=0),
                             spectrum_cache=cache, upper_solution=sol)
    return rep, rep_up, target


def test_criterion_1_example1(example1, criterion):
    rep, elapsed = example1
    lin = rep.bound_linearized["value"]
    checks = {
        "Mn": rel(rep.bound_Mn, EX1_MN) <= HANKEL_RTOL,
        "Qn": rel(rep.bound_Qn, EX1_QN) <= HANKEL_RTOL,
        "linearized": rel(lin, EX1_LIN) <= LIN_RTOL,
        "runtime": elapsed < RUNTIME_TARGET,
    }
    ok = all(checks.values())
    criterion("criterion 1", ok,
              f"Mn={rep.bound_Mn:.6e} Qn={rep.bound_Qn:.6e} lin(pi=1)={lin:.4e} time={elapsed:.1f}s "
              f"failed={[k for k, v in checks.items() if not v]}")
    assert ok


def test_criterion_2a_example7_hankel_and_weighted(example7, criterion):
    rep, rep_up, _ = example7
    lin_up = rep_up.bound_linearized["value"]
    checks = {
        "Mn": rel(rep.bound_Mn, EX7_MN) <= HANKEL_RTOL,
        "Qn": rel(rep.bound_Qn, EX7_QN) <= HANKEL_RTOL,
        "linearized(pi=upper)": rel(lin_up, EX7_LIN_UPPER) <= LIN_UPPER_RTOL,
    }
    ok = all(checks.values())
    criterion("criterion 2a", ok,
              f"Mn={rep.bound_Mn:.6e} Qn={rep.bound_Qn:.6e} lin(pi=upper)={lin_up:.5e} "
              f"failed={[k for k, v in checks.items() if not v]}")
    assert ok


@pytest.mark.xfail(strict=True, reason="reference value 0.7977e-4 disagrees with two independent solvers "
                                       "(both give 7.977e-7); see tests below")
def test_criterion_2b_example7_unweighted(example7, criterion):
    rep, _, _ = example7
    lin = rep.bound_linearized["value"]
    ok = rel(lin, EX7_LIN_ONE) <= LIN_RTOL
    criterion("criterion 2b", ok, f"lin(pi=1)={lin:.4e} vs reference {EX7_LIN_ONE:.4e} (10%)")
    assert ok


def test_example7_unweighted_against_second_solver(example7):
    # the computed minimum agrees with an independent conic solver at the minimizing node
    rep, _, target = example7
    lin = rep.meta["linearized"]["estimate"]
    xi = complex(rep.meta["linearized"]["xi"])
    prob = build_problem(target.anti, None, 4)
    z = roots_of_unity(512)
    a = cp.Variable(5, complex=True)
    cons = [xi ** np.arange(5) @ a == 1, cp.abs(np.vander(z, 5, increasing=True) @ a) <= 1]
    ref = cp.Problem(cp.Minimize(cp.norm(prob.reduced_matrix @ a)), cons)
    ref.solve(solver="CLARABEL")
    assert lin >= ref.value * (1 - 1e-6)
    assert rel(lin, ref.value) <= 1e-2
    assert rel(lin, 7.977e-7) <= LIN_RTOL


def test_criterion_3_upper_competitive(example1, example7, criterion):
    up1 = example1[0].upper_bound
    up7 = example7[0].upper_bound
    ok = up1 <= UPPER_FACTOR * EX1_UPPER_REF and up7 <= UPPER_FACTOR * EX7_UPPER_REF
    criterion("criterion 3", ok, f"ex1 upper={up1:.5e} (<= {UPPER_FACTOR * EX1_UPPER_REF:.4e}), "
                                 f"ex7 upper={up7:.5e} (<= {UPPER_FACTOR * EX7_UPPER_REF:.5e})")
    assert ok


def test_criterion_4_random_generators(criterion):
    opts = ReportOptions(linearized=True, restarts=4, xi_grid=16, seed=0)
    slack = 1e-9
    failures, strict_checked = [], 0
    for gen in (2, 3, 4, 5, 6):
        for k in range(20):
            seed = 1000 * gen + k
            rep = assemble_report(builtin(gen, seed=seed), 4, opts)
            up, lin = rep.upper_bound, rep.bound_linearized["value"]
            scale = max(up, 1e-300)
            if not (rep.bound_Mn <= rep.bound_Qn + slack * scale and rep.bound_Qn <= up + slack * scale):
                failures.append((gen, seed, "chain"))
            if up > 1e-6:
                strict_checked += 1
                if not lin < up:
                    failures.append((gen, seed, "strict"))
    ok = not failures
    criterion("criterion 4", ok, f"100 instances, {strict_checked} strictness checks, failures={failures}")
    assert ok


def test_criterion_5_aak_oracles(criterion):
    worst = 0.0
    for a in (0.3, 0.5, 0.9j):
        f = RationalFunction(ComplexPolynomial([1]), ComplexPolynomial([-a, 1]))
        exact = 1 / (1 - abs(a) ** 2)
        for sp in (spectrum_rational(f), spectrum_fourier(f.to_anti_analytic(40))):
            worst = max(worst, abs(sp.values[0] - exact))
    rng = np.random.default_rng(55)
    blaschke_worst = 0.0
    for d in range(1, 7):
        b = BlaschkeProduct(random_disk(rng, d, 0.9))
        sym = b.reduced_symbol()
        for sp in (spectrum_rational(sym), spectrum_fourier(sym.to_anti_analytic(40))):
            blaschke_worst = max(blaschke_worst, np.max(np.abs(sp.values[:d] - 1)))
    rank_ok = True
    for _ in range(10):
        d = int(rng.integers(1, 9))
        f = RationalFunction.from_poles(random_disk(rng, d, 0.9), random_complex(rng, d))
        rank_ok &= spectrum_fourier(f.to_anti_analytic(40)).rank() == d
        rank_ok &= bool(np.all(spectrum_rational(f).values > 0))
    ok = worst <= 1e-8 and blaschke_worst <= 1e-8 and rank_ok
    criterion("criterion 5", ok, f"rank-1 err={worst:.1e}, Blaschke err={blaschke_worst:.1e}, ranks exact={rank_ok}")
    assert ok


def test_criterion_6_dual_path(criterion):
    rng = np.random.default_rng(66)
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(1, 7))
        f = RationalFunction.from_poles(random_disk(rng, d, 0.9), random_complex(rng, d))
        mw = spectrum_rational(f).values
        fo = spectrum_fourier(f.to_anti_analytic(40)).values[:d]
        worst = max(worst, np.max(np.abs(mw - fo) / mw))
    ok = worst <= 1e-7
    criterion("criterion 6", ok, f"max relative disagreement {worst:.2e} (<= 1e-7)")
    assert ok


def test_criterion_7_brute_force_degree_one(criterion):
    step = 0.005
    w = disk_grid(step)
    rows = []
    ok = True
    for k in range(5):
        t = builtin(2, seed=700 + k, degree=2)
        E = one_pole_error(t, w)
        i = int(np.argmin(E))
        brute = E[i]
        # resolution slack: variation of the error over the neighbouring grid points
        near = np.abs(w - w[i]) <= 1.5 * step
        slack = float(E[near].max() - brute)
        got = solve_RAB(t.anti, 1, restarts=16, seed=0, rational=t.rational).error
        rows.append(f"{got:.6e}/{brute:.6e}+-{slack:.1e}")
        ok &= abs(got - brute) <= slack
    criterion("criterion 7", ok, "solved/brute force: " + ", ".join(rows))
    assert ok


def test_criterion_8_fejer_riesz(criterion):
    rng = np.random.default_rng(88)
    worst, zero_free, positive = 0.0, True, True
    for _ in range(100):
        d = int(rng.integers(0, 13))
        g = ComplexPolynomial.from_roots(random_disk(rng, d, 3.0), leading=complex(*rng.normal(size=2)))
        T = TrigPolynomial.modulus_squared(g)
        if rng.uniform() < 0.5:
            T = T + TrigPolynomial.from_nonneg([rng.uniform(0, 1) * abs(T.coeffs).max()])
        q = fejer_riesz(T)
        back = TrigPolynomial.modulus_squared(q, T.order)
        worst = max(worst, np.abs(back.coeffs - T.coeffs).max() / np.abs(T.coeffs).max())
        if q.degree > 0:
            zero_free &= bool(np.all(np.abs(roots(q, cluster_tol=0.0).all()) >= 1 - 1e-9))
        q0 = q(0.0)
        positive &= q0.real > 0 and abs(q0.imag) <= 1e-12 * abs(q0)
    ok = worst <= 1e-8 and zero_free and positive
    criterion("criterion 8", ok, f"max relative roundtrip {worst:.1e}, zero-free={zero_free}, q(0)>0={positive}")
    assert ok


def test_criterion_9_blaschke_bounds(criterion):
    rng = np.random.default_rng(99)
    cases, viol = 0, []
    for i in range(10):
        d = int(rng.integers(1, 7))
        zeros = random_disk(rng, d, 0.9)
        b = BlaschkeProduct(zeros)
        sym = b.reduced_symbol()
        A = sym.to_anti_analytic(40)
        zs = sort_zeros(zeros)
        for n in range(d):
            up = solve_RAB(A, n, restarts=8, seed=0, rational=sym).error
            b1, b2 = blaschke_bounds(zs, n)
            cases += 1
            if b1 > up * (1 + 1e-9) or b2 > up * (1 + 1e-9):
                viol.append((i, n, b1, b2, up))
    b1, _ = blaschke_bounds([0.0], 0)
    ident = BlaschkeProduct([0.0])
    true_err = solve_RAB(ident.reduced_symbol().to_anti_analytic(40), 0).error
    ok = not viol and b1 == 1.0 and true_err == 1.0
    criterion("criterion 9", ok, f"{cases} (product, n) cases, violations={viol}, b(z)=z: bound={b1}, error={true_err}")
    assert ok
