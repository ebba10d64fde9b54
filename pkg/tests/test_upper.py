import numpy as np
import pytest

from h2lb.errors import DomainError
from h2lb.fourier import AntiAnalyticFunction, roots_of_unity
from h2lb.polynomial import ComplexPolynomial
from h2lb.rational import RationalFunction
from h2lb.upper import (
    BlaschkeProduct,
    _fd_grad,
    _objective_grad,
    _pack,
    criterion,
    disk_from_plane,
    plane_from_disk,
    rational_error,
    recover_numerator,
    solve_RAB,
)

from conftest import random_complex, random_disk


@pytest.fixture(scope="module")
def symbol():
    rng = np.random.default_rng(99)
    f = RationalFunction.from_poles(random_disk(rng, 6, 0.85), random_complex(rng, 6))
    return f.to_anti_analytic(45)


def test_blaschke_product_basics():
    b = BlaschkeProduct([0.5, -0.3j, 0.0])
    z = roots_of_unity(64)
    assert np.allclose(np.abs(b(z)), 1)
    assert np.allclose(b(np.array([0.5, -0.3j, 0.0])), 0)
    w = 0.3 + 0.2j
    t = b.taylor(80)
    assert np.polyval(t[::-1], w) == pytest.approx(b(w))
    with pytest.raises(DomainError):
        BlaschkeProduct([1.2])


def test_reduced_symbol_boundary_values():
    b = BlaschkeProduct([0.5, -0.3 + 0.1j], constant=1j)
    sym = b.reduced_symbol()
    z = roots_of_unity(32)
    assert np.allclose(sym(z), np.conj(b(z)) - np.conj(b(0.0)))


def test_disk_maps_are_inverse(rng):
    z = random_disk(rng, 20, 0.99)
    assert np.allclose(disk_from_plane(plane_from_disk(z)), z)
    assert np.all(np.abs(disk_from_plane(10 * random_complex(rng, 10))) < 1)


def test_recover_numerator_small_case():
    f = AntiAnalyticFunction([2, 3])
    q = ComplexPolynomial.monomial(2)
    p = recover_numerator(f, q)
    assert p.allclose([3, 2])
    assert rational_error(f, p, q) < 1e-14


def test_two_routes_to_the_error(symbol, rng):
    zeros = random_disk(rng, 3, 0.9)
    q = ComplexPolynomial.from_roots(zeros)
    p = recover_numerator(symbol, q)
    assert rational_error(symbol, p, q) == pytest.approx(criterion(symbol, zeros), rel=1e-9)
    # the recovered numerator is optimal: perturbing it increases the error
    e0 = rational_error(symbol, p, q)
    for _ in range(3):
        dp = ComplexPolynomial(1e-3 * random_complex(rng, 3))
        assert rational_error(symbol, p + dp, q) > e0


def test_analytic_gradient_matches_differences(symbol, rng):
    a = np.asarray(symbol.coeffs)
    norm2 = symbol.l2_norm() ** 2
    x = _pack(plane_from_disk(random_disk(rng, 4, 0.8)))

    def fun(x):
        n = x.size // 2
        return _objective_grad(a, x[:n] + 1j * x[n:], norm2)[0]

    n = x.size // 2
    g = _objective_grad(a, x[:n] + 1j * x[n:], norm2)[1]
    assert np.allclose(g, _fd_grad(fun, x), rtol=1e-5, atol=1e-9)


def test_reachable_symbol_is_recovered():
    rng = np.random.default_rng(3)
    f = RationalFunction.from_poles(random_disk(rng, 4, 0.8), random_complex(rng, 4))
    A = f.to_anti_analytic(45)
    sol = solve_RAB(A, 4, restarts=4, seed=1, rational=f)
    assert sol.error <= 1e-7 * A.l2_norm()
    assert np.allclose(np.sort_complex(sol.zeros), np.sort_complex(f.poles().all()), atol=1e-4)


def test_solve_degree_zero(symbol):
    sol = solve_RAB(symbol, 0)
    assert sol.error == pytest.approx(symbol.l2_norm())
    assert sol.p.is_zero()


def test_solve_deterministic_and_scale_free(symbol):
    s1 = solve_RAB(symbol, 2, restarts=3, seed=5)
    s2 = solve_RAB(symbol, 2, restarts=3, seed=5)
    assert s1.error == s2.error
    s3 = solve_RAB(symbol.scaled(7.0), 2, restarts=3, seed=5)
    assert s3.error == pytest.approx(7 * s1.error, rel=1e-8)
    assert s1.error <= 1.0000001 * criterion(symbol, s1.zeros)


def test_fd_gradient_option(symbol):
    a = solve_RAB(symbol, 2, restarts=2, seed=0)
    b = solve_RAB(symbol, 2, restarts=2, seed=0, gradient="fd")
    assert b.error == pytest.approx(a.error, rel=1e-5)


def test_warm_start_is_never_worse(symbol):
    s2 = solve_RAB(symbol, 2, restarts=2, seed=0)
    s3 = solve_RAB(symbol, 3, restarts=0, seed=0, warm=s2, aak_start=False)
    assert s3.error <= s2.error * (1 + 1e-9)
    assert s3.runs[0]["start"] == "warm"
