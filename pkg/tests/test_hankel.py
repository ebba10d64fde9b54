import numpy as np
import pytest

from h2lb.errors import DomainError, H2LBError, NotCoprimeError
from h2lb.functions import builtin
from h2lb.fourier import AntiAnalyticFunction, roots_of_unity
from h2lb.hankel import (
    aak_approximant,
    gramian_rational,
    hankel_matrix,
    malmquist_walsh,
    multiplicity_groups,
    nehari_norm,
    quotient_norms,
    sort_zeros,
    spectrum_fourier,
    spectrum_rational,
    spectrum_records,
    sup_norms,
)
from h2lb.polynomial import ComplexPolynomial
from h2lb.rational import RationalFunction
from h2lb.upper import BlaschkeProduct

from conftest import random_complex, random_disk


def random_rational(rng, deg, radius=0.9):
    return RationalFunction.from_poles(random_disk(rng, deg, radius), random_complex(rng, deg))


def test_hankel_entries():
    H = hankel_matrix(AntiAnalyticFunction([1, 2, 3]))
    assert np.array_equal(H.entries, [[1, 2, 3], [2, 3, 0], [3, 0, 0]])


def test_malmquist_walsh_orthonormal(rng):
    zs = sort_zeros(random_disk(rng, 5, 0.8))
    basis = malmquist_walsh(zs)
    z = roots_of_unity(4096)
    E = np.array([basis.evaluate(j, z) for j in range(len(basis))])
    G = E.conj() @ E.T / z.size
    assert np.allclose(G, np.eye(len(basis)), atol=1e-12)


def test_sort_zeros_by_modulus_then_angle():
    zs = sort_zeros([0.5j, -0.5, 0.1, 0.5])
    assert np.allclose(zs, [0.1, 0.5, 0.5j, -0.5])


def test_singular_vectors_attain_singular_values(rng):
    f = random_rational(rng, 4)
    sp = spectrum_rational(f)
    m = 4096
    z = roots_of_unity(m)
    fz = f(z)
    for k in range(4):
        prod = np.fft.fft(fz * sp.vector_on_grid(k, m)) / m
        minus = prod[m // 2:]
        assert np.linalg.norm(minus) == pytest.approx(sp.values[k], rel=1e-9)
        assert np.linalg.norm(sp.vector_on_grid(k, m)) / np.sqrt(m) == pytest.approx(1, rel=1e-10)


def test_fourier_singular_vectors(rng):
    f = random_rational(rng, 3).to_anti_analytic(40)
    sp = spectrum_fourier(f)
    H = hankel_matrix(f).entries
    for k in range(3):
        assert np.linalg.norm(H @ sp.vectors[:, k]) == pytest.approx(sp.values[k], rel=1e-10)
    assert sp.rank() == 3


def test_gramian_checks():
    q = ComplexPolynomial.from_roots([0.5, -0.3])
    with pytest.raises(NotCoprimeError):
        gramian_rational(ComplexPolynomial.from_roots([0.5]), q)
    g = gramian_rational(ComplexPolynomial.from_roots([0.5]), q, require_coprime=False)
    assert np.allclose(g.M, g.factor.conj().T @ g.factor)
    with pytest.raises(DomainError):
        gramian_rational(ComplexPolynomial([1]), ComplexPolynomial.from_roots([1.0]))


def test_clustered_poles_near_circle():
    # twenty poles in 0.9 < |z| < 0.95: monomial-basis Gram matrices are
    # hopeless here, the product-form basis is not
    t = builtin(5, seed=5008)
    sr = spectrum_rational(t.rational)
    sf = spectrum_fourier(t.anti)
    assert np.allclose(sr.values, sf.values[:20], rtol=1e-8, atol=1e-8 * sf.values[0])
    sup = sup_norms(sr, 6, 8000)
    assert np.allclose(sup, sup_norms(sf, 6, 8000), rtol=1e-6)
    quo = quotient_norms(sr, 6)
    assert np.all(quo >= 1 - 1e-9) and np.all(quo <= sup * (1 + 1e-9))


def test_pole_too_close_for_quadrature():
    q = ComplexPolynomial.from_roots([1 - 1e-7])
    with pytest.raises(DomainError):
        gramian_rational(ComplexPolynomial([1]), q)


def test_nehari_norm_simple_pole():
    a = 0.6j
    f = RationalFunction(ComplexPolynomial([1]), ComplexPolynomial([-a, 1]))
    assert nehari_norm(f) == pytest.approx(1 / (1 - abs(a) ** 2), rel=1e-12)
    assert nehari_norm(f.to_anti_analytic(50)) == pytest.approx(1 / (1 - abs(a) ** 2), rel=1e-12)
    assert nehari_norm(AntiAnalyticFunction([0, 0])) == 0.0


def test_norm_ordering(rng):
    # unit L2 vectors: 1 <= quotient norm <= sup norm
    f = random_rational(rng, 5)
    for sp in (spectrum_rational(f), spectrum_fourier(f.to_anti_analytic(40))):
        sup = sup_norms(sp, 5, 8000)
        quo = quotient_norms(sp, 5)
        assert np.all(quo >= 1 - 1e-9)
        assert np.all(quo <= sup * (1 + 1e-9))


def test_blaschke_multiplicity_group():
    b = BlaschkeProduct([0.3, -0.5j, 0.7 + 0.1j])
    sp = spectrum_rational(b.reduced_symbol())
    assert np.allclose(sp.values, 1, atol=1e-10)
    assert multiplicity_groups(sp.values) == [[0, 1, 2]]
    assert multiplicity_groups(np.array([3.0, 2.0, 2.0, 1.0])) == [[0], [1, 2], [3]]


def test_aak_approximant_rational(rng):
    f = random_rational(rng, 5, 0.8)
    sp = spectrum_rational(f)
    for n in (1, 3):
        g = aak_approximant(f, sp, n)
        assert g.ripple < 1e-8
        assert len(g.poles) == n
        assert np.all(np.abs(g.pole_list()) < 1)
        assert not g.warnings


def test_aak_approximant_fourier(rng):
    f = random_rational(rng, 4, 0.7)
    A = f.to_anti_analytic(40)
    g = aak_approximant(A, spectrum_fourier(A), 2)
    assert g.ripple < 1e-6
    assert len(g.poles) == 2
    true_poles = f.poles().all()
    # AAK poles are not the poles of f, but stay in the disk
    assert np.all(np.abs(g.pole_list()) < 1)
    assert true_poles.size == 4


def test_aak_rank_deficient():
    f = RationalFunction(ComplexPolynomial([1]), ComplexPolynomial([-0.5, 1]))
    with pytest.raises(H2LBError):
        aak_approximant(f, spectrum_rational(f), 1)
    A = AntiAnalyticFunction([2.0, 0, 0, 0])
    with pytest.raises(H2LBError):
        aak_approximant(A, spectrum_fourier(A), 1)


def test_spectrum_records(rng):
    sp = spectrum_rational(random_rational(rng, 3))
    rows = spectrum_records(sp, 2)
    assert [r["k"] for r in rows] == [0, 1]
    assert rows[0]["s_k"] >= rows[1]["s_k"]
    assert set(rows[0]) == {"k", "s_k", "sup_norm", "quotient_norm"}
