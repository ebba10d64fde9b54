import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h2lb.errors import ConvergenceError
from h2lb.fourier import (
    AntiAnalyticFunction,
    CircleSamples,
    FourierSeries,
    analytic_part_of_product,
    check_transform,
    evaluate_on_grid,
    hankel_apply,
    reduce_RA_to_RAB,
    riesz_project,
    roots_of_unity,
    sup_norm_sample,
    trim_tail,
    truncate_to_bits,
)

complex_st = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def log_example(z):
    return np.log((10 * z - 9) / (10 * z + 9))


def exp_example(z):
    return np.exp(-1j / (z - 0.9j)) - 1


def trapezoid_coeffs(fun, M, count):
    """Negative-index coefficients by the M-point trapezoidal rule (independent of the FFT path)."""
    th = 2 * np.pi * np.arange(M) / M
    z = np.exp(1j * th)
    vals = fun(z)
    k = np.arange(1, count + 1)
    return (np.exp(1j * np.outer(k, th)) @ vals) / M


def test_series_roundtrip_dict():
    s = FourierSeries.from_dict({-2: 1 + 1j, 0: 3, 4: -2j})
    assert s.order == 4
    assert s.coefficient(-2) == 1 + 1j
    assert s.coefficient(7) == 0
    assert s.to_dict() == {-2: 1 + 1j, 0: 3, 4: -2j}
    assert s.coeffs_neg == {2: 1 + 1j}
    assert s.coeffs_nonneg == {0: 3, 4: -2j}


def test_series_rejects_even_length():
    with pytest.raises(ValueError):
        FourierSeries(np.zeros(4))


def test_samples_to_series_exact():
    s = FourierSeries.from_parts([1, 2j, 0.5], [3, -1])
    back = s.samples(16).to_series(s.order)
    assert np.allclose(back.coeffs, s.coeffs, atol=1e-14)
    with pytest.raises(ValueError):
        CircleSamples(np.ones(4)).to_series(3)


def test_evaluate_on_grid_aliasing():
    # z^5 and z^-3 coincide on the 8th roots of unity
    v = evaluate_on_grid([0, 0, 0, 0, 0, 1.0], [0, 0, -1.0], 8)
    assert np.allclose(v, 0, atol=1e-14)


@given(st.lists(complex_st, min_size=1, max_size=12), st.lists(complex_st, min_size=1, max_size=12))
@settings(max_examples=50, deadline=None)
def test_riesz_parts_are_orthogonal(p, n):
    s = FourierSeries.from_parts(p, n)
    plus, minus = riesz_project(s)
    assert np.isclose(plus.inner(minus.to_series()), 0)
    total = plus.l2_norm() ** 2 + minus.l2_norm() ** 2
    assert np.isclose(total, s.l2_norm() ** 2, rtol=1e-12, atol=1e-12)


@given(st.lists(complex_st, min_size=1, max_size=10), st.lists(complex_st, max_size=10))
@settings(max_examples=50, deadline=None)
def test_check_transform_is_isometric_involution(p, n):
    s = FourierSeries.from_parts(p, n)
    t = check_transform(s)
    assert np.isclose(t.l2_norm(), s.l2_norm())
    back = check_transform(t)
    assert np.allclose(back.trimmed().coeffs, s.trimmed().coeffs)


def test_check_transform_pointwise():
    s = FourierSeries.from_parts([1, 2 - 1j, 0.3j], [0.5, 1j])
    z = np.exp(1j * np.linspace(0, 6, 7))
    expected = np.conj(s(z)) / z  # on the circle 1/conj(z) = z
    assert np.allclose(check_transform(s)(z), expected)


def test_reduce_RA_to_RAB():
    f = FourierSeries.from_parts([2.0, 1j, 3.0])
    g = reduce_RA_to_RAB(f)
    assert np.allclose(g.coeffs, [-1j, 3.0])
    with pytest.raises(ValueError):
        reduce_RA_to_RAB(FourierSeries.from_parts([1.0], [1.0]))


def test_log_example_matches_closed_form():
    # log((10z-9)/(10z+9)) = -2 sum_{k odd} 0.9^k / k z^-k
    f = truncate_to_bits(log_example, 40)
    k = np.arange(1, f.order + 1)
    exact = np.where(k % 2 == 1, -2 * 0.9**k / k, 0.0)
    assert np.max(np.abs(f.coeffs - exact)) < 1e-13
    full = np.where(np.arange(1, 2000) % 2 == 1, -2 * 0.9 ** np.arange(1, 2000) / np.arange(1, 2000), 0)
    rel_tail = np.linalg.norm(full[f.order:]) / np.linalg.norm(full)
    assert rel_tail <= 2.0**-40
    assert np.isclose(f.declared_tail_bound, np.linalg.norm(full[f.order:]), rtol=1e-3)


@pytest.mark.parametrize("M", [4097, 6143])
def test_exp_example_matches_trapezoid(M):
    f = truncate_to_bits(exp_example, 40)
    ref = trapezoid_coeffs(exp_example, M, f.order)
    assert np.max(np.abs(f.coeffs - ref)) < 1e-12 * np.abs(ref).max()
    assert f.declared_tail_bound <= 2.0**-40 * f.l2_norm() * 1.01


def test_truncation_budget():
    with pytest.raises(ConvergenceError):
        truncate_to_bits(lambda z: 1 / (z - 0.9999), 40, max_samples=2**12)
    with pytest.raises(ValueError):
        truncate_to_bits(log_example, bits=4)


def test_trim_tail():
    a = 0.5 ** np.arange(60)
    kept, tail = trim_tail(a, 20)
    assert np.linalg.norm(a[kept.size:]) == pytest.approx(tail)
    assert tail <= 2**-20 * np.linalg.norm(a)
    assert np.linalg.norm(a[kept.size - 1:]) > 2**-20 * np.linalg.norm(a)


def test_truncated_accumulates_tail():
    f = AntiAnalyticFunction([1.0, 0.5, 0.25, 0.125], 0.01)
    g = f.truncated(2)
    assert g.order == 2
    assert g.declared_tail_bound == pytest.approx(np.hypot(0.01, np.hypot(0.25, 0.125)))
    assert f.truncated(6).order == 6


def test_sup_norm_sample():
    f = AntiAnalyticFunction([1.0, 1.0])
    assert sup_norm_sample(f, 64) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        sup_norm_sample(AntiAnalyticFunction(np.ones(100)), 50)


def test_hankel_apply_matches_matrix(rng):
    a = rng.normal(size=9) + 1j * rng.normal(size=9)
    h = rng.normal(size=5) + 1j * rng.normal(size=5)
    H = np.array([[a[i + j] if i + j < a.size else 0 for j in range(h.size)] for i in range(a.size)])
    assert np.allclose(hankel_apply(a, h), H @ h)


def test_projections_by_fft(rng):
    # P_-(f h) and P_+(f h) agree with a fine-grid FFT of the product
    a = rng.normal(size=7) + 1j * rng.normal(size=7)
    h = rng.normal(size=4) + 1j * rng.normal(size=4)
    m = 64
    z = roots_of_unity(m)
    prod = AntiAnalyticFunction(a)(z) * np.polynomial.polynomial.polyval(z, h)
    c = np.fft.fft(prod) / m
    assert np.allclose(hankel_apply(a, h), c[m - np.arange(1, a.size + 1)])
    assert np.allclose(analytic_part_of_product(a, h), c[: h.size - 1])
