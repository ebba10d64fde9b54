import numpy as np
import pytest

# one line per acceptance criterion, filled by tests/test_acceptance.py
CRITERIA: dict[str, tuple[bool, str]] = {}


def record(name: str, ok: bool, detail: str) -> None:
    CRITERIA[name] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")


@pytest.fixture
def criterion():
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(CRITERIA, key=_criterion_key):
        ok, detail = CRITERIA[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")


def _criterion_key(name):
    head = name.split()[1] if name.startswith("criterion") else name
    digits = "".join(ch for ch in head if ch.isdigit())
    return (int(digits) if digits else 99, name)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_disk(rng, count, radius=1.0, inner=0.0):
    r = np.sqrt(rng.uniform(inner**2, radius**2, size=count))
    return r * np.exp(2j * np.pi * rng.uniform(size=count))


def random_complex(rng, count):
    return (rng.normal(size=count) + 1j * rng.normal(size=count)) / np.sqrt(2)


def one_pole_error(f, w):
    """Closed-form best error of c/(z - w) against f, vectorized over w.

    The coefficient sequence of c/(z-w) is c w^(k-1), so the optimal c gives
    ||f||^2 - (1 - |w|^2) |sum_k a_k conj(w)^(k-1)|^2, and the sum equals
    f(1/conj w)/conj w (or a_1 at w = 0).
    """
    w = np.asarray(w, dtype=complex)
    nf2 = np.vdot(f.anti.coeffs, f.anti.coeffs).real
    out = np.empty(w.shape)
    small = np.abs(w) < 1e-12
    wb = np.conj(w[~small])
    inner = f.rational(1 / wb) / wb
    out[~small] = nf2 - (1 - np.abs(w[~small]) ** 2) * np.abs(inner) ** 2
    out[small] = nf2 - abs(f.anti.coeffs[0]) ** 2
    return np.sqrt(np.clip(out, 0, None))


def disk_grid(step):
    x = np.arange(-1 + step / 2, 1, step)
    X, Y = np.meshgrid(x, x)
    w = (X + 1j * Y).ravel()
    return w[np.abs(w) < 1 - step / 2]
