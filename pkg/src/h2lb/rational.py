"""Rational functions p/q with all poles inside the unit disk."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import DomainError
from .fourier import AntiAnalyticFunction, trim_tail
from .polynomial import ComplexPolynomial, RootSet, euclid_divide, roots


@dataclass(frozen=True)
class RationalFunction:
    """``p(z) / q(z)``; ``q`` is normalized to be monic.

    Only the strictly proper part matters for Hankel operators, so
    :meth:`proper` strips any polynomial part.
    """

    p: ComplexPolynomial
    q: ComplexPolynomial

    def __post_init__(self):
        q = self.q.trimmed()
        if q.is_zero():
            raise ZeroDivisionError("zero denominator")
        lead = q.coeffs[-1]
        object.__setattr__(self, "q", ComplexPolynomial(q.coeffs / lead))
        object.__setattr__(self, "p", ComplexPolynomial(self.p.trimmed().coeffs / lead))

    @classmethod
    def from_poles(cls, poles, residues) -> RationalFunction:
        """``sum_k r_k / (z - poles_k)`` for distinct poles."""
        poles = np.asarray(poles, dtype=complex)
        q = ComplexPolynomial.from_roots(poles)
        p = ComplexPolynomial([0])
        for k, (z0, r) in enumerate(zip(poles, residues)):
            others = np.delete(poles, k)
            p = p + ComplexPolynomial.from_roots(others, leading=r)
        return cls(p, q)

    @property
    def degree(self) -> int:
        return self.q.degree

    def poles(self) -> RootSet:
        return roots(self.q)

    def check_poles(self, margin: float = 1e-9) -> None:
        rs = self.poles()
        if rs.roots.size and rs.moduli.max() >= 1 - margin:
            raise DomainError(f"pole of modulus {rs.moduli.max():.12g} is not inside the unit disk")

    def proper(self) -> RationalFunction:
        _, r = euclid_divide(self.p, self.q)
        return RationalFunction(r, self.q)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.p(z) / self.q(z)

    def laurent(self, count: int) -> np.ndarray:
        """Coefficients ``a_1..a_count`` of the expansion at infinity of the proper part."""
        f = self.proper()
        n = f.q.degree
        if n <= 0:
            return np.zeros(count, dtype=complex)
        num = np.zeros(n + 1, dtype=complex)
        pc = f.p.coeffs[: n + 1]
        num[: pc.size] = pc
        imp = np.zeros(count + 1)
        imp[0] = 1.0
        # series in w = 1/z of w^n p(1/w) / (w^n q(1/w))
        c = signal.lfilter(num[::-1], f.q.coeffs[::-1], imp)
        return c[1:]

    def to_anti_analytic(self, bits: int = 40, max_order: int = 2**20) -> AntiAnalyticFunction:
        """Truncated coefficient sequence meeting the relative tail criterion."""
        self.check_poles()
        rho = max(self.poles().moduli.max(), 1e-3) if self.degree > 0 else 0.0
        if rho == 0.0 or self.proper().p.is_zero():
            a = self.laurent(max(self.degree, 1))
            return AntiAnalyticFunction(trim_tail(a, bits)[0] if np.any(a) else np.zeros(1))
        need = int(np.ceil((bits * np.log(2) + 10) / -np.log(rho))) + 4 * self.degree + 8
        count = min(max(2 * need, 16), max_order)
        a = self.laurent(count)
        coeffs, tail = trim_tail(a, bits)
        return AntiAnalyticFunction(coeffs, tail)

    def to_json(self) -> dict:
        return {"kind": "rational", "p": self.p.to_json(), "q": self.q.to_json()}
