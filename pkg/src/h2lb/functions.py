"""Function specifications and the built-in test functions.

A specification is a JSON object with a ``kind`` key:

``{"kind": "fourier", "coeffs": [[re, im], ...]}``
    Coefficients ``a_1..a_N`` of ``z^-1..z^-N``.
``{"kind": "rational", "p": [[re, im], ...], "q": [[re, im], ...]}``
    Ascending coefficients; poles must be inside the disk.
``{"kind": "blaschke", "zeros": [[re, im], ...], "constant": [re, im]}``
    The target is the Blaschke product itself (analytic in the disk); it is
    converted to the equivalent anti-analytic problem.
``{"kind": "builtin", "id": 1..7, "params": {...}, "seed": int}``
    The seven reference functions.  Ids 2..6 are random and need a seed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fourier import DEFAULT_BITS, AntiAnalyticFunction, truncate_to_bits
from .polynomial import ComplexPolynomial
from .rational import RationalFunction
from .upper import BlaschkeProduct

RANDOM_BUILTINS = {2, 3, 4, 5, 6}


@dataclass
class Target:
    """Everything the pipelines need to know about one function."""

    label: str
    anti: AntiAnalyticFunction
    rational: RationalFunction | None = None
    blaschke: BlaschkeProduct | None = None
    spec: dict = field(default_factory=dict)


def _complex_list(data) -> np.ndarray:
    out = []
    for item in data:
        if isinstance(item, (list, tuple)):
            re, im = item
            out.append(complex(re, im))
        else:
            out.append(complex(item))
    return np.array(out, dtype=complex)


def _uniform_disk(rng, count, r_in, r_out):
    # uniform in area on the annulus r_in <= |z| <= r_out
    r = np.sqrt(rng.uniform(r_in**2, r_out**2, size=count))
    return r * np.exp(2j * np.pi * rng.uniform(size=count))


def _random_rational(rng, count, r_in, r_out) -> RationalFunction:
    poles = _uniform_disk(rng, count, r_in, r_out)
    res = (rng.normal(size=count) + 1j * rng.normal(size=count)) / np.sqrt(2)
    return RationalFunction.from_poles(poles, res)


BUILTIN_LABELS = {
    1: "log((10z-9)/(10z+9))",
    2: "random rational, degree 5, poles uniform in a disk",
    3: "random rational, 20 poles uniform in a disk",
    4: "random rational, 20 poles uniform in the disk of radius 0.2",
    5: "random rational, 20 poles uniform in the annulus 18/20 < |z| < 19/20",
    6: "random degree-4 rational with 1% relative coefficient noise",
    7: "exp(-i/(z-0.9i)) - 1",
}


def builtin(ident: int, seed: int | None = None, bits: int = DEFAULT_BITS, **params) -> Target:
    """Construct one of the reference functions.

    Parameters
    ----------
    ident : int
        1..7.
    seed : int
        Required for the random ids 2..6.
    params
        ``radius`` (ids 2, 3, 6; default 0.98) bounds the pole moduli,
        ``degree`` overrides the pole count of ids 2..6, ``noise`` the
        relative perturbation of id 6 (default 0.01).
    """
    ident = int(ident)
    if ident not in BUILTIN_LABELS:
        raise ValueError(f"unknown builtin id {ident}")
    if ident in RANDOM_BUILTINS and seed is None:
        raise ValueError(f"builtin {ident} is random and needs an explicit seed")
    spec = {"kind": "builtin", "id": ident, "params": dict(params), "seed": seed}
    label = f"builtin {ident}: {BUILTIN_LABELS[ident]}"
    if ident == 1:
        f = truncate_to_bits(lambda z: np.log((10 * z - 9) / (10 * z + 9)), bits)
        return Target(label, f, spec=spec)
    if ident == 7:
        f = truncate_to_bits(lambda z: np.exp(-1j / (z - 0.9j)) - 1, bits)
        return Target(label, f, spec=spec)
    rng = np.random.default_rng(int(seed))
    radius = float(params.get("radius", 0.98))
    if ident == 2:
        r = _random_rational(rng, int(params.get("degree", 5)), 0.0, radius)
    elif ident == 3:
        r = _random_rational(rng, int(params.get("degree", 20)), 0.0, radius)
    elif ident == 4:
        r = _random_rational(rng, int(params.get("degree", 20)), 0.0, float(params.get("radius", 0.2)))
    elif ident == 5:
        r = _random_rational(rng, int(params.get("degree", 20)), 18 / 20, 19 / 20)
    else:
        g = _random_rational(rng, int(params.get("degree", 4)), 0.0, radius)
        base = g.to_anti_analytic(bits)
        noise = float(params.get("noise", 0.01))
        # relative perturbation of modulus at most `noise`
        u = _uniform_disk(rng, base.order, 0.0, 1.0)
        f = AntiAnalyticFunction(base.coeffs * (1 + noise * u), base.declared_tail_bound)
        return Target(label, f, spec=spec)
    return Target(label, r.to_anti_analytic(bits), rational=r, spec=spec)


def load_function(spec, bits: int = DEFAULT_BITS) -> Target:
    """Build a :class:`Target` from a spec dict, a JSON string, or a path to a JSON file."""
    if isinstance(spec, str):
        text = spec.strip()
        if not text.startswith("{"):
            with open(text) as fh:
                text = fh.read()
        spec = json.loads(text)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("function spec must be an object with a 'kind' key")
    kind = spec["kind"]
    if kind == "fourier":
        a = _complex_list(spec["coeffs"])
        if a.size == 0:
            raise ValueError("fourier spec needs at least one coefficient")
        return Target("fourier coefficients", AntiAnalyticFunction(a, float(spec.get("tail_bound", 0.0))), spec=spec)
    if kind == "rational":
        r = RationalFunction(ComplexPolynomial(_complex_list(spec["p"])), ComplexPolynomial(_complex_list(spec["q"])))
        return Target("rational", r.to_anti_analytic(bits), rational=r.proper(), spec=spec)
    if kind == "blaschke":
        c = spec.get("constant", [1.0, 0.0])
        const = complex(*c) if isinstance(c, (list, tuple)) else complex(c)
        b = BlaschkeProduct(_complex_list(spec["zeros"]), const)
        sym = b.reduced_symbol()
        return Target("blaschke", sym.to_anti_analytic(bits), rational=sym, blaschke=b, spec=spec)
    if kind == "builtin":
        return builtin(spec["id"], spec.get("seed"), bits, **spec.get("params", {}))
    raise ValueError(f"unknown function kind {kind!r}")


def anti_to_json(f: AntiAnalyticFunction) -> dict:
    return {"kind": "fourier", "coeffs": [[float(v.real), float(v.imag)] for v in f.coeffs]}
