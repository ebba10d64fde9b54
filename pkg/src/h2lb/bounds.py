"""Lower bounds for the H2 rational approximation error and the report object.

All quantities are floating-point estimates; none is certified.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

CHAIN_SLACK = 1e-9


def _ratio_min(values, norms, n: int) -> float:
    s = np.asarray(values, dtype=float)[: n + 1]
    w = np.asarray(norms, dtype=float)[: n + 1]
    if s.size < n + 1 or w.size < n + 1:
        raise ValueError(f"need n+1 = {n + 1} singular values and norms")
    if np.any(s <= 0) or np.any(w <= 0):
        return 0.0
    return float(np.min(s / w) / np.sqrt(n + 1))


def bound_Mn(values, sup_norms, n: int) -> float:
    """``min_{j<=n} s_j / ||v_j||_inf`` divided by ``sqrt(n+1)``.

    A vanishing singular value (``f`` already rational of low degree) gives 0.
    """
    return _ratio_min(values, sup_norms, n)


def bound_Qn(values, quotient_norms, n: int) -> float:
    """Same as :func:`bound_Mn` with the quotient norms in ``H^inf / ker`` in the denominator."""
    return _ratio_min(values, quotient_norms, n)


def blaschke_bounds(zeros, n: int, exact_sup: bool = False) -> tuple[float, float]:
    """Zero-based lower bounds for ``d_2(b, R_{n,n})``, ``b`` a Blaschke product.

    Parameters
    ----------
    zeros : sequence of complex
        Zeros of ``b`` sorted by nondecreasing modulus, with repetition.
    n : int
        Degree; requires ``n + 1 <= len(zeros)``.
    exact_sup : bool
        Use the true sup norm ``((1+r)/(1-r))^{1/2}`` of the Malmquist-Walsh
        functions instead of ``(1-r^2)^{-1/2}``.  The default reproduces the
        classical formulas; see the README for why the variant exists.

    Returns
    -------
    (b1, b2) : tuple of float
        ``b1 = (1-|z_{n+1}|^2)^{1/2} / sqrt(n+1)`` and
        ``b2 = 1 / sum_{j=1}^{n+1} (1-|z_j|^2)^{-1/2}``.
    """
    r = np.abs(np.asarray(zeros, dtype=complex).ravel())
    if np.any(np.diff(r) < 0):
        raise ValueError("zeros must be sorted by nondecreasing modulus")
    if n + 1 > r.size:
        raise ValueError(f"need at least n+1 = {n + 1} zeros, got {r.size}")
    if r.size and r.max() >= 1:
        raise ValueError("zeros must lie in the open unit disk")
    head = r[: n + 1]
    if exact_sup:
        inv = np.sqrt((1 + head) / (1 - head))
        b1 = float(np.sqrt((1 - head[-1]) / (1 + head[-1])) / np.sqrt(n + 1))
    else:
        inv = 1 / np.sqrt(1 - head**2)
        b1 = float(np.sqrt(1 - head[-1] ** 2) / np.sqrt(n + 1))
    return b1, float(1 / inv.sum())


@dataclass
class BoundReport:
    """All bounds computed for one degree, with provenance."""

    n: int
    bound_Mn: float
    bound_Qn: float
    bound_linearized: dict | None = None
    blaschke_bounds: tuple | None = None
    upper_bound: float | None = None
    warnings: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def lower_bounds(self) -> dict[str, float]:
        out = {"bound_thm51": self.bound_Mn, "bound_cor52": self.bound_Qn}
        if self.bound_linearized is not None:
            out["bound_thm61"] = self.bound_linearized["value"]
        if self.blaschke_bounds is not None:
            out["blaschke_1"], out["blaschke_2"] = self.blaschke_bounds
        return out

    def check_invariants(self, slack: float = CHAIN_SLACK) -> list[str]:
        """Record (never clip) violations of the lower/upper ordering."""
        msgs = []
        scale = max(abs(self.bound_Qn), abs(self.upper_bound or 0.0), 1e-300)
        if self.bound_Mn > self.bound_Qn + slack * scale:
            msgs.append(f"bound_thm51={self.bound_Mn:.6e} exceeds bound_cor52={self.bound_Qn:.6e}")
        if self.upper_bound is not None:
            for name, val in self.lower_bounds().items():
                if val > self.upper_bound + slack * scale:
                    msgs.append(f"{name}={val:.6e} exceeds upper={self.upper_bound:.6e}")
        for m in msgs:
            if m not in self.warnings:
                self.warnings.append(m)
        return msgs

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "bound_thm51": self.bound_Mn,
            "bound_cor52": self.bound_Qn,
            "bound_thm61": self.bound_linearized,
            "blaschke": list(self.blaschke_bounds) if self.blaschke_bounds is not None else None,
            "upper": self.upper_bound,
            "warnings": list(self.warnings),
            "meta": _jsonable(self.meta),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


CSV_FIELDS = ["n", "bound_thm51", "bound_cor52", "bound_thm61", "blaschke_1", "blaschke_2", "upper"]


def _row(rep: BoundReport) -> dict:
    d = rep.to_dict()
    b = d["blaschke"] or [None, None]
    lin = d["bound_thm61"]["value"] if d["bound_thm61"] else None
    return {"n": d["n"], "bound_thm51": d["bound_thm51"], "bound_cor52": d["bound_cor52"],
            "bound_thm61": lin, "blaschke_1": b[0], "blaschke_2": b[1], "upper": d["upper"]}


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for rep in reports:
        w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in _row(rep).items()})
    return buf.getvalue()


def reports_to_gnuplot(reports) -> str:
    """Whitespace-separated table with a commented header; missing values are ``NaN``."""
    lines = ["# " + " ".join(CSV_FIELDS)]
    for rep in reports:
        r = _row(rep)
        lines.append(" ".join("NaN" if r[k] is None else f"{r[k]:.12g}" for k in CSV_FIELDS))
    return "\n".join(lines) + "\n"


@dataclass
class ReportOptions:
    """Knobs of :func:`assemble_report`; defaults follow the reference protocol."""

    bits: int = 40
    samples: int = 8000
    order: int | None = None
    linearized: bool = False
    pi: str = "one"
    xi_grid: int = 64
    constraint_grid: int = 50
    check_grid: int = 4096
    viol_tol: float = 1e-7
    gap_tol: float = 1e-9
    upper: bool = True
    restarts: int = 16
    seed: int = 0
    blaschke: bool = True
    exact_sup: bool = False

    def to_dict(self):
        return asdict(self)


def assemble_report(target, n: int, options: ReportOptions | None = None, spectrum_cache: dict | None = None,
                    upper_solution=None) -> BoundReport:
    """Run the full pipeline for one degree.

    Parameters
    ----------
    target : Target
        Output of :func:`h2lb.functions.load_function`.
    n : int
        Rational degree (type ``(n-1, n)`` for the anti-analytic problem).
    spectrum_cache : dict, optional
        Reused across degrees by sweeps.
    upper_solution : RABSolution, optional
        Warm start for the upper bound at this degree.
    """
    from . import hankel, linearized, upper  # noqa: F401  (import cost only when used)

    opt = options or ReportOptions()
    cache = spectrum_cache if spectrum_cache is not None else {}
    warnings: list[str] = []
    f = target.anti
    meta = {
        "function": target.label,
        "truncation_order": f.order,
        "declared_tail_bound": f.declared_tail_bound,
        "bits": opt.bits,
        "samples": opt.samples,
        "seed": opt.seed,
        "certified": False,
        "note": "floating-point, non-certified; truncation error measured as relative l2 tail energy",
    }
    # singular data
    if "spectrum" not in cache:
        if target.rational is not None:
            cache["spectrum"] = hankel.spectrum_rational(target.rational)
            cache["path"] = "malmquist-walsh"
        else:
            cache["spectrum"] = hankel.spectrum_fourier(f, opt.order)
            cache["path"] = "fourier"
            if opt.order is None:
                warnings.extend(_consistency(f, cache["spectrum"], n))
    sp = cache["spectrum"]
    meta["spectrum_path"] = cache["path"]
    meta["spectrum_order"] = int(sp.vectors.shape[0])
    if n + 1 > len(sp):
        s_ext = np.concatenate([sp.values, np.zeros(n + 1 - len(sp))])
    else:
        s_ext = sp.values
    k = min(n + 1, len(sp))
    sup = np.concatenate([hankel.sup_norms(sp, k, opt.samples), np.ones(n + 1 - k)])
    quo = np.concatenate([hankel.quotient_norms(sp, k), np.ones(n + 1 - k)])
    rep = BoundReport(n, bound_Mn(s_ext, sup, n), bound_Qn(s_ext, quo, n), warnings=warnings, meta=meta)
    meta["singular_values"] = [float(v) for v in s_ext[: n + 1]]
    meta["sup_norms"] = [float(v) for v in sup]
    meta["quotient_norms"] = [float(v) for v in quo]
    if opt.blaschke and target.blaschke is not None and n < len(target.blaschke.zeros):
        z = hankel.sort_zeros(target.blaschke.zeros)
        rep.blaschke_bounds = blaschke_bounds(z, n, opt.exact_sup)
    sol = None
    if opt.upper or (opt.linearized and opt.pi == "upper"):
        if n == 0:
            rep.upper_bound = f.l2_norm()
            meta["upper"] = {"restarts": 0}
        else:
            sol = upper.solve_RAB(f, n, restarts=opt.restarts, seed=opt.seed, warm=upper_solution,
                                  spectrum=sp if cache["path"] == "fourier" or target.rational is None else None,
                                  rational=target.rational)
            rep.upper_bound = sol.error
            meta["upper"] = {"restarts": sol.restarts_used, "seed": sol.seed,
                             "residual_gradient_norm": sol.residual_gradient_norm,
                             "zeros": [complex(v) for v in sol.zeros]}
        cache["solution"] = sol
    if opt.linearized:
        pi_label = opt.pi
        if opt.pi == "one":
            pi = None
        elif opt.pi == "upper":
            if sol is None:
                raise ValueError("pi='upper' needs n >= 1")
            from .polynomial import reciprocal
            pi = reciprocal(sol.q, n)
        else:
            pi = opt.pi if not isinstance(opt.pi, str) else _load_pi(opt.pi)
            pi_label = "file"
        prob = linearized.build_problem(f, pi, n)
        res = linearized.linearized_bound(prob, opt.xi_grid, constraint_grid=opt.constraint_grid,
                                          check_grid=opt.check_grid, viol_tol=opt.viol_tol, gap_tol=opt.gap_tol)
        rep.bound_linearized = {"pi": pi_label, "value": res.bound}
        meta["linearized"] = {"estimate": res.estimate, "xi": res.xi, "gap": res.gap,
                              "max_violation": res.max_violation, "certified": False,
                              "xi_grid": opt.xi_grid, "constraint_grid": opt.constraint_grid,
                              "viol_tol": opt.viol_tol, "gap_tol": opt.gap_tol}
    rep.check_invariants()
    return rep


def _load_pi(spec: str):
    import json

    from .polynomial import ComplexPolynomial

    path = spec[5:] if spec.startswith("file:") else spec
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("coeffs", data.get("pi"))
    return ComplexPolynomial.from_json(data)


def _consistency(f, sp, n: int) -> list[str]:
    """Warn when the truncation tail is not small against ``s_n``.

    Dropping coefficients perturbs each singular value by at most the norm
    of the dropped Hankel tail, which we approximate by the declared tail
    bound.
    """
    k = min(n, len(sp) - 1)
    s_n = float(sp.values[k])
    if f.declared_tail_bound > 1e-3 * s_n:
        return [f"truncation tail {f.declared_tail_bound:.2e} is not below 1e-3 * s_{n} = {1e-3 * s_n:.2e}"]
    return []
