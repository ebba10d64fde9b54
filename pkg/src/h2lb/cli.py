"""Command-line front end: ``h2lb bounds|linearized|approx|example|sweep``.

Reports are JSON; sweeps can also emit CSV or a gnuplot table.  Exit
status is 0 on success, 1 on a computational failure (with a JSON error
report) and 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from .bounds import ReportOptions, assemble_report, reports_to_csv, reports_to_gnuplot
from .errors import H2LBError
from .functions import builtin, load_function

logger = logging.getLogger("h2lb")


class ConfigError(Exception):
    """Invalid command-line configuration (exit status 2)."""


@dataclass
class RunConfig:
    """A parsed command line."""

    command: str
    function: str | None = None
    example: int | None = None
    degree: int = 4
    degrees: list = field(default_factory=list)
    options: ReportOptions = field(default_factory=ReportOptions)
    output: str | None = None
    fmt: str = "json"
    table: bool = False
    params: dict = field(default_factory=dict)


def parse_degrees(text: str) -> list[int]:
    """``"1..8"``, ``"2,4,6"`` or ``"3"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse degree list {text!r}") from exc
    if not out or min(out) < 0:
        raise ConfigError(f"degree list {text!r} is empty or negative")
    return out


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--function", help="function spec: JSON file path or inline JSON object")
    common.add_argument("--degree", type=int, default=4, help="rational degree n (default 4)")
    common.add_argument("--bits", type=int, default=40, help="truncation precision in bits (default 40)")
    common.add_argument("--samples", type=int, default=8000, help="sup-norm sample count (default 8000)")
    common.add_argument("--order", type=int, default=None, help="override the Fourier truncation order")
    common.add_argument("--pi", default="one", help="linearized weight: one | upper | file:<path>")
    common.add_argument("--xi-grid", type=int, default=64)
    common.add_argument("--constraint-grid", type=int, default=50)
    common.add_argument("--check-grid", type=int, default=4096)
    common.add_argument("--viol-tol", type=float, default=1e-7)
    common.add_argument("--gap-tol", type=float, default=1e-9)
    common.add_argument("--restarts", type=int, default=16)
    common.add_argument("--seed", type=int, default=0, help="seed for restarts and random builtins")
    common.add_argument("--no-upper", action="store_true", help="skip the heuristic upper bound")
    common.add_argument("--exact-sup", action="store_true", help="Blaschke bounds with exact kernel sup norms")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--format", dest="fmt", choices=["json", "csv", "gnuplot"], default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="h2lb", description="Bounds for best H2 rational approximation.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("bounds", parents=[common], help="Hankel-based lower bounds (and upper bound)")
    sub.add_parser("linearized", parents=[common], help="linearized-error lower bound")
    sub.add_parser("approx", parents=[common], help="heuristic best approximant (upper bound)")
    ex = sub.add_parser("example", parents=[common], help="reference example 1..7, all bounds")
    ex.add_argument("id", type=int)
    ex.add_argument("--table", action="store_true", help="also compute the linearized bound with pi=upper")
    sw = sub.add_parser("sweep", parents=[common], help="bounds over a degree range")
    sw.add_argument("--degrees", default="1..8")
    sw.add_argument("--linearized", action="store_true", help="include the linearized bound")
    return p


def config_from_args(argv=None) -> RunConfig:
    ns = _parser().parse_args(argv)
    if ns.verbose:
        logging.basicConfig(level=logging.INFO)
    if ns.pi not in ("one", "upper") and not ns.pi.startswith("file:"):
        raise ConfigError("--pi must be one, upper or file:<path>")
    if ns.xi_grid < 8:
        raise ConfigError("--xi-grid must be at least 8")
    if ns.bits < 8:
        raise ConfigError("--bits must be at least 8")
    if ns.degree < 0:
        raise ConfigError("--degree must be nonnegative")
    opts = ReportOptions(bits=ns.bits, samples=ns.samples, order=ns.order, pi=ns.pi, xi_grid=ns.xi_grid,
                         constraint_grid=ns.constraint_grid, check_grid=ns.check_grid, viol_tol=ns.viol_tol,
                         gap_tol=ns.gap_tol, upper=not ns.no_upper, restarts=ns.restarts, seed=ns.seed,
                         exact_sup=ns.exact_sup)
    cfg = RunConfig(ns.command, ns.function, getattr(ns, "id", None), ns.degree, options=opts, output=ns.output,
                    fmt=ns.fmt, table=getattr(ns, "table", False))
    if ns.command == "linearized":
        opts.linearized = True
    if ns.command == "example":
        if not 1 <= ns.id <= 7:
            raise ConfigError("example id must be in 1..7")
        opts.linearized = True
        opts.upper = True
    elif ns.function is None:
        raise ConfigError(f"{ns.command} needs --function")
    if ns.command == "sweep":
        cfg.degrees = parse_degrees(ns.degrees)
        opts.linearized = ns.linearized
    return cfg


def _target(cfg: RunConfig):
    try:
        if cfg.command == "example":
            seed = cfg.options.seed if cfg.example in (2, 3, 4, 5, 6) else None
            return builtin(cfg.example, seed, cfg.options.bits)
        return load_function(cfg.function, cfg.options.bits)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"invalid function spec: {exc}") from exc


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a configuration; returns ``(exit_code, text)``."""
    from . import upper

    target = _target(cfg)
    opt = cfg.options
    if cfg.command in ("bounds", "linearized", "example"):
        rep = assemble_report(target, cfg.degree, opt)
        out = rep.to_dict()
        out["meta"]["command"] = cfg.command
        out["meta"]["options"] = opt.to_dict()
        if cfg.command == "example" and cfg.table and cfg.degree >= 1:
            alt = ReportOptions(**{**opt.to_dict(), "pi": "upper"})
            rep2 = assemble_report(target, cfg.degree, alt)
            out["meta"]["bound_thm61_pi_upper"] = rep2.bound_linearized
        return 0, _dump(out, cfg)
    if cfg.command == "approx":
        sol = upper.solve_RAB(target.anti, cfg.degree, opt.restarts, opt.seed, rational=target.rational)
        out = sol.to_json()
        out["zeros"] = [[float(z.real), float(z.imag)] for z in sol.zeros]
        out["residual_gradient_norm"] = sol.residual_gradient_norm
        return 0, _dump(out, cfg)
    if cfg.command == "sweep":
        reports, cache, prev = [], {}, None
        for n in cfg.degrees:
            rep = assemble_report(target, n, opt, spectrum_cache=cache, upper_solution=prev)
            prev = cache.get("solution")
            reports.append(rep)
        if cfg.fmt == "csv":
            return 0, reports_to_csv(reports)
        if cfg.fmt == "gnuplot":
            return 0, reports_to_gnuplot(reports)
        return 0, _dump([r.to_dict() for r in reports], cfg)
    raise ConfigError(f"unknown command {cfg.command}")


def _dump(obj, cfg: RunConfig) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def _default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ConfigError as exc:
        print(f"h2lb: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    try:
        code, text = run(cfg)
    except ConfigError as exc:
        print(f"h2lb: {exc}", file=sys.stderr)
        return 2
    except H2LBError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": cfg.command}
        _emit(json.dumps(err, indent=2) + "\n", cfg.output)
        return 1
    _emit(text, cfg.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
