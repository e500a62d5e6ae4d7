"""Command-line front end: ``xisb <eval|table|sample|verify> [flags]``.

Exit status: 0 success, 1 usage or domain error, 2 numerical non-convergence.
Discrepancy verdicts from ``verify`` are findings, not failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import distribution as dist
from . import theorems
from .errors import ConvergenceError, DomainError, ResourceError
from .mellin import DEFAULT_CONTOUR, ContourSpec
from .specfun import DEFAULT_PRECISION, SeriesPrecision, bessel_k, xi, zeta
from .xi_core import VkEval, cdf_k1, theta, v1, v2

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
FUNCTIONS = ("theta", "v1", "v2", "vk", "xi", "zeta", "K0", "K1", "cdf1")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    points: int
    log: bool = True

    def __post_init__(self):
        if not (self.lo > 0 and self.hi >= self.lo):
            raise UsageError("grid needs 0 < min <= max")
        if self.points < 2:
            raise UsageError("grid needs at least 2 points")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class RunConfig:
    command: str
    k: int = 1
    prec: SeriesPrecision = DEFAULT_PRECISION
    contour: ContourSpec = DEFAULT_CONTOUR
    contour_tol: float = 1e-12
    grid: GridSpec | None = None
    seed: int = theorems.DEFAULT_SEED
    fmt: str = "csv"
    out: str | None = None
    extra: dict = field(default_factory=dict)


def parse_grid(text: str) -> GridSpec:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise UsageError("--grid expects min:max:n[:log|lin]")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad --grid value: {exc}") from None
    mode = parts[3] if len(parts) == 4 else "log"
    if mode not in ("log", "lin"):
        raise UsageError("grid spacing must be 'log' or 'lin'")
    return GridSpec(lo, hi, n, mode == "log")


def parse_contour(text: str) -> ContourSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--contour expects c:T:step")
    try:
        return ContourSpec(*(float(p) for p in parts))
    except ValueError as exc:
        raise UsageError(f"bad --contour value: {exc}") from None


def parse_number(text: str):
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _spec_err(v):
    # documented relative accuracy of the special-function kernels
    return 1e-13 * np.maximum(1.0, np.abs(v))


def evaluate(name: str, x, cfg: RunConfig):
    """Value and error estimate of a named function at x (scalar or array)."""
    if name not in FUNCTIONS:
        raise UsageError(f"unknown function {name!r}; choose from {', '.join(FUNCTIONS)}")
    complex_ok = name in ("xi", "zeta")
    xa = np.asarray(x)
    if np.iscomplexobj(xa) and not complex_ok:
        raise UsageError(f"{name} takes a real argument")
    if name == "xi":
        v = xi(xa, cfg.prec)
        return v, _spec_err(v)
    if name == "zeta":
        v = zeta(xa, cfg.prec)
        return v, _spec_err(v)
    xa = xa.astype(float)
    if name in ("K0", "K1"):
        v = bessel_k(int(name[1]), xa)
        return v, _spec_err(v)
    series_err = cfg.prec.abs_tol * 10.0
    if name == "theta":
        return theta(xa, cfg.prec), np.full(xa.shape, series_err)[()]
    if name == "v1":
        return v1(xa, cfg.prec), np.full(xa.shape, series_err)[()]
    if name == "v2":
        return v2(xa, cfg.prec), np.full(xa.shape, series_err)[()]
    if name == "cdf1":
        return cdf_k1(xa, cfg.prec), np.full(xa.shape, series_err)[()]
    ev = VkEval(cfg.k, contour=cfg.contour, prec=cfg.prec)
    v = ev(xa)
    if ev.mode == "series":
        return v, np.full(xa.shape, series_err)[()]
    return v, np.full(xa.shape, 10.0 * cfg.contour_tol)[()]


def _fmt(v) -> str:
    if isinstance(v, complex) or np.iscomplexobj(v):
        v = complex(v)
        if v.imag == 0.0:
            return f"{v.real:.17g}"
        return f"{v.real:.17g}{v.imag:+.17g}j"
    return f"{float(v):.17g}"


def _emit(text: str, cfg: RunConfig, stdout):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def cmd_eval(cfg: RunConfig, stdout) -> int:
    name, arg = cfg.extra["fn"], parse_number(cfg.extra["arg"])
    v, err = evaluate(name, arg, cfg)
    if cfg.fmt == "json":
        payload = {"function": name, "argument": _fmt(arg), "value": _fmt(v), "err_estimate": float(err)}
        _emit(json.dumps(payload) + "\n", cfg, stdout)
    else:
        _emit(f"{_fmt(v)}\t# err_estimate {float(err):.3g}\n", cfg, stdout)
    return EXIT_OK


def cmd_table(cfg: RunConfig, stdout) -> int:
    if cfg.grid is None:
        raise UsageError("table needs --grid min:max:n[:log|lin]")
    name = cfg.extra["fn"]
    x = cfg.grid.values()
    v, err = evaluate(name, x, cfg)
    v = np.broadcast_to(v, x.shape)
    err = np.broadcast_to(err, x.shape)
    if cfg.fmt == "json":
        rows = [{"x": float(a), "value": _fmt(b), "err_estimate": float(c)} for a, b, c in zip(x, v, err)]
        text = json.dumps({"function": name, "rows": rows}, indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value", "err_estimate"])
        for a, b, c in zip(x, v, err):
            w.writerow([f"{a:.17g}", _fmt(b), f"{float(c):.17g}"])
        text = buf.getvalue()
    _emit(text, cfg, stdout)
    return EXIT_OK


def cmd_sample(cfg: RunConfig, stdout) -> int:
    n = cfg.extra["n"]
    if n < 1:
        raise UsageError("n must be >= 1")
    d = dist.build(cfg.k, cfg.prec, cfg.contour)
    xs = dist.sample(d, n, dist.SamplerState(cfg.seed))
    if cfg.fmt == "json":
        text = json.dumps({"k": cfg.k, "seed": cfg.seed, "samples": [float(v) for v in xs]}) + "\n"
    else:
        text = "".join(f"{v:.17g}\n" for v in xs)
    _emit(text, cfg, stdout)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, stdout) -> int:
    sel = cfg.extra["claims"] or ["all"]
    selection = "all" if sel == ["all"] else sel
    unknown = [c for c in sel if c != "all" and c not in theorems.REGISTRY]
    if unknown or ("all" in sel and len(sel) > 1):
        raise UsageError(f"unknown claim id(s): {', '.join(unknown) or 'all mixed with ids'}; "
                         f"known: {', '.join(theorems.claim_ids())}")
    ledger = theorems.build_ledger(selection)
    if cfg.fmt == "json":
        text = ledger.to_json()
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["claim_id", "verdict", "tolerance", "key", "measured", "reference"])
        for e in ledger.entries:
            for key, m in e.measured.items():
                r = e.reference.get(key)
                w.writerow([e.claim_id, e.verdict, f"{e.tolerance:.17g}", key, f"{m:.17g}",
                            "" if r is None else f"{r:.17g}"])
        text = buf.getvalue()
    _emit(text, cfg, stdout)
    c = ledger.counts()
    sys.stderr.write(f"{len(ledger)} claims: {c['verified']} verified, {c['discrepancy']} discrepancy, "
                     f"{c['informational']} informational\n")
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "table": cmd_table, "sample": cmd_sample, "verify": cmd_verify}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _common(p):
    p.add_argument("--k", type=int, default=1, help="index k >= 1 of X_k / v_k")
    p.add_argument("--grid", help="min:max:n[:log|lin]")
    p.add_argument("--seed", type=int, default=theorems.DEFAULT_SEED)
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None,
                   help="csv (default) or json; verify defaults to json")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--contour", help="c:T:step for inverse Mellin transforms")
    p.add_argument("--tol", type=float, help="absolute tolerance for series and contour checks")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xisb", description="Size-biased xi distributions: evaluation, sampling, verification.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("eval", help="evaluate one function at one point")
    p.add_argument("fn", help=", ".join(FUNCTIONS))
    p.add_argument("arg", help="argument (complex allowed for xi, zeta, e.g. 0.5+14j)")
    _common(p)
    p = sub.add_parser("table", help="tabulate a function on a grid")
    p.add_argument("fn", help=", ".join(FUNCTIONS))
    _common(p)
    p = sub.add_parser("sample", help="draw samples of X_k")
    p.add_argument("--n", type=int, required=True)
    _common(p)
    p = sub.add_parser("verify", help="run the claim checks and write the ledger")
    p.add_argument("claims", nargs="*", help="claim ids or 'all'")
    _common(p)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.k < 1:
        raise UsageError("--k must be >= 1")
    prec = DEFAULT_PRECISION
    ctol = 1e-12
    if ns.tol is not None:
        if not 0 < ns.tol < 1:
            raise UsageError("--tol must lie in (0, 1)")
        prec = SeriesPrecision(prec.max_terms, ns.tol, prec.rel_tol)
        ctol = ns.tol
    contour = parse_contour(ns.contour) if ns.contour else DEFAULT_CONTOUR
    grid = parse_grid(ns.grid) if ns.grid else None
    extra = {key: getattr(ns, key) for key in ("fn", "arg", "n", "claims") if hasattr(ns, key)}
    fmt = ns.fmt or ("json" if ns.command == "verify" else "csv")
    return RunConfig(ns.command, ns.k, prec, contour, ctol, grid, ns.seed, fmt, ns.out, extra)


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg, stdout)
    except (UsageError, DomainError, ResourceError, ValueError) as exc:
        sys.stderr.write(f"xisb: error: {exc}\n")
        return EXIT_USAGE
    except (ConvergenceError, ArithmeticError) as exc:
        sys.stderr.write(f"xisb: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        sys.stderr.write(f"xisb: I/O error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
