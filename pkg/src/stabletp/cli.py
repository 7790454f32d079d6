"""Command line front-end.

Exit codes: 0 ok, 1 selftest failure, 2 usage, 3 numeric failure,
10 refutation finding (tpcheck found a negative minor).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np
from mpmath.libmp import NoConvergence

from . import acceptance, asymptotics, factorization, kernels, shape, tp
from .errors import DomainError, InvalidParams, NumericFailure
from .specfun import Precision
from .stable import EvalConfig, StableParams, density

EXIT_OK, EXIT_SELFTEST, EXIT_USAGE, EXIT_NUMERIC, EXIT_REFUTED = 0, 1, 2, 3, 10
SCHEMA = 1

KERNELS = ("positive", "stable", "cauchy", "fracint", "radial", "gauss")
COMMANDS = ("eval", "predict", "tpcheck", "delta", "factorize", "shape", "selftest")


class UsageError(Exception):
    pass


def parse_number(text):
    """'1/3' -> Fraction(1, 3), integers stay exact, anything else is a float."""
    if isinstance(text, (int, float, Fraction)):
        return text
    t = str(text).strip()
    try:
        if "/" in t:
            return Fraction(t)
        return int(t) if t.lstrip("+-").isdigit() else float(t)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def parse_grid(text) -> list:
    """``a:b:n`` (n equally spaced points, inclusive) or ``log:a:b:n``."""
    if text is None:
        raise UsageError("--grid is required")
    parts = str(text).split(":")
    log = parts[0] == "log"
    if log:
        parts = parts[1:]
    if len(parts) != 3:
        raise UsageError(f"grid must look like a:b:n or log:a:b:n, got {text!r}")
    a, b = float(parse_number(parts[0])), float(parse_number(parts[1]))
    try:
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"grid size must be an integer, got {parts[2]!r}") from None
    if n < 1:
        raise UsageError("grid is empty")
    if n == 1 and a != b:
        raise UsageError("a one-point grid needs a == b")
    if log:
        if not (a > 0 and b > 0):
            raise UsageError("log grids need positive end points")
        return [float(v) for v in np.geomspace(a, b, n)]
    return [float(v) for v in np.linspace(a, b, n)]


@dataclass
class RunConfig:
    command: str
    alpha: object = None
    rho: object = None
    beta: object = None
    dim: int | None = None
    kernel: str | None = None
    order: int | None = None
    budget: int = 10_000
    seed: int = 0
    digits: int = 60
    grid: str | None = None
    format: str = "json"
    out: str | None = None
    quick: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for name in ("alpha", "rho", "beta"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, parse_number(v))
        for name in ("dim", "order", "budget", "seed", "digits"):
            v = getattr(self, name)
            if v is not None:
                try:
                    iv = int(v)
                except (TypeError, ValueError):
                    raise UsageError(f"--{name} must be an integer") from None
                if isinstance(v, float) and iv != v:
                    raise UsageError(f"--{name} must be an integer")
                setattr(self, name, iv)
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")
        if self.kernel is not None and self.kernel not in KERNELS:
            raise UsageError(f"--kernel must be one of {', '.join(KERNELS)}")
        if self.digits < 15:
            raise UsageError("--digits must be at least 15")
        if self.budget < 1:
            raise UsageError("--budget must be positive")
        if self.order is not None and self.order < 1:
            raise UsageError("--order must be positive")

    def need(self, *names):
        for n in names:
            if getattr(self, n) is None:
                raise UsageError(f"--{n} is required for {self.command}")


def _params(cfg: RunConfig) -> StableParams:
    cfg.need("alpha")
    rho = cfg.rho
    if rho is None:
        rho = 1 if cfg.alpha < 1 else Fraction(1, 2)
    return StableParams(cfg.alpha, rho)


def build_kernel(cfg: RunConfig) -> kernels.Kernel:
    cfg.need("kernel")
    k = cfg.kernel
    if k == "positive":
        cfg.need("alpha")
        return kernels.positive_stable_kernel(cfg.alpha)
    if k == "cauchy":
        cfg.need("alpha")
        return kernels.cauchy_type_kernel(cfg.alpha)
    if k == "stable":
        cfg.need("alpha", "rho")
        return kernels.stable_convolution_kernel(StableParams(cfg.alpha, cfg.rho))
    if k == "fracint":
        cfg.need("beta")
        return kernels.fractional_integration_kernel(cfg.beta)
    if k == "radial":
        cfg.need("alpha", "dim")
        return kernels.radial_kernel(cfg.alpha, cfg.dim)
    return kernels.gaussian_spacetime_kernel()


def _num(v):
    return float(v) if not isinstance(v, (str, bool, type(None))) else v


def _doc(cfg: RunConfig, **body) -> dict:
    return {"schema": SCHEMA, "command": cfg.command, **body}


# ---------------------------------------------------------------------------
# commands: each returns (exit code, document, csv rows or None)


def cmd_eval(cfg: RunConfig):
    p = _params(cfg)
    xs = parse_grid(cfg.grid)
    ec = EvalConfig.with_digits(cfg.digits)
    rows = [(x, float(density(p, x, ec))) for x in xs]
    doc = _doc(cfg, alpha=_num(p.alpha), rho=_num(p.rho), digits=cfg.digits,
               rows=[{"x": x, "density": v} for x, v in rows])
    return EXIT_OK, doc, (("x", "density"), rows)


def cmd_predict(cfg: RunConfig):
    k = build_kernel(cfg)
    o = k.predicted_order
    doc = _doc(cfg, kernel=k.name, params={n: _num(v) for n, v in k.params.items()},
               predicted_order=o.to_json(), branch=o.branch)
    return EXIT_OK, doc, (("kernel", "predicted_order", "branch"), [(k.name, o.to_json(), o.branch)])


def cmd_tpcheck(cfg: RunConfig):
    cfg.need("order")
    k = build_kernel(cfg)
    rep = tp.tp_search(k, cfg.order, cfg.budget, cfg.seed, Precision(cfg.digits))
    pred = k.predicted_order
    doc = _doc(cfg, report=rep.to_dict(), params={n: _num(v) for n, v in k.params.items()},
               predicted_order=pred.to_json() if pred else None)
    code = EXIT_REFUTED if rep.verdict == "refuted" else EXIT_OK
    return code, doc, (("kernel", "order", "verdict", "worst_minor"),
                       [(k.name, cfg.order, rep.verdict, rep.worst_minor)])


def cmd_delta(cfg: RunConfig):
    cfg.need("order")
    p = _params(cfg)
    zs = parse_grid(cfg.grid) if cfg.grid else [0.0]
    dcfg = asymptotics.DeltaSeriesConfig(digits=min(cfg.digits, 60))
    rows = []
    for z in zs:
        v = asymptotics.delta_k(p, cfg.order, z, dcfg)
        rows.append((z, float(v)))
    body = {"alpha": _num(p.alpha), "rho": _num(p.rho), "k": cfg.order,
            "rows": [{"z": z, "delta": v} for z, v in rows]}
    if 0 < p.rho < 1 and p.alpha < 2:
        body["at_zero"] = float(asymptotics.delta_k_at_zero(p, cfg.order))
    return EXIT_OK, _doc(cfg, **body), (("z", "delta"), rows)


def cmd_factorize(cfg: RunConfig):
    p = _params(cfg)
    ss = parse_grid(cfg.grid) if cfg.grid else [0.1, 0.2, 0.3]
    prec = Precision(min(cfg.digits, 60))
    rows = []
    for s in ss:
        row = {"s": s}
        if p.rho > 0 and p.alpha * p.rho <= 1:
            lhs, rhs = factorization.zolotarev_factorization_check(p, s, prec)
            row["zolotarev"] = [float(lhs), float(rhs)]
        if 1 < p.alpha < 2:
            lhs, rhs = factorization.duality_check(p.alpha, p.rho, s, prec)
            row["duality"] = [float(lhs), float(rhs)]
        if cfg.dim is not None and p.alpha < 1:
            lhs, rhs = factorization.chi_square_factorization_check(p.alpha, cfg.dim, s, prec)
            row["chi_square"] = [float(lhs), float(rhs)]
        rows.append(row)
    body = {"alpha": _num(p.alpha), "rho": _num(p.rho), "rows": rows}
    if p.alpha < 1 and p.rho == 1 and not cfg.quick:
        body["sup_distance"] = {str(n): factorization.sup_distance(float(p.alpha), n) for n in (5, 10, 20, 40)}
    flat = [(r["s"], *r.get("zolotarev", [None, None])) for r in rows]
    return EXIT_OK, _doc(cfg, **body), (("s", "lhs", "rhs"), flat)


def cmd_shape(cfg: RunConfig):
    p = _params(cfg)
    body = {"alpha": _num(p.alpha), "rho": _num(p.rho)}
    if p.alpha < 1:
        body["bell_counts"] = shape.bell_shape_count(p.alpha, 3 if cfg.order is None else cfg.order)
    if p.rho > 0:
        body["mlr_verdict"] = shape.mlr_verdict(p)
        reps = [shape.mlr_empirical(p, c) for c in (0.5, 2.0)]
        body["mlr_empirical"] = {str(r.c): r.monotone for r in reps}
    if not (p.alpha == 2 or p.rho == 0):
        body["intersections"] = {"2": shape.intersection_count(p, 2.0)}
    rows = [(k, json.dumps(v, sort_keys=True)) for k, v in body.items()]
    return EXIT_OK, _doc(cfg, **body), (("key", "value"), rows)


def cmd_selftest(cfg: RunConfig):
    results = acceptance.run_suite(cfg.digits, cfg.quick, echo=lambda s: print(s, file=sys.stderr))
    doc = json.loads(acceptance.summary_json(results, cfg.digits, cfg.quick))
    code = EXIT_OK if doc["passed"] else EXIT_SELFTEST
    return code, doc, (("criterion", "passed"), [(r.number, r.passed) for r in results])


HANDLERS = {
    "eval": cmd_eval,
    "predict": cmd_predict,
    "tpcheck": cmd_tpcheck,
    "delta": cmd_delta,
    "factorize": cmd_factorize,
    "shape": cmd_shape,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="stabletp", description="Stable densities and their total positivity.")
    ap.add_argument("command", choices=COMMANDS)
    for flag in ("alpha", "rho", "beta"):
        ap.add_argument(f"--{flag}")
    ap.add_argument("--dim")
    ap.add_argument("--kernel", choices=KERNELS)
    ap.add_argument("--order")
    ap.add_argument("--budget")
    ap.add_argument("--seed")
    ap.add_argument("--digits")
    ap.add_argument("--grid")
    ap.add_argument("--format", choices=("json", "csv"))
    ap.add_argument("--out")
    ap.add_argument("--quick", action="store_true", default=None)
    ap.add_argument("--config", help="JSON file with the same keys; flags override it")
    return ap


_VALUE_FLAGS = {"--alpha", "--rho", "--beta", "--dim", "--kernel", "--order", "--budget", "--seed",
                "--digits", "--grid", "--format", "--out", "--config"}


def _glue(argv):
    """Attach flag values so that negative numbers such as ``--grid -5:5:101`` parse."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def make_config(argv) -> RunConfig:
    args = build_parser().parse_args(_glue(list(argv)))
    merged = {}
    if args.config:
        try:
            with open(args.config) as fh:
                merged = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(merged, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(merged) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    cli = {k: v for k, v in vars(args).items() if v is not None and k != "config"}
    merged.update(cli)
    return RunConfig(**merged)


def _emit(cfg: RunConfig, doc, table):
    if cfg.format == "csv" and table is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header, rows = table
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])
        text = buf.getvalue()
    else:
        text = json.dumps(doc, sort_keys=True, indent=2, default=_num) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        cfg = make_config(sys.argv[1:] if argv is None else argv)
        code, doc, table = HANDLERS[cfg.command](cfg)
        _emit(cfg, doc, table)
        return code
    except (UsageError, InvalidParams, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericFailure, ArithmeticError, NoConvergence) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
