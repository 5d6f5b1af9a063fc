"""Command-line front end.

Every table starts with '#' header lines recording the parameters, the
kernel normalization and the library version.  Exit status: 0 on success,
2 for parameter-domain errors, 3 for numerical failures (including failed
suites).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .bessel_laplace import BesselLaplaceParams, eval_integral, series_value, subordination_value
from .config import NORMALIZATION, QuadratureConfig, RadialPoint
from .coordinates import CATALOG
from .errors import DomainError, FracDriftError
from .green import GreenParams, Regime, asymptotic_report, assemble_E_detail
from .heat import HeatKernelQuery, p0_hankel, p0_subordination
from .pole import PoleParams, large_beta_series, small_beta_series, solve_pole_root
from .spectral import SymbolSplit, regularity_experiment
from .subordinator import crossover, phi
from . import suites

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def read_config(path):
    """Flat key=value file; '#' starts a comment, keys use the flag names."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"config line without '=': {raw.strip()!r}")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


class Emitter:
    """Collects rows and writes CSV or JSON with a '#' header block."""

    def __init__(self, args, command):
        self.args = args
        self.command = command
        self.header = {"command": command, "version": __version__, "normalization": NORMALIZATION}
        for k, v in sorted(vars(args).items()):
            if k not in ("func", "config", "output", "format") and v is not None:
                self.header[k] = v

    def write(self, columns, rows, extra=None):
        fmt = self.args.format
        buf = io.StringIO()
        for k, v in self.header.items():
            buf.write(f"# {k}: {v}\n")
        if fmt == "json":
            payload = {"columns": columns, "rows": [list(map(_plain, r)) for r in rows]}
            if extra is not None:
                payload["report"] = _plain(extra)
            buf.write(json.dumps(payload, indent=2, sort_keys=True))
            buf.write("\n")
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
        if self.args.output:
            with open(self.args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if hasattr(v, "value") and isinstance(getattr(v, "value"), str):
        return v.value
    return v


def _quad_cfg(args):
    return QuadratureConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


# ------------------------------------------------------------- commands

def cmd_pole(args):
    rows = []
    for s in _floats(args.s):
        for beta in _floats(args.beta):
            root = solve_pole_root(PoleParams(s, beta))
            row = [s, beta, root.y, root.complement, root.residual]
            if args.order is not None:
                ser = (small_beta_series if args.series == "small" else large_beta_series)(s, args.order)
                row.append(float(ser.evaluate(beta)))
            rows.append(row)
    cols = ["s", "beta", "y", "complement", "residual"]
    if args.order is not None:
        cols.append(f"{args.series}_series_y")
    Emitter(args, "pole").write(cols, rows)


def cmd_phi(args):
    s = args.s
    xc = crossover(s)
    xs = _floats(args.x)
    vals = phi(s, np.array(xs))
    rows = [[s, x, float(v), "series" if x >= xc else "contour"] for x, v in zip(xs, vals)]
    Emitter(args, "phi").write(["s", "x", "phi", "route"], rows)


def cmd_bessel_laplace(args):
    rows = []
    for lam in _floats(args.lam):
        p = BesselLaplaceParams(args.s, args.nu, lam)
        val, err = eval_integral(p, _quad_cfg(args))
        ser = series_value(p) if 2 * args.s < 1 else float("nan")
        rows.append([args.s, args.nu, lam, val, err, ser, subordination_value(p)])
    Emitter(args, "bessel-laplace").write(
        ["s", "nu", "lam", "quadrature", "error_estimate", "series", "subordination"], rows)


def cmd_heat(args):
    rows = []
    for rho in _floats(args.rho):
        for xn in _floats(args.xn):
            q = HeatKernelQuery(args.s, args.n, rho, xn, args.b)
            a, c = p0_hankel(q, _quad_cfg(args)), p0_subordination(q)
            rows.append([args.s, args.n, rho, xn, a, c, abs(a - c)])
    Emitter(args, "heat").write(["s", "n", "rho", "xn", "value_hankel", "value_subord", "abs_diff"], rows)


def cmd_green(args):
    p = GreenParams(args.s, args.b, args.n)
    rows = []
    for rho in _floats(args.rho):
        for xn in _floats(args.xn):
            val, err = assemble_E_detail(p, RadialPoint(rho, xn), _quad_cfg(args))
            rows.append([args.s, args.b, args.n, rho, xn, val, err])
    Emitter(args, "green").write(["s", "b", "n", "rho", "xn", "E", "error_estimate"], rows)


def cmd_green_verify(args):
    s_values = tuple(_floats(args.s))
    for s in s_values:
        GreenParams(s, args.b, 3)
    rows = suites.contour_sweep(s_values, args.b)
    Emitter(args, "green-verify").write(
        ["s", "r", "xn", "direct", "decomposition", "abs_diff"], rows)
    return EXIT_OK if max(r[-1] for r in rows) <= args.tol else EXIT_NUMERIC


def cmd_green_asym(args):
    p = GreenParams(args.s, args.b, args.n)
    try:
        regimes = [Regime(r) for r in args.regime.split(",")] if args.regime else list(Regime)
    except ValueError as exc:
        raise DomainError(f"{exc}; choose from {', '.join(r.value for r in Regime)}") from exc
    rows, reports = [], []
    for reg in regimes:
        rec = asymptotic_report(p, reg, _quad_cfg(args))
        rows.append([reg.value, rec.exponent, rec.expected, rec.constant, rec.residual,
                     rec.r_squared, rec.reference])
        reports.append({"regime": reg.value, "samples": rec.samples, "values": rec.values})
    Emitter(args, "green-asym").write(
        ["regime", "exponent", "expected", "constant", "residual", "r_squared", "reference"],
        rows, extra=reports if args.format == "json" else None)


def cmd_solve(args):
    if args.N < 8:
        raise DomainError("N must be at least 8")
    rep = regularity_experiment(SymbolSplit(args.s, args.b), args.l, (args.N // 2, args.N),
                                n=args.n, eps=args.eps, seed=args.seed)
    args.format = "json"
    Emitter(args, "solve").write(["ratio_variation", "gain_orthogonal", "gain_axis"],
                                 [[rep.ratio_variation, rep.gain_orthogonal, rep.gain_axis]],
                                 extra=rep.to_dict())


def cmd_flow(args):
    rep = suites.coordinate_residuals(args.field, seed=args.seed)
    args.format = "json"
    Emitter(args, "flow").write(sorted(rep), [[rep[k] for k in sorted(rep)]], extra=rep)


def cmd_verify(args):
    names = args.suite or list(suites.SUITES)
    if "all" in names:
        names = list(suites.SUITES)
    for nm in names:
        if nm not in suites.SUITES:
            raise DomainError(f"unknown suite {nm!r}; valid suites: {', '.join(suites.SUITES)}")
    results = []
    for nm in names:
        kw = {}
        if args.s and nm == "contour":
            kw["s_values"] = tuple(_floats(args.s))
        elif args.s and nm == "green_asymptotics":
            kw["s"] = _floats(args.s)[0]
        res = suites.run_suite(nm, **kw)
        results.append(res)
        print(res.line(), file=sys.stderr)
        for c in res.checks:
            print(f"    {c.name}: {c.value!r} ({c.relation} {c.threshold!r})", file=sys.stderr)
    summary = {"passed": all(r.passed for r in results),
               "suites": {r.key: r.to_dict() for r in sorted(results, key=lambda r: r.key)}}
    text = json.dumps(_plain(summary), indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if summary["passed"] else EXIT_NUMERIC


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file (flags override it)")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--abs-tol", type=float, default=1e-12)
    common.add_argument("--rel-tol", type=float, default=1e-10)

    ap = argparse.ArgumentParser(prog="fracdrift", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pole", parents=[common], help="root of (1-y^2)^s = beta y")
    p.add_argument("--s", required=True, help="comma-separated list")
    p.add_argument("--beta", required=True, help="comma-separated list")
    p.add_argument("--series", choices=("small", "large"), default="small")
    p.add_argument("--order", type=int)
    p.set_defaults(func=cmd_pole)

    p = sub.add_parser("phi", parents=[common], help="stable subordinator density")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--x", required=True, help="comma-separated list")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("bessel-laplace", parents=[common], help="int J_nu(r) r^{nu+1} e^{-lam r^{2s}} dr")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--lam", required=True, help="comma-separated list")
    p.set_defaults(func=cmd_bessel_laplace)

    p = sub.add_parser("heat", parents=[common], help="anisotropic heat kernel p0")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--rho", required=True)
    p.add_argument("--xn", required=True)
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("green", parents=[common], help="kernel E_{s,b} at points")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--rho", required=True)
    p.add_argument("--xn", required=True)
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("green-verify", parents=[common], help="contour identity sweep")
    p.add_argument("--s", default="0.15,0.3,0.45")
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_green_verify)

    p = sub.add_parser("green-asym", parents=[common], help="singularity fits along rays")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--regime", help="comma-separated subset of " + ",".join(r.value for r in Regime))
    p.set_defaults(func=cmd_green_asym)

    p = sub.add_parser("solve", parents=[common], help="pseudo-spectral regularity experiment (JSON)")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N", type=int, default=128)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("flow", parents=[common], help="straightening chart diagnostics (JSON)")
    p.add_argument("--field", choices=CATALOG, default="rotational")
    p.add_argument("--seed", type=int, default=3)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    p.add_argument("--suite", action="append",
                   help="suite name (repeatable); one of " + ", ".join(suites.SUITES) + ", all")
    p.add_argument("--s", help="override s for the contour / asymptotics suites")
    p.set_defaults(func=cmd_verify)
    return ap


def _config_path(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    return pre.parse_known_args(argv)[0].config


def parse(argv):
    """Flags > config file > defaults.  Config values become parser
    defaults, which also satisfies options that are otherwise required."""
    ap = build_parser()
    path = _config_path(argv)
    if path:
        conf = read_config(path)
        command = next((a for a in argv if a in ap._subparsers._group_actions[0].choices), None)
        if command is None:
            raise DomainError("a subcommand is required")
        sp = ap._subparsers._group_actions[0].choices[command]
        known = {a.dest for a in sp._actions}
        unknown = set(conf) - known
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
        typed = {}
        for a in sp._actions:
            if a.dest in conf:
                try:
                    typed[a.dest] = a.type(conf[a.dest]) if a.type else conf[a.dest]
                except ValueError as exc:
                    raise DomainError(f"bad config value for {a.dest}: {conf[a.dest]!r}") from exc
                a.required = False
        sp.set_defaults(**typed)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse(sys.argv[1:] if argv is None else argv)
        code = args.func(args)
        return EXIT_OK if code is None else code
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except FracDriftError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
