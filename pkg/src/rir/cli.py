"""Command-line front end.

Coefficients are given in ascending order (``--num 2 2`` is ``2 + 2s``).
Exit status: 0 on success, 2 on input errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import fhn
from .allpass import DEFAULT_EPSILONS, certify_exact_rir
from .bounds import report
from .errors import InputError, NumericalError
from .second_order import example_family, format_table, table2, table_csv
from .xfer import RationalTF, from_coeffs, linf_norm, nyquist

TABLE2_Z = (-3.0, -0.5, 1.1, 1.5, 5.0)


def _add_system_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--num", type=float, nargs="+", help="numerator coefficients, ascending")
    src.add_argument("--z", type=float, help="member of the h = 2(s-z)/(s^2+s-2) family")
    src.add_argument("--preset", choices=["fhn-nominal"])
    p.add_argument("--den", type=float, nargs="+", help="denominator coefficients, ascending")


def _system(args) -> RationalTF:
    if args.num is not None:
        if args.den is None:
            raise InputError("--num needs --den")
        return from_coeffs(args.num, args.den)
    if args.den is not None:
        raise InputError("--den is only valid together with --num")
    if args.z is not None:
        fam = example_family(args.z)
        if fam.flags:
            raise InputError(f"z = {args.z:g} is degenerate: {', '.join(fam.flags)}")
        return fam.g
    m = fhn.NOMINAL
    return fhn.linearize(m, fhn.equilibrium(m, 0.0))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def cmd_analyze(args) -> None:
    g = _system(args)
    rep = report(g, resolution=args.resolution, epsilons=args.eps)
    if args.format == "json":
        _emit(rep.to_json(), args.output)
    else:
        lines = [f"g(s) = {g}"] + [f"{k:>17}: {v}" for k, v in rep.to_dict().items()]
        _emit("\n".join(lines), args.output)


def cmd_table2(args) -> None:
    rows = table2(args.zs, resolution=args.resolution)
    if args.format == "csv":
        _emit(table_csv(rows), args.output)
    elif args.format == "json":
        data = [{k: _finite(v) for k, v in vars(r).items()} for r in rows]
        _emit(json.dumps(data, indent=2, sort_keys=True), args.output)
    else:
        _emit(format_table(rows), args.output)


def cmd_allpass(args) -> None:
    g = _system(args)
    cert = certify_exact_rir(g, args.eps)
    if cert is None:
        _emit("no certificate", args.output)
        return
    data = {"rho_star": cert.rho_star, "eps_used": cert.eps_used, "delta": cert.delta.to_dict()}
    _emit(json.dumps(data, indent=2, sort_keys=True), args.output)


def cmd_nyquist(args) -> None:
    g = _system(args)
    if args.z is not None:
        # -phi = -1/h, plotted against the critical point -1
        h = example_family(args.z).h
        f, label = RationalTF(-h.den, h.num), "-phi"
    else:
        f, label = RationalTF(g.den, g.num), "1/g"
    curve = nyquist(f, args.w_min, args.w_max, args.n, args.scale, label, g=g)
    _emit(curve.to_csv() if args.format == "csv" else curve.to_json(), args.output)
    if curve.projection is not None and args.format == "csv":
        p = curve.projection
        sys.stderr.write(
            f"projection: omega_p={p.omega:.9g} point={p.point.real:.9g}{p.point.imag:+.9g}j "
            f"radius={p.radius:.9g}\n"
        )


def cmd_fhn(args) -> None:
    m = fhn.NOMINAL
    g0 = fhn.linearize(m, fhn.equilibrium(m, 0.0))
    e0, w_p = fhn.critical_static_gain(m)
    d0 = fhn.synthesize_perturbation(m, 0.0)
    outdir = Path(args.outdir) if args.outdir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    runs = {}
    scenarios = [("nominal", None)] + [(f"eps_{eps:+g}", d0.scaled(1 + eps)) for eps in args.eps]
    if args.constant is not None:
        scenarios.append((f"const_{args.constant:+g}", args.constant))
    for name, delta in scenarios:
        tr = fhn.simulate(m, delta, t_end=args.t_end, dt=args.dt)
        entry = tr.summary()
        if delta is None:
            entry.update(norm=0.0, dc_gain=0.0)
        elif isinstance(delta, float):
            entry.update(norm=abs(delta), dc_gain=delta)
        else:
            entry.update(norm=delta.hinf_norm, dc_gain=delta.dc_gain, a=delta.a)
        entry["linear_stable"] = fhn.closed_loop_stable(m, delta)
        runs[name] = entry
        if outdir:
            (outdir / f"fhn_{name}.csv").write_text(tr.to_csv())
    summary = {
        "rho_star_nominal": 1.0 / linf_norm(g0).norm,
        "e0": e0,
        "omega_p": w_p,
        "a": d0.a,
        "b": d0.b,
        "runs": runs,
    }
    _emit(json.dumps(summary, indent=2, sort_keys=True), args.output)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rir", description="Robust instability radius analysis")
    ap.add_argument("-v", "--verbose", action="store_true", help="print tracebacks on failure")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="bounds and exact radius for one system")
    _add_system_args(p)
    p.add_argument("--resolution", type=int, default=600)
    p.add_argument("--eps", type=float, nargs="+", default=list(DEFAULT_EPSILONS))
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("table2", help="the five-case example table")
    p.add_argument("--zs", type=float, nargs="*", default=list(TABLE2_Z))
    p.add_argument("--resolution", type=int, default=600)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("allpass", help="all-pass certificate of the exact radius")
    _add_system_args(p)
    p.add_argument("--eps", type=float, nargs="+", default=list(DEFAULT_EPSILONS))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_allpass)

    p = sub.add_parser("nyquist", help="Nyquist curve data with the peak projection")
    _add_system_args(p)
    p.add_argument("--w-min", type=float, default=0.0)
    p.add_argument("--w-max", type=float, default=100.0)
    p.add_argument("--n", type=int, default=2001)
    p.add_argument("--scale", choices=["linear", "log"], default="linear")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_nyquist)

    p = sub.add_parser("fhn", help="FitzHugh-Nagumo pipeline and simulations")
    p.add_argument("--eps", type=float, nargs="+", default=[0.0, 0.1, -0.1])
    p.add_argument("--constant", type=float, default=None, help="also simulate a constant delta")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=2000.0)
    p.add_argument("--outdir", help="directory for trajectory CSVs")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fhn)
    return ap


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (InputError, ValueError, ZeroDivisionError) as exc:
        if args.verbose:
            raise
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (NumericalError, ArithmeticError, FloatingPointError) as exc:
        if args.verbose:
            raise
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3
    return 0


def main() -> None:
    sys.exit(run())
