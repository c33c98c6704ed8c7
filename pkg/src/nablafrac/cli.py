"""Command line front end.

Examples::

    nablafrac frac-deriv --scale integers:0:10 --fn "t^2" --mu 0.5
    nablafrac frac-int --scale sample:0:1:1024 --fn 1 --mu 0.5 --at 1.0
    nablafrac verify --suite default
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from nablafrac import fractional as fr
from nablafrac.errors import NablaError
from nablafrac.expr import parse_expression
from nablafrac.funcspace import GridFunction, format_number, read_csv, sample
from nablafrac.laws import SUITES, run_suite
from nablafrac.nabla import frac_nabla_derivative, nabla_derivative_n
from nablafrac.timescale import parse_scale_spec


class UsageError(Exception):
    pass


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return "null"
        return format_number(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _rows_json(ts, vs) -> str:
    rows = [{"t": float(t), "value": float(v)} for t, v in zip(ts, vs)]
    return "[\n" + ",\n".join(dumps(r) for r in rows) + "\n]\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nablafrac", description="Nabla fractional calculus on time scales.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fn=True, mu=False):
        p.add_argument("--scale", help="integers:a:b | step:h:a:b | sample:a:b:N | points:x,y,.. | file:PATH")
        if fn:
            p.add_argument("--fn", required=True, help='expression in t, or csv:PATH')
        if mu:
            p.add_argument("--mu", type=float, required=True)
        p.add_argument("--at", type=float, help="evaluate at a single point")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("deriv", help="integer-order nabla derivative")
    common(p)
    p.add_argument("--n", type=int, default=1, help="derivative order")

    p = sub.add_parser("frac-deriv", help="pointwise fractional nabla derivative")
    common(p, mu=True)

    p = sub.add_parser("gl-deriv", help="Grünwald-Letnikov sum derivative")
    common(p, mu=True)
    p.add_argument("--base", type=float)

    p = sub.add_parser("frac-int", help="Riemann-Liouville nabla integral")
    common(p, mu=True)
    p.add_argument("--base", type=float)
    p.add_argument("--kernel", choices=("reg", "unreg"), default="reg")
    p.add_argument("--beta", type=float, help="apply I^beta first, giving I^mu(I^beta f)")

    for name, text in (("rl-deriv", "Riemann-Liouville derivative"), ("caputo", "Caputo derivative")):
        p = sub.add_parser(name, help=text)
        common(p, mu=True)
        p.add_argument("--base", type=float)

    p = sub.add_parser("verify", help="run the law verification suite")
    p.add_argument("--suite", default="default", help=f"{' | '.join(SUITES)} | PATH to a JSON config")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--out")

    p = sub.add_parser("scale-info", help="points, jumps and graininess of a scale")
    common(p, fn=False)
    return parser


def _load(args):
    scale = parse_scale_spec(args.scale) if args.scale else None
    if getattr(args, "fn", None) is None:
        if scale is None:
            raise UsageError("--scale is required")
        return scale, None
    if args.fn.startswith("csv:"):
        f = read_csv(args.fn[4:], scale)
        return f.scale, f
    if scale is None:
        raise UsageError("--scale is required with an expression --fn")
    return scale, sample(parse_expression(args.fn), scale)


def _base(scale, args):
    b = getattr(args, "base", None)
    return None if b is None else float(scale.points[scale.locate(b)])


def kernel_of(args) -> fr.Kernel:
    return fr.Kernel.REGULARIZED if args.kernel == "reg" else fr.Kernel.UNREGULARIZED


def _compute(args, scale, f) -> GridFunction:
    cmd = args.command
    a = _base(scale, args)
    if cmd == "deriv":
        return nabla_derivative_n(f, args.n)
    if cmd == "frac-deriv":
        return frac_nabla_derivative(f, args.mu)
    if cmd == "gl-deriv":
        return fr.gl_derivative(f, args.mu, a)
    if cmd == "frac-int":
        if args.beta is not None:
            if not (args.mu > 0 and args.beta > 0):
                raise UsageError("--beta needs positive --mu and --beta")
            inner = fr.rl_integral(f, args.beta, a, kernel_of(args))
            return fr.rl_integral(inner, args.mu, None, kernel_of(args))
        if args.mu > 0:
            return fr.rl_integral(f, args.mu, a, kernel_of(args))
        return fr.negative_order_dispatch(f, args.mu, a, "integral")
    if cmd == "rl-deriv":
        return fr.negative_order_dispatch(f, args.mu, a, "derivative")
    if cmd == "caputo":
        return fr.caputo_derivative(f, args.mu, a)
    raise UsageError(f"unknown command {cmd}")


def _at_value(args, scale, f) -> tuple[float, float]:
    t = float(scale.points[scale.locate(args.at)])
    a = _base(scale, args)
    # single-point fast paths; both share the per-point kernels of the full-grid versions
    if args.command == "frac-int" and args.mu > 0 and args.beta is None:
        return t, fr.rl_integral_at(f, args.mu, t, a, kernel_of(args))
    if args.command == "gl-deriv":
        return t, fr.gl_derivative_at(f, args.mu, t, a)
    g = _compute(args, scale, f)
    return t, g.at(t)


def _scale_info(args, scale) -> str:
    pts = scale.points
    rho = scale.rho_points()
    sig = np.concatenate([pts[1:], pts[-1:]])
    nu = np.concatenate([[np.nan], scale.graininess()])
    if args.format == "json":
        return dumps({
            "label": scale.label,
            "family": scale.family,
            "step": scale.step,
            "points": [float(x) for x in pts],
            "rho": [float(x) for x in rho],
            "sigma": [float(x) for x in sig],
            "nu": [None] + [float(x) for x in nu[1:]],
        }) + "\n"
    lines = ["t,rho,sigma,nu"]
    for i in range(len(pts)):
        nu_s = "" if i == 0 else format_number(nu[i])
        lines.append(f"{format_number(pts[i])},{format_number(rho[i])},{format_number(sig[i])},{nu_s}")
    return "\n".join(lines) + "\n"


def _suite_config(name: str) -> dict:
    if name in SUITES:
        return SUITES[name]
    try:
        with open(name, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load suite {name!r}: {exc}") from None


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".nablafrac-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def run(args) -> int:
    if args.command == "verify":
        reports = run_suite(_suite_config(args.suite))
        text = "[\n" + ",\n".join(dumps(r.to_dict()) for r in reports) + "\n]\n" if reports else "[]\n"
        _write(text, args.out)
        return 0 if all(r.passed for r in reports) else 1
    scale, f = _load(args)
    if args.command == "scale-info":
        _write(_scale_info(args, scale), args.out)
        return 0
    if args.at is not None:
        t, v = _at_value(args, scale, f)
        ts, vs = [t], [v]
    else:
        g = _compute(args, scale, f)
        ts, vs = g.scale.points, g.values
    if args.format == "json":
        text = _rows_json(ts, vs)
    else:
        text = "t,value\n" + "".join(f"{format_number(t)},{format_number(v)}\n" for t, v in zip(ts, vs))
    _write(text, args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(args)
    except (UsageError, NablaError, OSError) as exc:
        print(f"nablafrac: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
