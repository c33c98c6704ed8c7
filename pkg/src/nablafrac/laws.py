"""Closed-form oracles and machine-checkable laws for the nabla operators.

Two classes of law are checked:

* exact laws hold on every finite scale up to roundoff and are judged by a
  relative residual against ``EXACT_RTOL``;
* asymptotic laws only hold as a sampled interval is refined and are judged on
  a ladder of grids: residuals must strictly decrease and the last one must be
  within ``ASYMPTOTIC_RTOL`` of the reference magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from nablafrac import fractional as fr
from nablafrac.errors import NablaError, PoleOnScale
from nablafrac.expr import BinOp, Const, Expression, Pow, Var, parse_expression
from nablafrac.funcspace import GridFunction, lincomb, same_scale, sample
from nablafrac.gamma import gamma
from nablafrac.nabla import (
    backward_reconstruction,
    check_order,
    frac_nabla_derivative,
    nabla_derivative,
    power,
    running_integral,
)
from nablafrac.timescale import TimeScale, kappa_domain, parse_scale_spec, real_sample

EXACT_RTOL = 1e-11
ASYMPTOTIC_RTOL = 5e-2
BOUNDARY_LAYER = 3
DEFAULT_LADDER = (256, 512, 1024, 2048)

LAW_IDS = (
    "linearity",
    "product",
    "reciprocal",
    "quotient",
    "power_forward",
    "power_reciprocal",
    "backward_relation",
    "semigroup",
    "inversion",
    "identity_ops",
)


@dataclass
class LawReport:
    law_id: str
    scale: str
    function: str
    mu: float | None
    residual: float
    tolerance: float
    passed: bool
    beta: float | None = None
    refinement_residuals: list[float] | None = None
    note: str = ""

    def to_dict(self) -> dict:
        d = {
            "law_id": self.law_id,
            "scale": self.scale,
            "function": self.function,
            "mu": self.mu,
        }
        if self.beta is not None:
            d["beta"] = self.beta
        d["residual"] = self.residual if math.isfinite(self.residual) else None
        d["tolerance"] = self.tolerance
        d["passed"] = self.passed
        if self.refinement_residuals is not None:
            d["refinement_residuals"] = list(self.refinement_residuals)
        if self.note:
            d["note"] = self.note
        return d


def _report(law_id, f: GridFunction, fdesc, mu, residual, tolerance, **kw) -> LawReport:
    return LawReport(law_id, f.scale.label, fdesc, mu, float(residual), tolerance,
                     bool(residual <= tolerance), **kw)


def relative_residual(lhs, rhs, *involved) -> float:
    """``max|lhs - rhs|`` divided by the largest magnitude among all arrays involved."""
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    err = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
    mag = max((float(np.max(np.abs(x))) for x in (lhs, rhs, *involved) if np.size(x)), default=0.0)
    return err / mag if mag > 0 else err


def _rho_values(f: GridFunction) -> np.ndarray:
    """``f(rho(t))`` on the kappa domain."""
    return f.values[:-1]


def _kappa_values(f: GridFunction) -> np.ndarray:
    return f.values[1:]


# -- oracles -----------------------------------------------------------------

def oracle_power_forward(ts: TimeScale, k: float, n: int, mu: float) -> GridFunction:
    """``nu**(1-mu) * sum_j (rho - k)**j (t - k)**(n-1-j)``: the derivative of ``(t - k)**n``."""
    check_order(mu)
    t = ts.points[1:] - k
    r = ts.points[:-1] - k
    acc = np.zeros_like(t)
    for j in range(n):
        acc = acc + r**j * t ** (n - 1 - j)
    return GridFunction(kappa_domain(ts), power(ts.graininess(), 1 - mu) * acc)


def oracle_power_reciprocal(ts: TimeScale, k: float, n: int, mu: float) -> GridFunction:
    """Derivative of ``1/(t - k)**n``; needs ``(t - k)(rho(t) - k) != 0`` on the kappa domain."""
    check_order(mu)
    t = ts.points[1:] - k
    r = ts.points[:-1] - k
    bad = (t * r) == 0
    if np.any(bad):
        raise PoleOnScale(f"(t - {k:g})(rho(t) - {k:g}) vanishes on {ts.label}",
                          float(ts.points[1:][bad][0]))
    acc = np.zeros_like(t)
    for j in range(n):
        acc = acc + 1.0 / (r ** (n - j) * t ** (j + 1))
    return GridFunction(kappa_domain(ts), -power(ts.graininess(), 1 - mu) * acc)


def power_form(e: Expression) -> tuple[str, float, int] | None:
    """Recognise ``(t - k)^n`` and ``1/(t - k)^n`` shapes; returns ``(kind, k, n)``."""
    def shift(node):
        if isinstance(node, Var):
            return 0.0
        if isinstance(node, BinOp) and isinstance(node.left, Var) and isinstance(node.right, Const):
            if node.op == "-":
                return node.right.value
            if node.op == "+":
                return -node.right.value
        return None

    def forward(node):
        k = shift(node)
        if k is not None:
            return k, 1
        if isinstance(node, Pow):
            k = shift(node.base)
            if k is not None and node.exponent != 0:
                return k, node.exponent
        return None

    fw = forward(e)
    if fw is not None:
        k, n = fw
        return ("forward", k, n) if n > 0 else ("reciprocal", k, -n)
    if isinstance(e, BinOp) and e.op == "/" and e.left == Const(1.0):
        fw = forward(e.right)
        if fw is not None and fw[1] > 0:
            return ("reciprocal", fw[0], fw[1])
    return None


# -- exact laws --------------------------------------------------------------

def check_linearity(f: GridFunction, g: GridFunction, mu: float, a: float = 2.0, b: float = -3.0,
                    fdesc: str = "f") -> LawReport:
    same_scale(f, g)
    lhs = frac_nabla_derivative(lincomb(a, f, b, g), mu).values
    df, dg = frac_nabla_derivative(f, mu).values, frac_nabla_derivative(g, mu).values
    rhs = a * df + b * dg
    res = relative_residual(lhs, rhs, a * df, b * dg)
    return _report("linearity", f, fdesc, mu, res, EXACT_RTOL)


def check_product_rule(f: GridFunction, g: GridFunction, mu: float, fdesc: str = "f") -> LawReport:
    """Both product forms: ``f' g + f(rho) g'`` and ``f g' + f' g(rho)``."""
    same_scale(f, g)
    f.require_unmasked()
    g.require_unmasked()
    lhs = frac_nabla_derivative(GridFunction(f.scale, f.values * g.values), mu).values
    df, dg = frac_nabla_derivative(f, mu).values, frac_nabla_derivative(g, mu).values
    a1, b1 = df * _kappa_values(g), _rho_values(f) * dg
    a2, b2 = _kappa_values(f) * dg, df * _rho_values(g)
    res = max(relative_residual(lhs, a1 + b1, a1, b1), relative_residual(lhs, a2 + b2, a2, b2))
    return _report("product", f, fdesc, mu, res, EXACT_RTOL)


def _require_nonvanishing(f: GridFunction, what: str) -> None:
    f.require_unmasked()
    prod = f.values[1:] * f.values[:-1]
    if np.any(prod == 0):
        t = float(f.scale.points[1:][prod == 0][0])
        raise PoleOnScale(f"{what}(t) {what}(rho(t)) vanishes at t={t!r}", t)


def check_reciprocal(f: GridFunction, mu: float, fdesc: str = "f") -> LawReport:
    _require_nonvanishing(f, "f")
    lhs = frac_nabla_derivative(GridFunction(f.scale, 1.0 / f.values), mu).values
    df = frac_nabla_derivative(f, mu).values
    rhs = -df / (_kappa_values(f) * _rho_values(f))
    return _report("reciprocal", f, fdesc, mu, relative_residual(lhs, rhs), EXACT_RTOL)


def check_quotient(f: GridFunction, g: GridFunction, mu: float, fdesc: str = "f") -> LawReport:
    same_scale(f, g)
    _require_nonvanishing(g, "g")
    f.require_unmasked()
    lhs = frac_nabla_derivative(GridFunction(f.scale, f.values / g.values), mu).values
    df, dg = frac_nabla_derivative(f, mu).values, frac_nabla_derivative(g, mu).values
    den = _kappa_values(g) * _rho_values(g)
    p, q = df * _kappa_values(g) / den, _kappa_values(f) * dg / den
    return _report("quotient", f, fdesc, mu, relative_residual(lhs, p - q, p, q), EXACT_RTOL)


def check_power_forward(f: GridFunction, k: float, n: int, mu: float, fdesc: str = "f") -> LawReport:
    lhs = frac_nabla_derivative(f, mu).values
    rhs = oracle_power_forward(f.scale, k, n, mu).values
    return _report("power_forward", f, fdesc, mu, relative_residual(lhs, rhs), EXACT_RTOL)


def check_power_reciprocal(f: GridFunction, k: float, n: int, mu: float, fdesc: str = "f") -> LawReport:
    rhs = oracle_power_reciprocal(f.scale, k, n, mu).values
    lhs = frac_nabla_derivative(f, mu).values
    return _report("power_reciprocal", f, fdesc, mu, relative_residual(lhs, rhs), EXACT_RTOL)


def check_backward_relation(f: GridFunction, mu: float, fdesc: str = "f") -> LawReport:
    rebuilt = np.array([backward_reconstruction(f, mu, t) for t in f.scale.points[1:]])
    res = relative_residual(rebuilt, _rho_values(f), f.values)
    return _report("backward_relation", f, fdesc, mu, res, EXACT_RTOL)


def _bitwise_gap(x: np.ndarray, y: np.ndarray) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape:
        return math.inf
    if x.tobytes() == y.tobytes():
        return 0.0
    return max(float(np.max(np.abs(x - y))), 5e-324)


def check_identity_ops(f: GridFunction, mu: float, fdesc: str = "f") -> LawReport:
    """Reductions that must hold bit for bit.

    ``D^(1)`` vs the nabla derivative, the GL sum at order 1 vs the backward
    difference (uniform scales only), ``I^1`` under both kernels vs the
    running nabla integral, and the two negative-order aliases at ``mu``.
    """
    f.require_unmasked()
    nd = nabla_derivative(f).values
    gaps = [_bitwise_gap(frac_nabla_derivative(f, 1.0).values, nd)]
    if f.scale.is_uniform(fr.UNIFORM_RTOL):
        gaps.append(_bitwise_gap(fr.gl_derivative(f, 1.0).values[1:], nd))
    plain = running_integral(f).values
    for kernel in fr.Kernel:
        gaps.append(_bitwise_gap(fr.rl_integral(f, 1.0, None, kernel).values, plain))
    gaps.append(_bitwise_gap(fr.negative_order_dispatch(f, -mu, None, "derivative").values,
                             fr.rl_integral(f, mu).values))
    gaps.append(_bitwise_gap(fr.negative_order_dispatch(f, -mu, None, "integral").values,
                             fr.rl_derivative(f, mu).values))
    return _report("identity_ops", f, fdesc, mu, max(gaps), 0.0)


# -- composition laws --------------------------------------------------------

def semigroup_gap(f: GridFunction, mu: float, beta: float) -> tuple[float, float]:
    """``max|I^mu I^beta f - I^(mu+beta) f|`` and ``max|I^(mu+beta) f|``."""
    lhs = fr.rl_integral(fr.rl_integral(f, beta), mu).values
    rhs = fr.rl_integral(f, mu + beta).values
    return float(np.max(np.abs(lhs - rhs))), float(np.max(np.abs(rhs)))


def inversion_gap(f: GridFunction, mu: float, skip: int = 0) -> tuple[float, float]:
    """``max|(nabla o I^(1-mu) o I^mu) f - f|`` over kappa points past ``skip``, and ``max|f|``."""
    recovered = fr.rl_derivative(fr.rl_integral(f, mu), mu).values
    diff = np.abs(recovered - _kappa_values(f))[skip:]
    return (float(np.max(diff)) if diff.size else 0.0), float(np.max(np.abs(f.values)))


def _ladder_report(law_id, fdesc, interval, mu, beta, ladder, gap) -> LawReport:
    residuals, ref = [], 0.0
    for n in ladder:
        err, ref = gap(real_sample(interval[0], interval[1], n))
        residuals.append(err)
    tol = ASYMPTOTIC_RTOL * ref
    decreasing = all(b < a for a, b in zip(residuals, residuals[1:]))
    final = residuals[-1]
    note = "" if decreasing else "residuals do not strictly decrease under refinement"
    return LawReport(
        law_id,
        f"R[{interval[0]:g},{interval[1]:g}]/{list(ladder)}",
        fdesc,
        mu,
        final,
        tol,
        bool(decreasing and final <= tol),
        beta=beta,
        refinement_residuals=residuals,
        note=note,
    )


def check_semigroup(f, mu: float, beta: float, ladder=DEFAULT_LADDER, interval=(0.0, 1.0)) -> LawReport:
    """``I^mu o I^beta = I^(mu+beta)``.

    A :class:`GridFunction` is checked exactly on its own scale (valid for
    integer orders, where the identity is a finite Fubini interchange). An
    expression is checked asymptotically over ``real_sample`` grids of the
    ``ladder`` sizes on ``interval``.
    """
    if not (mu > 0 and beta > 0):
        raise fr.OrderOutOfRange(f"semigroup orders must be positive, got {mu!r}, {beta!r}")
    if isinstance(f, GridFunction):
        err, mag = semigroup_gap(f, mu, beta)
        res = err / mag if mag > 0 else err
        return _report("semigroup", f, "f", mu, res, EXACT_RTOL, beta=beta)
    src = f if isinstance(f, str) else None
    e = parse_expression(f) if isinstance(f, str) else f
    return _ladder_report("semigroup", src or "f", interval, mu, beta, ladder,
                          lambda ts: semigroup_gap(sample(e, ts), mu, beta))


def check_inversion(f, mu: float, ladder=DEFAULT_LADDER, interval=(0.0, 1.0)) -> LawReport:
    """``(nabla o I^(1-mu) o I^mu) f = f``.

    Exact on any scale for ``mu = 1``. For an expression the check runs over
    the refinement ladder and skips the first ``BOUNDARY_LAYER`` points
    after the base point, where the kernel singularity dominates.
    """
    check_order(mu)
    if isinstance(f, GridFunction):
        err, mag = inversion_gap(f, mu)
        res = err / mag if mag > 0 else err
        return _report("inversion", f, "f", mu, res, EXACT_RTOL)
    src = f if isinstance(f, str) else None
    e = parse_expression(f) if isinstance(f, str) else f
    return _ladder_report("inversion", src or "f", interval, mu, None, ladder,
                          lambda ts: inversion_gap(sample(e, ts), mu, BOUNDARY_LAYER))


# -- convergence studies -----------------------------------------------------

def gl_convergence(expr: str, mu: float, t: float, exact: float, steps) -> list[float]:
    """``|GL - exact|`` at ``t`` with base point 0 for each step ``h`` in ``steps``."""
    e = parse_expression(expr)
    out = []
    for h in steps:
        ts = real_sample(0.0, t, int(round(t / h)))
        out.append(abs(fr.gl_derivative_at(sample(e, ts), mu, ts.max) - exact))
    return out


def rl_integral_convergence(expr: str, mu: float, exact: float, sizes, kernel="regularized") -> list[float]:
    """``|I^mu f(1) - exact|`` on ``real_sample(0, 1, N)`` for each ``N``."""
    e = parse_expression(expr)
    return [abs(fr.rl_integral_at(sample(e, real_sample(0.0, 1.0, n)), mu, 1.0, None, kernel) - exact)
            for n in sizes]


def caputo_rl_gap(expr: str, mu: float, sizes) -> list[float]:
    """``max|Caputo - RL|`` on ``real_sample(0, 1, N)`` for each ``N``."""
    e = parse_expression(expr)
    out = []
    for n in sizes:
        f = sample(e, real_sample(0.0, 1.0, n))
        out.append(float(np.max(np.abs(fr.caputo_derivative(f, mu).values - fr.rl_derivative(f, mu).values))))
    return out


def kernel_gap(f: GridFunction, mu: float, t: float | None = None) -> float:
    """Difference between the regularized and unregularized integrals, at ``t`` or in max norm."""
    reg = fr.rl_integral(f, mu, None, fr.Kernel.REGULARIZED)
    unreg = fr.rl_integral(f, mu, None, fr.Kernel.UNREGULARIZED)
    if t is not None:
        return abs(reg.at(t) - unreg.at(t))
    return float(np.max(np.abs(reg.values - unreg.values)))


def rl_power_closed_form(p: float, mu: float, t: float) -> float:
    """Order-``mu`` RL derivative of ``t**p`` from 0 (negative ``mu`` gives the integral)."""
    return gamma(p + 1) / gamma(p + 1 - mu) * t ** (p - mu)


# -- suite -------------------------------------------------------------------

DEFAULT_PARTNER = "3*t^2-2*t+7"

DEFAULT_CONFIG = {
    "scales": ["integers:0:50", "step:0.5:0:25", "points:0,1,4,9,16,25", "sample:0:1:64"],
    "functions": [
        {"expr": e, "pole_policy": "tail"}
        for e in ("t", "t^2", "t^3", "1/t", "1/t^2", "5", DEFAULT_PARTNER)
    ],
    "orders": [0.25, 0.5, 0.75, 1.0],
    "partner": DEFAULT_PARTNER,
}

ASYMPTOTIC_CONFIG = {
    "asymptotic": [
        {"law": "semigroup", "expr": "t", "mu": 0.3, "beta": 0.7},
        {"law": "inversion", "expr": "t", "mu": 0.25},
        {"law": "inversion", "expr": "t", "mu": 0.5},
        {"law": "inversion", "expr": "t", "mu": 0.75},
    ],
}

SUITES = {
    "default": DEFAULT_CONFIG,
    "asymptotic": ASYMPTOTIC_CONFIG,
    "all": {**DEFAULT_CONFIG, **ASYMPTOTIC_CONFIG},
}


def _failed(law_id, scale, fdesc, mu, exc, beta=None) -> LawReport:
    return LawReport(law_id, scale, fdesc, mu, math.inf, EXACT_RTOL, False, beta=beta,
                     note=f"{type(exc).__name__}: {exc}")


def _pole_tail(values: np.ndarray, valid: np.ndarray) -> int | None:
    """First index of the longest pole-free tail, or None if a bad point is interior."""
    bad = np.flatnonzero(~valid)
    if bad.size == 0:
        return 0
    if np.array_equal(bad, np.arange(bad.size)):
        return int(bad.size)
    return None


def _resolve(expr: Expression, src: str, ts: TimeScale, policy: str) -> GridFunction:
    f = sample(expr, ts, masked=True)
    if not f.is_masked:
        return GridFunction(ts, f.values)
    t0 = float(ts.points[~f.mask][0])
    start = _pole_tail(f.values, f.mask) if policy == "tail" else None
    if start is None or len(ts) - start < 3:
        raise PoleOnScale(f"{src} has a pole at t={t0!r} on {ts.label}", t0)
    return GridFunction(ts.tail(start), f.values[start:])


def _nonvanishing_tail(f: GridFunction, policy: str) -> GridFunction:
    """For the reciprocal law: drop a leading run of zeros under the tail policy."""
    start = _pole_tail(f.values, f.values != 0) if policy == "tail" else 0
    if start is None or start == 0 or len(f) - start < 3:
        return f
    return f.restrict(start)


def _cell_reports(ts, fn_entry, mu, partner_expr) -> list[LawReport]:
    src = fn_entry["expr"]
    policy = fn_entry.get("pole_policy", "strict")
    expr = parse_expression(src)
    form = power_form(expr)
    laws = ["linearity", "product", "quotient", "reciprocal"]
    if form is not None:
        laws.append("power_forward" if form[0] == "forward" else "power_reciprocal")
    laws += ["backward_relation", "identity_ops"]
    if mu == 1.0:
        laws += ["semigroup", "inversion"]
    try:
        f = _resolve(expr, src, ts, policy)
    except NablaError as exc:
        return [_failed(law, ts.label, src, mu, exc, beta=1.0 if law == "semigroup" else None) for law in laws]
    reports = []
    for law in laws:
        try:
            if law in ("linearity", "product", "quotient"):
                g = sample(partner_expr, f.scale)
                check = {"linearity": check_linearity, "product": check_product_rule,
                         "quotient": check_quotient}[law]
                r = check(f, g, mu, fdesc=src)
            elif law == "reciprocal":
                r = check_reciprocal(_nonvanishing_tail(f, policy), mu, fdesc=src)
            elif law == "power_forward":
                r = check_power_forward(f, form[1], form[2], mu, fdesc=src)
            elif law == "power_reciprocal":
                r = check_power_reciprocal(f, form[1], form[2], mu, fdesc=src)
            elif law == "backward_relation":
                r = check_backward_relation(f, mu, fdesc=src)
            elif law == "identity_ops":
                r = check_identity_ops(f, mu, fdesc=src)
            elif law == "semigroup":
                r = check_semigroup(f, 1.0, 1.0)
                r.function = src
            else:
                r = check_inversion(f, 1.0)
                r.function = src
        except NablaError as exc:
            r = _failed(law, f.scale.label, src, mu, exc)
        reports.append(r)
    return reports


def run_suite(config: dict) -> list[LawReport]:
    """Run every configured law; failures are reported, never raised.

    ``config`` keys: ``scales`` (scale specs), ``functions`` (expression text
    or ``{"expr", "pole_policy"}`` with policy ``strict`` or ``tail``),
    ``orders``, ``partner`` (second function for two-argument laws) and
    ``asymptotic`` (ladder checks). Reports come out in configuration order.
    """
    reports: list[LawReport] = []
    scales = config.get("scales", [])
    functions = [fn if isinstance(fn, dict) else {"expr": fn} for fn in config.get("functions", [])]
    orders = config.get("orders", [])
    partner = parse_expression(config.get("partner", DEFAULT_PARTNER))
    for spec in scales:
        try:
            ts = parse_scale_spec(spec)
        except NablaError as exc:
            for fn in functions:
                for mu in orders:
                    reports.append(_failed("identity_ops", spec, fn["expr"], mu, exc))
            continue
        for fn in functions:
            for mu in orders:
                try:
                    reports.extend(_cell_reports(ts, fn, float(mu), partner))
                except NablaError as exc:
                    reports.append(_failed("identity_ops", ts.label, fn["expr"], mu, exc))
    for entry in config.get("asymptotic", []):
        law, src, mu = entry["law"], entry["expr"], float(entry["mu"])
        ladder = tuple(entry.get("ladder", DEFAULT_LADDER))
        interval = tuple(entry.get("interval", (0.0, 1.0)))
        try:
            if law == "semigroup":
                reports.append(check_semigroup(src, mu, float(entry["beta"]), ladder, interval))
            elif law == "inversion":
                reports.append(check_inversion(src, mu, ladder, interval))
            else:
                raise NablaError(f"no asymptotic check named {law!r}")
        except NablaError as exc:
            reports.append(_failed(law, "real_sample ladder", src, mu, exc, beta=entry.get("beta")))
    return reports
