"""Acceptance criteria, one PASS/FAIL line each (see the summary section of the pytest run)."""

import math
import time

import numpy as np
import pytest

from nablafrac import fractional as fr
from nablafrac.errors import ParseError
from nablafrac.expr import parse_expression, to_text
from nablafrac.funcspace import GridFunction, sample
from nablafrac.gamma import gamma
from nablafrac.laws import (
    DEFAULT_CONFIG,
    DEFAULT_LADDER,
    caputo_rl_gap,
    check_inversion,
    check_semigroup,
    gl_convergence,
    kernel_gap,
    relative_residual,
    rl_integral_convergence,
    run_suite,
)
from nablafrac.nabla import frac_nabla_derivative, nabla_derivative, nabla_integral, running_integral
from nablafrac.timescale import explicit, integer_range, parse_scale_spec, real_sample

CORPUS_SCALES = [parse_scale_spec(s) for s in DEFAULT_CONFIG["scales"]]
CORPUS_FUNCS = ["t", "t^2", "t^3", "5", "3*t^2-2*t+7", "1/(t+1)"]
EXACT = 1e-11


def strictly_decreasing(xs):
    return all(b < a for a, b in zip(xs, xs[1:]))


def fmt(xs):
    return "[" + ", ".join(f"{x:.3g}" for x in xs) + "]"


# -- 1 ------------------------------------------------------------------------

def test_c1_discrete_exactness_suite(verdict):
    start = time.perf_counter()
    reports = run_suite(DEFAULT_CONFIG)
    elapsed = time.perf_counter() - start
    algebraic = {"linearity", "product", "reciprocal", "quotient", "power_forward",
                 "power_reciprocal", "backward_relation"}
    sel = [r for r in reports if r.law_id in algebraic]
    worst = max(r.residual for r in sel)
    covered = {r.law_id for r in sel}
    ok = (covered == algebraic and all(r.passed and r.residual <= EXACT for r in sel) and elapsed < 60)
    verdict("1 discrete exactness", ok,
            f"{len(sel)} reports, max residual {worst:.2g} <= 1e-11, {elapsed:.1f}s")


# -- 2 ------------------------------------------------------------------------

def test_c2_reductions(verdict):
    failures = []
    worst = 0.0
    for ts in CORPUS_SCALES:
        for src in CORPUS_FUNCS:
            f = sample(src, ts)
            nd = nabla_derivative(f).values
            if frac_nabla_derivative(f, 1.0).values.tobytes() != nd.tobytes():
                failures.append(f"D1 {ts.label} {src}")
            if ts.is_uniform(fr.UNIFORM_RTOL) and fr.gl_derivative(f, 1.0).values[1:].tobytes() != nd.tobytes():
                failures.append(f"GL1 {ts.label} {src}")
            i1 = fr.rl_integral(f, 1.0)
            plain = np.array([nabla_integral(f, ts.min, t) for t in ts.points])
            if i1.values.tobytes() != plain.tobytes():
                failures.append(f"I1 {ts.label} {src}")
            res = relative_residual(nabla_derivative(running_integral(f)).values, f.values[1:])
            worst = max(worst, res)
            if res > EXACT:
                failures.append(f"nabla I1 {ts.label} {src}")
    verdict("2 reductions", not failures,
            f"bitwise D1/GL1/I1; nabla o I1 max residual {worst:.2g}" + (f"; {failures}" if failures else ""))


# -- 3 ------------------------------------------------------------------------

def test_c3_gl_to_rl_convergence(verdict):
    exact = 2 * 1.0 ** 1.5 / gamma(2.5)
    assert abs(exact - 2 / math.gamma(2.5)) <= 1e-14 and abs(exact - 1.5045055) < 1e-7
    errs = gl_convergence("t^2", 0.5, 1.0, exact, [2.0 ** -k for k in range(4, 13)])
    ok = strictly_decreasing(errs) and errs[-1] <= 2e-3
    verdict("3 GL -> RL convergence", ok, f"errors {fmt(errs)}, final <= 2e-3")


# -- 4 ------------------------------------------------------------------------

def test_c4_rl_integral_convergence(verdict):
    exact = 1 / gamma(1.5)
    assert abs(exact - 1.1283792) < 1e-7
    sizes = [256, 512, 1024, 2048, 4096]
    errs = rl_integral_convergence("1", 0.5, exact, sizes)
    ok = strictly_decreasing(errs) and errs[-1] <= 5e-3
    verdict("4 RL integral convergence", ok, f"N={sizes} errors {fmt(errs)}, final <= 5e-3")


# -- 5 ------------------------------------------------------------------------

def test_c5_semigroup_ladder(verdict):
    r = check_semigroup("t", 0.3, 0.7, ladder=DEFAULT_LADDER)
    errs = r.refinement_residuals
    ok = strictly_decreasing(errs) and errs[-1] <= 5e-2 * 0.5
    verdict("5a semigroup 0.3+0.7 ladder", ok, f"N={list(DEFAULT_LADDER)} residuals {fmt(errs)}, final <= 0.025")


def test_c5_semigroup_integer_orders(verdict):
    cases = [(ts, src) for ts in CORPUS_SCALES for src in CORPUS_FUNCS]
    cases += [(integer_range(-20, 20), src) for src in CORPUS_FUNCS if "/" not in src]
    reports = [check_semigroup(sample(src, ts), 1.0, 1.0) for ts, src in cases]
    worst = max(r.residual for r in reports)
    verdict("5b semigroup 1+1 exact", worst <= EXACT, f"{len(reports)} cases, max residual {worst:.2g} <= 1e-11")


# -- 6 ------------------------------------------------------------------------

@pytest.mark.parametrize("mu", [0.25, 0.5, 0.75])
def test_c6_inversion_ladder(verdict, mu):
    r = check_inversion("t", mu, ladder=DEFAULT_LADDER)
    errs = r.refinement_residuals
    ok = strictly_decreasing(errs) and errs[-1] <= 5e-2
    verdict(f"6a inversion mu={mu}", ok, f"N={list(DEFAULT_LADDER)} residuals {fmt(errs)}, final <= 5e-2")


def test_c6_negative_order_aliases(verdict):
    failures = []
    for ts in CORPUS_SCALES:
        for src in CORPUS_FUNCS:
            f = sample(src, ts)
            for mu in (0.25, 0.5, 0.75, 1.0):
                a = fr.negative_order_dispatch(f, -mu, None, "derivative").values
                b = fr.negative_order_dispatch(f, -mu, None, "integral").values
                if a.tobytes() != fr.rl_integral(f, mu).values.tobytes():
                    failures.append(f"D^-{mu} {ts.label} {src}")
                if b.tobytes() != fr.rl_derivative(f, mu).values.tobytes():
                    failures.append(f"I^-{mu} {ts.label} {src}")
    verdict("6b negative-order aliases bitwise", not failures, str(failures) if failures else "")


# -- 7 ------------------------------------------------------------------------

def test_c7_caputo_constants(verdict):
    scales = CORPUS_SCALES + [integer_range(-5, 30), explicit([-3, -1.5, 0, 0.1, 7, 7.5])]
    worst = 0.0
    for ts in scales:
        for c in (5.0, -2.75, 0.0, 1e6):
            for mu in (0.1, 0.25, 0.5, 0.75, 1.0):
                d = fr.caputo_derivative(GridFunction(ts, np.full(len(ts), c)), mu).values
                worst = max(worst, float(np.max(np.abs(d))))
    verdict("7a Caputo of constants is 0", worst == 0.0, f"max |value| {worst}")


def test_c7_caputo_matches_rl_when_f_of_a_is_zero(verdict):
    sizes = list(DEFAULT_LADDER)
    gaps = caputo_rl_gap("t", 0.5, sizes)
    verdict("7b Caputo vs RL for f=t", gaps[-1] <= 5e-2, f"N={sizes} max gaps {fmt(gaps)}, final <= 5e-2")


# -- 8 ------------------------------------------------------------------------

def test_c8_kernel_discrepancy(verdict):
    one_z = sample("1", integer_range(0, 10))
    discrete = kernel_gap(one_z, 0.5, 5.0)
    dense = kernel_gap(sample("1", real_sample(0, 1, 4096)), 0.5)
    ok = discrete > 1e-3 and dense <= 1e-2
    verdict("8 kernel discrepancy", ok, f"Z gap at t=5 {discrete:.4g} > 1e-3; N=4096 max gap {dense:.3g} <= 1e-2")


# -- 9 ------------------------------------------------------------------------

VALID = [
    ("t", "t"),
    ("5", "5"),
    ("2.0", "2"),
    ("0.001", "0.001"),
    ("100.50", "100.5"),
    ("007", "7"),
    ("t^2", "t^2"),
    ("t^0", "t^0"),
    ("t^-2", "t^-2"),
    ("t ^ - 3", "t^-3"),
    ("-t", "-t"),
    ("--t", "--t"),
    ("-(-t)", "--t"),
    ("-t^2", "-t^2"),
    ("(-t)^2", "(-t)^2"),
    ("-2^2", "-2^2"),
    ("((t))", "t"),
    ("(((5)))", "5"),
    ("t+1", "t+1"),
    ("t - 1", "t-1"),
    ("t-t-1", "t-t-1"),
    ("t-(t-1)", "t-(t-1)"),
    ("(t-1)-t", "t-1-t"),
    ("t+(t+1)", "t+(t+1)"),
    ("2*t", "2*t"),
    ("2*(t+1)", "2*(t+1)"),
    ("(t+1)*2", "(t+1)*2"),
    ("1/t", "1/t"),
    ("1/2/t", "1/2/t"),
    ("1/(2/t)", "1/(2/t)"),
    ("1/(t*t)", "1/(t*t)"),
    ("t*t*t", "t*t*t"),
    ("t*(t*t)", "t*(t*t)"),
    ("t*-1", "t*-1"),
    ("t/-2", "t/-2"),
    ("t+-1", "t+-1"),
    ("3*t^2-2*t+7", "3*t^2-2*t+7"),
    ("1/(t-3)^2", "1/(t-3)^2"),
    ("(t-3)^4", "(t-3)^4"),
    ("(t+0.5)^-3", "(t+0.5)^-3"),
    ("(2*t)^3", "(2*t)^3"),
    ("(t^2)^3", "(t^2)^3"),
    ("(1/t)^2", "(1/t)^2"),
    ("-(t+1)", "-(t+1)"),
    ("-(t*2)", "-(t*2)"),
    ("-(t^2)", "-t^2"),
    ("  t  ", "t"),
    ("\tt*\n2", "t*2"),
    ("t^12", "t^12"),
    ("0", "0"),
    ("0.5*t^3 - 1.25*t + 0.125", "0.5*t^3-1.25*t+0.125"),
    ("t*(t-1)*(t-2)/6", "t*(t-1)*(t-2)/6"),
    ("1/(1+t^2)", "1/(1+t^2)"),
]

INVALID = [
    ("", 0),
    ("   ", 3),
    ("t^2.5", 2),
    ("1e3", 1),
    ("t^", 2),
    ("t^-", 3),
    ("t^-x", 3),
    ("t^(2)", 2),
    ("t^t", 2),
    ("(t", 2),
    ("t)", 1),
    ("()", 1),
    ("+t", 0),
    ("t+", 2),
    ("t*", 2),
    ("t**2", 2),
    ("2t", 1),
    ("t t", 2),
    ("3.", 1),
    (".5", 0),
    ("x", 0),
    ("sin(t)", 0),
    ("t/", 2),
    ("t^2^3", 3),
    ("1..2", 1),
    ("t + * 2", 4),
    ("((t)", 4),
    ("t^ 2.0", 3),
    ("é+t", 0),
    ("t+é", 2),
    ("(t)  @", 5),
    ("1/(t-3)^2.5", 8),
    ("-", 1),
    ("--", 2),
    ("t^--2", 3),
    ("1 2", 2),
    ("t(2)", 1),
    ("5^", 2),
    ("t^ -", 4),
    ("  t +", 5),
    ("t + é", 4),
    ("ab", 0),
    ("t^1.0", 2),
    ("0.5.5", 3),
    ("t ^ 2 ^", 6),
    ("\u00a0t t", 4),
    ("\u3000t+", 5),
]


def test_c9_parser_corpus_and_sampling(verdict):
    assert len(VALID) + len(INVALID) == 100
    wrong = []
    for src, canon in VALID:
        try:
            tree = parse_expression(src)
        except ParseError as exc:
            wrong.append(f"{src!r}: unexpected error at {exc.offset}")
            continue
        text = to_text(tree)
        if text != canon or parse_expression(text) != tree:
            wrong.append(f"{src!r}: printed {text!r}")
    for src, offset in INVALID:
        try:
            parse_expression(src)
            wrong.append(f"{src!r}: accepted")
        except ParseError as exc:
            if exc.offset != offset:
                wrong.append(f"{src!r}: offset {exc.offset} != {offset}")
    sampled = sample("t^2", explicit([0, 1, 2, 3])).values
    exact = sampled.tolist() == [0.0, 1.0, 4.0, 9.0]
    verdict("9 parser corpus", not wrong and exact,
            f"{len(VALID)} valid + {len(INVALID)} invalid; t^2 on {{0,1,2,3}} -> {sampled.tolist()}"
            + (f"; {wrong}" if wrong else ""))
