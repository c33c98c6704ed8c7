"""Arithmetic expressions in one variable ``t``.

Grammar::

    expr   := term { ("+"|"-") term } ;
    term   := factor { ("*"|"/") factor } ;
    factor := "-" factor | base [ "^" integer ] ;
    base   := number | "t" | "(" expr ")" ;
    number := digits [ "." digits ] ;  integer := [ "-" ] digits ;

Numbers are plain decimals; ``1e3`` and ``t^2.5`` are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Union

import numpy as np

from nablafrac.errors import EvalError, ParseError


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int


Expression = Union[Const, Var, Neg, BinOp, Pow]


# -- tokenizer ---------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # number, t, op, ( , ), end, bad
    text: str
    offset: int  # byte offset


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i = 0
    byte = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            byte += len(ch.encode("utf-8"))
            i += 1
            continue
        start, start_byte = i, byte
        if ch.isdigit() and ch.isascii():
            while i < n and src[i].isascii() and src[i].isdigit():
                i += 1
            if i < n and src[i] == ".":
                j = i + 1
                while j < n and src[j].isascii() and src[j].isdigit():
                    j += 1
                if j == i + 1:
                    # "3." with no fraction digits
                    tokens.append(_Token("number", src[start:i], start_byte))
                    byte = start_byte + (i - start)
                    tokens.append(_Token("bad", ".", byte))
                    return tokens
                i = j
            text = src[start:i]
            tokens.append(_Token("number", text, start_byte))
            byte += len(text)
            continue
        if ch == "t":
            tokens.append(_Token("t", ch, byte))
        elif ch in "+-*/^":
            tokens.append(_Token("op", ch, byte))
        elif ch in "()":
            tokens.append(_Token(ch, ch, byte))
        else:
            tokens.append(_Token("bad", ch, byte))
            return tokens
        byte += 1
        i += 1
    tokens.append(_Token("end", "", byte))
    return tokens


# -- parser ------------------------------------------------------------------

_FACTOR_START = frozenset({"'-'", "number", "'t'", "'('"})


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.pos = 0
        self.depth = 0
        self.last_pow = False

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def fail(self, expected: frozenset[str]):
        tok = self.tok
        if tok.kind == "end":
            what = "unexpected end of input"
        elif tok.kind == "bad":
            what = f"unexpected character {tok.text!r}"
        else:
            what = f"unexpected {tok.text!r}"
        raise ParseError(what, tok.offset, expected)

    def is_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def after_operand(self) -> frozenset[str]:
        closing = "')'" if self.depth else "end of input"
        allowed = {"'+'", "'-'", "'*'", "'/'", closing}
        if not self.last_pow:
            allowed.add("'^'")
        return frozenset(allowed)

    def parse(self) -> Expression:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(self.after_operand())
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.is_op("+", "-"):
            op = self.tok.text
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.factor()
        while self.is_op("*", "/"):
            op = self.tok.text
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expression:
        if self.is_op("-"):
            self.pos += 1
            return Neg(self.factor())
        node = self.base()
        self.last_pow = False
        if self.is_op("^"):
            self.pos += 1
            sign = 1
            if self.is_op("-"):
                self.pos += 1
                sign = -1
            tok = self.tok
            if tok.kind != "number" or "." in tok.text:
                self.fail(frozenset({"integer"}) if sign < 0 else frozenset({"'-'", "integer"}))
            self.pos += 1
            node = Pow(node, sign * int(tok.text))
            self.last_pow = True
        return node

    def base(self) -> Expression:
        tok = self.tok
        if tok.kind == "number":
            self.pos += 1
            return Const(float(tok.text))
        if tok.kind == "t":
            self.pos += 1
            return Var()
        if tok.kind == "(":
            self.pos += 1
            self.depth += 1
            node = self.expr()
            if self.tok.kind != ")":
                self.fail(self.after_operand())
            self.depth -= 1
            self.pos += 1
            return node
        self.fail(_FACTOR_START)


def parse_expression(src: str) -> Expression:
    """Parse ``src`` into an :data:`Expression` tree."""
    if not src or not src.strip():
        raise ParseError("empty expression", len(src.encode("utf-8")), _FACTOR_START)
    return _Parser(src).parse()


# -- printing ----------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node: Expression) -> int:
    if isinstance(node, BinOp):
        return _PREC_ADD if node.op in "+-" else _PREC_MUL
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _number(x: float) -> str:
    text = format(Decimal(repr(x)), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def to_text(node: Expression) -> str:
    """Render with the minimum parentheses needed to parse back to ``node``."""
    def wrap(child: Expression, needs: bool) -> str:
        s = to_text(child)
        return f"({s})" if needs else s

    if isinstance(node, Const):
        return _number(node.value)
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return "-" + wrap(node.operand, _prec(node.operand) < _PREC_NEG)
    if isinstance(node, Pow):
        return wrap(node.base, _prec(node.base) < _PREC_ATOM) + f"^{node.exponent}"
    p = _prec(node)
    left = wrap(node.left, _prec(node.left) < p)
    right = wrap(node.right, _prec(node.right) <= p)
    return f"{left}{node.op}{right}"


# -- evaluation --------------------------------------------------------------

def evaluate(node: Expression, t: np.ndarray) -> np.ndarray:
    """Evaluate elementwise over the float array ``t``.

    Raises :class:`EvalError` at the first point where a division by zero
    (including a zero base under a negative exponent) occurs.
    """
    t = np.asarray(t, dtype=float)
    if isinstance(node, Const):
        return np.full(t.shape, node.value)
    if isinstance(node, Var):
        return t.copy()
    if isinstance(node, Neg):
        return -evaluate(node.operand, t)
    if isinstance(node, Pow):
        base = evaluate(node.base, t)
        if node.exponent < 0:
            _check_nonzero(base, t)
        return _ipow(base, node.exponent)
    left = evaluate(node.left, t)
    right = evaluate(node.right, t)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    _check_nonzero(right, t)
    return left / right


def _check_nonzero(values: np.ndarray, t: np.ndarray) -> None:
    zero = values == 0
    if np.any(zero):
        raise EvalError(float(t.flat[int(np.argmax(zero))]))


def _ipow(x: np.ndarray, n: int) -> np.ndarray:
    # repeated multiplication keeps small integer powers exact and platform independent
    if n == 0:
        return np.ones_like(x)
    m = abs(n)
    out = x.copy()
    for _ in range(m - 1):
        out = out * x
    return 1.0 / out if n < 0 else out


def has_variable(node: Expression) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Const):
        return False
    if isinstance(node, Neg):
        return has_variable(node.operand)
    if isinstance(node, Pow):
        return has_variable(node.base)
    return has_variable(node.left) or has_variable(node.right)
