"""Tiny arithmetic-expression language for scenario files.

Coefficients, right-hand sides, and boundary weights in scenario files are
written as strings like ``"sin(pi*t) * exp(-eps)"``.  The grammar:

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          (right-associative)
    atom   := NUMBER | 't' | 'eps' | 'pi' | NAME '(' expr ')' | '(' expr ')'

with NAME one of ``sin cos exp log sqrt``.  Parsing reports the byte offset
of the first offending character; evaluation is vectorized over a numpy array
of ``t`` values with a fixed scalar ``eps`` and raises :class:`EvalError` on
domain violations (non-finite results, division by zero, ``log``/``sqrt``
outside their domains).
"""

from __future__ import annotations

import math
import re
from typing import Callable, Union

import numpy as np

from .errors import EvalError, ParseError

__all__ = ["Expression", "parse_expression"]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
}


class _Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind: str, text: str, offset: int):
        self.kind = kind
        self.text = text
        self.offset = offset


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


# AST nodes are (tag, payload...) tuples; evaluation walks them recursively.
_Node = tuple


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, text: str):
        tok = self.current
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}", tok.offset)
        return self.advance()

    def parse(self) -> _Node:
        node = self.expr()
        tok = self.current
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.offset)
        return node

    def expr(self) -> _Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self) -> _Node:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance()
            node = ("mul" if op.text == "*" else "div", node, self.unary(), op.offset)
        return node

    def unary(self) -> _Node:
        if self.current.kind == "op" and self.current.text == "-":
            self.advance()
            return ("neg", self.unary())
        return self.power()

    def power(self) -> _Node:
        base = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            off = self.advance().offset
            return ("pow", base, self.unary(), off)
        return base

    def atom(self) -> _Node:
        tok = self.current
        if tok.kind == "number":
            self.advance()
            return ("const", float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text == "t":
                return ("t",)
            if tok.text == "eps":
                return ("eps",)
            if tok.text == "pi":
                return ("const", math.pi)
            if tok.text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return ("call", tok.text, arg, tok.offset)
            raise ParseError(f"unknown name {tok.text!r}", tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"expected a value, got {tok.text!r}" if tok.text else "unexpected end of input", tok.offset)


def _eval(node: _Node, t: np.ndarray, eps: float):
    tag = node[0]
    if tag == "const":
        return node[1]
    if tag == "t":
        return t
    if tag == "eps":
        return eps
    if tag == "neg":
        return -_eval(node[1], t, eps)
    if tag == "add":
        return _eval(node[1], t, eps) + _eval(node[2], t, eps)
    if tag == "sub":
        return _eval(node[1], t, eps) - _eval(node[2], t, eps)
    if tag == "mul":
        return _eval(node[1], t, eps) * _eval(node[2], t, eps)
    if tag == "div":
        denom = _eval(node[2], t, eps)
        if np.any(denom == 0):
            raise EvalError(f"division by zero at offset {node[3]}")
        return _eval(node[1], t, eps) / denom
    if tag == "pow":
        base = _eval(node[1], t, eps)
        exponent = _eval(node[2], t, eps)
        with np.errstate(all="ignore"):
            out = np.power(base, exponent)
        if not np.all(np.isfinite(out)):
            raise EvalError(f"non-finite power result at offset {node[3]}")
        return out
    if tag == "call":
        arg = _eval(node[2], t, eps)
        with np.errstate(all="ignore"):
            out = _FUNCTIONS[node[1]](arg)
        if not np.all(np.isfinite(out)):
            raise EvalError(f"{node[1]} domain error at offset {node[3]}")
        return out
    raise AssertionError(f"unhandled node {tag}")


class Expression:
    """A parsed expression in variables ``t`` and ``eps``."""

    __slots__ = ("source", "_ast")

    def __init__(self, source: str):
        self.source = source
        self._ast = _Parser(source).parse()

    def __repr__(self):
        return f"Expression({self.source!r})"

    def __call__(self, t, eps: float = 0.0) -> np.ndarray:
        """Evaluate over an array (or scalar) of t values at a fixed eps.

        Overflow is allowed to produce inf silently; samplers reject
        non-finite values with a pointed error instead of a numpy warning.
        """
        arr = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            out = _eval(self._ast, arr, float(eps))
        return np.broadcast_to(np.asarray(out, dtype=float), arr.shape).copy()

    def _mentions(self, tag: str) -> bool:
        def walk(node) -> bool:
            if node[0] == tag:
                return True
            return any(walk(c) for c in node[1:] if isinstance(c, tuple))

        return walk(self._ast)

    def depends_on_eps(self) -> bool:
        return self._mentions("eps")

    def depends_on_t(self) -> bool:
        return self._mentions("t")


def parse_expression(source: Union[str, float, int]) -> Expression:
    """Parse a scenario-file expression; bare numbers are accepted as constants."""
    if isinstance(source, (int, float)):
        return Expression(repr(float(source)))
    return Expression(source)
