"""Recursive-descent parser for the expression grammar.

Tokens: decimal numbers (optional fraction and exponent), identifiers,
``+ - * / ^ ( ) ,``.  Whitespace is insignificant.  Precedence, tightest
first: ``^`` (right associative), unary minus, ``* /``, ``+ -``.
"""

from __future__ import annotations

import re

from ..errors import ExprSyntaxError, UnknownFunctionError
from .nodes import FUNCTIONS, Bin, Call, Expr, Neg, Num, Sym

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        self.i += 1

    def expect(self, value):
        kind, val, pos = self.tok
        if val != value:
            raise ExprSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos)
        self.advance()

    def parse(self) -> Expr:
        e = self.sum_()
        kind, val, pos = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {val!r}", pos)
        return e

    def sum_(self) -> Expr:
        e = self.product()
        while self.tok[1] in ("+", "-"):
            op = self.tok[1]
            self.advance()
            e = Bin(op, e, self.product())
        return e

    def product(self) -> Expr:
        e = self.unary()
        while self.tok[1] in ("*", "/"):
            op = self.tok[1]
            self.advance()
            e = Bin(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.tok[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok[1] == "^":
            self.advance()
            # right associative; exponent may carry a unary minus: x^-2
            return Bin("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.tok
        if kind == "number":
            self.advance()
            return Num(float(val))
        if kind == "name":
            self.advance()
            if self.tok[1] == "(":
                if val not in FUNCTIONS:
                    raise UnknownFunctionError(
                        f"unknown function {val!r}; supported: {', '.join(FUNCTIONS)}"
                    )
                self.advance()
                args = [self.sum_()]
                while self.tok[1] == ",":
                    self.advance()
                    args.append(self.sum_())
                self.expect(")")
                return Call(val, tuple(args))
            return Sym(val)
        if val == "(":
            self.advance()
            e = self.sum_()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


def parse(text: str) -> Expr:
    """Parse `text` into an expression tree."""
    return _Parser(text).parse()
