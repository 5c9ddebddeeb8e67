"""Recursive-descent parser for the textual expression grammar.

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("+" | "-") unary | power
    power    := primary (("^" | "**") exponent)?
    exponent := ["-"] INT | "(" ["+" | "-"] INT ")"
    primary  := NUMBER | ATOM | "(" expr ")"

Atoms are x1..x3, l1..l3, h12..h32, l1_x2, h12_x3, ..., a, c, a1..a3. Numbers are exact
(``0.25`` parses as 1/4). Division and negative powers are accepted only when the divisor
is a monomial in l1, l2, l3 (or a nonzero number), which keeps every parsed expression
inside the canonical form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..core.errors import ParseError, UnknownAtomError
from .expression import Add, Const, Expression, Mul, Pow, Var, is_atom, normalize

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d*)?|\.\d+)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "number", "ident", "op" or "end"
    text: str
    offset: int


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            bad = len(src) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _accept(self, *ops: str) -> Token | None:
        tok = self.current
        if tok.kind == "op" and tok.text in ops:
            self.pos += 1
            return tok
        return None

    def _fail(self, tok: Token) -> ParseError:
        if tok.kind == "end":
            return ParseError("unexpected end of input", tok.offset)
        return ParseError(f"unexpected token {tok.text!r}", tok.offset)

    def parse(self) -> Expression:
        expr = self.expr()
        if self.current.kind != "end":
            raise self._fail(self.current)
        return expr

    def expr(self) -> Expression:
        terms = [self.term()]
        while True:
            tok = self._accept("+", "-")
            if tok is None:
                break
            rhs = self.term()
            terms.append(rhs if tok.text == "+" else Mul((Const(Fraction(-1)), rhs)))
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Expression:
        factors = [self.unary()]
        while True:
            tok = self._accept("*", "/")
            if tok is None:
                break
            rhs = self.unary()
            if tok.text == "/":
                rhs = self._invert(rhs, tok)
            factors.append(rhs)
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def unary(self) -> Expression:
        tok = self._accept("+", "-")
        if tok is None:
            return self.power()
        operand = self.unary()
        return operand if tok.text == "+" else Mul((Const(Fraction(-1)), operand))

    def power(self) -> Expression:
        base = self.primary()
        tok = self._accept("^", "**")
        if tok is None:
            return base
        exponent = self.exponent()
        if exponent < 0:
            return self._invert(Pow(base, -exponent), tok)
        return Pow(base, exponent)

    def exponent(self) -> int:
        paren = self._accept("(") is not None
        sign = self._accept("+", "-")
        tok = self.current
        if tok.kind == "end":
            raise self._fail(tok)
        if tok.kind != "number" or not tok.text.isdigit():
            raise ParseError("expected an integer exponent", tok.offset)
        self._advance()
        if paren and self._accept(")") is None:
            raise self._fail(self.current)
        value = int(tok.text)
        return -value if sign is not None and sign.text == "-" else value

    def primary(self) -> Expression:
        tok = self.current
        if tok.kind == "number":
            self._advance()
            return Const(Fraction(tok.text))
        if tok.kind == "ident":
            if not is_atom(tok.text):
                raise UnknownAtomError(f"unknown atom {tok.text!r}", tok.offset)
            self._advance()
            return Var(tok.text)
        if self._accept("(") is not None:
            inner = self.expr()
            if self._accept(")") is None:
                raise self._fail(self.current)
            return inner
        raise self._fail(tok)

    def _invert(self, expr: Expression, tok: Token) -> Expression:
        try:
            normalize(expr).inverse()
        except ZeroDivisionError:
            raise ParseError("division by zero", tok.offset) from None
        except ValueError:
            raise ParseError("only monomials in l1, l2, l3 may be inverted", tok.offset) from None
        return Pow(expr, -1)


def parse(src: str) -> Expression:
    """Parse ``src`` into an expression tree.

    Raises:
        ParseError: syntax error (``offset`` is the 0-based character position)
        UnknownAtomError: identifier that is not an atom
    """
    return _Parser(src).parse()
