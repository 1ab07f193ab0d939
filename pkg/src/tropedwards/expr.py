"""Parser for short Puiseux polynomials such as ``1 - 3*q`` or ``-1 + q^(3/2)``.

Grammar (whitespace ignored)::

    expr   := [sign] term (sign term)*
    term   := coef ['*'] 'q' ['^' exp] | coef | 'q' ['^' exp]
    coef   := rational | '(' rational ')'
    exp    := ['-'] int | '(' ['-'] rational ')'
    rational := int ['/' int]
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .series import DEFAULT_HORIZON, PuiseuxSeries, format_series

_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


def _tokens(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            out.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("sym", m.group(2), start))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokens(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else ("eof", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.k += 1
        return tok

    def fail(self, msg):
        raise ParseError(msg, self.text, self.peek()[2])

    def accept(self, sym: str) -> bool:
        kind, val, _ = self.peek()
        if kind == "sym" and val == sym:
            self.k += 1
            return True
        return False

    def expect(self, sym: str):
        if not self.accept(sym):
            self.fail(f"expected {sym!r}")

    def integer(self) -> int:
        kind, val, _ = self.peek()
        if kind != "int":
            self.fail("expected an integer")
        self.k += 1
        return int(val)

    def rational(self) -> Fraction:
        num = self.integer()
        if self.accept("/"):
            den = self.integer()
            if den == 0:
                self.k -= 1
                self.fail("zero denominator")
            return Fraction(num, den)
        return Fraction(num)

    def signed_rational(self) -> Fraction:
        neg = self.accept("-")
        r = self.rational()
        return -r if neg else r

    def exponent(self) -> Fraction:
        if self.accept("("):
            e = self.signed_rational()
            self.expect(")")
            return e
        if self.accept("-"):
            return -Fraction(self.integer())
        return Fraction(self.integer())

    def term(self) -> tuple[Fraction, Fraction]:
        kind, val, _ = self.peek()
        coef = None
        if kind == "int":
            coef = self.rational()
        elif kind == "sym" and val == "(":
            self.take()
            coef = self.rational()
            self.expect(")")
        if self.peek()[:2] == ("sym", "*"):
            if coef is None:
                self.fail("dangling '*'")
            self.take()
            if self.peek()[:2] != ("sym", "q"):
                self.fail("expected 'q' after '*'")
        if self.accept("q"):
            exp = Fraction(1)
            if self.accept("^"):
                exp = self.exponent()
            return (Fraction(1) if coef is None else coef), exp
        if coef is None:
            self.fail("expected a number or 'q'")
        return coef, Fraction(0)

    def parse(self) -> list[tuple[Fraction, Fraction]]:
        if not self.toks:
            self.fail("empty expression")
        terms = []
        sign = -1 if self.accept("-") else (self.accept("+") and 1) or 1
        while True:
            c, e = self.term()
            terms.append((sign * c, e))
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            elif self.peek()[0] == "eof":
                return terms
            else:
                self.fail(f"unexpected {self.peek()[1]!r}")


def parse_series(text: str, horizon=DEFAULT_HORIZON, ram: int | None = None) -> PuiseuxSeries:
    """Parse ``text`` into an exact polynomial, truncated at ``horizon``."""
    terms = _Parser(text).parse()
    if ram is not None:
        for _, e in terms:
            if (e * ram).denominator != 1:
                raise ParseError(f"exponent {e} is not a multiple of 1/{ram}", text, 0)
    acc: dict[Fraction, Fraction] = {}
    for c, e in terms:
        acc[e] = acc.get(e, Fraction(0)) + c
    return PuiseuxSeries(acc, horizon, ram)


def print_series(a: PuiseuxSeries) -> str:
    return format_series(a)
