"""Text grammars for rings and series.

Ring:    Q | Q(zeta_N), optionally followed by [name^order, ...] for
         nilpotent generators (a bare name is a free generator).
Series:  sums and products of rational numbers, generators, zeta, x and
         O(x^k), with ^ for powers.  Exponents of x may be fractions
         written as x^(1/2) or negative as x^(-1); a term O(x^k) sets the
         precision.  Everything ``format_series`` prints parses back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .errors import NilLaurentError, ParseError
from .laurent import LaurentSeries, power
from .ring import RingDescriptor, invert_unit

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()\[\],{}|>]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad, ("number", "name", "operator"))
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.peek.kind == "op" and self.peek.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.fail(f"expected {text!r}", (repr(text),))

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.peek.kind != kind:
            self.fail(f"expected {what}", (what,))
        return self.advance()

    def fail(self, message: str, expected=()):
        tok = self.peek
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", self.text, tok.pos, expected)

    def done(self):
        if self.peek.kind != "end":
            self.fail("unexpected trailing input", ("end of input",))


# --- rings ---


def parse_ring(text: str) -> RingDescriptor:
    cur = _Cursor(text)
    tok = cur.expect_kind("name", "'Q'")
    if tok.text != "Q":
        raise ParseError(f"ring must start with Q, found {tok.text!r}", text, tok.pos, ("'Q'",))
    order = 1
    if cur.accept("("):
        z = cur.expect_kind("name", "'zeta_N'")
        m = re.fullmatch(r"zeta_(\d+)", z.text)
        if not m:
            raise ParseError(f"expected zeta_N, found {z.text!r}", text, z.pos, ("'zeta_N'",))
        order = int(m.group(1))
        if order < 1:
            raise ParseError("cyclotomic order must be positive", text, z.pos, ("positive integer",))
        cur.expect(")")
    nil, free = [], []
    if cur.accept("["):
        while True:
            name = cur.expect_kind("name", "generator name")
            if cur.accept("^"):
                n = cur.expect_kind("num", "nilpotency order")
                nil.append((name.text, int(n.text)))
            else:
                free.append(name.text)
            if cur.accept("]"):
                break
            if not cur.accept(","):
                cur.fail("expected ',' or ']'", ("','", "']'"))
    cur.done()
    try:
        return RingDescriptor(order, tuple(nil), tuple(free))
    except NilLaurentError as exc:
        raise ParseError(str(exc), text, 0, ("valid ring",)) from None


# --- series ---


class _SeriesParser:
    def __init__(self, ring: RingDescriptor, text: str):
        self.ring = ring
        self.cur = _Cursor(text)
        self.text = text

    def parse(self) -> LaurentSeries:
        value = self.expr()
        self.cur.done()
        return value

    def _const(self, v) -> LaurentSeries:
        return LaurentSeries.constant(self.ring, v)

    def expr(self) -> LaurentSeries:
        value = self.term()
        while True:
            if self.cur.accept("+"):
                value = value + self.term()
            elif self.cur.accept("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> LaurentSeries:
        value = self.unary()
        while True:
            if self.cur.accept("*"):
                value = value * self.unary()
            elif self.cur.peek.text == "/" and self.cur.peek.kind == "op":
                pos = self.cur.advance().pos
                rhs = self.unary()
                value = value * self._reciprocal(rhs, pos)
            else:
                return value

    def _reciprocal(self, rhs: LaurentSeries, pos: int):
        if not (rhs.is_exact and set(rhs.coeffs) <= {0} and rhs.coeffs):
            raise ParseError("can only divide by a nonzero constant", self.text, pos, ("constant divisor",))
        return invert_unit(rhs.coeffs[0])

    def unary(self) -> LaurentSeries:
        if self.cur.accept("-"):
            return -self.unary()
        if self.cur.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> LaurentSeries:
        tok = self.cur.peek
        base, is_x = self.atom()
        if not self.cur.accept("^"):
            return base
        e = self.exponent()
        if is_x:
            return LaurentSeries.monomial(self.ring, e.numerator, e.denominator)
        if e.denominator != 1:
            raise ParseError("only x takes fractional exponents", self.text, tok.pos, ("integer exponent",))
        return power(base, int(e))

    def exponent(self) -> Fraction:
        cur = self.cur
        if cur.accept("("):
            sign = -1 if cur.accept("-") else 1
            num = int(cur.expect_kind("num", "integer").text)
            den = 1
            if cur.accept("/"):
                den = int(cur.expect_kind("num", "integer").text)
                if den == 0:
                    cur.fail("zero denominator", ("positive integer",))
            cur.expect(")")
            return Fraction(sign * num, den)
        sign = -1 if cur.accept("-") else 1
        return Fraction(sign * int(cur.expect_kind("num", "integer exponent").text))

    def atom(self) -> tuple[LaurentSeries, bool]:
        cur = self.cur
        tok = cur.peek
        if tok.kind == "num":
            cur.advance()
            return self._const(mpq(int(tok.text))), False
        if tok.kind == "op" and tok.text == "(":
            cur.advance()
            value = self.expr()
            cur.expect(")")
            return value, False
        if tok.kind == "name":
            cur.advance()
            if tok.text == "x":
                return LaurentSeries.x(self.ring), True
            if tok.text == "O":
                return self.big_o(), False
            try:
                return self._const(self.ring.generator(tok.text)), False
            except NilLaurentError:
                names = ("x", "zeta", *self.ring.generator_names) if self.ring.cyclotomic_order > 1 else ("x", *self.ring.generator_names)
                raise ParseError(f"unknown symbol {tok.text!r}", self.text, tok.pos, names) from None
        cur.fail("expected a term", ("number", "x", "generator", "'('", "O(x^k)"))

    def big_o(self) -> LaurentSeries:
        cur = self.cur
        cur.expect("(")
        if cur.peek.kind == "num" and cur.peek.text == "1":
            cur.advance()
            e = Fraction(0)
        else:
            x = cur.expect_kind("name", "'x'")
            if x.text != "x":
                raise ParseError("O(...) takes a power of x", self.text, x.pos, ("'x'",))
            e = self.exponent() if cur.accept("^") else Fraction(1)
        cur.expect(")")
        return LaurentSeries(self.ring, {}, e.denominator, e.numerator)


def parse_series(text: str, ring: RingDescriptor) -> LaurentSeries:
    """Parse a series.

    Syntax problems raise ParseError with position and expected tokens;
    algebra that fails while evaluating (say an inverse with no precision
    bound) raises the module's own error.
    """
    return _SeriesParser(ring, text).parse()


# --- Fock states ---


def _rational(cur: _Cursor) -> Fraction:
    sign = -1 if cur.accept("-") else 1
    num = int(cur.expect_kind("num", "number").text)
    den = 1
    if cur.accept("/"):
        den = int(cur.expect_kind("num", "denominator").text)
        if den == 0:
            cur.fail("zero denominator", ("positive integer",))
    return Fraction(sign * num, den)


def parse_fock_state(text: str, spec) -> "FockVector":
    """Parse states printed by FockVector: ``|0>``, ``{1/2,3/2}``, ``-3/2*{1}``.

    A brace set lists the positive creation modes r (the state is the
    product of the a_(-r) applied to the vacuum).
    """
    from .fock import FockVector

    cur = _Cursor(text)
    out = FockVector(spec.q, {})
    first = True
    while True:
        sign = 1
        if cur.accept("-"):
            sign = -1
        elif not first and not cur.accept("+"):
            break
        first = False
        coeff = Fraction(1)
        if cur.peek.kind == "num":
            coeff = _rational(cur)
            cur.expect("*")
        if cur.accept("|"):
            tok = cur.expect_kind("num", "'0'")
            if tok.text != "0":
                raise ParseError("only the vacuum |0> may be written with bars", text, tok.pos, ("'0'",))
            cur.expect(">")
            mono: tuple = ()
        elif cur.accept("{"):
            modes = []
            if not cur.accept("}"):
                while True:
                    pos = cur.peek.pos
                    r = _rational(cur)
                    m = r * spec.q
                    if r <= 0 or m.denominator != 1 or not spec.is_mode(int(m)):
                        raise ParseError(f"{r} is not a positive mode of the sector", text, pos, ("positive mode",))
                    modes.append(int(m))
                    if cur.accept("}"):
                        break
                    if not cur.accept(","):
                        cur.fail("expected ',' or '}'", ("','", "'}'"))
            mono = tuple(modes)
        else:
            cur.fail("expected a basis state", ("'|0>'", "'{'"))
        out = out + FockVector.basis(spec.q, mono) * mpq(sign * coeff.numerator, coeff.denominator)
    cur.done()
    return out


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError("expected a rational number", text, 0, ("p/q",)) from None
