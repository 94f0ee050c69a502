"""Expression grammar for words, Laurent series and diffeomorphisms.

Series::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*      (the divisor must be invertible)
    unary  := ('-' | '+')* power
    power  := atom ('^' ['-'] INT)?
    atom   := RATIONAL | 'e' | 'x' | 'L' | '(' expr ')' | 'O' '(' 'e' ['^' ['-'] INT] ')'

``O(e^k)`` marks the series as known only below e^k.  A literal without an
O-term is exact.  Words are dot-separated letters: ``a1.a2*b`` (monomial
letters), ``[2;1/2].[1;1]`` (MZV letters) or ``0.3.1`` (integer letters).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParseError, PrecisionError
from ..fdb import Diffeo
from ..qsh import free_commutative_monomials
from ..rings import QQ, agree, LaurentRing, LaurentSeries, PolynomialRing, TruncatedPoly

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^().;\[\]]))"
)
SERIES_VARIABLES = ("x", "L")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    out.append(_Tok("end", "", n))
    return out


class _SeriesParser:
    def __init__(self, text: str, ring: LaurentRing, variables: dict):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.ring = ring
        self.variables = variables

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, self.text, tok.pos)

    def take(self, text=None, kind=None) -> _Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text else kind
            got = repr(t.text) if t.text else "end of input"
            raise self.error(f"expected {want}, found {got}")
        self.i += 1
        return t

    def at(self, text) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def parse(self) -> LaurentSeries:
        if self.tok.kind == "end":
            raise self.error("empty expression")
        v = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.at("+") or self.at("-"):
            op = self.take().text
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.at("*") or self.at("/"):
            op = self.take()
            w = self.unary()
            if op.text == "*":
                v = v * w
            else:
                v = v * self.reciprocal(w, op)
        return v

    def reciprocal(self, w, op):
        if not w:
            raise self.error("division by zero", op)
        c = _as_constant(w)
        if c is not None:
            return self.ring(1 / c)
        items = w.items()
        try:
            if w.is_exact and len(items) == 1:
                (k, lead), = items
                return self.ring.eps(-k, lead.inverse() if isinstance(lead, TruncatedPoly) else 1 / lead)
            return w.inverse(high=self.ring.high)
        except (ArithmeticError, PrecisionError):
            raise self.error("divisor is not invertible (its leading coefficient must be a nonzero rational)", op) from None

    def unary(self):
        sign = 1
        while self.at("-") or self.at("+"):
            if self.take().text == "-":
                sign = -sign
        v = self.power()
        return -v if sign < 0 else v

    def signed_int(self) -> int:
        neg = False
        if self.at("-"):
            self.take()
            neg = True
        t = self.take(kind="num")
        return -int(t.text) if neg else int(t.text)

    def power(self):
        base, is_eps = self.atom()
        if self.at("^"):
            caret = self.take()
            k = self.signed_int()
            if is_eps:
                return self.ring.eps(k)
            if k < 0:
                raise self.error("negative powers are only allowed for e", caret)
            return base**k
        if is_eps:
            return self.ring.eps(1)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return self.ring(Fraction(int(t.text))), False
        if t.kind == "name":
            self.take()
            if t.text == "e":
                return None, True
            if t.text == "O":
                return self.big_o(), False
            if t.text in self.variables:
                return self.variables[t.text], False
            raise self.error(f"unknown symbol {t.text!r}", t)
        if self.at("("):
            self.take()
            v = self.expr()
            self.take(")")
            return v, False
        got = repr(t.text) if t.text else "end of input"
        raise self.error(f"expected a number, symbol or '(', found {got}")

    def big_o(self):
        self.take("(")
        name = self.take(kind="name")
        if name.text != "e":
            raise self.error("only O(e^k) is supported", name)
        k = 1
        if self.at("^"):
            self.take()
            k = self.signed_int()
        self.take(")")
        return LaurentSeries({}, k - 1, self.ring)


def _as_constant(v):
    """The rational value of a constant exact series, else None."""
    if not isinstance(v, LaurentSeries) or not v.is_exact:
        return None
    items = v.items()
    if not items:
        return Fraction(0)
    if len(items) != 1 or items[0][0] != 0:
        return None
    c = items[0][1]
    if isinstance(c, TruncatedPoly):
        return c.constant_term if c.is_constant() else None
    return c


def _names(text: str) -> set:
    return {t.text for t in tokenize(text) if t.kind == "name"}


def series_ring(text: str, degree: int, eps_high: int, extra=()) -> LaurentRing:
    used = [v for v in SERIES_VARIABLES if v in _names(text) or v in extra]
    base = PolynomialRing(used, degree) if used else QQ
    return LaurentRing(base, eps_high)


def parse_series(text: str, x_degree: int = 8, eps_high: int = 6, ring: LaurentRing | None = None) -> LaurentSeries:
    """Parse a Laurent series in e whose coefficients may involve x and L."""
    if ring is None:
        ring = series_ring(text, x_degree, eps_high)
    base = ring.base
    variables = {}
    if isinstance(base, PolynomialRing):
        for v in base.variables:
            variables[v] = ring(base.gen(v))
    return _SeriesParser(text, ring, variables).parse()


# ---------------------------------------------------------------------------
# words


def _parse_mzv_letter(p: _SeriesParser):
    p.take("[")
    s = p.signed_int()
    p.take(";")
    num = int(p.take(kind="num").text)
    den = 1
    if p.at("/"):
        p.take()
        den_tok = p.take(kind="num")
        den = int(den_tok.text)
        if den == 0:
            raise p.error("malformed rational (zero denominator)", den_tok)
    r = Fraction(num, den)
    if r <= 0:
        raise p.error("MZV letters need r > 0")
    p.take("]")
    return (s, r)


def _parse_monomial_letter(p: _SeriesParser):
    gens = []
    while True:
        t = p.take(kind="name")
        k = 1
        if p.at("^"):
            p.take()
            k = int(p.take(kind="num").text)
            if k < 1:
                raise p.error("exponent must be positive")
        gens.extend([t.text] * k)
        if not p.at("*"):
            break
        p.take()
    return tuple(sorted(gens))


def parse_word(text: str, algebra=None) -> tuple:
    """Dot-separated letters; the letter syntax picks integers, MZV pairs or monomials.

    With ``algebra`` given, unknown letters are reported with their position.
    """
    p = _SeriesParser(text, LaurentRing(), {})
    letters = []
    if p.tok.kind == "end":
        raise p.error("empty word")
    if p.tok.kind == "num" and p.tok.text == "1" and p.toks[1].kind == "end":
        return ()
    while True:
        start = p.tok
        if start.kind == "num":
            letter = int(p.take().text)
        elif p.at("["):
            letter = _parse_mzv_letter(p)
        elif start.kind == "name":
            letter = _parse_monomial_letter(p)
        else:
            got = repr(start.text) if start.text else "end of input"
            raise p.error(f"expected a letter, found {got}")
        if algebra is not None and not algebra.contains(letter):
            raise ParseError(f"unknown symbol {text[start.pos:p.tok.pos].strip()!r}", text, start.pos)
        letters.append(letter)
        if p.tok.kind == "end":
            break
        p.take(".")
    return tuple(letters)


def parse_int_word(text: str) -> tuple:
    """Dot-separated nonnegative integers, e.g. ``0.1.2``."""
    p = _SeriesParser(text, LaurentRing(), {})
    letters = []
    while True:
        letters.append(int(p.take(kind="num").text))
        if p.tok.kind == "end":
            return tuple(letters)
        p.take(".")


# ---------------------------------------------------------------------------
# diffeomorphisms


def _coefficient_value(text: str, x_degree: int, eps_high: int):
    """A diffeo coefficient: a rational, or a Laurent series in e."""
    v = parse_series(text, x_degree, eps_high)
    c = _as_constant(v)
    if c is not None and "e" not in _names(text) and "O" not in _names(text):
        return c
    return v


def parse_diffeo(text: str, order: int | None = None, x_degree: int = 8, eps_high: int = 6) -> Diffeo:
    """``x + (1/2)*x^2 + ...`` or ``{"coeffs": [...], "order": N}``."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", text, exc.pos) from None
        if not isinstance(doc, dict) or not isinstance(doc.get("coeffs"), list):
            raise ParseError("a diffeo JSON object needs a 'coeffs' list", text, 0)
        coeffs = [_coefficient_value(str(c), x_degree, eps_high) for c in doc["coeffs"]]
        n = doc.get("order", order if order is not None else len(coeffs))
        if not isinstance(n, int) or n < 0:
            raise ParseError("'order' must be a nonnegative integer", text, 0)
        coeffs = (coeffs + [Fraction(0)] * n)[:n]
        return Diffeo.of(_unify(coeffs))

    names = _names(text)
    if "x" not in names:
        raise ParseError("a diffeomorphism must be written in the variable x", text, 0)
    if "L" in names:
        raise ParseError("diffeo coefficients may only involve e", text, 0)
    # read f(x) as a series in e with coefficients polynomial in x; x-degree large enough
    probe_degree = max(64, (order or 0) + 2)
    ring = LaurentRing(PolynomialRing(["x"], probe_degree), eps_high)
    v = parse_series(text, ring=ring)
    laurent = "e" in names or "O" in names
    top = 1
    for _, c in v.items():
        for (k,), _q in c.terms().items():
            top = max(top, k)
    n = order if order is not None else top - 1

    def coeff_of(k):
        if laurent:
            return LaurentSeries({e: c.coefficient((k,)) for e, c in v.items()}, v.high, LaurentRing(QQ, eps_high))
        return v.coeff(0).coefficient((k,)) if v.items() else Fraction(0)

    if not agree(coeff_of(0), 0) or not agree(coeff_of(1), 1):
        raise ParseError("not identity tangent: need f(x) = x + O(x^2)", text, 0)
    return Diffeo.of([coeff_of(k + 1) for k in range(1, n + 1)])


def _unify(coeffs: list) -> list:
    """Lift rationals into the Laurent ring if any coefficient is a series."""
    ring = next((c.ring for c in coeffs if isinstance(c, LaurentSeries)), None)
    if ring is None:
        return coeffs
    return [c if isinstance(c, LaurentSeries) else ring(c) for c in coeffs]


def parse_expression(text: str, kind: str = "series", **options):
    """Entry point: kind in {'word', 'series', 'diffeo'}."""
    if kind == "word":
        return parse_word(text, options.get("algebra"))
    if kind == "series":
        return parse_series(text, options.get("x_degree", 8), options.get("eps_high", 6))
    if kind == "diffeo":
        return parse_diffeo(
            text, options.get("order"), options.get("x_degree", 8), options.get("eps_high", 6)
        )
    raise ValueError(f"kind must be word, series or diffeo, not {kind!r}")


def default_word_algebra():
    return free_commutative_monomials()
