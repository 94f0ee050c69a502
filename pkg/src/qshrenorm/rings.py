"""Exact coefficient arithmetic.

Three kinds of ring elements are used throughout the package:

* rationals, as :class:`fractions.Fraction` (plain ``int`` is accepted on input);
* :class:`TruncatedPoly`, polynomials in one or two variables truncated at a
  total degree;
* :class:`LaurentSeries`, Laurent series in ``e`` (the regulator epsilon) with a
  validity window, over either of the above.

A series knows up to which exponent its coefficients are known (``high``).
``high`` may be ``math.inf`` for exact Laurent polynomials.  Arithmetic
propagates the window the way formal power series do: ``O(e^(h+1))`` times a
series of valuation ``v`` is ``O(e^(h+1+v))``.

Values are immutable and every operation is pure.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .errors import EssentialSingularityError, PrecisionError, RingMismatchError

INF = math.inf
DEFAULT_EPS_HIGH = 6
DEFAULT_X_DEGREE = 8


def is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def to_rational(value) -> Fraction:
    if type(value) is Fraction:
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction, str)):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class RationalField:
    """The ground field Q."""

    name = "QQ"
    commutative = True
    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, value) -> Fraction:
        return to_rational(value)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = RationalField()


def ring_of(value):
    if is_scalar(value):
        return QQ
    try:
        return value.ring
    except AttributeError:
        raise TypeError(f"{value!r} is not a ring element") from None


# ---------------------------------------------------------------------------
# truncated polynomials


class PolynomialRing:
    """Q[v1, ..., vk] truncated at total degree ``degree``."""

    commutative = True

    def __init__(self, variables: Iterable[str], degree: int = DEFAULT_X_DEGREE):
        self.variables = tuple(variables)
        if not 1 <= len(self.variables) <= 2:
            raise ValueError("truncated polynomials take one or two variables")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("repeated variable name")
        self.degree = degree

    def __eq__(self, other):
        # the truncation degree is a precision, not part of the ring's identity
        return isinstance(other, PolynomialRing) and other.variables == self.variables

    def __hash__(self):
        return hash(("poly", self.variables))

    def __repr__(self):
        return f"PolynomialRing({self.variables!r}, degree={self.degree})"

    @property
    def zero(self) -> "TruncatedPoly":
        return TruncatedPoly({}, self, self.degree)

    @property
    def one(self) -> "TruncatedPoly":
        return self.constant(1)

    def constant(self, c) -> "TruncatedPoly":
        return TruncatedPoly({(0,) * len(self.variables): to_rational(c)}, self, self.degree)

    def gen(self, name: str) -> "TruncatedPoly":
        exps = tuple(1 if v == name else 0 for v in self.variables)
        if sum(exps) != 1:
            raise KeyError(name)
        return TruncatedPoly({exps: Fraction(1)}, self, self.degree)

    def monomial(self, exps, coeff=1) -> "TruncatedPoly":
        return TruncatedPoly({tuple(exps): to_rational(coeff)}, self, self.degree)

    def __call__(self, value) -> "TruncatedPoly":
        if isinstance(value, TruncatedPoly):
            if value.ring != self:
                raise RingMismatchError(f"{value.ring!r} is not {self!r}")
            return value
        if is_scalar(value):
            return self.constant(value)
        raise RingMismatchError(f"cannot coerce {value!r} into {self!r}")


class TruncatedPoly:
    __slots__ = ("ring", "degree", "_terms")

    def __init__(self, terms: Mapping[tuple, Any], ring: PolynomialRing, degree=None):
        self.ring = ring
        self.degree = ring.degree if degree is None else degree
        nvars = len(ring.variables)
        clean = {}
        for exps, c in terms.items():
            exps = tuple(exps)
            if len(exps) != nvars or min(exps) < 0:
                raise ValueError(f"bad exponent vector {exps}")
            if sum(exps) > self.degree:
                continue
            c = to_rational(c)
            if c:
                clean[exps] = c
        self._terms = clean

    # -- access
    def terms(self) -> dict:
        return dict(self._terms)

    def coefficient(self, exps) -> Fraction:
        exps = tuple(exps)
        if sum(exps) > self.degree:
            raise PrecisionError(f"degree {sum(exps)} is beyond truncation {self.degree}")
        return self._terms.get(exps, Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.ring.variables), Fraction(0))

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def max_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def __bool__(self):
        return bool(self._terms)

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, TruncatedPoly):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring!r} vs {other.ring!r}")
            return other
        if is_scalar(other):
            return TruncatedPoly({(0,) * len(self.ring.variables): other}, self.ring, INF)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return TruncatedPoly(out, self.ring, min(self.degree, other.degree))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedPoly({e: -c for e, c in self._terms.items()}, self.ring, self.degree)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_scalar(other):
            return TruncatedPoly({e: c * other for e, c in self._terms.items()}, self.ring, self.degree)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        deg = min(self.degree, other.degree)
        out: dict = {}
        for e1, c1 in self._terms.items():
            d1 = sum(e1)
            for e2, c2 in other._terms.items():
                if d1 + sum(e2) > deg:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return TruncatedPoly(out, self.ring, deg)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncatedPoly({(0,) * len(self.ring.variables): 1}, self.ring, self.degree)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "TruncatedPoly":
        c0 = self.constant_term
        if not c0:
            raise ZeroDivisionError("polynomial with zero constant term is not invertible")
        if self.degree == INF:
            if self.is_constant():
                return TruncatedPoly({(0,) * len(self.ring.variables): 1 / c0}, self.ring, INF)
            raise PrecisionError("inverse of an exact non-constant polynomial needs a truncation degree")
        # 1/(c0(1 - u)) = (1/c0) sum u^k, u nilpotent modulo degree
        u = 1 - self * (1 / c0)
        total = self.ring.one if self.degree >= 0 else self.ring.zero
        total = TruncatedPoly(total._terms, self.ring, self.degree)
        power = total
        for _ in range(int(self.degree)):
            power = power * u
            if not power:
                break
            total = total + power
        return total * (1 / c0)

    def __truediv__(self, other):
        if is_scalar(other):
            return self * (1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if is_scalar(other):
            other = TruncatedPoly({(0,) * len(self.ring.variables): other}, self.ring, INF)
        if not isinstance(other, TruncatedPoly) or other.ring != self.ring:
            return NotImplemented
        deg = min(self.degree, other.degree)
        keys = {e for e in self._terms if sum(e) <= deg} | {e for e in other._terms if sum(e) <= deg}
        return all(self._terms.get(e, 0) == other._terms.get(e, 0) for e in keys)

    def __hash__(self):
        return hash(self.ring)

    def substitute(self, name: str, value) -> "TruncatedPoly":
        """Evaluate one variable at a rational value."""
        idx = self.ring.variables.index(name)
        value = to_rational(value)
        out: dict = {}
        for e, c in self._terms.items():
            k = e[:idx] + (0,) + e[idx + 1:]
            out[k] = out.get(k, 0) + c * value ** e[idx]
        return TruncatedPoly(out, self.ring, self.degree)

    def __str__(self):
        if not self._terms:
            return "0"
        keys = sorted(self._terms, key=lambda e: (sum(e), tuple(-x for x in e)))
        parts = []
        for e in keys:
            c = self._terms[e]
            parts.append((c, _monomial_str(self.ring.variables, e)))
        return _join_terms(parts)

    def __repr__(self):
        return f"TruncatedPoly({self}, degree={self.degree})"


def _monomial_str(variables, exps) -> str:
    return "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(variables, exps) if k)


def _join_terms(parts) -> str:
    """Render [(coeff, monomial-string)] as a signed sum."""
    out = []
    for i, (c, mono) in enumerate(parts):
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = format_rational(a)
        elif a == 1:
            body = mono
        else:
            body = f"{format_rational(a)}*{mono}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# Laurent series


class LaurentRing:
    """Laurent series in ``e`` over QQ or a PolynomialRing."""

    def __init__(self, base=QQ, high=DEFAULT_EPS_HIGH):
        self.base = base
        self.high = high

    @property
    def commutative(self):
        return self.base.commutative

    def __eq__(self, other):
        return isinstance(other, LaurentRing) and other.base == self.base

    def __hash__(self):
        return hash(("laurent", self.base))

    def __repr__(self):
        return f"LaurentRing({self.base!r})"

    @property
    def zero(self) -> "LaurentSeries":
        return LaurentSeries({}, INF, self)

    @property
    def one(self) -> "LaurentSeries":
        return LaurentSeries({0: self.base.one}, INF, self)

    def eps(self, k: int = 1, coeff=1) -> "LaurentSeries":
        return LaurentSeries({k: coeff}, INF, self)

    def series(self, coeffs: Mapping[int, Any], high=INF) -> "LaurentSeries":
        return LaurentSeries(coeffs, high, self)

    def __call__(self, value) -> "LaurentSeries":
        if isinstance(value, LaurentSeries):
            if value.ring != self:
                raise RingMismatchError(f"{value.ring!r} is not {self!r}")
            return value
        return LaurentSeries({0: self.base(value)}, INF, self)


class LaurentSeries:
    """sum_{e <= high} c_e eps^e + O(eps^(high+1)), with finitely many stored terms.

    Equality (``==``) is structural: same window and same coefficients.  Use
    :meth:`agrees` to compare two truncations on their common window.
    """

    __slots__ = ("ring", "high", "_c")

    def __init__(self, coeffs: Mapping[int, Any] | None = None, high=INF, ring: LaurentRing | None = None):
        coeffs = coeffs or {}
        if ring is None:
            base = QQ
            for c in coeffs.values():
                if isinstance(c, TruncatedPoly):
                    base = c.ring
                    break
            ring = LaurentRing(base)
        self.ring = ring
        if high != INF:
            high = int(high)
        self.high = high
        base = ring.base
        clean = {}
        for e, c in coeffs.items():
            e = int(e)
            if e > high:
                continue
            c = base(c)
            if c:
                clean[e] = c
        self._c = clean

    # -- introspection
    @property
    def low(self):
        """Smallest stored exponent (None for the zero series)."""
        return min(self._c) if self._c else None

    @property
    def valuation(self):
        if self._c:
            return min(self._c)
        return self.high + 1

    @property
    def is_exact(self) -> bool:
        return self.high == INF

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def coeff(self, e: int):
        if e > self.high:
            raise PrecisionError(f"coefficient of e^{e} requested but series is only known up to e^{self.high}")
        return self._c.get(e, self.ring.base.zero)

    __getitem__ = coeff

    def exponents(self) -> list[int]:
        return sorted(self._c)

    def items(self):
        return [(e, self._c[e]) for e in sorted(self._c)]

    def coefficients(self) -> dict:
        return dict(self._c)

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, LaurentSeries):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring!r} vs {other.ring!r}")
            return other
        if is_scalar(other) or isinstance(other, TruncatedPoly):
            if isinstance(other, TruncatedPoly) and other.ring != self.ring.base:
                raise RingMismatchError(f"{other.ring!r} is not the coefficient ring {self.ring.base!r}")
            return LaurentSeries({0: other}, INF, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._c)
        for e, c in other._c.items():
            out[e] = out[e] + c if e in out else c
        return LaurentSeries(out, min(self.high, other.high), self.ring)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries({e: -c for e, c in self._c.items()}, self.high, self.ring)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _scale(self, k):
        if not k:
            return LaurentSeries({}, INF, self.ring)
        return LaurentSeries({e: c * k for e, c in self._c.items()}, self.high, self.ring)

    def __mul__(self, other):
        if is_scalar(other):
            return self._scale(Fraction(other))
        if isinstance(other, TruncatedPoly):
            if other.ring != self.ring.base:
                raise RingMismatchError(f"{other.ring!r} is not the coefficient ring {self.ring.base!r}")
            return LaurentSeries({e: c * other for e, c in self._c.items()}, self.high, self.ring)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        high = min(self.high + other.valuation, other.high + self.valuation)
        out: dict = {}
        for e1, c1 in self._c.items():
            for e2, c2 in other._c.items():
                e = e1 + e2
                if e > high:
                    continue
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return LaurentSeries(out, high, self.ring)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by eps^k."""
        return LaurentSeries({e + k: c for e, c in self._c.items()}, self.high + k, self.ring)

    def truncate(self, high) -> "LaurentSeries":
        return LaurentSeries(self._c, min(self.high, high), self.ring)

    def inverse(self, high=None) -> "LaurentSeries":
        """Multiplicative inverse; the leading coefficient must be a unit.

        Exact inputs need a truncation order (``high``, default 6).
        """
        if not self._c:
            raise ZeroDivisionError("inverse of a series that vanishes on its window")
        v = self.valuation
        target = self.high - 2 * v
        if high is not None:
            target = min(target, high)
        elif target == INF:
            target = DEFAULT_EPS_HIGH
        lead = self._c[v]
        inv_lead = lead.inverse() if isinstance(lead, TruncatedPoly) else 1 / lead
        n = int(target + v)  # number of relative orders needed
        unit = [self._c.get(v + i, 0) for i in range(max(n, 0) + 1)]
        g = [inv_lead]
        for k in range(1, n + 1):
            acc = 0
            for i in range(1, k + 1):
                if unit[i]:
                    acc = unit[i] * g[k - i] + acc
            g.append(-(inv_lead * acc) if acc else 0 * inv_lead)
        return LaurentSeries({k - v: c for k, c in enumerate(g)}, target, self.ring)

    def __truediv__(self, other):
        if is_scalar(other):
            return self._scale(1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- Rota-Baxter projections
    def minus_part(self) -> "LaurentSeries":
        """p_-: the pole part.  Exact as soon as every negative exponent is known."""
        high = INF if self.high >= -1 else self.high
        return LaurentSeries({e: c for e, c in self._c.items() if e < 0}, high, self.ring)

    def plus_part(self) -> "LaurentSeries":
        return LaurentSeries({e: c for e, c in self._c.items() if e >= 0}, self.high, self.ring)

    # -- comparison
    def __eq__(self, other):
        if is_scalar(other) or isinstance(other, TruncatedPoly):
            other = self._coerce(other)
        if not isinstance(other, LaurentSeries) or other.ring != self.ring:
            return NotImplemented
        if self.high != other.high or set(self._c) != set(other._c):
            return False
        return all(self._c[e] == other._c[e] for e in self._c)

    def __hash__(self):
        return hash(("series", self.high, tuple((e, hash(self._c[e])) for e in sorted(self._c))))

    def agrees(self, other, upto=None) -> bool:
        """True iff both truncations have the same coefficients on the common window."""
        other = self._coerce(other)
        h = min(self.high, other.high)
        if upto is not None:
            h = min(h, upto)
        zero = self.ring.base.zero
        for e in set(self._c) | set(other._c):
            if e <= h and self._c.get(e, zero) != other._c.get(e, zero):
                return False
        return True

    # -- rendering
    def __str__(self):
        parts = []
        for e in sorted(self._c):
            c = self._c[e]
            mono = "" if e == 0 else ("e" if e == 1 else f"e^{e}")
            if isinstance(c, TruncatedPoly) and not c.is_constant():
                terms = c.terms()
                if len(terms) == 1:
                    (exps, q), = terms.items()
                    body = _monomial_str(c.ring.variables, exps)
                    parts.append((q, body if not mono else f"{body}*{mono}"))
                else:
                    body = f"({c})"
                    parts.append((1, body if not mono else f"{body}*{mono}"))
            else:
                q = c.constant_term if isinstance(c, TruncatedPoly) else c
                parts.append((q, mono))
        text = _join_terms(parts) if parts else "0"
        if self.high != INF:
            text += f" + O(e^{self.high + 1})"
        return text

    def __repr__(self):
        return f"LaurentSeries({self})"


def agree(a, b) -> bool:
    """Window-aware equality for any pair of ring elements."""
    if isinstance(a, LaurentSeries):
        return a.agrees(b)
    if isinstance(b, LaurentSeries):
        return b.agrees(a)
    return a == b


# ---------------------------------------------------------------------------
# the idempotent Rota-Baxter splitting


class MinimalSubtraction:
    """p_- keeps exponents < 0, p_+ keeps exponents >= 0."""

    name = "minimal-subtraction"

    def minus(self, x):
        if isinstance(x, LaurentSeries):
            return x.minus_part()
        return 0 * x

    def plus(self, x):
        if isinstance(x, LaurentSeries):
            return x.plus_part()
        return x

    def in_minus(self, x) -> bool:
        if isinstance(x, LaurentSeries):
            return all(e < 0 for e in x.exponents())
        return not x

    def in_plus(self, x) -> bool:
        if isinstance(x, LaurentSeries):
            return all(e >= 0 for e in x.exponents())
        return True

    def __repr__(self):
        return "MinimalSubtraction()"


MS = MinimalSubtraction()


def laurent_project(s: LaurentSeries, sign: str) -> LaurentSeries:
    if sign == "minus":
        return s.minus_part()
    if sign == "plus":
        return s.plus_part()
    raise ValueError(f"sign must be 'minus' or 'plus', not {sign!r}")


def laurent_exp(c, e: int, high=DEFAULT_EPS_HIGH, ring: LaurentRing | None = None) -> LaurentSeries:
    """exp(c * eps^e) truncated at eps^high."""
    if e < 0:
        raise EssentialSingularityError("exp of a pole is not a Laurent series")
    if ring is None:
        ring = LaurentRing(c.ring if isinstance(c, TruncatedPoly) else QQ)
    c = ring.base(c)
    if not c:
        return ring.one
    if e == 0:
        raise ValueError("exp of a nonzero constant is not rational")
    out = {}
    term = ring.base.one
    k = 0
    while e * k <= high:
        out[e * k] = term
        k += 1
        term = term * c * Fraction(1, k)
    return LaurentSeries(out, high, ring)


def ring_arith(a, b=None, op: str = "add"):
    """Uniform entry point: op in {add, mul, neg, scalar-mul}.

    Rationals embed into every ring and a coefficient ring embeds into its
    Laurent series; any other combination raises RingMismatchError.
    """
    if op == "neg":
        return -a
    if op == "scalar-mul":
        if not is_scalar(a):
            raise TypeError("scalar-mul expects a rational first operand")
        return b * Fraction(a)
    if op not in ("add", "mul"):
        raise ValueError(f"unknown op {op!r}")
    try:
        return a + b if op == "add" else a * b
    except TypeError:
        raise RingMismatchError(f"{ring_of(a)!r} vs {ring_of(b)!r}") from None


def rb_identity_check(x, y, split=MS) -> bool:
    """Weight -1 Rota-Baxter identity for p_- on the common valid window."""
    pm = split.minus
    lhs = pm(x) * pm(y)
    rhs = pm(x * pm(y)) + pm(pm(x) * y) - pm(x * y)
    return agree(lhs, rhs)
