"""The Faa di Bruno Hopf algebra and formal identity-tangent diffeomorphisms.

A monomial a_{n1} a_{n2} ... is a sorted tuple of positive indices, the empty
tuple being the unit.  A diffeomorphism f(x) = x + sum_n f_n x^(n+1) is stored
by its coefficients f_1..f_N.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator, Sequence

from .errors import InadmissibleDecompositionError, ModelHypothesisError, RingMismatchError
from .hopfmaps import BialgebraModel, MapRule, character
from .qsh import TensorElement, factorizations
from .rings import INF, MS, QQ, LaurentRing, LaurentSeries, PolynomialRing, TruncatedPoly, agree, format_rational, ring_of


def _acc(out: dict, key, coeff):
    c = out.get(key, 0) + coeff
    if c:
        out[key] = c
    else:
        out.pop(key, None)


def monomial(*indices: int) -> tuple:
    """a_{n1} ... a_{ns} in normal form; a_0 is the unit and is dropped."""
    if any(n < 0 for n in indices):
        raise ValueError("generator indices are nonnegative")
    return tuple(sorted(n for n in indices if n))


def monomial_degree(m: tuple) -> int:
    return sum(m)


def render_monomial(m: tuple) -> str:
    if not m:
        return "1"
    out = []
    for n, grp in itertools.groupby(m):
        k = len(list(grp))
        out.append(f"a{n}" if k == 1 else f"a{n}^{k}")
    return "*".join(out)


def compositions(n: int) -> Iterator[tuple]:
    """All ordered sequences of positive integers summing to n."""
    if n < 1:
        return
    for k in range(n):
        for cuts in itertools.combinations(range(1, n), k):
            bounds = (0,) + cuts + (n,)
            yield tuple(bounds[i + 1] - bounds[i] for i in range(len(bounds) - 1))


def weak_compositions(m: int, parts: int) -> Iterator[tuple]:
    """Sequences of ``parts`` nonnegative integers summing to m."""
    if parts == 0:
        if m == 0:
            yield ()
        return
    if parts == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in weak_compositions(m - first, parts - 1):
            yield (first,) + rest


def partitions(n: int, largest: int | None = None) -> Iterator[tuple]:
    """Monomials of degree n (as sorted tuples)."""
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield tuple(sorted((k,) + rest))


# ---------------------------------------------------------------------------
# coproducts


def _coproduct_dict(n: int) -> dict:
    out: dict = {}
    for k in range(n + 1):
        for ls in weak_compositions(n - k, k + 1):
            _acc(out, (monomial(k), monomial(*ls)), 1)
    return out


def fdb_coproduct(n: int) -> TensorElement:
    """Delta(a_n) = sum_{k=0}^{n} sum_{l0+...+lk = n-k} a_k (x) a_{l0}...a_{lk}."""
    if n < 0:
        raise ValueError("n >= 0")
    return TensorElement(_coproduct_dict(n), render_monomial)


def fdb_reduced_coproduct(n: int) -> TensorElement:
    """Delta'(a_n) = sum_{k=1}^{n-1} sum_{comp of n-k} binom(k+1, len) a_k (x) a_comp."""
    if n < 1:
        raise ValueError("n >= 1")
    out: dict = {}
    for k in range(1, n):
        for parts in compositions(n - k):
            if len(parts) <= k + 1:
                _acc(out, ((k,), monomial(*parts)), comb(k + 1, len(parts)))
    return TensorElement(out, render_monomial)


class FdBModel(BialgebraModel):
    """Polynomial algebra Q[a1, a2, ...] with the Faa di Bruno coproduct."""

    unit = ()
    commutative = True

    def __repr__(self):
        return "FdBModel()"

    def grade(self, m) -> int:
        return sum(m)

    def product(self, m1, m2) -> dict:
        return {tuple(sorted(m1 + m2)): Fraction(1)}

    def factor(self, m):
        return m

    def coproduct(self, m) -> dict:
        cache = self.__dict__.setdefault("_cop_cache", {})
        hit = cache.get(m)
        if hit is not None:
            return hit
        if not m:
            hit = {((), ()): Fraction(1)}
        elif len(m) == 1:
            hit = _coproduct_dict(m[0])
        else:
            hit = {}
            left = self.coproduct(m[:1])
            right = self.coproduct(m[1:])
            for (x1, y1), c1 in left.items():
                for (x2, y2), c2 in right.items():
                    _acc(hit, (tuple(sorted(x1 + x2)), tuple(sorted(y1 + y2))), c1 * c2)
        cache[m] = hit
        return hit

    def basis(self, degree: int) -> list:
        return sorted(partitions(degree))

    def render(self, m) -> str:
        return render_monomial(m)


FDB = FdBModel()


# ---------------------------------------------------------------------------
# iota and the lambda coefficients


def _norm(blocks) -> int:
    return sum(sum(b) for b in blocks)


def lambda_coeff(decomposition: Sequence[Sequence[int]]) -> int:
    """prod_{i>=2} binom(|n^1...n^(i-1)| + 1, len(n^i)); the first block must have length one."""
    blocks = [tuple(b) for b in decomposition]
    if not blocks or len(blocks[0]) != 1:
        raise InadmissibleDecompositionError("the first block of a decomposition must have length one")
    if any(not b or min(b) < 1 for b in blocks):
        raise InadmissibleDecompositionError("blocks are nonempty sequences of positive integers")
    out = 1
    for i in range(1, len(blocks)):
        out *= comb(_norm(blocks[:i]) + 1, len(blocks[i]))
    return out


def admissible_decompositions(parts: tuple) -> Iterator[tuple]:
    """Splits of ``parts`` into consecutive nonempty blocks, the first of length one."""
    head = (parts[:1],)
    if len(parts) == 1:
        yield head
        return
    for rest in factorizations(parts[1:]):
        yield head + rest


def _decomposition_terms(n: int) -> Iterator[tuple[tuple, tuple, int]]:
    """(composition, decomposition, lambda) over all compositions of n."""
    for parts in compositions(n):
        for dec in admissible_decompositions(parts):
            yield parts, dec, lambda_coeff(dec)


def fdb_iota(n: int) -> TensorElement:
    """sum over compositions and admissible decompositions of lambda a_{n^1} (x) ... (x) a_{n^t}."""
    if n < 1:
        raise ValueError("n >= 1")
    out: dict = {}
    for _, dec, lam in _decomposition_terms(n):
        _acc(out, tuple(monomial(*b) for b in dec), lam)
    return TensorElement(out, render_monomial)


def inverse_coefficients(n: int) -> dict:
    """Coefficient of f_{n1}...f_{ns} in the n-th coefficient of the compositional inverse."""
    out: dict = {}
    for parts, dec, lam in _decomposition_terms(n):
        _acc(out, monomial(*parts), (-1) ** len(dec) * lam)
    return out


# ---------------------------------------------------------------------------
# diffeomorphisms


@dataclass(frozen=True)
class Diffeo:
    """f(x) = x + sum_{n=1}^{N} f_n x^(n+1), known up to x^(N+1)."""

    coeffs: tuple
    ring: object = QQ

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.ring(c) if self.ring is QQ else c for c in self.coeffs))

    @classmethod
    def of(cls, coeffs: Sequence, ring=None) -> "Diffeo":
        coeffs = tuple(coeffs)
        if ring is None:
            ring = QQ
            for c in coeffs:
                r = ring_of(c)
                if r != QQ:
                    ring = r
                    break
        return cls(tuple(c if ring_of(c) == ring else ring(c) for c in coeffs), ring)

    @classmethod
    def identity(cls, order: int, ring=QQ) -> "Diffeo":
        return cls((ring.zero,) * order, ring)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int):
        """f_n for n >= 1 (f_0 = 1)."""
        if n == 0:
            return self.ring.one
        return self.coeffs[n - 1]

    def series(self) -> list:
        """Power-series coefficients c_0..c_{N+1} of f(x)."""
        return [self.ring.zero, self.ring.one] + list(self.coeffs)

    def agrees(self, other: "Diffeo") -> bool:
        return self.order == other.order and all(agree(a, b) for a, b in zip(self.coeffs, other.coeffs))

    def is_identity(self) -> bool:
        return all(agree(c, self.ring.zero) for c in self.coeffs)

    def __str__(self):
        parts = ["x"]
        for n, c in enumerate(self.coeffs, start=1):
            q = c if self.ring is QQ else _rational_value(c)
            if q is None:
                parts.append(f" + ({c})*x^{n + 1}")
                continue
            if not q:
                continue
            a = abs(q)
            if a == 1:
                body = f"x^{n + 1}"
            elif a.denominator == 1:
                body = f"{a}*x^{n + 1}"
            else:
                body = f"({format_rational(a)})*x^{n + 1}"
            parts.append((" - " if q < 0 else " + ") + body)
        return "".join(parts)


def _rational_value(c):
    """The rational value of an exact constant series, else None."""
    if not isinstance(c, LaurentSeries) or not c.is_exact:
        return None
    items = c.items()
    if not items:
        return Fraction(0)
    if len(items) != 1 or items[0][0] != 0:
        return None
    q = items[0][1]
    if isinstance(q, TruncatedPoly):
        return q.constant_term if q.is_constant() else None
    return q


def _poly_mul(p: list, q: list, top: int, zero) -> list:
    out = [zero] * (top + 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j in range(min(len(q), top + 1 - i)):
            b = q[j]
            if b:
                out[i + j] = out[i + j] + a * b
    return out


def diffeo_compose(f: Diffeo, g: Diffeo) -> Diffeo:
    """f o g by Horner substitution: f(y) = y(1 + y(f1 + y(f2 + ... + y f_N)))."""
    if f.order != g.order:
        raise ValueError("diffeos of different truncation orders")
    if f.ring != g.ring:
        raise RingMismatchError(f"{f.ring!r} vs {g.ring!r}")
    N = f.order
    top = N + 1
    zero = f.ring.zero
    gs = g.series()
    acc = [zero] * (top + 1)
    for n in range(N, -1, -1):
        acc = _poly_mul(acc, gs, top, zero)
        acc[0] = acc[0] + f[n]
    acc = _poly_mul(acc, gs, top, zero)
    return Diffeo(tuple(acc[2:]), f.ring)


def diffeo_inverse(f: Diffeo) -> Diffeo:
    """g_n = sum over compositions of n of (sum_dec (-1)^t lambda) f_{n1}...f_{ns}."""
    out = []
    for n in range(1, f.order + 1):
        total = f.ring.zero
        for parts, c in inverse_coefficients(n).items():
            term = f.ring.one
            for k in parts:
                term = term * f[k]
            total = total + term * c
        out.append(total)
    return Diffeo(tuple(out), f.ring)


def diffeo_inverse_by_substitution(f: Diffeo) -> Diffeo:
    """Solve g o f = id order by order."""
    N = f.order
    top = N + 1
    zero = f.ring.zero
    fs = f.series()
    powers = [None, fs]
    for k in range(2, top + 1):
        powers.append(_poly_mul(powers[-1], fs, top, zero))
    g = []
    for n in range(1, N + 1):
        acc = f[n]
        for k in range(1, n):
            acc = acc + g[k - 1] * powers[k + 1][n + 1]
        g.append(-acc)
    return Diffeo(tuple(g), f.ring)


def fdb_character(f: Diffeo, name: str = "phi") -> MapRule:
    """The character a_n -> f_n."""
    return character(FDB, f.ring, lambda n: f[n], name=name)


def diffeo_birkhoff(f: Diffeo, split=MS) -> tuple[Diffeo, Diffeo]:
    """(f_-, f_+) with f_- o f = f_+, from the lambda-weighted nested projections."""
    if not getattr(f.ring, "commutative", False):
        raise ModelHypothesisError("Birkhoff factorization of diffeomorphisms needs a commutative ring")
    minus, plus = [], []
    for n in range(1, f.order + 1):
        pm = pp = f.ring.zero
        for _, dec, lam in _decomposition_terms(n):
            y = None
            for block in dec:
                fb = f.ring.one
                for k in block:
                    fb = fb * f[k]
                y = fb if y is None else split.minus(y) * fb
            t = len(dec)
            sp = lam if t % 2 else -lam
            pp = pp + split.plus(y) * sp
            pm = pm + split.minus(y) * (-sp)
        minus.append(pm)
        plus.append(pp)
    return Diffeo(tuple(minus), f.ring), Diffeo(tuple(plus), f.ring)


# ---------------------------------------------------------------------------
# the one-resonance dynamical example


def dynamics_coefficient(b: Sequence, x_degree: int, eps_high: int):
    """a(x; e) = -b0/e - sum_{n>=1} b_n x^n / (n(1+e) + e) as a Laurent series over Q[x]."""
    X = PolynomialRing(["x"], x_degree)
    R = LaurentRing(X, eps_high)
    b = [Fraction(c) for c in b]
    coeffs: dict = {}
    if b and b[0]:
        coeffs[-1] = X.constant(-b[0])
    exact = True
    for n, bn in enumerate(b[1:], start=1):
        if not bn or n > x_degree:
            continue
        exact = False
        # 1/(n + (n+1)e) = (1/n) sum_k (-(n+1)/n)^k e^k
        r = Fraction(-(n + 1), n)
        for k in range(eps_high + 1):
            term = X.monomial((n,), -bn * r**k / n)
            coeffs[k] = coeffs[k] + term if k in coeffs else term
    return R.series(coeffs, high=INF if exact else eps_high)


def dynamics_diffeo(b: Sequence, x_degree: int, z_order: int, eps_high: int):
    """(a, f) with f(z) = z + sum_n a^n z^(n+1) truncated at order z_order."""
    a = dynamics_coefficient(b, x_degree, eps_high)
    coeffs = []
    p = a.ring.one
    for _ in range(z_order):
        p = p * a
        coeffs.append(p)
    return a, Diffeo(tuple(coeffs), a.ring)
