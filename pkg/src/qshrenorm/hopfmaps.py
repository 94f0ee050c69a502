"""Linear maps from a conilpotent bialgebra into an algebra.

Convolution, inverses, Bogoliubov's recursion, closed-form Birkhoff
factorizations and the semigroup action of maps on QSh(A), all generic over a
:class:`BialgebraModel`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .errors import ConilpotencyError, ModelHypothesisError, RingMismatchError
from .qsh import (
    RingAlgebra,
    StructureConstantAlgebra,
    TensorElement,
    factorizations,
    qsh_words,
    render_word,
)
from .rings import MS, agree, to_rational


def _acc(out: dict, key, coeff):
    c = out.get(key, 0) + coeff
    if c:
        out[key] = c
    else:
        out.pop(key, None)


class BialgebraModel:
    """A graded conilpotent bialgebra with a basis of hashable elements.

    Subclasses provide ``unit``, ``grade``, ``product``, ``coproduct``,
    ``basis`` and ``render``.  Combinations are plain dicts basis -> rational.
    """

    unit = None
    commutative = True
    deconcatenation = False

    def grade(self, b) -> int:
        raise NotImplementedError

    def product(self, b1, b2) -> dict:
        raise NotImplementedError

    def coproduct(self, b) -> dict:
        raise NotImplementedError

    def basis(self, degree: int) -> list:
        raise NotImplementedError

    def render(self, b) -> str:
        return repr(b)

    def factor(self, b):
        """Generators whose product is ``b``, or None if the basis is not monomial."""
        return None

    def counit(self, b) -> int:
        return 1 if b == self.unit else 0

    def basis_upto(self, degree: int) -> list:
        out = []
        for d in range(degree + 1):
            out.extend(self.basis(d))
        return out

    def reduced_coproduct(self, b) -> dict:
        cache = self.__dict__.setdefault("_red_cache", {})
        hit = cache.get(b)
        if hit is None:
            hit = {}
            for (x, y), c in self.coproduct(b).items():
                if x != self.unit and y != self.unit:
                    _acc(hit, (x, y), c)
            cache[b] = hit
        return hit

    def reduced_iterated(self, b, k: int) -> dict:
        """Delta'^[k](b) as a dict of k-tuples; k = 1 is the identity."""
        if k < 1:
            raise ValueError("iterated reduced coproduct needs k >= 1")
        if b == self.unit:
            raise ValueError("the reduced coproduct is defined on the kernel of the counit")
        cache = self.__dict__.setdefault("_iter_cache", {})
        key = (b, k)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if k == 1:
            hit = {(b,): Fraction(1)}
        else:
            hit = {}
            for t, c in self.reduced_iterated(b, k - 1).items():
                for (x, y), c2 in self.reduced_coproduct(t[0]).items():
                    _acc(hit, (x, y) + t[1:], c * c2)
        cache[key] = hit
        return hit

    def iterated_coproduct(self, b, n: int) -> dict:
        """Delta^[n](b) computed directly as (Delta (x) Id ...) o Delta^[n-1]."""
        if n < 1:
            raise ValueError("n >= 1")
        cur = {(b,): Fraction(1)}
        for _ in range(n - 1):
            nxt: dict = {}
            for t, c in cur.items():
                for (x, y), c2 in self.coproduct(t[0]).items():
                    _acc(nxt, (x, y) + t[1:], c * c2)
            cur = nxt
        return cur

    def nilpotent_terms(self, b) -> Iterable[tuple[int, dict]]:
        """(k, Delta'^[k](b)) for k = 1..grade(b); checks that the next one vanishes."""
        g = self.grade(b)
        for k in range(1, g + 1):
            yield k, self.reduced_iterated(b, k)
        if self.reduced_iterated(b, g + 1):
            raise ConilpotencyError(f"Delta'^[{g + 1}] does not vanish on {self.render(b)}")

    def multiply(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for b1, c1 in x.items():
            for b2, c2 in y.items():
                for b, c in self.product(b1, b2).items():
                    _acc(out, b, c1 * c2 * c)
        return out

    def tensor(self, terms: dict) -> TensorElement:
        return TensorElement(terms, self.render)


class QShModel(BialgebraModel):
    """QSh(A) with words as basis, quasi-shuffle product and deconcatenation."""

    unit = ()
    deconcatenation = True

    def __init__(self, algebra, alphabet: Iterable | None = None):
        self.algebra = algebra
        if alphabet is None:
            alphabet = getattr(algebra, "basis", None)
        self.alphabet = None if alphabet is None else tuple(alphabet)
        self.commutative = algebra.commutative

    def __repr__(self):
        return f"QShModel({self.algebra!r})"

    def grade(self, w) -> int:
        return len(w)

    def product(self, u, v) -> dict:
        return qsh_words(self.algebra, u, v)

    def coproduct(self, w) -> dict:
        return {(w[:i], w[i:]): Fraction(1) for i in range(len(w) + 1)}

    def reduced_coproduct(self, w) -> dict:
        return {(w[:i], w[i:]): Fraction(1) for i in range(1, len(w))}

    def reduced_iterated(self, w, k: int) -> dict:
        if k < 1:
            raise ValueError("iterated reduced coproduct needs k >= 1")
        if not w:
            raise ValueError("the reduced coproduct is defined on the kernel of the counit")
        return {f: Fraction(1) for f in factorizations(w, k)}

    def basis(self, degree: int) -> list:
        if self.alphabet is None:
            raise ModelHypothesisError("this algebra has no finite alphabet to enumerate")
        return list(itertools.product(self.alphabet, repeat=degree))

    def render(self, w) -> str:
        return render_word(w, self.algebra)


def antipode_general(h, model: BialgebraModel) -> dict:
    """S(h) = -h - sum S(h') h'' over Delta'(h); S(1) = 1.  Exists by conilpotency."""
    cache = model.__dict__.setdefault("_antipode_cache", {})
    hit = cache.get(h)
    if hit is not None:
        return hit
    if h == model.unit:
        hit = {h: Fraction(1)}
    else:
        hit = {h: Fraction(-1)}
        for (x, y), c in model.reduced_coproduct(h).items():
            for b, k in model.multiply(antipode_general(x, model), {y: Fraction(1)}).items():
                _acc(hit, b, -c * k)
    cache[h] = hit
    return hit


# ---------------------------------------------------------------------------
# maps


class MapRule:
    """A unital linear map H -> A given on basis elements of H^+.

    Values are memoized per basis element.  The unit of H always goes to the
    unit of the target ring.
    """

    def __init__(
        self,
        model: BialgebraModel,
        ring,
        rule: Callable,
        is_character: bool = False,
        name: str = "phi",
    ):
        self.model = model
        self.ring = ring
        self.rule = rule
        self.is_character = is_character
        self.name = name
        self._memo: dict = {}

    def __repr__(self):
        return f"<MapRule {self.name} on {self.model!r}>"

    @property
    def unit_value(self):
        return self.ring.one

    def __call__(self, b):
        if b == self.model.unit:
            return self.ring.one
        hit = self._memo.get(b)
        if hit is None:
            hit = self.rule(b)
            self._memo[b] = hit
        return hit

    def apply(self, combination) -> object:
        """Evaluate on a dict basis -> coefficient (or anything with ``terms()``)."""
        if hasattr(combination, "terms"):
            combination = combination.terms()
        out = self.ring.zero
        for b, c in combination.items():
            v = self(b)
            out = out + (v if c == 1 else v * to_rational(c))
        return out


def _same_ring(f: MapRule, g: MapRule):
    if f.ring != g.ring:
        raise RingMismatchError(f"{f.ring!r} vs {g.ring!r}")
    if f.model is not g.model:
        raise ModelHypothesisError("maps on different bialgebras")


def counit_map(model: BialgebraModel, ring) -> MapRule:
    """u_A o eta: the unit of the convolution algebra."""
    return MapRule(model, ring, lambda b: ring.zero, is_character=True, name="e")


def character(model: BialgebraModel, ring, gen_values, name: str = "phi") -> MapRule:
    """Multiplicative extension of values on the algebra generators."""
    probe = model.factor(model.unit)
    if probe is None:
        raise ModelHypothesisError(f"{model!r} has no monomial basis to extend a character over")
    values = gen_values if callable(gen_values) else gen_values.__getitem__

    def rule(b):
        out = ring.one
        for g in model.factor(b):
            out = out * values(g)
        return out

    return MapRule(model, ring, rule, is_character=True, name=name)


def convolve(f: MapRule, g: MapRule, h) -> object:
    """(f * g)(h) = m o (f (x) g) o Delta(h)."""
    _same_ring(f, g)
    model = f.model
    out = f.ring.zero
    for (x, y), c in model.coproduct(h).items():
        term = f(x) * g(y)
        out = out + (term if c == 1 else term * c)
    return out


def convolution(f: MapRule, g: MapRule) -> MapRule:
    _same_ring(f, g)
    return MapRule(
        f.model,
        f.ring,
        lambda h: convolve(f, g, h),
        is_character=f.is_character and g.is_character and f.model.commutative,
        name=f"({f.name}*{g.name})",
    )


def _mult_chain(f: MapRule, t: tuple):
    out = f(t[0])
    for x in t[1:]:
        out = out * f(x)
    return out


def convolution_inverse(f: MapRule, h) -> object:
    """f^{*-1}(h) = sum_k (-1)^k m^[k] o f^(x)k o Delta'^[k](h), finite by conilpotency."""
    model = f.model
    if h == model.unit:
        return f.ring.one
    out = f.ring.zero
    for k, terms in model.nilpotent_terms(h):
        sign = -1 if k % 2 else 1
        for t, c in terms.items():
            out = out + _mult_chain(f, t) * (sign * c)
    return out


def inverse_map(f: MapRule) -> MapRule:
    return MapRule(
        f.model, f.ring, lambda h: convolution_inverse(f, h), is_character=f.is_character, name=f"{f.name}^-1"
    )


# ---------------------------------------------------------------------------
# the maps j, j^{*-1} and j_+-


def _letter_value(algebra, a):
    return algebra.embed(a)


def eval_j(w: tuple, algebra):
    """j(1) = 1_A, j(a) = a, j(a1...ar) = 0 for r >= 2."""
    ring = algebra.value_ring
    if not w:
        return ring.one
    if len(w) == 1:
        return _letter_value(algebra, w[0])
    return ring.zero


def j_map(model: QShModel) -> MapRule:
    alg = model.algebra
    return MapRule(model, alg.value_ring, lambda w: eval_j(w, alg), name="j")


def eval_j_inverse(w: tuple, algebra):
    """(-1)^s a1 a2 ... as."""
    ring = algebra.value_ring
    out = ring.one
    for a in w:
        out = out * _letter_value(algebra, a)
    return -out if len(w) % 2 else out


def j_inverse_map(model: QShModel) -> MapRule:
    alg = model.algebra
    return MapRule(model, alg.value_ring, lambda w: eval_j_inverse(w, alg), name="j^-1")


def birkhoff_closed_qsh(w: tuple, split=MS, sign: str = "minus", algebra=None):
    """j_+(a1..ar) = (-1)^(r-1) p_+(p_-(...p_-(a1)a2...)ar); j_- has (-1)^r and p_- outside.

    Without ``algebra`` the letters are taken to be ring values already.
    """
    embed = (lambda a: a) if algebra is None or isinstance(algebra, RingAlgebra) else algebra.embed
    if sign not in ("minus", "plus"):
        raise ValueError(f"sign must be 'minus' or 'plus', not {sign!r}")
    if not w:
        if algebra is None:
            raise ValueError("the empty word needs an algebra to name its unit")
        return algebra.value_ring.one
    y = embed(w[0])
    for a in w[1:]:
        y = split.minus(y) * embed(a)
    r = len(w)
    if sign == "plus":
        v = split.plus(y)
        return v if r % 2 else -v
    v = split.minus(y)
    return -v if r % 2 else v


def j_plus_map(model: QShModel, split=MS) -> MapRule:
    alg = model.algebra
    return MapRule(model, alg.value_ring, lambda w: birkhoff_closed_qsh(w, split, "plus", alg), name="j+")


def j_minus_map(model: QShModel, split=MS) -> MapRule:
    alg = model.algebra
    return MapRule(model, alg.value_ring, lambda w: birkhoff_closed_qsh(w, split, "minus", alg), name="j-")


# ---------------------------------------------------------------------------
# Birkhoff factorization


@dataclass
class BirkhoffPair:
    phi_minus: MapRule
    phi_plus: MapRule
    algorithm: str = "recursive"

    def __iter__(self):
        return iter((self.phi_minus, self.phi_plus))


def _prepared(phi: MapRule, split) -> MapRule:
    cache = phi.__dict__.setdefault("_prep", {})
    bar = cache.get(id(split))
    if bar is None:
        model = phi.model

        def rule(h):
            out = phi(h)
            for (x, y), c in model.reduced_coproduct(h).items():
                term = split.minus(bar(x)) * phi(y)
                out = out - (term if c == 1 else term * c)
            return out

        bar = MapRule(model, phi.ring, rule, name=f"{phi.name}bar")
        cache[id(split)] = bar
    return bar


def bogoliubov_prepare(phi: MapRule, h, split=MS):
    """phi_bar(h) = phi(h) - sum p_-(phi_bar(h')) phi(h'') over Delta'(h)."""
    if h == phi.model.unit:
        return phi.ring.one
    return _prepared(phi, split)(h)


def birkhoff_recursive(phi: MapRule, split=MS) -> BirkhoffPair:
    """phi_- = -p_- o phi_bar and phi_+ = p_+ o phi_bar on H^+."""
    bar = _prepared(phi, split)
    minus = MapRule(phi.model, phi.ring, lambda h: -split.minus(bar(h)), phi.is_character, f"{phi.name}-")
    plus = MapRule(phi.model, phi.ring, lambda h: split.plus(bar(h)), phi.is_character, f"{phi.name}+")
    return BirkhoffPair(minus, plus, "recursive")


def birkhoff_closed_words(phi: MapRule, w: tuple, split=MS, sign: str = "minus"):
    """Sum over factorizations x = x^1...x^t of signed nested projections of phi(x^1)...phi(x^t)."""
    if not phi.model.deconcatenation:
        raise ModelHypothesisError("the word formula needs a deconcatenation coproduct")
    if sign not in ("minus", "plus"):
        raise ValueError(f"sign must be 'minus' or 'plus', not {sign!r}")
    if not w:
        return phi.ring.one
    out = phi.ring.zero
    for blocks in factorizations(w):
        y = phi(blocks[0])
        for b in blocks[1:]:
            y = split.minus(y) * phi(b)
        t = len(blocks)
        if sign == "plus":
            v = split.plus(y)
            out = out + v if t % 2 else out - v
        else:
            v = split.minus(y)
            out = out - v if t % 2 else out + v
    return out


def birkhoff_closed(phi: MapRule, split=MS) -> BirkhoffPair:
    minus = MapRule(
        phi.model, phi.ring, lambda w: birkhoff_closed_words(phi, w, split, "minus"), phi.is_character, f"{phi.name}-"
    )
    plus = MapRule(
        phi.model, phi.ring, lambda w: birkhoff_closed_words(phi, w, split, "plus"), phi.is_character, f"{phi.name}+"
    )
    return BirkhoffPair(minus, plus, "closed")


# ---------------------------------------------------------------------------
# iota and the iterated coproduct


def iota_general(h, model: BialgebraModel) -> TensorElement:
    """iota(h) = sum_{k >= 1} Delta'^[k](h), one tensor slot per factor."""
    if h == model.unit:
        raise ValueError("iota is defined on the kernel of the counit")
    out: dict = {}
    for _, terms in model.nilpotent_terms(h):
        for t, c in terms.items():
            _acc(out, t, c)
    return model.tensor(out)


def iterated_coproduct_split(h, n: int, model: BialgebraModel) -> TensorElement:
    """Delta^[n](h) rebuilt from Delta'^[i](h) by inserting units along increasing injections."""
    if n < 1:
        raise ValueError("n >= 1")
    unit = model.unit
    if h == unit:
        return model.tensor({(unit,) * n: 1})
    out: dict = {}
    for i in range(1, min(n, model.grade(h)) + 1):
        terms = model.reduced_iterated(h, i)
        for slots in itertools.combinations(range(n), i):
            for t, c in terms.items():
                full = [unit] * n
                for pos, x in zip(slots, t):
                    full[pos] = x
                _acc(out, tuple(full), c)
    return model.tensor(out)


def qsh_tensor_product(s: TensorElement, t: TensorElement, model: BialgebraModel) -> TensorElement:
    """Quasi-shuffle of tensors over H^+: letters are basis elements, merged with H's product.

    Used to test iota(hh') = iota(h) * iota(h').
    """
    unit = model.unit

    def merge(a, b):
        return {x: c for x, c in model.product(a, b).items() if x != unit}

    memo: dict = {}

    def stuffle(u, v):
        if not u:
            return {v: Fraction(1)}
        if not v:
            return {u: Fraction(1)}
        key = (u, v)
        if key in memo:
            return memo[key]
        out: dict = {}
        for w, c in stuffle(u[1:], v).items():
            _acc(out, (u[0],) + w, c)
        for w, c in stuffle(u, v[1:]).items():
            _acc(out, (v[0],) + w, c)
        tail = stuffle(u[1:], v[1:])
        for x, k in merge(u[0], v[0]).items():
            for w, c in tail.items():
                _acc(out, (x,) + w, k * c)
        memo[key] = out
        return out

    out: dict = {}
    for u, cu in s.terms().items():
        for v, cv in t.terms().items():
            for w, c in stuffle(u, v).items():
                _acc(out, w, cu * cv * c)
    return model.tensor(out)


# ---------------------------------------------------------------------------
# the semigroup of maps on QSh(A)


def _letter_words(algebra, values):
    """Expand a tuple of A-values into (word, coefficient) pairs multilinearly."""
    if isinstance(algebra, RingAlgebra):
        if all(values):
            yield tuple(values), 1
        return
    if not isinstance(algebra, StructureConstantAlgebra):
        raise ModelHypothesisError(f"cannot form words over {algebra!r}")
    pools = [v.terms().items() for v in values]
    for combo in itertools.product(*pools):
        c = Fraction(1)
        for _, k in combo:
            c *= k
        yield tuple(s for s, _ in combo), c


def semigroup_act(f: MapRule, phi: MapRule) -> MapRule:
    """(f . phi)(h) = f(QSh(phi)(iota(h))): push iota(h) through phi letterwise, then apply f."""
    if not isinstance(f.model, QShModel):
        raise ModelHypothesisError("the acting map must live on a quasi-shuffle algebra")
    alg = f.model.algebra
    if f.ring != phi.ring or alg.value_ring != phi.ring:
        raise ModelHypothesisError("only maps with a common target algebra A can be composed")
    model = phi.model

    def rule(h):
        out = phi.ring.zero
        for t, c in iota_general(h, model).terms().items():
            values = [phi(x) for x in t]
            for word, k in _letter_words(alg, values):
                v = f(word)
                kk = c * k
                out = out + (v if kk == 1 else v * kk)
        return out

    return MapRule(model, phi.ring, rule, name=f"({f.name}.{phi.name})")


def semigroup_compose(f: MapRule, g: MapRule) -> MapRule:
    """f . g on maps QSh(A) -> A; associative with unit j."""
    if not isinstance(g.model, QShModel) or not isinstance(f.model, QShModel):
        raise ModelHypothesisError("semigroup_compose takes two maps on quasi-shuffle algebras")
    if g.model.algebra is not f.model.algebra:
        raise ModelHypothesisError("both maps must live on QSh of the same algebra")
    return semigroup_act(f, g)


def check_character(phi: MapRule, pairs: Iterable[tuple], compare=None) -> bool:
    """phi(uv) = phi(u)phi(v) on the given basis pairs."""
    compare = compare or agree
    model = phi.model
    for u, v in pairs:
        lhs = phi.apply(model.product(u, v))
        if not compare(lhs, phi(u) * phi(v)):
            return False
    return True
