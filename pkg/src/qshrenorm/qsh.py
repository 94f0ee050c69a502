"""The quasi-shuffle Hopf algebra QSh(A) over an algebra A.

Words are tuples of letters; a letter is a basis symbol of a
:class:`StructureConstantAlgebra`.  Products of letters inside the
quasi-shuffle recursion go through the algebra's ``mul`` and expand
multilinearly, so every element has a canonical form.

The same code runs over a concrete ring (Laurent series, rationals...) through
:class:`RingAlgebra`, whose letters are ring values.  There the representation
is not canonical (``2a`` and ``a + a`` are different letters) but evaluating a
multilinear map on it is exact, which is all the renormalization code needs.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping

from .errors import ModelHypothesisError, UndefinedHalfProductError
from .rings import QQ, format_rational, to_rational

Word = tuple


class _Unit:
    """The unit 1_A adjoined to a structure-constant algebra."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "1"

    def __reduce__(self):
        return (_Unit, ())


ONE = _Unit()


class StructureConstantAlgebra:
    """An associative algebra given by its product on basis symbols.

    ``mul_rule(a, b)`` returns a mapping symbol -> rational (the expansion of
    ``a *_A b``).  ``basis`` is optional: infinite alphabets (monomials, the
    MZV semigroup) are described by a membership predicate instead.
    """

    def __init__(
        self,
        name: str,
        mul_rule: Callable[[Hashable, Hashable], Mapping],
        commutative: bool = False,
        basis: Iterable | None = None,
        contains: Callable[[Hashable], bool] | None = None,
        grading: Callable[[Hashable], int] | None = None,
        render: Callable[[Hashable], str] = str,
    ):
        self.name = name
        self._rule = mul_rule
        self.commutative = commutative
        self.basis = tuple(basis) if basis is not None else None
        self._contains = contains
        self.grading = grading
        self._render = render
        self._mul_cache: dict = {}
        self._qsh_cache: dict = {}

    def __repr__(self):
        return f"<{self.name} algebra>"

    # ring-descriptor view of A itself (values of j and friends)
    @property
    def value_ring(self):
        return self

    @property
    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    @property
    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, {ONE: 1})

    def contains(self, sym) -> bool:
        if self.basis is not None:
            return sym in self.basis
        if self._contains is not None:
            return self._contains(sym)
        return True

    def check_letter(self, sym):
        if not self.contains(sym):
            raise KeyError(f"{sym!r} is not a basis symbol of {self.name}")
        return sym

    def mul(self, a, b) -> dict:
        if a is ONE:
            return {b: Fraction(1)}
        if b is ONE:
            return {a: Fraction(1)}
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is None:
            raw = self._rule(a, b)
            hit = {s: to_rational(c) for s, c in raw.items() if c}
            self._mul_cache[key] = hit
        return hit

    def element(self, sym, coeff=1) -> "AlgebraElement":
        return AlgebraElement(self, {self.check_letter(sym): coeff})

    def embed(self, letter) -> "AlgebraElement":
        return AlgebraElement(self, {letter: 1})

    def render_letter(self, sym) -> str:
        return "1_A" if sym is ONE else self._render(sym)

    def letter_key(self, sym):
        return self.render_letter(sym)


class AlgebraElement:
    """A finite rational combination of basis symbols (and possibly 1_A)."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, algebra: StructureConstantAlgebra, terms: Mapping):
        self.ring = algebra
        self._terms = {s: to_rational(c) for s, c in terms.items() if c}
        self._hash = None

    @property
    def algebra(self):
        return self.ring

    def terms(self) -> dict:
        return dict(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            if other.ring is not self.ring:
                raise ModelHypothesisError("elements of different algebras")
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraElement(self.ring, {ONE: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for s, c in other._terms.items():
            out[s] = out.get(s, 0) + c
        return AlgebraElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.ring, {s: -c for s, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraElement(self.ring, {s: c * other for s, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        alg = self.ring
        out: dict = {}
        for s1, c1 in self._terms.items():
            for s2, c2 in other._terms.items():
                if s1 is ONE:
                    prod = {s2: 1}
                elif s2 is ONE:
                    prod = {s1: 1}
                else:
                    prod = alg.mul(s1, s2)
                for s, c in prod.items():
                    out[s] = out.get(s, 0) + c1 * c2 * c
        return AlgebraElement(alg, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraElement(self.ring, {ONE: other})
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.ring is other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        alg = self.ring
        keys = sorted(self._terms, key=lambda s: (s is not ONE, "" if s is ONE else alg.render_letter(s)))
        out = []
        for i, s in enumerate(keys):
            c = self._terms[s]
            mono = "1" if s is ONE else alg.render_letter(s)
            neg = c < 0
            a = -c if neg else c
            body = mono if a == 1 else f"{format_rational(a)}*{mono}"
            out.append((("-" if neg else "") if i == 0 else (" - " if neg else " + ")) + body)
        return "".join(out)

    __repr__ = __str__


class RingAlgebra:
    """View a concrete ring (QQ, Laurent series, ...) as the letter algebra of QSh."""

    def __init__(self, ring):
        self.ring = ring
        self.name = f"ring {ring!r}"
        self.commutative = getattr(ring, "commutative", True)
        self._qsh_cache: dict = {}

    def __repr__(self):
        return f"RingAlgebra({self.ring!r})"

    @property
    def value_ring(self):
        return self.ring

    @property
    def zero(self):
        return self.ring.zero

    @property
    def one(self):
        return self.ring.one

    def contains(self, sym) -> bool:
        return True

    def check_letter(self, sym):
        return sym

    def mul(self, a, b) -> dict:
        p = a * b
        return {p: Fraction(1)} if p else {}

    def embed(self, letter):
        return letter

    def render_letter(self, sym) -> str:
        return f"({sym})"

    def letter_key(self, sym):
        return str(sym)


# ---------------------------------------------------------------------------
# built-in letter algebras


def _merge_sorted(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b))


def free_commutative_monomials(generators: Iterable[str] | None = None) -> StructureConstantAlgebra:
    """Free commutative (non-unital) algebra: symbols are sorted tuples of generator names."""
    gens = None if generators is None else frozenset(generators)

    def contains(sym):
        return isinstance(sym, tuple) and len(sym) >= 1 and (gens is None or set(sym) <= gens)

    return StructureConstantAlgebra(
        "free-commutative",
        lambda a, b: {_merge_sorted(a, b): 1},
        commutative=True,
        contains=contains,
        grading=len,
        render=render_monomial,
    )


def free_monoid_algebra(generators: Iterable[str] | None = None) -> StructureConstantAlgebra:
    """Free associative (noncommutative) algebra: symbols are tuples, product concatenates."""
    gens = None if generators is None else frozenset(generators)

    def contains(sym):
        return isinstance(sym, tuple) and len(sym) >= 1 and (gens is None or set(sym) <= gens)

    return StructureConstantAlgebra(
        "free-associative",
        lambda a, b: {a + b: 1},
        commutative=False,
        contains=contains,
        grading=len,
        render=lambda s: "*".join(s),
    )


def render_monomial(sym: tuple) -> str:
    out = []
    for g, grp in itertools.groupby(sym):
        k = len(list(grp))
        out.append(g if k == 1 else f"{g}^{k}")
    return "*".join(out)


def mzv_alphabet() -> StructureConstantAlgebra:
    """Letters [s;r] with s in Z, r in Q_{>0}; [s1;r1]*[s2;r2] = [s1+s2; r1+r2]."""

    def contains(sym):
        return (
            isinstance(sym, tuple)
            and len(sym) == 2
            and isinstance(sym[0], int)
            and to_rational(sym[1]) > 0
        )

    return StructureConstantAlgebra(
        "mzv",
        lambda a, b: {(a[0] + b[0], to_rational(a[1]) + to_rational(b[1])): 1},
        commutative=True,
        contains=contains,
        render=lambda s: f"[{s[0]};{format_rational(s[1])}]",
    )


def idempotent_demo(letter: str = "x") -> StructureConstantAlgebra:
    """One generator with x*x = x."""
    return StructureConstantAlgebra(
        "idempotent-demo", lambda a, b: {letter: 1}, commutative=True, basis=[letter]
    )


def shuffle_algebra(letters: Iterable | None = None) -> StructureConstantAlgebra:
    """Zero product on the letters: QSh of it is the shuffle Hopf algebra."""
    return StructureConstantAlgebra(
        "shuffle",
        lambda a, b: {},
        commutative=True,
        basis=None if letters is None else list(letters),
    )


def semigroup_algebra(table: Mapping[tuple, Hashable], name: str = "semigroup") -> StructureConstantAlgebra:
    """Algebra of a finite semigroup given by its multiplication table."""
    basis = sorted({a for a, _ in table} | {b for _, b in table}, key=str)
    commutative = all(table[a, b] == table[b, a] for a in basis for b in basis)
    return StructureConstantAlgebra(
        name, lambda a, b: {table[a, b]: 1}, commutative=commutative, basis=basis
    )


def check_associative(algebra: StructureConstantAlgebra, triples: Iterable[tuple]) -> bool:
    """Property check of (ab)c = a(bc) on the given basis triples."""
    for a, b, c in triples:
        x, y, z = (algebra.element(s) for s in (a, b, c))
        if (x * y) * z != x * (y * z):
            return False
    return True


def check_commutative(algebra: StructureConstantAlgebra, pairs: Iterable[tuple]) -> bool:
    return all(algebra.mul(a, b) == algebra.mul(b, a) for a, b in pairs)


# ---------------------------------------------------------------------------
# words and linear combinations of words


def render_word(word: Word, algebra) -> str:
    if not word:
        return "1"
    return ".".join(algebra.render_letter(s) for s in word)


def word_sort_key(word: Word, algebra):
    return (len(word), tuple(algebra.letter_key(s) for s in word))


def _accumulate(out: dict, key, coeff):
    c = out.get(key, 0) + coeff
    if c:
        out[key] = c
    else:
        out.pop(key, None)


class QShElement:
    """Finite rational combination of words over one algebra."""

    __slots__ = ("algebra", "_terms")

    def __init__(self, algebra, terms: Mapping[Word, object] | None = None):
        self.algebra = algebra
        clean = {}
        for w, c in (terms or {}).items():
            c = to_rational(c)
            if c:
                clean[tuple(w)] = c
        self._terms = clean

    @classmethod
    def word(cls, algebra, *letters, coeff=1) -> "QShElement":
        return cls(algebra, {tuple(algebra.check_letter(s) for s in letters): coeff})

    @classmethod
    def unit(cls, algebra) -> "QShElement":
        return cls(algebra, {(): 1})

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        keys = sorted(self._terms, key=lambda w: word_sort_key(w, self.algebra))
        return [(w, self._terms[w]) for w in keys]

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def lengths(self) -> set:
        return {len(w) for w in self._terms}

    def coefficient(self, word) -> Fraction:
        return self._terms.get(tuple(word), Fraction(0))

    def _check(self, other):
        if not isinstance(other, QShElement):
            return NotImplemented
        if other.algebra is not self.algebra:
            raise ModelHypothesisError("words over different algebras")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for w, c in other._terms.items():
            _accumulate(out, w, c)
        return QShElement(self.algebra, out)

    def __neg__(self):
        return QShElement(self.algebra, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QShElement(self.algebra, {w: c * other for w, c in self._terms.items()})
        return qsh_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, QShElement):
            return NotImplemented
        return self.algebra is other.algebra and self._terms == other._terms

    __hash__ = None

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for i, (w, c) in enumerate(self.items()):
            neg = c < 0
            a = -c if neg else c
            text = render_word(w, self.algebra)
            body = text if a == 1 else f"{format_rational(a)}*{text}"
            out.append((("-" if neg else "") if i == 0 else (" - " if neg else " + ")) + body)
        return "".join(out)

    def __repr__(self):
        return f"QShElement({self})"

    def to_json(self) -> list:
        alg = self.algebra
        return [
            {"word": [alg.render_letter(s) for s in w], "coeff": format_rational(c)}
            for w, c in self.items()
        ]


class TensorElement:
    """Finite rational combination of tensors (tuples) of basis elements."""

    __slots__ = ("_terms", "render")

    def __init__(self, terms: Mapping[tuple, object] | None = None, render: Callable | None = None):
        clean = {}
        for t, c in (terms or {}).items():
            c = to_rational(c)
            if c:
                clean[tuple(t)] = c
        self._terms = clean
        self.render = render or repr

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        keys = sorted(self._terms, key=lambda t: (len(t), tuple(self.render(x) for x in t)))
        return [(t, self._terms[t]) for t in keys]

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    @property
    def degrees(self) -> set:
        return {len(t) for t in self._terms}

    def coefficient(self, t) -> Fraction:
        return self._terms.get(tuple(t), Fraction(0))

    def __add__(self, other):
        out = dict(self._terms)
        for t, c in other._terms.items():
            _accumulate(out, t, c)
        return TensorElement(out, self.render)

    def __neg__(self):
        return TensorElement({t: -c for t, c in self._terms.items()}, self.render)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        if isinstance(k, (int, Fraction)):
            return TensorElement({t: c * k for t, c in self._terms.items()}, self.render)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for i, (t, c) in enumerate(self.items()):
            neg = c < 0
            a = -c if neg else c
            text = " ⊗ ".join(self.render(x) for x in t)
            body = text if a == 1 else f"{format_rational(a)}*{text}"
            out.append((("-" if neg else "") if i == 0 else (" - " if neg else " + ")) + body)
        return "".join(out)

    def __repr__(self):
        return f"TensorElement({self})"


def _tensor_render(algebra):
    return lambda w: render_word(w, algebra)


# ---------------------------------------------------------------------------
# products


def _as_element(x, algebra=None) -> QShElement:
    if isinstance(x, QShElement):
        return x
    if algebra is None:
        raise TypeError("a bare word needs an algebra")
    return QShElement(algebra, {tuple(x): 1})


def algebra_mul(a: QShElement, b: QShElement) -> QShElement:
    """The product of A on length-one elements."""
    if a.algebra is not b.algebra:
        raise ModelHypothesisError("letters from different algebras")
    if a.lengths() - {1} or b.lengths() - {1}:
        raise ValueError("algebra_mul takes elements supported on length-one words")
    alg = a.algebra
    out: dict = {}
    for (x,), c1 in a._terms.items():
        for (y,), c2 in b._terms.items():
            for s, c in alg.mul(x, y).items():
                _accumulate(out, (s,), c1 * c2 * c)
    return QShElement(alg, out)


def qsh_words(algebra, u: Word, v: Word) -> dict:
    """Quasi-shuffle of two words as a dict word -> coefficient (memoized)."""
    if not u:
        return {v: Fraction(1)}
    if not v:
        return {u: Fraction(1)}
    cache = algebra._qsh_cache
    key = (u, v)
    hit = cache.get(key)
    if hit is not None:
        return hit
    a, b = u[0], v[0]
    out: dict = {}
    for w, c in qsh_words(algebra, u[1:], v).items():
        _accumulate(out, (a,) + w, c)
    for w, c in qsh_words(algebra, u, v[1:]).items():
        _accumulate(out, (b,) + w, c)
    ab = algebra.mul(a, b)
    if ab:
        tail = qsh_words(algebra, u[1:], v[1:])
        for s, k in ab.items():
            for w, c in tail.items():
                _accumulate(out, (s,) + w, k * c)
    cache[key] = out
    return out


def _bilinear(u: QShElement, v: QShElement, kernel) -> QShElement:
    alg = u.algebra
    if v.algebra is not alg:
        raise ModelHypothesisError("words over different algebras")
    out: dict = {}
    for w1, c1 in u._terms.items():
        for w2, c2 in v._terms.items():
            for w, c in kernel(alg, w1, w2).items():
                _accumulate(out, w, c1 * c2 * c)
    return QShElement(alg, out)


def qsh_product(u, v, algebra=None) -> QShElement:
    """The quasi-shuffle (stuffle) product."""
    u = _as_element(u, algebra)
    v = _as_element(v, u.algebra)
    return _bilinear(u, v, qsh_words)


def _prefix(letter, d: dict, scale=1) -> dict:
    return {(letter,) + w: c * scale for w, c in d.items()}


def _prec_words(alg, u, v):
    if not u or not v:
        raise UndefinedHalfProductError("half products are undefined on the empty word")
    return _prefix(u[0], qsh_words(alg, u[1:], v))


def _succ_words(alg, u, v):
    if not u or not v:
        raise UndefinedHalfProductError("half products are undefined on the empty word")
    return _prefix(v[0], qsh_words(alg, u, v[1:]))


def _bullet_words(alg, u, v):
    if not u or not v:
        raise UndefinedHalfProductError("the merge product is undefined on the empty word")
    tail = qsh_words(alg, u[1:], v[1:])
    out: dict = {}
    for s, k in alg.mul(u[0], v[0]).items():
        for w, c in tail.items():
            _accumulate(out, (s,) + w, k * c)
    return out


_HALF = {"<": _prec_words, ">": _succ_words, "*": _bullet_words, ".": _bullet_words}


def tridendriform_products(u, v, which: str, algebra=None) -> QShElement:
    """One of the three pieces of the quasi-shuffle: which in {'<', '>', '*'}.

    ``'*'`` (also ``'.'``) is the merge product that multiplies first letters.
    """
    try:
        kernel = _HALF[which]
    except KeyError:
        raise ValueError(f"which must be one of '<', '>', '*', not {which!r}") from None
    u = _as_element(u, algebra)
    v = _as_element(v, u.algebra)
    return _bilinear(u, v, kernel)


def prec(u, v):
    return tridendriform_products(u, v, "<")


def succ(u, v):
    return tridendriform_products(u, v, ">")


def bullet(u, v):
    return tridendriform_products(u, v, "*")


# ---------------------------------------------------------------------------
# coproducts


def factorizations(word: Word, k: int | None = None) -> Iterator[tuple]:
    """Ordered factorizations of ``word`` into nonempty blocks (exactly ``k`` if given)."""
    n = len(word)
    if n == 0:
        if k in (None, 0):
            yield ()
        return
    if k is not None and not 1 <= k <= n:
        return
    for m in (range(n) if k is None else (k - 1,)):
        for cuts in itertools.combinations(range(1, n), m):
            bounds = (0,) + cuts + (n,)
            yield tuple(word[bounds[i]:bounds[i + 1]] for i in range(len(bounds) - 1))


def deconcat_coproduct(w, algebra=None) -> TensorElement:
    """Sum over all splits of each word into a left and a right factor."""
    u = _as_element(w, algebra)
    out: dict = {}
    for word, c in u._terms.items():
        for i in range(len(word) + 1):
            _accumulate(out, (word[:i], word[i:]), c)
    return TensorElement(out, _tensor_render(u.algebra))


def reduced_coproduct_iter(w, k: int, algebra=None) -> TensorElement:
    """k-fold reduced coproduct: factorizations into k nonempty blocks."""
    if k < 1:
        raise ValueError("iterated reduced coproduct needs k >= 1")
    u = _as_element(w, algebra)
    if () in u._terms:
        raise ValueError("the reduced coproduct is defined on the kernel of the counit")
    out: dict = {}
    for word, c in u._terms.items():
        for f in factorizations(word, k):
            _accumulate(out, f, c)
    return TensorElement(out, _tensor_render(u.algebra))


def iota_word(w, algebra=None) -> TensorElement:
    """Sum of all ordered factorizations into nonempty blocks, one block per tensor slot."""
    u = _as_element(w, algebra)
    out: dict = {}
    for word, c in u._terms.items():
        if not word:
            _accumulate(out, ((),), c)
            continue
        for f in factorizations(word):
            _accumulate(out, f, c)
    return TensorElement(out, _tensor_render(u.algebra))


def counit(w, algebra=None) -> Fraction:
    return _as_element(w, algebra).coefficient(())


def antipode(w, algebra=None) -> QShElement:
    """S(a) = sum_k (-1)^k sum over factorizations a = a^1...a^k of a^1 * ... * a^k."""
    u = _as_element(w, algebra)
    alg = u.algebra
    out: dict = {}
    for word, c in u._terms.items():
        if not word:
            _accumulate(out, (), c)
            continue
        for blocks in factorizations(word):
            prod = {blocks[0]: Fraction(1)}
            for b in blocks[1:]:
                nxt: dict = {}
                for x, cx in prod.items():
                    for y, cy in qsh_words(alg, x, b).items():
                        _accumulate(nxt, y, cx * cy)
                prod = nxt
            sign = -1 if len(blocks) % 2 else 1
            for y, cy in prod.items():
                _accumulate(out, y, sign * c * cy)
    return QShElement(alg, out)


def tensor_product_mul(s: TensorElement, t: TensorElement, algebra) -> TensorElement:
    """(x1 (x) x2)(y1 (x) y2) = (x1 * y1) (x) (x2 * y2), slotwise quasi-shuffle."""
    out: dict = {}
    for tx, cx in s._terms.items():
        for ty, cy in t._terms.items():
            if len(tx) != len(ty):
                raise ValueError("tensor degrees differ")
            slots = [qsh_words(algebra, a, b) for a, b in zip(tx, ty)]
            for combo in itertools.product(*(d.items() for d in slots)):
                key = tuple(w for w, _ in combo)
                coeff = cx * cy
                for _, c in combo:
                    coeff *= c
                _accumulate(out, key, coeff)
    return TensorElement(out, _tensor_render(algebra))


def multiply_tensor(t: TensorElement, algebra) -> QShElement:
    """m: quasi-shuffle the slots of every tensor together."""
    out: dict = {}
    for tx, c in t._terms.items():
        prod = {(): Fraction(1)}
        for block in tx:
            nxt: dict = {}
            for x, cx in prod.items():
                for y, cy in qsh_words(algebra, x, block).items():
                    _accumulate(nxt, y, cx * cy)
            prod = nxt
        for y, cy in prod.items():
            _accumulate(out, y, c * cy)
    return QShElement(algebra, out)


def apply_slotwise(t: TensorElement, maps, algebra) -> TensorElement:
    """(f1 (x) f2 (x) ...)(t) for maps word -> QShElement."""
    out: dict = {}
    for tx, c in t._terms.items():
        images = [f(w)._terms.items() for f, w in zip(maps, tx)]
        for combo in itertools.product(*images):
            coeff = c
            for _, k in combo:
                coeff *= k
            _accumulate(out, tuple(w for w, _ in combo), coeff)
    return TensorElement(out, _tensor_render(algebra))


def antipode_recursive(w, algebra=None) -> QShElement:
    """S(w) = -w - sum over nonempty splits w = w'w'' of S(w') * w''."""
    u = _as_element(w, algebra)
    alg = u.algebra
    memo: dict = {(): {(): Fraction(1)}}

    def s_word(word):
        hit = memo.get(word)
        if hit is not None:
            return hit
        out = {word: Fraction(-1)}
        for i in range(1, len(word)):
            for x, cx in s_word(word[:i]).items():
                for y, cy in qsh_words(alg, x, word[i:]).items():
                    _accumulate(out, y, -cx * cy)
        memo[word] = out
        return out

    out: dict = {}
    for word, c in u._terms.items():
        for y, cy in s_word(word).items():
            _accumulate(out, y, c * cy)
    return QShElement(alg, out)
