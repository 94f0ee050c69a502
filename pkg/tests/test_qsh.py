import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qshrenorm.errors import UndefinedHalfProductError
from qshrenorm.qsh import (
    ONE,
    QShElement,
    antipode,
    antipode_recursive,
    bullet,
    check_associative,
    check_commutative,
    counit,
    deconcat_coproduct,
    factorizations,
    free_commutative_monomials,
    free_monoid_algebra,
    idempotent_demo,
    iota_word,
    mzv_alphabet,
    multiply_tensor,
    prec,
    qsh_product,
    reduced_coproduct_iter,
    render_word,
    shuffle_algebra,
    succ,
    tensor_product_mul,
)

NC = free_monoid_algebra(["a", "b"])
COMM = free_commutative_monomials(["a", "b"])


def words(algebra, letters, max_size=3):
    return st.lists(st.sampled_from(letters), min_size=1, max_size=max_size).map(
        lambda ls: QShElement(algebra, {tuple(ls): 1})
    )


nc_words = words(NC, [("a",), ("b",), ("a", "b")])
comm_words = words(COMM, [("a",), ("b",), ("a", "b")])


def elements(word_strategy):
    return st.lists(st.tuples(word_strategy, st.integers(-3, 3)), min_size=1, max_size=2).map(
        lambda pairs: sum((w * c for w, c in pairs[1:]), pairs[0][0] * pairs[0][1])
    )


# the product ---------------------------------------------------------------


def test_two_letter_example():
    A = free_commutative_monomials()
    a1, a2, b = ("a1",), ("a2",), ("b",)
    got = qsh_product(QShElement.word(A, a1, a2), QShElement.word(A, b))
    assert got.terms() == {
        (a1, a2, b): 1,
        (a1, b, a2): 1,
        (b, a1, a2): 1,
        (a1, ("a2", "b")): 1,
        (("a1", "b"), a2): 1,
    }
    assert str(got).count("+") == 4


def test_unit():
    w = QShElement.word(COMM, ("a",), ("b",))
    assert w * QShElement.unit(COMM) == w
    assert QShElement.unit(COMM) * w == w


def test_idempotent_letter():
    A = idempotent_demo()
    x = QShElement.word(A, "x")
    assert (x * x).terms() == {("x", "x"): 2, ("x",): 1}


def test_shuffle_letters_have_zero_product():
    A = shuffle_algebra(["x", "y"])
    xy = QShElement.word(A, "x") * QShElement.word(A, "y")
    assert xy.terms() == {("x", "y"): 1, ("y", "x"): 1}


def test_mzv_letters_add_componentwise():
    A = mzv_alphabet()
    got = QShElement.word(A, (2, Fraction(1, 2))) * QShElement.word(A, (1, Fraction(1)))
    assert got.coefficient(((3, Fraction(3, 2)),)) == 1
    assert render_word(((2, Fraction(1, 2)),), A) == "[2;1/2]"


@settings(max_examples=60, deadline=None)
@given(elements(nc_words), elements(nc_words), elements(nc_words))
def test_associative_on_noncommutative_letters(x, y, z):
    assert (x * y) * z == x * (y * z)


@settings(max_examples=60, deadline=None)
@given(elements(comm_words), elements(comm_words))
def test_commutative_when_letters_commute(x, y):
    assert x * y == y * x


def test_noncommutative_letters_give_noncommutative_product():
    a, b = QShElement.word(NC, ("a",)), QShElement.word(NC, ("b",))
    assert a * b != b * a


@settings(max_examples=60, deadline=None)
@given(nc_words, nc_words)
def test_length_filtration(u, v):
    (wu,), (wv,) = u.terms(), v.terms()
    lengths = (u * v).lengths()
    assert max(lengths) == len(wu) + len(wv)
    assert min(lengths) == max(len(wu), len(wv))


# tridendriform relations -------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(nc_words, nc_words, nc_words)
def test_tridendriform_relations(x, y, z):
    assert prec(prec(x, y), z) == prec(x, y * z)
    assert prec(succ(x, y), z) == succ(x, prec(y, z))
    assert succ(x * y, z) == succ(x, succ(y, z))
    assert bullet(prec(x, y), z) == bullet(x, succ(y, z))
    assert bullet(succ(x, y), z) == succ(x, bullet(y, z))
    assert prec(bullet(x, y), z) == bullet(x, prec(y, z))
    assert bullet(bullet(x, y), z) == bullet(x, bullet(y, z))


@given(nc_words, nc_words)
def test_pieces_add_up(x, y):
    assert prec(x, y) + succ(x, y) + bullet(x, y) == x * y


def test_half_products_reject_empty_word():
    a = QShElement.word(NC, ("a",))
    for f in (prec, succ, bullet):
        with pytest.raises(UndefinedHalfProductError):
            f(a, QShElement.unit(NC))


# coproduct side -----------------------------------------------------------------


def test_factorizations_count():
    w = tuple("abcde")
    assert len(list(factorizations(w))) == 2 ** 4
    for k in range(1, 6):
        assert len(list(factorizations(w, k))) == len(list(itertools.combinations(range(4), k - 1)))
    assert list(factorizations((), 0)) == [()]


def test_deconcatenation():
    w = QShElement.word(COMM, ("a",), ("b",))
    d = deconcat_coproduct(w)
    assert set(d.terms()) == {((), (("a",), ("b",))), ((("a",),), (("b",),)), ((("a",), ("b",)), ())}
    assert counit(w) == 0 and counit(QShElement.unit(COMM)) == 1


def test_reduced_iterated_and_iota():
    w = QShElement.word(COMM, ("a",), ("b",), ("a",))
    assert len(reduced_coproduct_iter(w, 2)) == 2
    assert len(reduced_coproduct_iter(w, 4)) == 0
    assert len(iota_word(w)) == 4


@settings(max_examples=40, deadline=None)
@given(comm_words, comm_words)
def test_coproduct_is_multiplicative(u, v):
    assert deconcat_coproduct(u * v) == tensor_product_mul(deconcat_coproduct(u), deconcat_coproduct(v), COMM)


@settings(max_examples=40, deadline=None)
@given(nc_words)
def test_antipode_closed_matches_recursion(w):
    assert antipode(w) == antipode_recursive(w)
    # m (S (x) id) Delta = unit . counit
    d = deconcat_coproduct(w)
    out = QShElement(NC)
    for (x, y), c in d.items():
        out = out + antipode(QShElement(NC, {x: 1})) * QShElement(NC, {y: 1}) * c
    assert not out


def test_antipode_of_letter_and_pair():
    a, b = ("a",), ("b",)
    assert antipode(QShElement.word(COMM, a)).terms() == {(a,): -1}
    assert antipode(QShElement.word(COMM, a, b)).terms() == {(b, a): 1, (("a", "b"),): 1}


def test_multiply_tensor_inverts_iota_sign_sum():
    # sum over factorizations with alternating sign, multiplied out, is the antipode
    w = QShElement.word(COMM, ("a",), ("b",), ("a",))
    t = iota_word(w)
    signed = type(t)({k: c * (-1) ** len(k) for k, c in t.items()})
    assert multiply_tensor(signed, COMM) == antipode(w)


def test_structure_checks():
    A = free_commutative_monomials(["a", "b"])
    letters = [("a",), ("b",), ("a", "b")]
    assert check_associative(A, itertools.product(letters, repeat=3))
    assert check_commutative(A, itertools.product(letters, repeat=2))
    assert not check_commutative(NC, [(("a",), ("b",))])
    assert A.mul(ONE, ("a",)) == {("a",): 1}


def test_json_and_rendering():
    w = QShElement.word(COMM, ("a",), ("a", "b")) * 2
    assert w.to_json() == [{"word": ["a", "a*b"], "coeff": "2"}]
    assert render_word((), COMM) == "1"
