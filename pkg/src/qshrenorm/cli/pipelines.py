"""Computations behind the CLI subcommands.

Each ``run_*`` function returns a :class:`ResultDocument`.  Pipelines that
produce a Birkhoff factorization compute it with both the recursive and the
closed formula and refuse to emit anything if the two disagree.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..errors import PrecisionError, ResonanceError
from ..fdb import (
    Diffeo,
    diffeo_birkhoff,
    diffeo_compose,
    diffeo_inverse,
    diffeo_inverse_by_substitution,
    dynamics_diffeo,
    fdb_character,
)
from ..hopfmaps import (
    MapRule,
    QShModel,
    birkhoff_closed,
    birkhoff_closed_qsh,
    birkhoff_closed_words,
    birkhoff_recursive,
    convolution_inverse,
    eval_j_inverse,
    j_map,
)
from ..qsh import (
    AlgebraElement,
    QShElement,
    RingAlgebra,
    TensorElement,
    antipode,
    antipode_recursive,
    deconcat_coproduct,
    factorizations,
    free_commutative_monomials,
    free_monoid_algebra,
    idempotent_demo,
    mzv_alphabet,
    qsh_product,
    render_word,
    shuffle_algebra,
)
from ..rings import (
    DEFAULT_EPS_HIGH,
    INF,
    MS,
    QQ,
    LaurentRing,
    LaurentSeries,
    PolynomialRing,
    TruncatedPoly,
    agree,
    format_rational,
    laurent_exp,
)
from .parse import parse_diffeo, parse_series, parse_word, series_ring


class CrossCheckError(AssertionError):
    """Two independent computations of the same quantity disagree."""


def _require(ok: bool, what: str):
    if not ok:
        raise CrossCheckError(f"cross-check failed: {what}")


# ---------------------------------------------------------------------------
# documents


@dataclass
class ResultDocument:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": json_value(self.inputs),
            "outputs": json_value(self.outputs),
            "provenance": json_value(self.provenance),
        }


def series_json(s: LaurentSeries) -> dict:
    return {str(e): coefficient_text(c) for e, c in s.items()}


def coefficient_text(c) -> str:
    if isinstance(c, TruncatedPoly):
        return str(c)
    return format_rational(c)


def json_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, LaurentSeries):
        return series_json(v)
    if isinstance(v, (TruncatedPoly, AlgebraElement)):
        return str(v)
    if isinstance(v, QShElement):
        return v.to_json()
    if isinstance(v, TensorElement):
        return [{"tensor": [v.render(x) for x in t], "coeff": format_rational(c)} for t, c in v.items()]
    if isinstance(v, Diffeo):
        return {"coeffs": [json_value(c) for c in v.coeffs], "order": v.order}
    if isinstance(v, dict):
        return {str(k): json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [json_value(x) for x in v]
    if v == INF:
        return "inf"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def emit_json(doc: ResultDocument) -> bytes:
    text = json.dumps(doc.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def _text_lines(prefix: str, v, out: list):
    if isinstance(v, dict):
        for k in sorted(v, key=str):
            _text_lines(f"{prefix}.{k}" if prefix else str(k), v[k], out)
    elif isinstance(v, (list, tuple)) and not isinstance(v, Diffeo):
        out.append(f"{prefix}: [{', '.join(str(x) for x in v)}]")
    elif isinstance(v, Fraction):
        out.append(f"{prefix}: {format_rational(v)}")
    else:
        out.append(f"{prefix}: {v}")


def render_text(doc: ResultDocument) -> str:
    lines = [f"# {doc.command}"]
    _text_lines("", doc.outputs, lines)
    prov = []
    _text_lines("", doc.provenance, prov)
    lines.extend(f"  ({p})" for p in prov)
    return "\n".join(lines) + "\n"


def check_window(values, eps_low) -> None:
    """Every series must have its pole order inside the requested window."""
    if eps_low is None:
        return
    stack = [values]
    while stack:
        v = stack.pop()
        if isinstance(v, LaurentSeries):
            if v.low is not None and v.low < eps_low:
                raise PrecisionError(f"a result has a pole of order {-v.low}, outside the window starting at e^{eps_low}")
        elif isinstance(v, Diffeo):
            stack.extend(v.coeffs)
        elif isinstance(v, dict):
            stack.extend(v.values())
        elif isinstance(v, (list, tuple)):
            stack.extend(v)


# ---------------------------------------------------------------------------
# algebras by name

ALGEBRAS = {
    "free": free_commutative_monomials,
    "free-nc": free_monoid_algebra,
    "mzv": mzv_alphabet,
    "idempotent": idempotent_demo,
    "shuffle": shuffle_algebra,
}


def algebra_named(name: str):
    try:
        return ALGEBRAS[name]()
    except KeyError:
        raise ValueError(f"unknown algebra {name!r}; choose from {', '.join(sorted(ALGEBRAS))}") from None


# ---------------------------------------------------------------------------
# word-level commands


def run_qsh_product(u_text: str, v_text: str, algebra: str = "free") -> ResultDocument:
    A = algebra_named(algebra)
    u = QShElement(A, {parse_word(u_text, A): 1})
    v = QShElement(A, {parse_word(v_text, A): 1})
    prod = qsh_product(u, v)
    return ResultDocument(
        "qsh-product",
        {"u": u_text, "v": v_text, "algebra": algebra},
        {"product": prod},
        {"formula": "quasi-shuffle recursion"},
    )


def run_antipode(word_text: str, algebra: str = "free", algorithm: str = "both") -> ResultDocument:
    A = algebra_named(algebra)
    w = QShElement(A, {parse_word(word_text, A): 1})
    closed = antipode(w)
    rec = antipode_recursive(w)
    _require(closed == rec, "closed antipode = recursive antipode")
    # m o (S (x) Id) o Delta = unit * counit
    axiom = QShElement(A, {})
    for (x, y), c in deconcat_coproduct(w).items():
        axiom = axiom + qsh_product(antipode(QShElement(A, {x: 1})), QShElement(A, {y: 1})) * c
    _require(axiom == QShElement(A, {(): w.coefficient(())}), "antipode axiom")
    chosen = rec if algorithm == "recursive" else closed
    return ResultDocument(
        "antipode",
        {"word": word_text, "algebra": algebra},
        {"antipode": chosen},
        {"formula": _formula(algorithm), "antipode_axiom": True},
    )


def _formula(algorithm: str) -> str:
    return {"recursive": "recursive", "closed": "closed", "both": "recursive=closed"}[algorithm]


def run_inverse(word_text: str, algebra: str = "free", algorithm: str = "both") -> ResultDocument:
    """j^{*-1} on a word, by the geometric series and by the closed product formula."""
    A = algebra_named(algebra)
    w = parse_word(word_text, A)
    model = QShModel(A)
    geometric = convolution_inverse(j_map(model), w)
    closed = eval_j_inverse(w, A)
    _require(geometric == closed, "geometric-series inverse = closed formula")
    return ResultDocument(
        "inverse",
        {"word": word_text, "algebra": algebra},
        {"j_inverse": geometric if algorithm == "recursive" else closed},
        {"formula": _formula(algorithm)},
    )


def run_birkhoff(
    letter_texts: Sequence[str],
    eps_high: int = DEFAULT_EPS_HIGH,
    x_degree: int = 8,
    eps_low=None,
    algorithm: str = "both",
) -> ResultDocument:
    """j_- and j_+ on a word whose letters are Laurent series."""
    ring = series_ring(" ".join(letter_texts), x_degree, eps_high)
    word = tuple(parse_series(t, ring=ring) for t in letter_texts)
    model = QShModel(RingAlgebra(ring))
    j = j_map(model)
    pair = birkhoff_recursive(j)
    rec = {"j_minus": pair.phi_minus(word), "j_plus": pair.phi_plus(word)}
    nested = {
        "j_minus": birkhoff_closed_qsh(word, MS, "minus"),
        "j_plus": birkhoff_closed_qsh(word, MS, "plus"),
    }
    words = {
        "j_minus": birkhoff_closed_words(j, word, MS, "minus"),
        "j_plus": birkhoff_closed_words(j, word, MS, "plus"),
    }
    for k in rec:
        _require(agree(rec[k], nested[k]) and agree(rec[k], words[k]), f"{k}: recursive = closed")
    out = rec if algorithm == "recursive" else nested
    check_window(out, eps_low)
    return ResultDocument(
        "birkhoff",
        {"letters": list(letter_texts)},
        dict(out),
        {"formula": _formula(algorithm), "eps_high": eps_high},
    )


# ---------------------------------------------------------------------------
# diffeomorphisms


def _reorder(f: Diffeo, order) -> Diffeo:
    if order is None or order == f.order:
        return f
    zero = f.ring.zero
    coeffs = (list(f.coeffs) + [zero] * order)[:order]
    return Diffeo(tuple(coeffs), f.ring)


def run_fdb_invert(diffeo_text: str, order=None, x_degree: int = 8, eps_high: int = DEFAULT_EPS_HIGH,
                   algorithm: str = "both") -> ResultDocument:
    f = _reorder(parse_diffeo(diffeo_text, order, x_degree, eps_high), order)
    closed = diffeo_inverse(f)
    solved = diffeo_inverse_by_substitution(f)
    _require(closed.agrees(solved), "closed inverse = order-by-order solve")
    phi = fdb_character(f)
    geometric = Diffeo(tuple(convolution_inverse(phi, (n,)) for n in range(1, f.order + 1)), f.ring)
    _require(closed.agrees(geometric), "closed inverse = convolution inverse")
    _require(diffeo_compose(closed, f).is_identity(), "g o f = id")
    out = geometric if algorithm == "recursive" else closed
    return ResultDocument(
        "fdb-invert",
        {"diffeo": diffeo_text, "order": f.order},
        {"inverse": out, "text": str(out)},
        {"formula": _formula(algorithm), "order": f.order},
    )


def _laurent_diffeo(f: Diffeo, eps_high: int) -> Diffeo:
    if isinstance(f.ring, LaurentRing):
        return f
    R = LaurentRing(QQ, eps_high)
    return Diffeo(tuple(R(c) for c in f.coeffs), R)


def _birkhoff_diffeo_checked(f: Diffeo):
    fm, fp = diffeo_birkhoff(f)
    pair = birkhoff_recursive(fdb_character(f))
    n_range = range(1, f.order + 1)
    rec_m = Diffeo(tuple(pair.phi_minus((n,)) for n in n_range), f.ring)
    rec_p = Diffeo(tuple(pair.phi_plus((n,)) for n in n_range), f.ring)
    _require(fm.agrees(rec_m) and fp.agrees(rec_p), "lambda formula = Bogoliubov recursion")
    _require(all(not c.plus_part() for c in fm.coeffs), "f_- is purely polar")
    _require(all(not c.minus_part() for c in fp.coeffs), "f_+ is regular")
    _require(diffeo_compose(fm, f).agrees(fp), "f_- o f = f_+")
    return (fm, fp), (rec_m, rec_p)


def run_fdb_birkhoff(diffeo_text: str, order=None, x_degree: int = 8, eps_high: int = DEFAULT_EPS_HIGH,
                     eps_low=None, algorithm: str = "both") -> ResultDocument:
    f = _reorder(parse_diffeo(diffeo_text, order, x_degree, eps_high), order)
    f = _laurent_diffeo(f, eps_high)
    closed, rec = _birkhoff_diffeo_checked(f)
    fm, fp = rec if algorithm == "recursive" else closed
    check_window([fm, fp], eps_low)
    return ResultDocument(
        "fdb-birkhoff",
        {"diffeo": diffeo_text, "order": f.order},
        {"f_minus": fm, "f_plus": fp},
        {"formula": _formula(algorithm), "order": f.order, "eps_high": eps_high},
    )


def _scaled(mono: str, c: Fraction) -> str:
    if not c:
        return "0"
    if c == 1:
        return mono
    if c == -1:
        return f"-{mono}"
    return f"{format_rational(c)}*{mono}"


def _at_zero(s: LaurentSeries):
    return s.coeff(0)


def run_linearize(b_coeffs: Sequence, x_degree: int = 3, z_order: int = 4, eps_high: int = 4,
                  eps_low=None, algorithm: str = "both") -> ResultDocument:
    """Regularize z' = b(x) z^2 with linear part (1+e, e) and renormalize the conjugating map."""
    if x_degree < 1 or z_order < 1:
        raise ValueError("orders must be >= 1")
    b = [Fraction(c) for c in b_coeffs]
    a, f = dynamics_diffeo(b, x_degree, z_order, eps_high)
    (fm, fp), (rec_m, rec_p) = _birkhoff_diffeo_checked(f)
    # z/(1 - a z) composes additively in a, so the factors are z/(1 + p_-(a) z) and z/(1 - p_+(a) z)
    a_plus = a.plus_part()
    a_minus = a.minus_part()
    _require(all(agree(fp[n], a_plus**n) for n in range(1, z_order + 1)), "f_+ = z/(1 - a_+ z)")
    _require(all(agree(fm[n], (-a_minus) ** n) for n in range(1, z_order + 1)), "f_- = z/(1 + a_- z)")
    if algorithm == "recursive":
        fm, fp = rec_m, rec_p
    check_window([a, fm, fp], eps_low)
    b0 = b[0] if b else Fraction(0)
    outputs = {
        "a": a,
        "a_plus": fp[1],
        "a_plus_at_0": _at_zero(fp[1]),
        "f_plus": {f"z^{n + 1}": fp[n] for n in range(1, z_order + 1)},
        "f_minus": {f"z^{n + 1}": fm[n] for n in range(1, z_order + 1)},
        "f_plus_at_0": {f"z^{n + 1}": _at_zero(fp[n]) for n in range(1, z_order + 1)},
        "conjugation_target": {"xdot": "x", "ydot": _scaled("y^2", b0)},
    }
    return ResultDocument(
        "linearize",
        {"b": [format_rational(c) for c in b], "x_degree": x_degree, "z_order": z_order},
        outputs,
        {"formula": _formula(algorithm), "eps_high": eps_high, "x_degree": x_degree, "z_order": z_order,
         "linear_part": "(1+e, e)"},
    )


# ---------------------------------------------------------------------------
# word coalgebras: ladders, moulds, MZV letters


def ladder_value(n: int, ring: LaurentRing):
    """psi(t_n) = exp(-n e L) / (n! e^n), known up to e^high."""
    if n == 0:
        return ring.one
    L = ring.base.gen("L")
    fact = 1
    for k in range(2, n + 1):
        fact *= k
    return laurent_exp(L * (-n), 1, ring.high + n, ring).shift(-n) * Fraction(1, fact)


def ladder_character(eps_high: int, n_max: int) -> MapRule:
    ring = LaurentRing(PolynomialRing(["L"], n_max + eps_high + 1), eps_high)
    model = QShModel(shuffle_algebra(["t"]))
    return MapRule(model, ring, lambda w: ladder_value(len(w), ring), is_character=True, name="psi")


def run_ladder(n_max: int = 5, eps_high: int = DEFAULT_EPS_HIGH, eps_low=None, algorithm: str = "both") -> ResultDocument:
    if n_max < 1:
        raise ValueError("n_max >= 1")
    psi = ladder_character(eps_high, n_max)
    rec = birkhoff_recursive(psi)
    closed = birkhoff_closed(psi)
    values, minus, plus, local = {}, {}, {}, {}
    for n in range(1, n_max + 1):
        w = ("t",) * n
        m_rec, m_cl = rec.phi_minus(w), closed.phi_minus(w)
        p_rec, p_cl = rec.phi_plus(w), closed.phi_plus(w)
        _require(agree(m_rec, m_cl) and agree(p_rec, p_cl), f"t{n}: recursive = closed")
        if not m_rec.is_exact:
            raise PrecisionError(
                f"window too small: the counterterm of t{n} needs e^-1 known, raise the window to at least {n - 2}"
            )
        local[f"t{n}"] = all(c.is_constant() for _, c in m_rec.items())
        _require(local[f"t{n}"], f"t{n}: counterterm free of L")
        values[f"t{n}"] = psi(w)
        minus[f"t{n}"] = m_rec if algorithm == "recursive" else m_cl
        plus[f"t{n}"] = p_rec if algorithm == "recursive" else p_cl
    check_window([minus, plus], eps_low)
    return ResultDocument(
        "ladder",
        {"n_max": n_max},
        {"psi": values, "psi_minus": minus, "psi_plus": plus, "local": local},
        {"formula": _formula(algorithm), "eps_high": eps_high},
    )


def mould_value(word: Sequence[int], d, eps_high: int = DEFAULT_EPS_HIGH, degree: int = 8):
    """V_d(n1..ns) = (-1)^s x^(n1+..+ns+sd) / prod_i (n1+..+ni + i d).

    ``d == "eps"`` gives a Laurent series in e over Q[x, L] with L = log x.
    """
    s = len(word)
    N = sum(word)
    if d == "eps":
        X = PolynomialRing(["x", "L"], degree)
        R = LaurentRing(X, eps_high)
        H = eps_high + s
        val = R(X.monomial((N, 0)))
        if s:
            val = val * laurent_exp(X.monomial((0, 1), s), 1, H, R)
        acc = 0
        for i, n in enumerate(word, start=1):
            acc += n
            if acc == 0:
                val = val * R.eps(-1, Fraction(1, i))
            else:
                r = Fraction(-i, acc)
                val = val * R.series({k: Fraction(1, acc) * r**k for k in range(H + 1)}, high=H)
        return -val if s % 2 else val
    d = int(d)
    if d < 0:
        raise ValueError("d must be a nonnegative integer or 'eps'")
    X = PolynomialRing(["x"], max(degree, N + s * d))
    den = Fraction(1)
    acc = 0
    for i, n in enumerate(word, start=1):
        acc += n
        q = acc + i * d
        if q == 0:
            raise ResonanceError(f"V_{d} divides by zero at position {i}: regularize with d = eps")
        den *= q
    return X.monomial((N + s * d,), Fraction((-1) ** s) / den)


def shuffles(u: tuple, v: tuple):
    """All interleavings of u and v, with multiplicity."""
    n = len(u) + len(v)
    for pos in itertools.combinations(range(n), len(u)):
        out, iu, iv = [], iter(u), iter(v)
        ps = set(pos)
        for k in range(n):
            out.append(next(iu) if k in ps else next(iv))
        yield tuple(out)


def run_mould(n_letters: int, word: Sequence[int], eps_high: int = DEFAULT_EPS_HIGH, xlog_degree: int = 8,
              d="eps", eps_low=None, algorithm: str = "both") -> ResultDocument:
    word = tuple(int(n) for n in word)
    if any(n < 0 for n in word):
        raise ValueError("mould letters are nonnegative integers")
    if n_letters < 1:
        raise ValueError("n_letters >= 1")

    def value(w):
        return mould_value(w, d, eps_high, xlog_degree)

    # shuffle-character self-check on short words over {0..n_letters-1}
    alphabet = range(n_letters)
    short = [w for k in (1, 2) for w in itertools.product(alphabet, repeat=k)]
    checked = 0
    for u in short:
        for v in short:
            if len(u) + len(v) > 3:
                continue
            total = None
            for w in shuffles(u, v):
                total = value(w) if total is None else total + value(w)
            _require(agree(value(u) * value(v), total), f"shuffle character on {u}, {v}")
            checked += 1

    outputs = {"V": value(word)}
    prov = {"d": str(d), "shuffle_pairs_checked": checked, "xlog_degree": xlog_degree}
    if d == "eps":
        ring = outputs["V"].ring
        model = QShModel(shuffle_algebra())
        V = MapRule(model, ring, value, is_character=True, name="V")
        rec = birkhoff_recursive(V)
        m_rec, p_rec = rec.phi_minus(word), rec.phi_plus(word)
        m_cl = birkhoff_closed_words(V, word, MS, "minus")
        p_cl = birkhoff_closed_words(V, word, MS, "plus")
        _require(agree(m_rec, m_cl) and agree(p_rec, p_cl), "recursive = closed")
        pm, pp = (m_rec, p_rec) if algorithm == "recursive" else (m_cl, p_cl)
        outputs.update({"V_minus": pm, "V_plus": pp, "V_plus_at_0": pp.coeff(0)})
        prov.update({"formula": _formula(algorithm), "eps_high": eps_high})
        check_window(outputs, eps_low)
    return ResultDocument(
        "mould",
        {"word": list(word), "n_letters": n_letters},
        outputs,
        prov,
    )


def symbolic_word_birkhoff(word: tuple, sign: str, render) -> list[tuple[int, str]]:
    """The word formula with an opaque character Z, as (sign, nested expression) terms."""
    out = []
    for blocks in factorizations(word):
        expr = f"Z({render(blocks[0])})"
        for b in blocks[1:]:
            expr = f"P-({expr})*Z({render(b)})"
        t = len(blocks)
        if sign == "plus":
            out.append((1 if t % 2 else -1, f"P+({expr})"))
        else:
            out.append((-1 if t % 2 else 1, f"P-({expr})"))
    return out


def _join_signed(terms) -> str:
    text = ""
    for i, (s, e) in enumerate(terms):
        if i == 0:
            text = e if s > 0 else f"-{e}"
        else:
            text += (" + " if s > 0 else " - ") + e
    return text


def _opaque_character(model: QShModel, eps_high: int) -> MapRule:
    """Deterministic pseudo-random Laurent values, to validate the symbolic expansion."""
    ring = LaurentRing(QQ, eps_high)

    def rule(w):
        rng = random.Random(repr(w))
        return ring.series({e: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for e in range(-len(w), 3)}, high=eps_high)

    return MapRule(model, ring, rule, name="Z")


def run_mzv_demo(u_text: str, v_text: str | None = None, eps_high: int = DEFAULT_EPS_HIGH) -> ResultDocument:
    A = mzv_alphabet()
    u = parse_word(u_text, A)
    outputs: dict = {}
    if v_text is not None:
        v = parse_word(v_text, A)
        outputs["stuffle"] = qsh_product(QShElement(A, {u: 1}), QShElement(A, {v: 1}))

    def render(w):
        return render_word(w, A)

    minus = symbolic_word_birkhoff(u, "minus", render)
    plus = symbolic_word_birkhoff(u, "plus", render)
    outputs["phi_minus"] = _join_signed(minus)
    outputs["phi_plus"] = _join_signed(plus)

    model = QShModel(A)
    Z = _opaque_character(model, eps_high)
    rec = birkhoff_recursive(Z)
    _require(agree(rec.phi_minus(u), birkhoff_closed_words(Z, u, MS, "minus")), "recursive = closed (minus)")
    _require(agree(rec.phi_plus(u), birkhoff_closed_words(Z, u, MS, "plus")), "recursive = closed (plus)")
    return ResultDocument(
        "mzv-demo",
        {"u": u_text, "v": v_text},
        outputs,
        {"formula": "word formula, validated against the recursion on a sample character", "terms": len(minus)},
    )
