"""qshrenorm: exact quasi-shuffle and renormalization computations from the shell."""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from ..errors import AlgebraError, ParseError, PrecisionError
from ..rings import DEFAULT_EPS_HIGH, DEFAULT_X_DEGREE
from . import pipelines as P
from .parse import parse_int_word

EXIT_OK, EXIT_PARSE, EXIT_PRECISION, EXIT_HYPOTHESIS = 0, 2, 3, 4


def eps_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO:HI with integers, e.g. -4:4") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("LO must not exceed HI")
    return lo, hi


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--order", type=int, help="truncation order (ladder length, diffeo order)")
    p.add_argument("--eps-window", type=eps_window, metavar="LO:HI",
                   help="lowest allowed pole exponent and highest computed exponent in e")
    p.add_argument("--x-degree", type=int, help="total-degree truncation for x (and log x)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--algorithm", choices=["recursive", "closed", "both"], default="both")
    p.add_argument("--input", metavar="FILE", help="read positional expressions from FILE, one per line")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qshrenorm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    algebras = sorted(P.ALGEBRAS)
    s = add("qsh-product", "quasi-shuffle product of two words")
    s.add_argument("exprs", nargs="*", metavar="WORD")
    s.add_argument("--algebra", choices=algebras, default="free")
    s = add("antipode", "antipode of a word")
    s.add_argument("exprs", nargs="*", metavar="WORD")
    s.add_argument("--algebra", choices=algebras, default="free")
    s = add("inverse", "convolution inverse of j on a word")
    s.add_argument("exprs", nargs="*", metavar="WORD")
    s.add_argument("--algebra", choices=algebras, default="free")
    s = add("birkhoff", "Birkhoff factors of j on a word of Laurent-series letters")
    s.add_argument("exprs", nargs="*", metavar="SERIES")
    s = add("fdb-invert", "composition inverse of a diffeomorphism")
    s.add_argument("exprs", nargs="*", metavar="DIFFEO")
    s = add("fdb-birkhoff", "Birkhoff factors of a diffeomorphism with Laurent coefficients")
    s.add_argument("exprs", nargs="*", metavar="DIFFEO")
    add("ladder", "counterterms of the ladder-tree character")
    s = add("linearize", "renormalized linearization of z' = b(x) z^2")
    s.add_argument("exprs", nargs="*", metavar="B_N", help="coefficients b0 b1 ... of b(x)")
    s = add("mould", "the mould character V_d on a word of nonnegative integers")
    s.add_argument("exprs", nargs="*", metavar="WORD", help="e.g. 0.1.2")
    s.add_argument("--n-letters", type=int, default=2, help="alphabet size for the shuffle self-check")
    s.add_argument("--d", default="eps", help="'eps' (regularized) or a nonnegative integer")
    s = add("mzv-demo", "stuffle and symbolic Birkhoff expansion over [s;r] letters")
    s.add_argument("exprs", nargs="*", metavar="WORD")
    return parser


def _default_order(args, fallback):
    if args.order is not None:
        return args.order
    env = os.environ.get("QSH_DEFAULT_ORDER")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"QSH_DEFAULT_ORDER must be an integer, not {env!r}") from None
    return fallback


def _exprs(args, count: tuple[int, int | None]):
    exprs = list(getattr(args, "exprs", []))
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            exprs.extend(line.strip() for line in fh if line.strip() and not line.lstrip().startswith("#"))
    lo, hi = count
    if len(exprs) < lo or (hi is not None and len(exprs) > hi):
        want = f"{lo}" if lo == hi else f"{lo}..{hi if hi is not None else 'n'}"
        raise ParseError(f"{args.command} takes {want} expression(s), got {len(exprs)}")
    return exprs


def run(args) -> P.ResultDocument:
    lo, hi = args.eps_window if args.eps_window else (None, DEFAULT_EPS_HIGH)
    xdeg = args.x_degree
    alg = args.algorithm
    cmd = args.command
    if cmd == "qsh-product":
        u, v = _exprs(args, (2, 2))
        return P.run_qsh_product(u, v, args.algebra)
    if cmd == "antipode":
        (w,) = _exprs(args, (1, 1))
        return P.run_antipode(w, args.algebra, alg)
    if cmd == "inverse":
        (w,) = _exprs(args, (1, 1))
        return P.run_inverse(w, args.algebra, alg)
    if cmd == "birkhoff":
        letters = _exprs(args, (1, None))
        return P.run_birkhoff(letters, hi, xdeg or DEFAULT_X_DEGREE, lo, alg)
    if cmd == "fdb-invert":
        (f,) = _exprs(args, (1, 1))
        return P.run_fdb_invert(f, _default_order(args, None), xdeg or DEFAULT_X_DEGREE, hi, alg)
    if cmd == "fdb-birkhoff":
        (f,) = _exprs(args, (1, 1))
        return P.run_fdb_birkhoff(f, _default_order(args, None), xdeg or DEFAULT_X_DEGREE, hi, lo, alg)
    if cmd == "ladder":
        _exprs(args, (0, 0))
        return P.run_ladder(_default_order(args, 5), hi, lo, alg)
    if cmd == "linearize":
        b = _exprs(args, (1, None))
        try:
            b = [Fraction(c) for c in b]
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed rational among {b}") from None
        return P.run_linearize(b, xdeg or 3, _default_order(args, 4), hi, lo, alg)
    if cmd == "mould":
        (w,) = _exprs(args, (1, 1))
        word = parse_int_word(w)
        d = args.d
        if d != "eps":
            try:
                d = int(d)
            except ValueError:
                raise ParseError(f"--d must be 'eps' or an integer, not {d!r}") from None
        return P.run_mould(args.n_letters, word, hi, xdeg or DEFAULT_X_DEGREE, d, lo, alg)
    if cmd == "mzv-demo":
        ws = _exprs(args, (1, 2))
        return P.run_mzv_demo(ws[0], ws[1] if len(ws) > 1 else None, hi)
    raise AssertionError(cmd)


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let ``--eps-window -4:4`` through argparse, which would read -4:4 as an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--eps-window":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        doc = run(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PrecisionError as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except AlgebraError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.format == "json":
        sys.stdout.buffer.write(P.emit_json(doc))
    else:
        sys.stdout.write(P.render_text(doc))
    sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
