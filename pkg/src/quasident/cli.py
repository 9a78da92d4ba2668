"""Command-line surface: parse expressions, run verification suites, report.

The expression grammar (whitespace-insensitive; '*' between factors is
optional, juxtaposition multiplies):

    poly   := ('+'|'-')? term (('+'|'-') term)*
    term   := rational factor* | factor+
    factor := atom ('^' INT)?
    atom   := 'x'INT | 'c[' INT ',' INT ',' INT ']' | 'tr(' word ')' | '(' poly ')'
    word   := 'x'INT ('*' 'x'INT)*
    rational := INT ('/' INT)?

tr(...) expands through the generic-matrix trace at the configured dimension
and therefore needs --n.  Reports are plain text or JSON; JSON output is
schema-stable ("quasident/1"), has sorted keys, and is byte-identical for
identical configurations (runtimes are only included with --timings, since
they would break reproducibility).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import antisym, genmat, idsolve
from .errors import DimensionRequired, QuasidentError, QuasiSyntaxError
from .exactla import QMatrix
from .freealg import QuasiPoly
from .ratpoly import CPoly

SCHEMA = "quasident/1"

# -- expression parsing -------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<gen>x\d+)|(?P<num>\d+)|(?P<name>tr|c)|(?P<punct>[()\[\],+\-*/^])|(?P<bad>\S)"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        for m in _TOKEN_RE.finditer(line):
            kind = m.lastgroup or "bad"
            if kind == "bad":
                raise QuasiSyntaxError(
                    f"unexpected character {m.group()!r}", lineno, m.start() + 1
                )
            tokens.append(_Token(kind, m.group(), lineno, m.start() + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], n: int | None):
        self.tokens = tokens
        self.pos = 0
        self.n = n

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise QuasiSyntaxError("unexpected end of input", last.line, last.column + len(last.text))
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.take()
        if tok.text != text:
            raise QuasiSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def parse_poly(self) -> QuasiPoly:
        lead = 1
        tok = self.peek()
        if tok is not None and tok.text in "+-":
            self.take()
            lead = 1 if tok.text == "+" else -1
        total = self.parse_term(sign=lead)
        while True:
            tok = self.peek()
            if tok is None or tok.text not in "+-":
                return total
            self.take()
            total = total + self.parse_term(sign=1 if tok.text == "+" else -1)

    def parse_term(self, sign: int) -> QuasiPoly:
        product = QuasiPoly.const(sign)
        saw_anything = False
        tok = self.peek()
        if tok is not None and tok.kind == "num":
            product = product * QuasiPoly.const(self.parse_rational())
            saw_anything = True
        while True:
            tok = self.peek()
            if tok is None or tok.text in "+-)],":
                break
            if tok.text == "*":
                self.take()
                continue
            product = product * self.parse_factor()
            saw_anything = True
        if not saw_anything:
            tok = self.peek()
            line, col = (tok.line, tok.column) if tok else (1, 1)
            raise QuasiSyntaxError("empty term", line, col)
        return product

    def parse_rational(self) -> Fraction:
        tok = self.take()
        value = Fraction(int(tok.text))
        nxt = self.peek()
        if nxt is not None and nxt.text == "/":
            self.take()
            den = self.take()
            if den.kind != "num":
                raise QuasiSyntaxError("expected a denominator", den.line, den.column)
            value /= int(den.text)
        return value

    def parse_factor(self) -> QuasiPoly:
        base = self.parse_atom()
        tok = self.peek()
        if tok is not None and tok.text == "^":
            self.take()
            exp = self.take()
            if exp.kind != "num":
                raise QuasiSyntaxError("expected an integer exponent", exp.line, exp.column)
            return base ** int(exp.text)
        return base

    def parse_atom(self) -> QuasiPoly:
        tok = self.take()
        if tok.kind == "gen":
            return QuasiPoly.x(int(tok.text[1:]))
        if tok.kind == "num":
            self.pos -= 1
            return QuasiPoly.const(self.parse_rational())
        if tok.text == "c":
            self.expect("[")
            k = self._int()
            self.expect(",")
            i = self._int()
            self.expect(",")
            j = self._int()
            self.expect("]")
            return QuasiPoly.const(CPoly.variable(k, i, j))
        if tok.text == "tr":
            self.expect("(")
            letters = [self._gen()]
            while self.peek() is not None and self.peek().text == "*":
                self.take()
                letters.append(self._gen())
            close = self.expect(")")
            if self.n is None:
                raise DimensionRequired(
                    f"tr(...) at line {close.line} needs a matrix dimension n"
                )
            return QuasiPoly.const(genmat.trace_word_cpoly(letters, self.n))
        if tok.text == "(":
            inner = self.parse_poly()
            self.expect(")")
            return inner
        raise QuasiSyntaxError(f"unexpected token {tok.text!r}", tok.line, tok.column)

    def _int(self) -> int:
        tok = self.take()
        if tok.kind != "num":
            raise QuasiSyntaxError("expected an integer", tok.line, tok.column)
        return int(tok.text)

    def _gen(self) -> int:
        tok = self.take()
        if tok.kind != "gen":
            raise QuasiSyntaxError("expected a generator x<k>", tok.line, tok.column)
        return int(tok.text[1:])


def parse_quasipoly(text: str, n: int | None = None) -> QuasiPoly:
    """Parse the textual grammar into a quasi-polynomial.

    tr(...) macros need the matrix dimension n; without it they raise
    DimensionRequired.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise QuasiSyntaxError("empty input", 1, 1)
    parser = _Parser(tokens, n)
    poly = parser.parse_poly()
    if parser.peek() is not None:
        tok = parser.peek()
        raise QuasiSyntaxError(f"trailing input {tok.text!r}", tok.line, tok.column)
    return poly


def format_cpoly(c: CPoly) -> str:
    return str(c)


def format_quasipoly(p: QuasiPoly) -> str:
    """Canonical printed form; parse(format(p)) == p."""
    return str(p)


# -- configuration and reports -------------------------------------------------


@dataclass
class RunConfig:
    n: int | None = None
    mode: str = "symbolic"
    seed: int = 0
    trials: int = 20
    bound: int = 9
    fmt: str = "text"
    budget: int = 200_000
    samples: int = 12
    timings: bool = False


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, QMatrix):
        return [[str(x) for x in row] for row in value.data]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    return str(value)


def _emit(report: dict, config: RunConfig, out) -> None:
    if config.fmt == "json":
        out.write(json.dumps(_jsonable(report), sort_keys=True, separators=(",", ":")))
        out.write("\n")
    else:
        _emit_text(report, out)


def _emit_text(report: dict, out, indent: str = "") -> None:
    for key in sorted(report):
        value = report[key]
        if isinstance(value, dict):
            out.write(f"{indent}{key}:\n")
            _emit_text(value, out, indent + "  ")
        else:
            out.write(f"{indent}{key}: {_jsonable(value)}\n")


def _base_report(command: str, config: RunConfig) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "config": {
            "n": config.n,
            "mode": config.mode,
            "seed": config.seed,
            "trials": config.trials,
            "bound": config.bound,
            "budget": config.budget,
        },
    }


# -- subcommands ---------------------------------------------------------------


def _cmd_verify_ch(config: RunConfig) -> dict:
    n = config.n
    report = _base_report("verify-ch", config)
    q = genmat.cayley_hamilton_q(n)
    Q = genmat.cayley_hamilton_Q(n)
    q_zero = genmat.is_quasi_identity(q, n)
    Q_zero = genmat.is_quasi_identity(Q, n)
    report["results"] = {
        "q_is_identity": q_zero,
        "Q_is_identity": Q_zero,
        "q_trace_form": str(genmat.cayley_hamilton_q_trace(n)),
        "Q_trace_form": str(genmat.cayley_hamilton_Q_trace(n)),
    }
    report["pass"] = q_zero and Q_zero
    return report


def _cmd_check(config: RunConfig, text: str) -> dict:
    n = config.n
    report = _base_report("check", config)
    p = parse_quasipoly(text, n)
    if p.term_count() > config.budget:
        raise QuasidentError(f"input has {p.term_count()} terms, budget {config.budget}")
    results: dict = {"input": format_quasipoly(p)}
    if config.mode == "symbolic":
        image = genmat.phi_eval(p, n)
        results["quasi_identity"] = image.is_zero()
        results["central"] = image.is_scalar()
    else:
        import random

        rng = random.Random(config.seed)
        gens = sorted(p.generators())
        qi = True
        central = True
        for _ in range(config.trials):
            point = {k: QMatrix.random(n, n, rng, config.bound) for k in gens}
            value = genmat.evaluate(p, point, n)
            if not value.is_zero():
                qi = False
            scalar = all(
                value[i, j] == 0 for i in range(n) for j in range(n) if i != j
            ) and all(value[i, i] == value[0, 0] for i in range(n))
            if not scalar:
                central = False
        results["quasi_identity"] = qi
        results["central"] = central
        results["randomized"] = {"trials": config.trials, "bound": config.bound}
    results["ordinary_identity"] = (
        results["quasi_identity"] if p.has_scalar_coefficients() else None
    )
    if not results["central"]:
        witness = genmat.central_witness(p, n, seed=config.seed, bound=config.bound)
        if witness is not None:
            point, value = witness
            results["non_central_witness"] = {
                "point": {f"x{k}": m for k, m in sorted(point.items())},
                "value": value,
            }
    report["results"] = results
    report["pass"] = True
    return report


def _cmd_solve_multilinear(config: RunConfig, degree: int) -> dict:
    n = config.n
    report = _base_report("solve-multilinear", config)
    report["config"]["degree"] = degree
    space, ansatz = idsolve.multilinear_identity_space(n, degree)
    spans_qn = False
    if degree == n:
        qvec = ansatz.coordinates(genmat.cayley_hamilton_Q(n))
        spans_qn = space.dim() == 1 and space.contains_vector(qvec)
    report["results"] = {
        "dimension": space.dim(),
        "unknowns": len(ansatz),
        "spans_Qn": spans_qn,
    }
    report["pass"] = True
    return report


def _cmd_capelli_dep(config: RunConfig, text: str) -> dict:
    n = config.n
    report = _base_report("capelli-dep", config)
    fs = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            fs.append(parse_quasipoly(line, n))
    if not fs:
        raise QuasidentError("no polynomials in the input")
    dep = idsolve.local_lin_dep(
        fs,
        n,
        mode=config.mode,
        seed=config.seed,
        trials=config.trials,
        bound=config.bound,
        term_budget=config.budget,
    )
    report["results"] = {
        "count": len(fs),
        "verdict": dep.verdict,
        "mode": dep.mode,
        "confidence": dep.confidence,
        "witness": dep.witness,
    }
    report["pass"] = True
    return report


def _cmd_antisym_kerim(config: RunConfig) -> dict:
    n = config.n
    report = _base_report("antisym-kerim", config)
    res = antisym.verify_kerim(n)
    report["results"] = {
        "ambient": res["ambient_dim"],
        "domain": res["domain_dim"],
        "image_rank": res["image_dim"],
        "ker_rho_equals_image": res["image_equals_kernel"],
        "rho_pi_zero": res["rho_pi_zero"],
        "codimension": res["codimension"],
        "complement_monomial": res["complement_monomial"],
        "complement_spans": res["complement_spans"],
    }
    report["pass"] = (
        res["image_equals_kernel"]
        and res["codimension"] == 1
        and res["complement_spans"]
        and res["rho_pi_zero"]
    )
    return report


def _cmd_antisym_corollary2(config: RunConfig) -> dict:
    n = config.n
    report = _base_report("antisym-corollary2", config)
    top = n * n
    ambient = len(antisym.fn_basis(n, top))
    ideal = antisym.ideal_component(n, top)
    block = antisym.wedge_component_subspace(n, top, top - 2)
    meet = ideal.intersect(block)
    report["results"] = {
        "degree": top,
        "ambient": ambient,
        "ideal_dim": ideal.dim(),
        "block_dim": block.dim(),
        "intersection_dim": meet.dim(),
        "new_quasi_identities": block.dim() - meet.dim(),
    }
    report["pass"] = meet.dim() == 0 and block.dim() > 0
    return report


def _cmd_antisym_dim(config: RunConfig) -> dict:
    n = config.n
    report = _base_report("antisym-dim", config)
    fns = [
        antisym.realize_invariant_monomial(n, tset, a) for tset, a in antisym.am_basis(n)
    ]
    rank = antisym.realize_rank(
        n, fns, samples=config.samples, seed=config.seed, bound=config.bound
    )
    expected = n * 2**n
    report["config"]["samples"] = config.samples
    report["results"] = {
        "monomials": len(fns),
        "expected": expected,
        "rank": rank,
        "certified": rank == expected,
    }
    report["pass"] = rank == expected
    return report


# -- entry point -----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasident",
        description="Exact verification of polynomial, trace and quasi-identities "
        "of n x n matrices.",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--bound", type=int, default=9)
    parser.add_argument("--budget", type=int, default=200_000)
    parser.add_argument("--samples", type=int, default=12)
    parser.add_argument("--mode", choices=("symbolic", "randomized"), default="symbolic")
    parser.add_argument(
        "--timings", action="store_true", help="include wall-clock runtimes in reports"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-ch", help="check the degree-n trace identities")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("check", help="classify one quasi-polynomial")
    p.add_argument("--n", type=int, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="file with one expression (may span lines)")
    src.add_argument("--expr", help="expression given inline")

    p = sub.add_parser("solve-multilinear", help="multilinear identity space")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("capelli-dep", help="local linear dependence test")
    p.add_argument("--n", type=int, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="file with one expression per line")
    src.add_argument("--expr", action="append", help="expression (repeatable)")

    p = sub.add_parser("antisym", help="antisymmetric-identity computations")
    anti = p.add_subparsers(dest="antisym_command", required=True)
    for name in ("kerim", "corollary2", "dim"):
        q = anti.add_parser(name)
        q.add_argument("--n", type=int, required=True)

    return parser


def _config_from(args: argparse.Namespace) -> RunConfig:
    seed = args.seed
    env_seed = os.environ.get("QUASIDENT_SEED")
    if env_seed is not None:
        seed = int(env_seed)
    return RunConfig(
        n=getattr(args, "n", None),
        mode=args.mode,
        seed=seed,
        trials=args.trials,
        bound=args.bound,
        fmt=args.format,
        budget=args.budget,
        samples=args.samples,
        timings=args.timings,
    )


def run_command(argv: Sequence[str], out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    args = parser.parse_args(list(argv))
    config = _config_from(args)
    started = time.monotonic()
    try:
        if args.command == "verify-ch":
            report = _cmd_verify_ch(config)
        elif args.command == "check":
            text = args.expr if args.expr else open(args.input, encoding="utf-8").read()
            report = _cmd_check(config, text)
        elif args.command == "solve-multilinear":
            report = _cmd_solve_multilinear(config, args.degree)
        elif args.command == "capelli-dep":
            text = (
                "\n".join(args.expr)
                if args.expr
                else open(args.input, encoding="utf-8").read()
            )
            report = _cmd_capelli_dep(config, text)
        elif args.command == "antisym":
            handler = {
                "kerim": _cmd_antisym_kerim,
                "corollary2": _cmd_antisym_corollary2,
                "dim": _cmd_antisym_dim,
            }[args.antisym_command]
            report = handler(config)
        else:  # pragma: no cover - argparse enforces the choices
            raise QuasidentError(f"unknown command {args.command!r}")
    except QuasidentError as exc:
        error = {
            "schema": SCHEMA,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        _emit(error, config, out)
        return 2
    if config.timings:
        report["runtime_seconds"] = round(time.monotonic() - started, 3)
    _emit(report, config, out)
    return 0 if report.get("pass", False) else 1


def main() -> int:
    return run_command(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
