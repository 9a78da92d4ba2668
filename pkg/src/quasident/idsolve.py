"""Identity-space solvers.

multilinear_identity_space writes the general multilinear quasi-polynomial
of degree d as

    sum_{k=0..d} sum_{sigma in S_{d,k}} lambda_{k,sigma}(x_{sigma(1)},...,x_{sigma(k)})
                                         * x_{sigma(k+1)} ... x_{sigma(d)}

over the sets S_{d,k} of permutations increasing on their first k values
(S_{d,0} is all of S_d), with each lambda a combination of multilinear
coefficient monomials c[sigma(1),s1,t1]...c[sigma(k),sk,tk].  This normal
form has no double counting, so the quasi-identities of that shape are
exactly the nullspace of one exact homogeneous linear system: expanding the
generic-matrix image of the ansatz is linear in the unknowns, and every
(matrix entry, coefficient monomial) pair gives one equation.  The system is
extremely sparse (almost every unknown meets an equation in a single path
product), so it is fed to exactla's sparse row eliminator.

one_variable_divide peels the top word degree of a one-generator
quasi-identity against the degree-n characteristic identity and certifies
the quotient by exact re-multiplication.

local_lin_dep reduces local linear dependence of ordinary noncommutative
polynomials over the n x n matrices to one Capelli composite being a
quasi-identity, checked symbolically or by seeded random evaluation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import genmat
from .errors import (
    BudgetExceeded,
    NotAQuasiIdentity,
    NotOneVariable,
)
from .exactla import QMatrix, Subspace, nullspace_of_rows, rank as qrank
from .freealg import QuasiPoly, Word
from .ratpoly import CPoly, Monomial

# An unknown of the ansatz: (k, sigma, mu) where sigma is the permutation as a
# tuple of images (sigma(1),...,sigma(d)) and mu fixes the entry pair (s, t)
# chosen for each of sigma(1..k), in that order.
Unknown = tuple[int, tuple[int, ...], tuple[tuple[int, int], ...]]

DEFAULT_CELL_BUDGET = 20_000_000


class MultilinearAnsatz:
    """Index structure for multilinear quasi-polynomials of degree d on M_n."""

    def __init__(self, n: int, d: int):
        if n < 1 or d < 1:
            raise ValueError("n and d must be >= 1")
        self.n = n
        self.d = d
        self.unknowns: list[Unknown] = []
        pairs = [(s, t) for s in range(1, n + 1) for t in range(1, n + 1)]
        for k in range(d + 1):
            for sigma in itertools.permutations(range(1, d + 1)):
                if k >= 1 and list(sigma[:k]) != sorted(sigma[:k]):
                    continue
                for mu in itertools.product(pairs, repeat=k):
                    self.unknowns.append((k, sigma, mu))
        self.index = {u: i for i, u in enumerate(self.unknowns)}

    def __len__(self) -> int:
        return len(self.unknowns)

    def assemble(self, coords: Sequence[Fraction | int]) -> QuasiPoly:
        """The quasi-polynomial with the given ansatz coordinates."""
        if len(coords) != len(self.unknowns):
            raise ValueError("coordinate vector has wrong length")
        total = QuasiPoly.zero()
        for coeff, (k, sigma, mu) in zip(coords, self.unknowns):
            if not coeff:
                continue
            mono = CPoly.const(coeff)
            for g, (s, t) in zip(sigma[:k], mu):
                mono = mono * CPoly.variable(g, s, t)
            total = total + QuasiPoly({tuple(sigma[k:]): mono})
        return total

    def coordinates(self, p: QuasiPoly) -> list[Fraction]:
        """Coordinates of a multilinear quasi-polynomial in this ansatz.

        Raises ValueError if p is not multilinear of degree d in x_1..x_d in
        the ansatz normal form.
        """
        coords = [Fraction(0)] * len(self.unknowns)
        for w, coeff in p.terms():
            if len(set(w)) != len(w) or any(g > self.d for g in w):
                raise ValueError(f"word {w} is not multilinear in x1..x{self.d}")
            rest = sorted(set(range(1, self.d + 1)) - set(w))
            k = len(rest)
            sigma = tuple(rest) + tuple(w)
            for mono, value in coeff.terms():
                mu = _monomial_to_mu(mono, rest)
                key = (k, sigma, mu)
                if key not in self.index:
                    raise ValueError(f"term {mono}|{w} outside the ansatz")
                coords[self.index[key]] += value
        return coords


def _monomial_to_mu(mono: Monomial, gens: list[int]) -> tuple[tuple[int, int], ...]:
    by_gen: dict[int, tuple[int, int]] = {}
    for (g, s, t), e in mono:
        if e != 1 or g in by_gen:
            raise ValueError(f"coefficient monomial {mono} is not multilinear")
        by_gen[g] = (s, t)
    if sorted(by_gen) != gens:
        raise ValueError(
            f"coefficient monomial {mono} does not cover generators {gens}"
        )
    return tuple(by_gen[g] for g in gens)


def multilinear_identity_space(
    n: int, d: int, cell_budget: int = DEFAULT_CELL_BUDGET
) -> tuple[Subspace, MultilinearAnsatz]:
    """All multilinear quasi-identities of degree d on M_n, in ansatz coordinates.

    Every (matrix entry, multilinear coefficient monomial) pair of the
    expanded generic-matrix image contributes one homogeneous equation; the
    returned subspace is the exact nullspace.
    """
    ansatz = MultilinearAnsatz(n, d)
    cells = len(ansatz) * n ** (2 * d)
    if cells > cell_budget:
        raise BudgetExceeded(
            f"ansatz of {len(ansatz)} unknowns x n^(2d) = {n ** (2 * d)} "
            f"exceeds the budget of {cell_budget} cells"
        )
    # Equation key: (entry row, entry col, sorted tuple of (g, s, t) triples).
    equations: dict[tuple[int, int, tuple], dict[int, Fraction]] = {}

    def put(entry: tuple[int, int], triples: Iterable[tuple[int, int, int]], idx: int) -> None:
        key = (entry[0], entry[1], tuple(sorted(triples)))
        row = equations.setdefault(key, {})
        row[idx] = row.get(idx, Fraction(0)) + 1

    for idx, (k, sigma, mu) in enumerate(ansatz.unknowns):
        base = [(g, s, t) for g, (s, t) in zip(sigma[:k], mu)]
        w: Word = tuple(sigma[k:])
        if not w:
            for u in range(1, n + 1):
                put((u, u), base, idx)
            continue
        for u in range(1, n + 1):
            for v in range(1, n + 1):
                for path in itertools.product(range(1, n + 1), repeat=len(w) - 1):
                    nodes = (u,) + path + (v,)
                    triples = base + [
                        (w[r], nodes[r], nodes[r + 1]) for r in range(len(w))
                    ]
                    put((u, v), triples, idx)
    basis = nullspace_of_rows(equations.values(), len(ansatz))
    return Subspace.from_vectors(len(ansatz), basis), ansatz


def one_variable_divide(p: QuasiPoly, n: int) -> QuasiPoly:
    """Exact quotient r with p = r * q_n for a one-generator quasi-identity p.

    Works by repeatedly subtracting lambda_top(x) x^(m-n) q_n(x); the final
    remainder must vanish.  The quotient is certified by re-multiplication in
    the free algebra before it is returned.
    """
    gens = {g for w in p.words() for g in w}
    if not gens <= {1}:
        raise NotOneVariable(f"words use generators {sorted(gens)}, expected only x1")
    if not genmat.is_quasi_identity(p, n):
        raise NotAQuasiIdentity("input does not vanish under the generic-matrix map")
    qn = genmat.cayley_hamilton_q(n)
    quotient = QuasiPoly.zero()
    rest = p
    while not rest.is_zero():
        m = rest.word_degree()
        if m < n:
            raise NotAQuasiIdentity(
                f"nonzero remainder of degree {m} < {n}; input was not in the ideal"
            )
        top = rest.coefficient((1,) * m)
        piece = QuasiPoly({(1,) * (m - n): top})
        quotient = quotient + piece
        rest = rest - piece * qn
    assert (quotient * qn) == p, "division certificate failed"
    return quotient


@dataclass
class DependenceReport:
    """Outcome of a local-linear-dependence test.

    For independent verdicts the witness is a generator assignment (matrices)
    together with the values of the tested polynomials at it, which are
    linearly independent; for dependent verdicts it is the Capelli
    certificate description.
    """

    verdict: str  # "dependent" | "independent"
    mode: str  # "symbolic" | "randomized"
    witness: dict = field(default_factory=dict)
    confidence: str = "exact"
    trials: int = 0


def local_lin_dep(
    fs: Sequence[QuasiPoly],
    n: int,
    mode: str = "symbolic",
    seed: int = 0,
    trials: int = 20,
    bound: int = 9,
    term_budget: int = 200_000,
) -> DependenceReport:
    """Do the values of fs stay linearly dependent at every point of M_n?

    The test composes the Capelli polynomial C_{2t-1} with the fs in its
    alternating slots and fresh generators in the y slots; dependence holds
    exactly when that composite is a quasi-identity.
    """
    if not fs:
        raise ValueError("fs must be nonempty")
    if mode not in ("symbolic", "randomized"):
        raise ValueError(f"unknown mode {mode!r}")
    for f in fs:
        if not f.has_scalar_coefficients():
            raise ValueError("local_lin_dep expects scalar-only coefficients")
    t = len(fs)
    used = sorted(set().union(*[f.generators() for f in fs]) | {0})
    y_gens = [max(used) + 1 + i for i in range(t - 1)]
    composite = _capelli_composite(fs, y_gens, term_budget)

    if mode == "symbolic":
        dependent = genmat.is_quasi_identity(composite, n)
        report = DependenceReport(
            verdict="dependent" if dependent else "independent",
            mode="symbolic",
            confidence="exact",
        )
    else:
        rng = random.Random(seed)
        gens = sorted(composite.generators())
        dependent = True
        for _ in range(trials):
            point = {k: QMatrix.random(n, n, rng, bound) for k in gens}
            if not genmat.evaluate(composite, point, n).is_zero():
                dependent = False
                break
        degree = composite.word_degree()
        per_trial = Fraction(min(degree, 2 * bound + 1), 2 * bound + 1)
        report = DependenceReport(
            verdict="dependent" if dependent else "independent",
            mode="randomized",
            confidence=(
                "exact"
                if not dependent
                else f"false-dependent probability <= ({per_trial})^{trials}"
            ),
            trials=trials,
        )
    if report.verdict == "dependent":
        report.witness = {
            "capelli": f"C_{2 * t - 1}",
            "arguments": t,
            "identity_of_M_n": n,
        }
    else:
        found = _independence_witness(fs, n, seed, bound)
        if found is None:
            raise AssertionError("independent verdict but no witness point found")
        assignment, values = found
        report.witness = {
            "point": {f"x{k}": m.data for k, m in sorted(assignment.items())},
            "values": [m.data for m in values],
        }
    return report


def _capelli_composite(
    fs: Sequence[QuasiPoly], y_gens: list[int], term_budget: int
) -> QuasiPoly:
    t = len(fs)
    total = QuasiPoly.zero()
    count = 0
    for perm in itertools.permutations(range(t)):
        sign = _perm_sign(perm)
        piece = QuasiPoly.const(sign)
        for idx, which in enumerate(perm):
            piece = piece * fs[which]
            if idx < t - 1:
                piece = piece * QuasiPoly.x(y_gens[idx])
            count += piece.term_count()
            if count > term_budget:
                raise BudgetExceeded(
                    f"Capelli composite exceeded {term_budget} scalar terms"
                )
        total = total + piece
    return total


def _independence_witness(
    fs: Sequence[QuasiPoly], n: int, seed: int, bound: int
) -> tuple[dict[int, QMatrix], list[QMatrix]] | None:
    """Assignment where the values of fs are linearly independent."""
    t = len(fs)
    gens = sorted(set().union(*[f.generators() for f in fs]))
    units = [
        genmat.matrix_unit(i, j, n) for i in range(1, n + 1) for j in range(1, n + 1)
    ]

    def check(assignment: dict[int, QMatrix]) -> list[QMatrix] | None:
        values = [genmat.evaluate(f, assignment, n) for f in fs]
        rows = QMatrix([[m[i, j] for i in range(n) for j in range(n)] for m in values])
        return values if qrank(rows) == t else None

    if len(gens) <= 2 and len(units) ** len(gens) <= 100:
        for combo in itertools.product(units, repeat=len(gens)):
            assignment = dict(zip(gens, combo))
            values = check(assignment)
            if values is not None:
                return assignment, values
    rng = random.Random(seed)
    for _ in range(200):
        assignment = {k: QMatrix.random(n, n, rng, bound) for k in gens}
        values = check(assignment)
        if values is not None:
            return assignment, values
    return None


def _perm_sign(perm: Sequence[int]) -> int:
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s
