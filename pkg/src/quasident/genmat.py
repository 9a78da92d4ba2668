"""Generic matrices, the evaluation homomorphism, and the classical identities.

phi_eval sends x_k to the generic matrix whose (i,j) entry is c[k,i,j] and
scalars to scalar matrices; a quasi-polynomial is a quasi-identity of the
n x n matrices exactly when its image is the zero matrix.

The characteristic-polynomial identities come in two layers.  TracePoly keeps
formal trace factors tr(x_{i1}*...*x_{ir}) unexpanded (stored up to cyclic
rotation), which is where Newton's identities and full polarization live and
what the canonical printer shows; expand() pushes a TracePoly down to a
QuasiPoly by expanding each trace factor into the entries of generic
matrices.  cayley_hamilton_q / cayley_hamilton_Q return the expanded forms.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, MissingAssignment
from .exactla import QMatrix
from .freealg import QuasiPoly, Word, word_key
from .ratpoly import CPoly, Scalar


class MatrixPoly:
    """Square matrix with CPoly entries; the target of the evaluation map."""

    __slots__ = ("n", "data")

    def __init__(self, entries: Sequence[Sequence[CPoly]]):
        self.n = len(entries)
        self.data: tuple[tuple[CPoly, ...], ...] = tuple(tuple(row) for row in entries)
        if any(len(row) != self.n for row in self.data):
            raise ValueError("matrix must be square")

    @staticmethod
    def zero(n: int) -> "MatrixPoly":
        z = CPoly.zero()
        return MatrixPoly([[z] * n for _ in range(n)])

    @staticmethod
    def identity(n: int) -> "MatrixPoly":
        one, z = CPoly.one(), CPoly.zero()
        return MatrixPoly([[one if i == j else z for j in range(n)] for i in range(n)])

    @staticmethod
    def scalar(coeff: CPoly, n: int) -> "MatrixPoly":
        z = CPoly.zero()
        return MatrixPoly([[coeff if i == j else z for j in range(n)] for i in range(n)])

    def entry(self, i: int, j: int) -> CPoly:
        """1-based entry access, matching the variable indexing c[k,i,j]."""
        return self.data[i - 1][j - 1]

    def trace(self) -> CPoly:
        t = CPoly.zero()
        for i in range(self.n):
            t = t + self.data[i][i]
        return t

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.data for e in row)

    def is_scalar(self) -> bool:
        """True iff all off-diagonal entries vanish and diagonal entries agree."""
        for i in range(self.n):
            for j in range(self.n):
                if i != j and not self.data[i][j].is_zero():
                    return False
        return all(self.data[i][i] == self.data[0][0] for i in range(1, self.n))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MatrixPoly)
            and self.n == other.n
            and self.data == other.data
        )

    def __add__(self, other: "MatrixPoly") -> "MatrixPoly":
        self._check(other)
        return MatrixPoly(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __sub__(self, other: "MatrixPoly") -> "MatrixPoly":
        self._check(other)
        return MatrixPoly(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __neg__(self) -> "MatrixPoly":
        return MatrixPoly([[-a for a in row] for row in self.data])

    def __mul__(self, other: "MatrixPoly") -> "MatrixPoly":
        self._check(other)
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = CPoly.zero()
                for t in range(n):
                    a = self.data[i][t]
                    b = other.data[t][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixPoly(out)

    def scale(self, coeff: CPoly | Scalar) -> "MatrixPoly":
        c = coeff if isinstance(coeff, CPoly) else CPoly.const(coeff)
        return MatrixPoly([[c * a for a in row] for row in self.data])

    def __repr__(self) -> str:
        rows = "; ".join(", ".join(str(e) for e in row) for row in self.data)
        return f"MatrixPoly[{self.n}x{self.n}: {rows}]"

    def _check(self, other: "MatrixPoly") -> None:
        if self.n != other.n:
            raise DimensionMismatch(f"{self.n}x{self.n} vs {other.n}x{other.n}")


def generic_matrix(k: int, n: int) -> MatrixPoly:
    """The n x n matrix whose (i,j) entry is the variable c[k,i,j]."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    return MatrixPoly(
        [[CPoly.variable(k, i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    )


def phi_eval(p: QuasiPoly, n: int) -> MatrixPoly:
    """Evaluation homomorphism: x_k -> generic matrix, scalars -> scalar matrices."""
    for (k, i, j) in {v for _, c in p.terms() for v in c.variables()}:
        if not (1 <= i <= n and 1 <= j <= n):
            raise DimensionMismatch(f"coefficient variable c[{k},{i},{j}] exceeds n={n}")
    cache: dict[int, MatrixPoly] = {}

    def xi(k: int) -> MatrixPoly:
        if k not in cache:
            cache[k] = generic_matrix(k, n)
        return cache[k]

    total = MatrixPoly.zero(n)
    for w, coeff in p.terms():
        m = MatrixPoly.identity(n)
        for k in w:
            m = m * xi(k)
        total = total + m.scale(coeff)
    return total


def is_quasi_identity(p: QuasiPoly, n: int) -> bool:
    """True iff p vanishes under every evaluation in the n x n matrices."""
    return phi_eval(p, n).is_zero()


def is_central(p: QuasiPoly, n: int) -> bool:
    """True iff every evaluation of p is a scalar matrix."""
    return phi_eval(p, n).is_scalar()


def central_witness(
    p: QuasiPoly, n: int, seed: int = 0, bound: int = 9, max_trials: int = 200
) -> tuple[dict[int, QMatrix], QMatrix] | None:
    """A rational point where p evaluates to a non-scalar matrix, or None.

    Matrix-unit tuples are tried before random integer matrices so witnesses
    stay small and reproducible.
    """
    gens = sorted(p.generators())
    units = [matrix_unit(i, j, n) for i in range(1, n + 1) for j in range(1, n + 1)]
    rng = random.Random(seed)

    def non_scalar(m: QMatrix) -> bool:
        for i in range(n):
            for j in range(n):
                if i != j and m[i, j]:
                    return True
        return any(m[i, i] != m[0, 0] for i in range(1, n))

    if len(gens) <= 2:
        for combo in itertools.product(units, repeat=len(gens)):
            assignment = dict(zip(gens, combo))
            value = evaluate(p, assignment, n)
            if non_scalar(value):
                return assignment, value
    for _ in range(max_trials):
        assignment = {k: QMatrix.random(n, n, rng, bound) for k in gens}
        value = evaluate(p, assignment, n)
        if non_scalar(value):
            return assignment, value
    return None


def matrix_unit(i: int, j: int, n: int) -> QMatrix:
    """e_ij with 1-based indices."""
    return QMatrix(
        [[1 if (r, c) == (i - 1, j - 1) else 0 for c in range(n)] for r in range(n)]
    )


def evaluate(p: QuasiPoly, matrices: Mapping[int, QMatrix], n: int) -> QMatrix:
    """Exact value of p at a tuple of rational matrices."""
    for k, m in matrices.items():
        if m.shape() != (n, n):
            raise DimensionMismatch(f"matrix for x{k} has shape {m.shape()}")
    missing = p.generators() - set(matrices)
    if missing:
        raise MissingAssignment(f"no matrix for generators {sorted(missing)}")
    total = QMatrix.zeros(n, n)
    identity = QMatrix.identity(n)
    for w, coeff in p.terms():
        assignment = {
            (k, i, j): matrices[k][i - 1, j - 1] for (k, i, j) in coeff.variables()
        }
        value = coeff.eval(assignment)
        if not value:
            continue
        m = identity
        for k in w:
            m = m * matrices[k]
        total = total + m.scale(value)
    return total


# -- trace words and trace polynomials ---------------------------------------


def canonical_rotation(letters: Iterable[int]) -> Word:
    """Lexicographically least cyclic rotation; the key for trace factors."""
    t = tuple(letters)
    if not t:
        return t
    return min(t[i:] + t[:i] for i in range(len(t)))


def trace_word_cpoly(letters: Iterable[int], n: int) -> CPoly:
    """tr of the product of generic matrices along a word, as a CPoly."""
    t = tuple(letters)
    if not t:
        return CPoly.const(n)
    total = CPoly.zero()
    for path in itertools.product(range(1, n + 1), repeat=len(t)):
        term = CPoly.one()
        for pos, k in enumerate(t):
            term = term * CPoly.variable(k, path[pos], path[(pos + 1) % len(t)])
        total = total + term
    return total


TraceKey = tuple[tuple[Word, ...], Word]  # (sorted trace factors, free word)


class TracePoly:
    """Formal trace polynomial: rational combinations of tr-products times words.

    Trace factors are stored in canonical cyclic rotation and sorted, so
    tr(x1*x2) and tr(x2*x1) merge.  Homogeneity counts occurrences inside
    trace factors as well as word letters, which is what full polarization
    permutes.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[TraceKey, Scalar] | None = None):
        clean: dict[TraceKey, Fraction] = {}
        if terms:
            for (traces, w), coeff in terms.items():
                c = Fraction(coeff)
                if not c:
                    continue
                key = (tuple(sorted(canonical_rotation(t) for t in traces)), tuple(w))
                s = clean.get(key, Fraction(0)) + c
                if s:
                    clean[key] = s
                else:
                    del clean[key]
        self._terms = clean

    @staticmethod
    def zero() -> "TracePoly":
        return TracePoly()

    @staticmethod
    def const(c: Scalar) -> "TracePoly":
        return TracePoly({((), ()): c})

    @staticmethod
    def x(k: int) -> "TracePoly":
        return TracePoly({((), (k,)): 1})

    @staticmethod
    def tr(letters: Iterable[int]) -> "TracePoly":
        return TracePoly({((tuple(letters),), ()): 1})

    def terms(self) -> list[tuple[TraceKey, Fraction]]:
        return sorted(
            self._terms.items(),
            key=lambda t: (word_key(t[0][1]), t[0][0]),
        )

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TracePoly) and self._terms == other._terms

    def __add__(self, other: "TracePoly") -> "TracePoly":
        out = dict(self._terms)
        for key, c in other._terms.items():
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return _trace_raw(out)

    def __neg__(self) -> "TracePoly":
        return _trace_raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "TracePoly") -> "TracePoly":
        return self + (-other)

    def __mul__(self, other: "TracePoly") -> "TracePoly":
        out: dict[TraceKey, Fraction] = {}
        for (ta, wa), ca in self._terms.items():
            for (tb, wb), cb in other._terms.items():
                key = (tuple(sorted(ta + tb)), wa + wb)
                s = out.get(key, Fraction(0)) + ca * cb
                if s:
                    out[key] = s
                else:
                    del out[key]
        return _trace_raw(out)

    def scale(self, c: Scalar) -> "TracePoly":
        c = Fraction(c)
        if not c:
            return TracePoly.zero()
        return _trace_raw({k: c * v for k, v in self._terms.items()})

    def degree_in(self, k: int) -> dict[TraceKey, int]:
        return {
            key: key[1].count(k) + sum(t.count(k) for t in key[0])
            for key in self._terms
        }

    def relabel(self, mapping: Mapping[int, int]) -> "TracePoly":
        out: dict[TraceKey, Fraction] = {}
        for (traces, w), c in self._terms.items():
            key = (
                tuple(
                    sorted(
                        canonical_rotation(mapping.get(g, g) for g in t)
                        for t in traces
                    )
                ),
                tuple(mapping.get(g, g) for g in w),
            )
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                del out[key]
        return _trace_raw(out)

    def polarize(self, generator: int, fresh: Sequence[int]) -> "TracePoly":
        """Full polarization in one generator, trace slots included.

        Input must be homogeneous of degree len(fresh) in the generator,
        counting word letters and trace-factor letters together.
        """
        d = len(fresh)
        out = TracePoly.zero()
        for (traces, w), coeff in self._terms.items():
            slots = []
            for t_idx, t in enumerate(traces):
                slots.extend(("tr", t_idx, pos) for pos, g in enumerate(t) if g == generator)
            slots.extend(("w", 0, pos) for pos, g in enumerate(w) if g == generator)
            if len(slots) != d:
                raise ValueError(
                    f"term {traces}|{w} has degree {len(slots)} in x{generator}, expected {d}"
                )
            for perm in itertools.permutations(fresh):
                new_traces = [list(t) for t in traces]
                new_word = list(w)
                for (kind, t_idx, pos), g in zip(slots, perm):
                    if kind == "tr":
                        new_traces[t_idx][pos] = g
                    else:
                        new_word[pos] = g
                out = out + TracePoly(
                    {(tuple(tuple(t) for t in new_traces), tuple(new_word)): coeff}
                )
        return out

    def expand(self, n: int) -> QuasiPoly:
        """Expand every trace factor into generic-matrix entries."""
        total = QuasiPoly.zero()
        for (traces, w), coeff in self._terms.items():
            c = CPoly.const(coeff)
            for t in traces:
                c = c * trace_word_cpoly(t, n)
            total = total + QuasiPoly({w: c})
        return total

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (traces, w), coeff in self.terms():
            factors = [f"tr({'*'.join(f'x{g}' for g in t)})" for t in traces]
            if w:
                factors.append("*".join(f"x{g}" for g in w))
            body = "*".join(factors) if factors else "1"
            if coeff == 1:
                text = body
            elif coeff == -1:
                text = f"-{body}"
            else:
                text = f"{coeff}*{body}"
            if parts and not text.startswith("-"):
                parts.append(f"+ {text}")
            elif parts:
                parts.append(f"- {text[1:]}")
            else:
                parts.append(text)
        return " ".join(parts)

    __repr__ = __str__


def _trace_raw(terms: dict[TraceKey, Fraction]) -> TracePoly:
    t = TracePoly()
    t._terms = terms
    return t


# -- classical polynomials ----------------------------------------------------


def standard_poly(h: int) -> QuasiPoly:
    """S_h: the signed sum over all orderings of x_1..x_h; h! terms."""
    if h < 1:
        raise ValueError("h must be >= 1")
    terms: dict[Word, int] = {}
    for perm in itertools.permutations(range(1, h + 1)):
        terms[perm] = _sign(perm)
    return QuasiPoly({w: CPoly.const(c) for w, c in terms.items()})


def capelli(t: int) -> QuasiPoly:
    """C_{2t-1} in x_1..x_t with the y slots realized as x_{t+1}..x_{2t-1}."""
    if t < 1:
        raise ValueError("t must be >= 1")
    terms: dict[Word, int] = {}
    for perm in itertools.permutations(range(1, t + 1)):
        w: list[int] = []
        for idx, g in enumerate(perm):
            w.append(g)
            if idx < t - 1:
                w.append(t + 1 + idx)
        terms[tuple(w)] = _sign(perm)
    return QuasiPoly({w: CPoly.const(c) for w, c in terms.items()})


def _sign(perm: Sequence[int]) -> int:
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s


def char_poly_coefficients(n: int) -> list[TracePoly]:
    """The coefficients tau_1..tau_n of the degree-n characteristic identity,
    as formal trace expressions in x_1, via Newton's identities
    i*e_i = sum_{j=1..i} (-1)^(j-1) e_{i-j} p_j with tau_i = (-1)^i e_i."""
    p = [TracePoly.zero()] + [TracePoly.tr((1,) * j) for j in range(1, n + 1)]
    e = [TracePoly.const(1)]
    for i in range(1, n + 1):
        acc = TracePoly.zero()
        for j in range(1, i + 1):
            term = e[i - j] * p[j]
            acc = acc + (term if j % 2 == 1 else -term)
        e.append(acc.scale(Fraction(1, i)))
    return [e[i].scale((-1) ** i) for i in range(1, n + 1)]


def cayley_hamilton_q_trace(n: int) -> TracePoly:
    """q_n(x_1) = x_1^n + tau_1 x_1^(n-1) + ... + tau_n as a trace polynomial."""
    if n < 1:
        raise ValueError("n must be >= 1")
    taus = char_poly_coefficients(n)
    total = TracePoly({((), (1,) * n): 1})
    for i, tau in enumerate(taus, start=1):
        total = total + tau * TracePoly({((), (1,) * (n - i)): 1})
    return total


def cayley_hamilton_q(n: int) -> QuasiPoly:
    """The one-generator Cayley-Hamilton quasi-polynomial; phi_eval(q_n, n) = 0."""
    return cayley_hamilton_q_trace(n).expand(n)


def cayley_hamilton_Q_trace(n: int) -> TracePoly:
    """Multilinear Cayley-Hamilton polynomial as a sum over S_{n+1}.

    Each permutation contributes its sign times a product of trace factors,
    one per cycle avoiding n+1, and the word read along the cycle through
    n+1.  The sum is normalized by the global sign (-1)^n so that the
    diagonal restriction Q_n(x,...,x) = n! q_n(x) holds for every n: the raw
    cycle sum carries word terms signed by an (n+1)-cycle, which flips the
    whole expression for odd n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    global_sign = (-1) ** n
    total: dict[TraceKey, Fraction] = {}
    for perm in itertools.permutations(range(1, n + 2)):
        sigma = {i + 1: perm[i] for i in range(n + 1)}
        traces: list[Word] = []
        w: Word = ()
        seen: set[int] = set()
        for start in range(1, n + 2):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = sigma[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = sigma[nxt]
            if n + 1 in cycle:
                # Rotate so n+1 is last: (s_1,...,s_k, n+1) contributes the word.
                pos = cycle.index(n + 1)
                w = tuple(cycle[pos + 1 :] + cycle[:pos])
            else:
                traces.append(canonical_rotation(cycle))
        key = (tuple(sorted(traces)), w)
        sgn = global_sign * _sign(perm)
        s = total.get(key, Fraction(0)) + sgn
        if s:
            total[key] = s
        else:
            del total[key]
    return _trace_raw(total)


def cayley_hamilton_Q(n: int) -> QuasiPoly:
    """The expanded multilinear Cayley-Hamilton quasi-polynomial in x_1..x_n."""
    return cayley_hamilton_Q_trace(n).expand(n)
