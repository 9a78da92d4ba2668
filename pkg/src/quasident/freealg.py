"""Quasi-polynomials: noncommutative words in generators x_k with CPoly coefficients.

A Word is a tuple of generator indices (empty = unit).  A QuasiPoly maps
words to nonzero CPoly coefficients; multiplication concatenates words and
multiplies coefficients (coefficients commute with everything).

Substitution follows the coupled rule that makes the set of quasi-identities
closed: replacing x_k by H_k also replaces every coefficient variable
c[k,i,j] by the (i,j) entry of the generic-matrix image of H_k.

Polarization and the antisymmetrizer treat a generator's occurrences inside
coefficient variables on the same footing as word letters where that is
meaningful (antisymmetrizer); polarization is restricted to inputs whose
coefficients do not involve the polarized generator.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import (
    CoefficientDependsOnGenerator,
    DimensionMismatch,
    MissingAssignment,
    NotHomogeneous,
    NotMultilinear,
)
from .ratpoly import CPoly, Monomial

Word = tuple[int, ...]

CoeffLike = Union[CPoly, int, Fraction]

_UNIT: Word = ()


def word(*letters: int) -> Word:
    if any(k < 1 for k in letters):
        raise ValueError("generator indices must be positive")
    return tuple(letters)


def word_key(w: Word) -> tuple[int, Word]:
    """Canonical word order: by length, then lexicographically."""
    return (len(w), w)


class QuasiPoly:
    """Immutable element of the free algebra over CPoly coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, CoeffLike] | None = None):
        clean: dict[Word, CPoly] = {}
        if terms:
            for w, coeff in terms.items():
                c = coeff if isinstance(coeff, CPoly) else CPoly.const(coeff)
                if c:
                    acc = clean.get(w)
                    c = c if acc is None else acc + c
                    if c:
                        clean[w] = c
                    else:
                        del clean[w]
        self._terms = clean

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero() -> "QuasiPoly":
        return QuasiPoly()

    @staticmethod
    def one() -> "QuasiPoly":
        return QuasiPoly({_UNIT: CPoly.one()})

    @staticmethod
    def const(c: CoeffLike) -> "QuasiPoly":
        return QuasiPoly({_UNIT: c})

    @staticmethod
    def x(k: int) -> "QuasiPoly":
        """The generator x_k."""
        return QuasiPoly({word(k): CPoly.one()})

    @staticmethod
    def from_word(w: Iterable[int], coeff: CoeffLike = 1) -> "QuasiPoly":
        return QuasiPoly({word(*w): coeff})

    # -- inspection ------------------------------------------------------------

    def terms(self) -> list[tuple[Word, CPoly]]:
        return sorted(self._terms.items(), key=lambda t: word_key(t[0]))

    def coefficient(self, w: Word) -> CPoly:
        return self._terms.get(tuple(w), CPoly.zero())

    def words(self) -> list[Word]:
        return sorted(self._terms, key=word_key)

    def generators(self) -> set[int]:
        """Generators appearing in words or in coefficient variable indices."""
        gens: set[int] = set()
        for w, coeff in self._terms.items():
            gens.update(w)
            gens.update(k for (k, _, _) in coeff.variables())
        return gens

    def word_degree(self) -> int:
        """Longest word length; 0 for scalar or zero polynomials."""
        return max((len(w) for w in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def has_scalar_coefficients(self) -> bool:
        return all(c.is_constant() for c in self._terms.values())

    def term_count(self) -> int:
        return sum(len(c) for c in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuasiPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction, CPoly)):
            return self == QuasiPoly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset((w, hash(c)) for w, c in self._terms.items()))

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other: "QuasiPoly | CoeffLike") -> "QuasiPoly":
        other = _coerce(other)
        out = dict(self._terms)
        for w, coeff in other._terms.items():
            s = out.get(w)
            s = coeff if s is None else s + coeff
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return _raw(out)

    __radd__ = __add__

    def __neg__(self) -> "QuasiPoly":
        return _raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "QuasiPoly | CoeffLike") -> "QuasiPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other: CoeffLike) -> "QuasiPoly":
        return _coerce(other) - self

    def __mul__(self, other: "QuasiPoly | CoeffLike") -> "QuasiPoly":
        other = _coerce(other)
        out: dict[Word, CPoly] = {}
        for wa, ca in self._terms.items():
            for wb, cb in other._terms.items():
                w = wa + wb
                c = ca * cb
                s = out.get(w)
                s = c if s is None else s + c
                if s:
                    out[w] = s
                else:
                    del out[w]
        return _raw(out)

    def __rmul__(self, other: CoeffLike) -> "QuasiPoly":
        return _coerce(other) * self

    def scale(self, c: CoeffLike) -> "QuasiPoly":
        return _coerce(c) * self

    def __pow__(self, e: int) -> "QuasiPoly":
        if e < 0:
            raise ValueError("negative power")
        out = QuasiPoly.one()
        for _ in range(e):
            out = out * self
        return out

    # -- structure maps ------------------------------------------------------------

    def relabel(self, mapping: Mapping[int, int]) -> "QuasiPoly":
        """Rename generators, coupling words with coefficient variables.

        Generators absent from the mapping are left alone.  Non-injective
        renames (diagonal restrictions) merge terms as expected.
        """
        covered = {k: v for k, v in mapping.items()}
        out: dict[Word, CPoly] = {}
        for w, coeff in self._terms.items():
            nw = tuple(covered.get(k, k) for k in w)
            table = {
                (k, i, j): CPoly.variable(covered.get(k, k), i, j)
                for (k, i, j) in coeff.variables()
            }
            nc = coeff.subst(table) if table else coeff
            s = out.get(nw)
            s = nc if s is None else s + nc
            if s:
                out[nw] = s
            else:
                del out[nw]
        return _raw(out)

    def substitute(self, subs: Mapping[int, "QuasiPoly"], n: int) -> "QuasiPoly":
        """T-ideal substitution: x_k -> subs[k], c[k,i,j] -> Phi(subs[k])_{ij}.

        Every generator appearing in self (in words or coefficient indices)
        must be covered.  The coefficient replacement goes through the
        generic-matrix evaluation at dimension n.
        """
        from . import genmat  # local import; genmat builds on this module

        needed = self.generators()
        missing = needed - set(subs)
        if missing:
            raise MissingAssignment(f"no substitute for generators {sorted(missing)}")
        for coeff in self._terms.values():
            for (k, i, j) in coeff.variables():
                if not (1 <= i <= n and 1 <= j <= n):
                    raise DimensionMismatch(
                        f"coefficient variable c[{k},{i},{j}] exceeds n={n}"
                    )
        images = {k: genmat.phi_eval(subs[k], n) for k in needed}
        out = QuasiPoly.zero()
        for w, coeff in self._terms.items():
            table = {}
            for (k, i, j) in coeff.variables():
                table[(k, i, j)] = images[k].entry(i, j)
            new_coeff = coeff.subst(table) if table else coeff
            piece = QuasiPoly.const(new_coeff)
            for k in w:
                piece = piece * subs[k]
            out = out + piece
        return out

    # -- printing ---------------------------------------------------------------

    def __repr__(self) -> str:
        return f"QuasiPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w, coeff in self.terms():
            wtxt = "*".join(f"x{k}" for k in w)
            if not w:
                body = f"({coeff})" if len(coeff) > 1 or not coeff.is_constant() else str(coeff)
            elif coeff == CPoly.one():
                body = wtxt
            elif coeff == CPoly.const(-1):
                body = f"-{wtxt}"
            elif len(coeff) == 1 and coeff.is_constant():
                body = f"{coeff.constant_value()}*{wtxt}"
            else:
                body = f"({coeff})*{wtxt}"
            if parts and not body.startswith("-"):
                parts.append(f"+ {body}")
            elif parts:
                parts.append(f"- {body[1:]}")
            else:
                parts.append(body)
        return " ".join(parts)


def _coerce(value: "QuasiPoly | CoeffLike") -> QuasiPoly:
    if isinstance(value, QuasiPoly):
        return value
    if isinstance(value, (CPoly, int, Fraction)):
        return QuasiPoly.const(value)
    raise TypeError(f"cannot treat {type(value).__name__} as a QuasiPoly")


def _raw(terms: dict[Word, CPoly]) -> QuasiPoly:
    p = QuasiPoly()
    p._terms = terms
    return p


def _coeff_degree_in(mono: Monomial, k: int) -> int:
    return sum(e for (g, _, _), e in mono if g == k)


def multilinearize(p: QuasiPoly, generator: int, fresh: list[int]) -> QuasiPoly:
    """Full polarization of p in one generator.

    p must be homogeneous of degree d = len(fresh) in x_generator, counting
    word occurrences only, and its coefficients must not involve that
    generator.  Restricting all fresh generators back to x_generator gives
    d! times the input.
    """
    for w, coeff in p._terms.items():
        if any(g == generator for (g, _, _) in coeff.variables()):
            raise CoefficientDependsOnGenerator(
                f"coefficient of word {w} involves c[{generator},.,.]"
            )
    d = len(fresh)
    if len(set(fresh)) != d:
        raise ValueError("fresh generators must be distinct")
    seen = p.generators()
    if any(f in seen for f in fresh):
        raise ValueError("fresh generators already occur in the input")
    out: dict[Word, CPoly] = {}
    for w, coeff in p._terms.items():
        positions = [idx for idx, g in enumerate(w) if g == generator]
        if len(positions) != d:
            raise NotHomogeneous(
                f"word {w} has degree {len(positions)} in x{generator}, expected {d}"
            )
        for perm in itertools.permutations(fresh):
            nw = list(w)
            for pos, g in zip(positions, perm):
                nw[pos] = g
            key = tuple(nw)
            s = out.get(key)
            s = coeff if s is None else s + coeff
            if s:
                out[key] = s
            else:
                del out[key]
    return _raw(out)


def _multilinear_atoms(p: QuasiPoly, generators: list[int]) -> None:
    """Check joint multilinearity: each listed generator occurs exactly once
    per (coefficient monomial, word) atom, across word letters and
    coefficient variables together."""
    gset = set(generators)
    for w, coeff in p._terms.items():
        word_counts = {g: 0 for g in gset}
        for k in w:
            if k in gset:
                word_counts[k] += 1
        for mono, _ in coeff.terms():
            for g in gset:
                total = word_counts[g] + _coeff_degree_in(mono, g)
                if total != 1:
                    raise NotMultilinear(
                        f"generator x{g} occurs {total} times in an atom of {p}"
                    )


def antisymmetrize(
    p: QuasiPoly, generators: list[int], normalized: bool = True
) -> QuasiPoly:
    """Antisymmetrizer over the listed generators.

    Returns (1/h!) sum over permutations of sign times the relabeled input;
    pass normalized=False for the bare signed sum.  Input must be multilinear
    in the listed generators (jointly across words and coefficients).
    """
    if len(set(generators)) != len(generators):
        raise ValueError("generators must be distinct")
    _multilinear_atoms(p, list(generators))
    h = len(generators)
    total = QuasiPoly.zero()
    for perm in itertools.permutations(range(h)):
        sign = _perm_sign(perm)
        mapping = {generators[i]: generators[perm[i]] for i in range(h)}
        total = total + p.relabel(mapping).scale(sign)
    if normalized:
        total = total.scale(Fraction(1, math.factorial(h)))
    return total


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign
