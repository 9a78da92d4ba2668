"""Antisymmetric invariants of matrix tuples: the formal algebra on
T_1..T_{n-2}, X, Y, the concrete wedge algebra over the traceless dual basis,
and their realizations as multilinear antisymmetric matrix functions.

Formal side (Ext*): monomials are T-subset times X^i Y^j with both exponents
below 2n and total degree at most n^2 (degree of T_h is 2h+1).  All three
kinds of generators are odd and pairwise anticommute; powers of X (and of Y)
accumulate without sign, which is why the algebra is not supercommutative:
moving X^a past X^b costs nothing while the grading would predict (-1)^ab.
Products of degree above n^2 are dropped inside multiplication, matching the
quotient defining the algebra.

Concrete side (WedgeForm): the exterior algebra over the dual of the
traceless matrices, with an adjoined odd polynomial variable X, X^{2n} = 0,
degree capped at n^2.  The fixed ordered basis of the traceless matrices is
all e_ij (i != j) in row-major order followed by e_ii - e_{i+1,i+1}; this
pins coordinates and signs.

Realizations interpret X as the raw matrix slot, Y as the traceless part of
the slot, and T_h as the scalar form tr(S_{2h+1}(...)); the wedge of
already-antisymmetric functions is computed as the division-free shuffle
sum, which agrees with the full symmetric-group average.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    ArityMismatch,
    BudgetExceeded,
    DimensionMismatch,
    WrongDegree,
)
from .exactla import QMatrix, Subspace, rref
from . import genmat

# ---------------------------------------------------------------------------
# Formal algebra on T_1..T_{n-2}, X, Y
# ---------------------------------------------------------------------------

ExtMonomial = tuple[tuple[int, ...], int, int]  # (ascending T indices, i, j)


def ext_monomial(n: int, tset: Iterable[int], i: int, j: int) -> ExtMonomial:
    ts = tuple(sorted(set(tset)))
    if len(ts) != len(tuple(tset)):
        raise ValueError("repeated T generator squares to zero; not a monomial")
    if any(not 1 <= h <= n - 2 for h in ts):
        raise ValueError(f"T indices must lie in 1..{n - 2}")
    if not (0 <= i < 2 * n and 0 <= j < 2 * n):
        raise ValueError(f"exponents must lie in 0..{2 * n - 1}")
    m = (ts, i, j)
    if ext_degree(m) > n * n:
        raise ValueError(f"degree {ext_degree(m)} exceeds the cap {n * n}")
    return m


def ext_degree(m: ExtMonomial) -> int:
    tset, i, j = m
    return sum(2 * h + 1 for h in tset) + i + j


class ExtElement:
    """Rational combination of normal-form monomials, tied to a dimension n."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[ExtMonomial, Fraction | int] | None = None):
        self.n = n
        clean: dict[ExtMonomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                m = ext_monomial(n, m[0], m[1], m[2])
                c = Fraction(c)
                if c:
                    s = clean.get(m, Fraction(0)) + c
                    if s:
                        clean[m] = s
                    else:
                        del clean[m]
        self._terms = clean

    @staticmethod
    def zero(n: int) -> "ExtElement":
        return ExtElement(n)

    @staticmethod
    def monomial(n: int, tset: Iterable[int], i: int, j: int, coeff: Fraction | int = 1) -> "ExtElement":
        return ExtElement(n, {ext_monomial(n, tset, i, j): Fraction(coeff)})

    def terms(self) -> list[tuple[ExtMonomial, Fraction]]:
        return sorted(self._terms.items())

    def coefficient(self, m: ExtMonomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_homogeneous(self) -> bool:
        degs = {ext_degree(m) for m in self._terms}
        return len(degs) <= 1

    def degree(self) -> int:
        if not self._terms:
            return 0
        degs = {ext_degree(m) for m in self._terms}
        if len(degs) > 1:
            raise WrongDegree("element is not homogeneous")
        return degs.pop()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ExtElement)
            and self.n == other.n
            and self._terms == other._terms
        )

    def __add__(self, other: "ExtElement") -> "ExtElement":
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return _ext_raw(self.n, out)

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        return self + other.scale(-1)

    def scale(self, c: Fraction | int) -> "ExtElement":
        c = Fraction(c)
        if not c:
            return ExtElement.zero(self.n)
        return _ext_raw(self.n, {m: c * v for m, v in self._terms.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(
            f"{c}*{format_ext_monomial(m)}" for m, c in self.terms()
        )

    __repr__ = __str__

    def _check(self, other: "ExtElement") -> None:
        if self.n != other.n:
            raise DimensionMismatch(f"elements live at n={self.n} and n={other.n}")


def format_ext_monomial(m: ExtMonomial) -> str:
    tset, i, j = m
    parts = [f"T{h}" for h in tset]
    if i:
        parts.append("X" if i == 1 else f"X^{i}")
    if j:
        parts.append("Y" if j == 1 else f"Y^{j}")
    return "*".join(parts) if parts else "1"


def _ext_raw(n: int, terms: dict[ExtMonomial, Fraction]) -> ExtElement:
    e = ExtElement(n)
    e._terms = terms
    return e


def atilde_basis(n: int, degree: int) -> list[ExtMonomial]:
    """All normal-form monomials of the given degree, in sorted order."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 <= degree <= n * n:
        raise ValueError(f"degree must lie in 0..{n * n}")
    out = []
    t_indices = list(range(1, n - 1))
    for r in range(len(t_indices) + 1):
        for tset in itertools.combinations(t_indices, r):
            tdeg = sum(2 * h + 1 for h in tset)
            rest = degree - tdeg
            if rest < 0:
                continue
            for i in range(min(rest, 2 * n - 1) + 1):
                j = rest - i
                if 0 <= j <= 2 * n - 1:
                    out.append((tset, i, j))
    return sorted(out)


def _merge_tsets(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[int, ...], int] | None:
    """Merge two ascending T-index tuples; None if they share an index.

    The sign is the parity of interleaving transpositions: pairs (x, y) with
    x in a, y in b, x > y.
    """
    if set(a) & set(b):
        return None
    inversions = sum(1 for x in a for y in b if x > y)
    return tuple(sorted(a + b)), (-1) ** inversions


def atilde_mul(a: ExtElement, b: ExtElement, n: int | None = None) -> ExtElement:
    """Normal-form product in the formal algebra.

    Signs: each T of the right factor hops past X^i Y^j of the left factor
    (all odd letters), then the T blocks interleave, then the right X power
    hops past the left Y power.  Exponents at or above 2n and total degree
    above n^2 vanish.
    """
    if n is None:
        n = a.n
    if a.n != n or b.n != n:
        raise DimensionMismatch("factors live at different dimensions")
    cap = n * n
    out: dict[ExtMonomial, Fraction] = {}
    for (ta, ia, ja), ca in a._terms.items():
        for (tb, ib, jb), cb in b._terms.items():
            merged = _merge_tsets(ta, tb)
            if merged is None:
                continue
            ii, jj = ia + ib, ja + jb
            if ii >= 2 * n or jj >= 2 * n:
                continue
            tset, tsign = merged
            m = (tset, ii, jj)
            if ext_degree(m) > cap:
                continue
            sign = tsign
            if (len(tb) * (ia + ja)) % 2:
                sign = -sign
            if (ib * ja) % 2:
                sign = -sign
            c = sign * ca * cb
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                del out[m]
    return _ext_raw(n, out)


def obar(n: int) -> ExtElement:
    """The degree 2n-1 element whose multiplication realizes the map studied
    in degree n^2: n(X^{2n-1} - Y^{2n-1}) - sum_i (X^{2i} - Y^{2i}) T_{n-i-1}."""
    if n < 2:
        raise ValueError("n must be >= 2")
    terms: dict[ExtMonomial, Fraction] = {
        ((), 2 * n - 1, 0): Fraction(n),
        ((), 0, 2 * n - 1): Fraction(-n),
    }
    for i in range(1, n - 1):
        h = n - i - 1
        terms[((h,), 2 * i, 0)] = Fraction(-1)
        terms[((h,), 0, 2 * i)] = Fraction(1)
    return ExtElement(n, terms)


def rho(n: int, m: ExtMonomial) -> Fraction:
    """The linear functional on degree n^2 deciding membership in the image.

    Zero if at least two T factors are missing; (-1)^(h+n) if exactly T_h is
    missing; n if all factors are present and both exponents are even and lie
    in [2, 2n-2]; zero otherwise.
    """
    if ext_degree(m) != n * n:
        raise WrongDegree(f"rho is defined in degree {n * n}, got {ext_degree(m)}")
    tset, i, j = m
    missing = [h for h in range(1, n - 1) if h not in tset]
    if len(missing) >= 2:
        return Fraction(0)
    if len(missing) == 1:
        h = missing[0]
        return Fraction((-1) ** (h + n))
    if i % 2 == 0 and j % 2 == 0 and 2 <= i <= 2 * n - 2 and 2 <= j <= 2 * n - 2:
        return Fraction(n)
    return Fraction(0)


def rho_vector(n: int) -> tuple[Fraction, ...]:
    return tuple(rho(n, m) for m in atilde_basis(n, n * n))


def pi_map(n: int, side: str = "right") -> QMatrix:
    """Matrix of multiplication by obar(n) from degree n^2-2n+1 to degree n^2.

    side="right" is a -> a * obar (the convention used everywhere);
    side="left" is a -> obar * a, exposed for cross-checking.
    """
    dom = atilde_basis(n, n * n - 2 * n + 1)
    cod = atilde_basis(n, n * n)
    cod_index = {m: r for r, m in enumerate(cod)}
    ob = obar(n)
    cols = []
    for m in dom:
        a = ExtElement.monomial(n, m[0], m[1], m[2])
        prod = atilde_mul(a, ob) if side == "right" else atilde_mul(ob, a)
        col = [Fraction(0)] * len(cod)
        for mm, c in prod.terms():
            col[cod_index[mm]] = c
        cols.append(col)
    return QMatrix(list(zip(*cols))) if cols else QMatrix.zeros(len(cod), 0)


def special_monomial(n: int) -> ExtMonomial:
    """The complement generator: the full T product times X^2 Y^(2n-2)."""
    return (tuple(range(1, n - 1)), 2, 2 * n - 2)


def verify_kerim(n: int, max_n: int = 4) -> dict:
    """Exact check that the image of right multiplication by obar equals the
    kernel of rho in top degree, with codimension one and the stated
    complement; returns a dimension ledger."""
    if n > max_n:
        raise BudgetExceeded(f"n={n} above the configured ceiling {max_n}")
    cod = atilde_basis(n, n * n)
    matrix = pi_map(n)
    image = Subspace.from_vectors(len(cod), [matrix.column(c) for c in range(matrix.cols)])
    rv = rho_vector(n)
    kernel = _kernel_of_functional(rv)
    comp = [Fraction(0)] * len(cod)
    comp[cod.index(special_monomial(n))] = Fraction(1)
    rho_pi_zero = all(
        sum(rv[r] * matrix[r, c] for r in range(matrix.rows)) == 0
        for c in range(matrix.cols)
    )
    together = image.sum(Subspace.from_vectors(len(cod), [comp]))
    return {
        "n": n,
        "ambient_dim": len(cod),
        "domain_dim": matrix.cols,
        "image_dim": image.dim(),
        "kernel_rho_dim": kernel.dim(),
        "rho_pi_zero": rho_pi_zero,
        "image_equals_kernel": image == kernel,
        "codimension": len(cod) - image.dim(),
        "complement_spans": together.dim() == len(cod),
        "complement_monomial": format_ext_monomial(special_monomial(n)),
    }


def _kernel_of_functional(values: Sequence[Fraction]) -> Subspace:
    ambient = len(values)
    row = {c: v for c, v in enumerate(values) if v}
    from .exactla import nullspace_of_rows

    return Subspace.from_vectors(ambient, nullspace_of_rows([row], ambient))


# ---------------------------------------------------------------------------
# Concrete wedge algebra over the traceless dual basis
# ---------------------------------------------------------------------------


def traceless_basis(n: int) -> list[QMatrix]:
    """Fixed ordered basis of the traceless matrices: e_ij (i != j) row-major,
    then e_ii - e_{i+1,i+1}."""
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                out.append(genmat.matrix_unit(i, j, n))
    for i in range(1, n):
        out.append(genmat.matrix_unit(i, i, n) - genmat.matrix_unit(i + 1, i + 1, n))
    return out


WedgeKey = tuple[tuple[int, ...], int]  # (ascending 0-based basis indices, X power)


class WedgeForm:
    """Element of the wedge algebra over the traceless dual basis with an
    adjoined odd variable X (X^{2n} = 0, degree capped at n^2)."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[WedgeKey, Fraction | int] | None = None):
        if n < 2:
            raise ValueError("n must be >= 2")
        self.n = n
        dim = n * n - 1
        clean: dict[WedgeKey, Fraction] = {}
        if terms:
            for (subset, a), c in terms.items():
                subset = tuple(subset)
                if list(subset) != sorted(set(subset)):
                    raise ValueError(f"wedge indices must strictly increase: {subset}")
                if subset and not (0 <= subset[0] and subset[-1] < dim):
                    raise ValueError(f"wedge index out of range 0..{dim - 1}")
                if not 0 <= a < 2 * n:
                    raise ValueError(f"X exponent {a} out of range")
                if len(subset) + a > n * n:
                    raise ValueError("degree exceeds the cap")
                c = Fraction(c)
                if c:
                    key = (subset, a)
                    s = clean.get(key, Fraction(0)) + c
                    if s:
                        clean[key] = s
                    else:
                        del clean[key]
        self._terms = clean

    @staticmethod
    def zero(n: int) -> "WedgeForm":
        return WedgeForm(n)

    @staticmethod
    def monomial(n: int, subset: Iterable[int], a: int, coeff: Fraction | int = 1) -> "WedgeForm":
        return WedgeForm(n, {(tuple(subset), a): Fraction(coeff)})

    @staticmethod
    def x_power(n: int, a: int, coeff: Fraction | int = 1) -> "WedgeForm":
        return WedgeForm(n, {((), a): Fraction(coeff)})

    def terms(self) -> list[tuple[WedgeKey, Fraction]]:
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        degs = {len(s) + a for (s, a) in self._terms}
        if len(degs) > 1:
            raise WrongDegree("form is not homogeneous")
        return degs.pop() if degs else 0

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, WedgeForm)
            and self.n == other.n
            and self._terms == other._terms
        )

    def __add__(self, other: "WedgeForm") -> "WedgeForm":
        if self.n != other.n:
            raise DimensionMismatch("forms live at different dimensions")
        out = dict(self._terms)
        for key, c in other._terms.items():
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return _wedge_raw(self.n, out)

    def __sub__(self, other: "WedgeForm") -> "WedgeForm":
        return self + other.scale(-1)

    def scale(self, c: Fraction | int) -> "WedgeForm":
        c = Fraction(c)
        if not c:
            return WedgeForm.zero(self.n)
        return _wedge_raw(self.n, {k: c * v for k, v in self._terms.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        def fmt(key: WedgeKey) -> str:
            subset, a = key
            parts = [f"b{i}*" for i in subset]
            if a:
                parts.append("X" if a == 1 else f"X^{a}")
            return "^".join(parts) if parts else "1"
        return " + ".join(f"{c}*{fmt(k)}" for k, c in self.terms())

    __repr__ = __str__


def _wedge_raw(n: int, terms: dict[WedgeKey, Fraction]) -> WedgeForm:
    w = WedgeForm(n)
    w._terms = terms
    return w


def fn_basis(n: int, degree: int) -> list[WedgeKey]:
    """Wedge monomials times X powers of the given total degree."""
    if not 0 <= degree <= n * n:
        raise ValueError(f"degree must lie in 0..{n * n}")
    dim = n * n - 1
    out = []
    for a in range(min(degree, 2 * n - 1) + 1):
        size = degree - a
        if size > dim:
            continue
        for subset in itertools.combinations(range(dim), size):
            out.append((subset, a))
    return sorted(out)


def fn_mul(a: WedgeForm, b: WedgeForm) -> WedgeForm:
    """Graded product: the right factor's wedge block hops past the left X
    power; shared wedge indices kill the term; X powers accumulate with
    X^{2n} = 0 and the degree cap n^2."""
    if a.n != b.n:
        raise DimensionMismatch("forms live at different dimensions")
    n = a.n
    cap = n * n
    out: dict[WedgeKey, Fraction] = {}
    for (sa, xa), ca in a._terms.items():
        for (sb, xb), cb in b._terms.items():
            if set(sa) & set(sb):
                continue
            x = xa + xb
            if x >= 2 * n:
                continue
            if len(sa) + len(sb) + x > cap:
                continue
            inversions = sum(1 for p in sa for q in sb if p > q)
            sign = (-1) ** inversions
            if (xa * len(sb)) % 2:
                sign = -sign
            key = (tuple(sorted(sa + sb)), x)
            c = sign * ca * cb
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                del out[key]
    return _wedge_raw(n, out)


def t_form(n: int, h: int) -> WedgeForm:
    """T_h as an explicit wedge form: the antisymmetric (2h+1)-linear form
    sending a tuple of traceless basis vectors to tr(S_{2h+1}(...))."""
    if not 1 <= h <= n - 1:
        raise ValueError(f"h must lie in 1..{n - 1}")
    basis = traceless_basis(n)
    k = 2 * h + 1
    terms: dict[WedgeKey, Fraction] = {}
    for subset in itertools.combinations(range(len(basis)), k):
        value = _trace_of_standard(tuple(basis[i] for i in subset))
        if value:
            terms[(subset, 0)] = value
    return WedgeForm(n, terms)


def _trace_of_standard(mats: tuple[QMatrix, ...]) -> Fraction:
    n = mats[0].rows
    raw = [m.data for m in mats]
    return Fraction(mat_trace(standard_value_raw(raw, n)))


def on_in_fn(n: int) -> WedgeForm:
    """The minimal antisymmetric identity inside the wedge algebra:
    n X^{2n-1} - sum_{i=0}^{n-2} X^{2i} ^ T_{n-i-1}."""
    total = WedgeForm.x_power(n, 2 * n - 1, n)
    for i in range(0, n - 1):
        h = n - i - 1
        th = t_form(n, h)
        shifted = _wedge_raw(
            n, {(s, a + 2 * i): -c for (s, a), c in th._terms.items()}
        )
        total = total + shifted
    return total


def ideal_component(n: int, degree: int) -> Subspace:
    """Degree component of the ideal generated by on_in_fn(n), spanned by
    v ^ O_n over the basis of the complementary degree.  All generators are
    odd, so left multiples span the component."""
    if degree < 2 * n - 1:
        raise ValueError(f"degree must be at least {2 * n - 1}")
    on = on_in_fn(n)
    dom = fn_basis(n, degree - (2 * n - 1))
    cod = fn_basis(n, degree)
    cod_index = {key: r for r, key in enumerate(cod)}
    vectors = []
    for subset, a in dom:
        v = WedgeForm.monomial(n, subset, a)
        prod = fn_mul(v, on)
        vec = [Fraction(0)] * len(cod)
        for key, c in prod.terms():
            vec[cod_index[key]] = c
        vectors.append(vec)
    return Subspace.from_vectors(len(cod), vectors)


def wedge_component_subspace(n: int, degree: int, size: int) -> Subspace:
    """The coordinate subspace of fn_basis(n, degree) spanned by the
    monomials with a given wedge size (so X power degree - size)."""
    cod = fn_basis(n, degree)
    vectors = []
    for r, (subset, _a) in enumerate(cod):
        if len(subset) == size:
            vec = [Fraction(0)] * len(cod)
            vec[r] = Fraction(1)
            vectors.append(vec)
    return Subspace.from_vectors(len(cod), vectors)


# ---------------------------------------------------------------------------
# Realization as multilinear antisymmetric matrix functions
# ---------------------------------------------------------------------------
#
# The evaluators below work on bare tuples-of-tuples of Python numbers (ints
# or Fractions) rather than QMatrix: sampling feeds integer matrices, and
# integer arithmetic is what keeps the exhaustive and randomized suites fast.
# QMatrix appears only at the public boundary.

Mat = tuple[tuple, ...]


def mat_from(m) -> Mat:
    if isinstance(m, QMatrix):
        return m.data
    return tuple(tuple(row) for row in m)


def mat_identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_zero(n: int) -> Mat:
    return tuple((0,) * n for _ in range(n))


def mat_mul(a: Mat, b: Mat) -> Mat:
    cols = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a
    )


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Mat, c) -> Mat:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_trace(a: Mat):
    return sum(a[i][i] for i in range(len(a)))


def mat_is_zero(a: Mat) -> bool:
    return all(not x for row in a for x in row)


def mat_traceless(a: Mat) -> Mat:
    n = len(a)
    t = Fraction(mat_trace(a), n)
    if not t:
        return a
    return tuple(
        tuple(a[i][j] - t if i == j else a[i][j] for j in range(n)) for i in range(n)
    )


def standard_value_raw(mats: Sequence[Mat], n: int) -> Mat:
    """The standard polynomial of the given matrices by subset dynamics:
    g(S) = sum_k (-1)^(elements of S above k) g(S - k) A_k, g(empty) = I.
    Costs m 2^(m-1) products instead of m! chains."""
    m = len(mats)
    if m == 0:
        return mat_identity(n)
    g: list[Mat | None] = [None] * (1 << m)
    g[0] = mat_identity(n)
    for mask in range(1, 1 << m):
        acc: Mat | None = None
        members = [k for k in range(m) if mask >> k & 1]
        for pos, k in enumerate(members):
            above = len(members) - 1 - pos
            prev = g[mask ^ (1 << k)]
            piece = mat_mul(prev, mats[k]) if mask ^ (1 << k) else mats[k]
            if above % 2:
                piece = mat_scale(piece, -1)
            acc = piece if acc is None else mat_add(acc, piece)
        g[mask] = acc
    return g[(1 << m) - 1]


def standard_value(mats: Sequence) -> QMatrix:
    """S_a at matrices; the empty product is a 1x1 identity placeholder."""
    if not mats:
        return QMatrix.identity(1)
    raw = [mat_from(m) for m in mats]
    return QMatrix(standard_value_raw(raw, len(raw[0])))


@dataclass(frozen=True)
class _Factor:
    """One wedge factor: a multilinear antisymmetric block evaluator.

    scalar=True evaluators return a plain number, matrix evaluators a Mat;
    scalars commute past everything, so the wedge only chains matrix blocks.
    """

    arity: int
    scalar: bool
    ev: Callable


def _x_factor(n: int, a: int) -> _Factor:
    return _Factor(a, False, lambda args: standard_value_raw(args, n))


def _y_factor(n: int, a: int) -> _Factor:
    return _Factor(
        a, False, lambda args: standard_value_raw([mat_traceless(m) for m in args], n)
    )


def _t_factor(n: int, h: int, traceless: bool) -> _Factor:
    k = 2 * h + 1

    def ev(args):
        mats = [mat_traceless(m) for m in args] if traceless else list(args)
        return mat_trace(standard_value_raw(mats, n))

    return _Factor(k, True, ev)


def _dual_factor(n: int, index: int) -> _Factor:
    def ev(args):
        return traceless_coordinates_raw(mat_traceless(args[0]))[index]

    return _Factor(1, True, ev)


def traceless_coordinates_raw(m: Mat) -> list:
    n = len(m)
    coords = [m[i][j] for i in range(n) for j in range(n) if i != j]
    acc = 0
    for i in range(n - 1):
        acc = acc + m[i][i]
        coords.append(acc)
    return coords


def traceless_coordinates(m: QMatrix) -> list[Fraction]:
    """Coordinates of a traceless matrix in traceless_basis(n): off-diagonal
    entries in row-major order, then partial sums of the diagonal."""
    return [Fraction(x) for x in traceless_coordinates_raw(mat_from(m))]


@dataclass(frozen=True)
class MultiFn:
    """Multilinear antisymmetric function from d-tuples of matrices to matrices.

    The callable works on raw tuple matrices; __call__ accepts QMatrix or
    nested sequences and hands back a QMatrix.
    """

    arity: int
    n: int
    fn: Callable[[tuple[Mat, ...]], Mat]

    def __call__(self, args: Sequence) -> QMatrix:
        raw = tuple(mat_from(m) for m in args)
        if len(raw) != self.arity:
            raise ArityMismatch(f"expected {self.arity} matrices, got {len(raw)}")
        return QMatrix(self.fn(raw))

    def raw(self, args: tuple[Mat, ...]) -> Mat:
        if len(args) != self.arity:
            raise ArityMismatch(f"expected {self.arity} matrices, got {len(args)}")
        return self.fn(args)


def _wedge_factors(factors: Sequence[_Factor], n: int) -> MultiFn:
    """Shuffle-sum wedge of antisymmetric factors, values multiplied in factor
    order.  Equals the normalized full-symmetric-group wedge on antisymmetric
    inputs and needs no division.  Block values are cached per evaluation, so
    every (factor, argument subset) pair is computed once."""
    factors = [f for f in factors if f.arity > 0]
    if not factors:
        return MultiFn(0, n, lambda args: mat_identity(n))
    arities = [f.arity for f in factors]
    arity = sum(arities)

    def ev(args: tuple[Mat, ...]) -> Mat:
        caches: list[dict] = [{} for _ in factors]

        def block_value(fi: int, block: tuple[int, ...]):
            cache = caches[fi]
            if block not in cache:
                cache[block] = factors[fi].ev(tuple(args[i] for i in block))
            return cache[block]

        total = mat_zero(n)
        for blocks in _shuffles(arity, arities):
            coeff = 1
            chain: Mat | None = None
            dead = False
            for fi, block in enumerate(blocks):
                value = block_value(fi, tuple(block))
                if factors[fi].scalar:
                    coeff = coeff * value
                    if not coeff:
                        dead = True
                        break
                else:
                    chain = value if chain is None else mat_mul(chain, value)
            if dead:
                continue
            perm = [i for block in blocks for i in block]
            if _perm_sign(perm) < 0:
                coeff = -coeff
            piece = mat_identity(n) if chain is None else chain
            if coeff != 1:
                piece = mat_scale(piece, coeff)
            total = mat_add(total, piece)
        return total

    return MultiFn(arity, n, ev)


def _as_factor(f: MultiFn) -> _Factor:
    return _Factor(f.arity, False, f.fn)


def wedge_fn(f: MultiFn, g: MultiFn) -> MultiFn:
    """Binary shuffle wedge of realized functions."""
    if f.n != g.n:
        raise DimensionMismatch("functions live at different dimensions")
    return _wedge_factors([_as_factor(f), _as_factor(g)], f.n)


def wedge_many_fns(fns: Sequence[MultiFn]) -> MultiFn:
    if not fns:
        raise ValueError("empty factor list")
    return _wedge_factors([_as_factor(f) for f in fns], fns[0].n)


def _shuffles(total: int, arities: Sequence[int]):
    yield from _shuffles_on(tuple(range(total)), arities)


def _shuffles_on(indices: Sequence[int], arities: Sequence[int]):
    if not arities:
        if not indices:
            yield []
        return
    first, rest = arities[0], arities[1:]
    for block in itertools.combinations(indices, first):
        if not rest:
            yield [list(block)]
            continue
        chosen = set(block)
        remaining = tuple(i for i in indices if i not in chosen)
        for tail in _shuffles_on(remaining, rest):
            yield [list(block)] + tail


def x_power_fn(n: int, a: int) -> MultiFn:
    """X^a realized: the standard polynomial of the raw slots."""
    return _wedge_factors([_x_factor(n, a)] if a else [], n)


def y_power_fn(n: int, a: int) -> MultiFn:
    """Y^a realized: the standard polynomial of the traceless parts."""
    return _wedge_factors([_y_factor(n, a)] if a else [], n)


def t_scalar_fn(n: int, h: int, traceless: bool) -> MultiFn:
    """T_h realized: tr(S_{2h+1}(...)) times the identity."""
    return _wedge_factors([_t_factor(n, h, traceless)], n)


def realize_ext_monomial(n: int, m: ExtMonomial) -> MultiFn:
    """A formal monomial as a matrix function: T factors are traceless trace
    forms, then the X power on raw slots, then the Y power on traceless parts."""
    tset, i, j = m
    factors = [_t_factor(n, h, traceless=True) for h in tset]
    if i:
        factors.append(_x_factor(n, i))
    if j:
        factors.append(_y_factor(n, j))
    return _wedge_factors(factors, n)


def realize_invariant_monomial(
    n: int, tset: Iterable[int], xpow: int, traceless: bool = False
) -> MultiFn:
    """T-subset times X-power monomial of the invariant algebra over the full
    matrix space; T_0 = tr is allowed when traceless=False."""
    factors = []
    for h in sorted(set(tset)):
        if h == 0 and traceless:
            raise ValueError("T_0 vanishes identically on traceless arguments")
        factors.append(_t_factor(n, h, traceless=traceless))
    if xpow:
        factors.append(_x_factor(n, xpow))
    return _wedge_factors(factors, n)


def realize_wedge_monomial(n: int, key: WedgeKey) -> MultiFn:
    subset, a = key
    factors = [_dual_factor(n, idx) for idx in subset]
    if a:
        factors.append(_x_factor(n, a))
    return _wedge_factors(factors, n)


def _linear_combination(n: int, arity: int, pieces: list[tuple[Fraction, MultiFn]]) -> MultiFn:
    def ev(args: tuple[Mat, ...]) -> Mat:
        total = mat_zero(n)
        for coeff, f in pieces:
            total = mat_add(total, mat_scale(f.fn(args), coeff))
        return total

    return MultiFn(arity, n, ev)


def realize(expr: "ExtElement | WedgeForm | ExtMonomial | WedgeKey", n: int) -> MultiFn:
    """Dispatching realization; homogeneous linear combinations only."""
    if isinstance(expr, ExtElement):
        degree = expr.degree()
        pieces = [(c, realize_ext_monomial(n, m)) for m, c in expr.terms()]
        return _linear_combination(n, degree, pieces)
    if isinstance(expr, WedgeForm):
        degree = expr.degree()
        pieces = [(c, realize_wedge_monomial(n, k)) for k, c in expr.terms()]
        return _linear_combination(n, degree, pieces)
    if isinstance(expr, tuple) and len(expr) == 3:
        return realize_ext_monomial(n, expr)
    if isinstance(expr, tuple) and len(expr) == 2:
        return realize_wedge_monomial(n, expr)
    raise TypeError(f"cannot realize {type(expr).__name__}")


def realize_eval(f: MultiFn, args: Sequence) -> QMatrix:
    return f(args)


def random_matrix(n: int, rng: random.Random, bound: int = 9) -> Mat:
    return tuple(
        tuple(rng.randint(-bound, bound) for _ in range(n)) for _ in range(n)
    )


def random_traceless(n: int, rng: random.Random, bound: int = 9) -> Mat:
    """Integer traceless matrix: the last diagonal entry balances the others."""
    rows = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)]
    rows[n - 1][n - 1] = -sum(rows[i][i] for i in range(n - 1))
    return tuple(tuple(row) for row in rows)


def conjugate_fn(f: MultiFn, g: QMatrix) -> Callable:
    """args -> g f(g^-1 args g) g^-1, for equivariance checks."""
    ginv = g.inverse()

    def ev(args: Sequence) -> QMatrix:
        moved = [ginv * QMatrix(mat_from(m)) * g for m in args]
        return g * f(moved) * ginv

    return ev


def realize_rank(
    n: int,
    fns: Sequence[MultiFn],
    samples: int,
    seed: int = 0,
    bound: int = 9,
    traceless_args: bool = False,
) -> int:
    """Exact rank certificate for a family of realized functions.

    Functions of different arity are independent coordinates of the graded
    function space, so the family is grouped by arity; within a group every
    function is evaluated at the same `samples` random tuples and the exact
    rank of the value matrix (rows = functions, columns = tuple entries) is
    accumulated.  The total is a lower bound for the dimension of the span.
    """
    rng = random.Random(seed)
    groups: dict[int, list[MultiFn]] = {}
    for f in fns:
        groups.setdefault(f.arity, []).append(f)
    draw = random_traceless if traceless_args else random_matrix
    total = 0
    for arity in sorted(groups):
        group = groups[arity]
        tuples = [
            tuple(draw(n, rng, bound) for _ in range(arity)) for _ in range(samples)
        ]
        rows = []
        for f in group:
            row: list[Fraction] = []
            for tup in tuples:
                value = f.raw(tup)
                row.extend(Fraction(value[i][j]) for i in range(n) for j in range(n))
            rows.append(row)
        total += rref(QMatrix(rows))[1]
    return total


def am_basis(n: int) -> list[tuple[tuple[int, ...], int]]:
    """The n 2^n monomials (T-subset from T_0..T_{n-2}, X power below 2n)
    spanning the invariant algebra over the full matrix space."""
    out = []
    for r in range(n):
        for tset in itertools.combinations(range(0, n - 1), r):
            for a in range(2 * n):
                out.append((tset, a))
    return sorted(out)


def basic_formula_sides(n: int, j: int) -> tuple[MultiFn, MultiFn]:
    """Both sides of the reduction of Y^j ^ tr(Y^{2n-1}) to lower trace forms
    (valid for j >= 1), as functions of traceless-slot tuples.  Summands whose
    Y exponent reaches 2n are formally zero and are omitted; the T_0 = tr(Y)
    factor is kept and vanishes on traceless arguments by itself."""
    if not 1 <= j <= 2 * n - 1:
        raise ValueError("j must lie in 1..2n-1")
    lhs = _wedge_factors([_y_factor(n, j), _t_factor(n, n - 1, traceless=True)], n)
    pieces: list[tuple[Fraction, MultiFn]] = []
    for i in range(1, n - j // 2 + 1):
        if 2 * i + j >= 2 * n:
            continue
        h = n - i - 1
        factor = _t_factor(n, h, traceless=True)
        pieces.append(
            (Fraction(-1), _wedge_factors([_y_factor(n, 2 * i + j), factor], n))
        )
    rhs = _linear_combination(n, j + 2 * n - 1, pieces)
    return lhs, rhs


def _perm_sign(perm: Sequence[int]) -> int:
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s
