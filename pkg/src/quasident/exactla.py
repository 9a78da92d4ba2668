"""Exact dense linear algebra over the rationals.

QMatrix is a small immutable rectangular matrix of Fractions.  Row reduction
is plain Gaussian elimination with the pivot chosen as the smallest-bit-size
nonzero candidate in the column; fraction growth, not asymptotics, is what
matters at the sizes this package meets (a few hundred to a few thousand
rows).

Subspaces are stored through their reduced-row-echelon bases, so equal
subspaces have identical representations and equality/containment are
direct comparisons.

The nullspace workhorse ``nullspace_of_rows`` consumes rows as sparse
{column: coefficient} dicts and eliminates incrementally, keeping only pivot
rows.  ``QMatrix.nullspace``/``nullspace`` delegate to it; idsolve feeds it
very sparse systems directly (tens of thousands of near-singleton equations)
that a dense sweep would not finish in the configured budgets.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import AmbientMismatch

Scalar = int | Fraction


class QMatrix:
    """Rectangular matrix with Fraction entries.  Treated as immutable."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence[Scalar]]):
        self.data: tuple[tuple[Fraction, ...], ...] = tuple(
            tuple(Fraction(x) for x in row) for row in data
        )
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.rows else 0
        if any(len(row) != self.cols for row in self.data):
            raise ValueError("ragged rows")

    @staticmethod
    def zeros(rows: int, cols: int) -> "QMatrix":
        return QMatrix([[0] * cols for _ in range(rows)])

    @staticmethod
    def identity(n: int) -> "QMatrix":
        return QMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def random(rows: int, cols: int, rng: random.Random, bound: int = 9) -> "QMatrix":
        return QMatrix(
            [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]
        )

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.data[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.data[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.data)

    def transpose(self) -> "QMatrix":
        return QMatrix(list(zip(*self.data)) if self.rows else [])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QMatrix) and self.data == other.data

    def __hash__(self) -> int:
        return hash(self.data)

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._check_same_shape(other)
        return QMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._check_same_shape(other)
        return QMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __neg__(self) -> "QMatrix":
        return QMatrix([[-a for a in row] for row in self.data])

    def scale(self, c: Scalar) -> "QMatrix":
        c = Fraction(c)
        return QMatrix([[c * a for a in row] for row in self.data])

    def __mul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape()} by {other.shape()}")
        tcols = other.transpose().data
        return QMatrix(
            [[_dot(row, col) for col in tcols] for row in self.data]
        )

    def matvec(self, v: Sequence[Scalar]) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        vv = [Fraction(x) for x in v]
        return tuple(_dot(row, vv) for row in self.data)

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        return sum((self.data[i][i] for i in range(self.rows)), Fraction(0))

    def is_zero(self) -> bool:
        return all(not x for row in self.data for x in row)

    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def inverse(self) -> "QMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = [list(self.data[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        reduced, _, pivots = _rref_rows(aug)
        if pivots[:n] != list(range(n)):
            raise ValueError("matrix is singular")
        return QMatrix([row[n:] for row in reduced])

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.data)
        return f"QMatrix[{self.rows}x{self.cols}: {body}]"

    def _check_same_shape(self, other: "QMatrix") -> None:
        if self.shape() != other.shape():
            raise ValueError(f"shape mismatch {self.shape()} vs {other.shape()}")


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


def _bit_size(q: Fraction) -> int:
    return q.numerator.bit_length() + q.denominator.bit_length()


def _rref_rows(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], int, list[int]]:
    """In-place reduced row echelon form; returns (rows, rank, pivot columns)."""
    if not rows:
        return rows, 0, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        best = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                if best is None or _bit_size(rows[i][c]) < _bit_size(rows[best][c]):
                    best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, len(pivots), pivots


def rref(m: QMatrix) -> tuple[QMatrix, int, list[int]]:
    """Reduced row echelon form, rank, and pivot columns."""
    rows, rank, pivots = _rref_rows([list(r) for r in m.data])
    return QMatrix(rows), rank, pivots


def rank(m: QMatrix) -> int:
    return rref(m)[1]


def nullspace_of_rows(rows: Iterable[dict[int, Fraction]], ncols: int) -> list[tuple[Fraction, ...]]:
    """Nullspace basis of a sparse homogeneous system.

    Each row maps column index -> nonzero coefficient.  Rows are folded into a
    growing echelon set one at a time (leading column strictly increases while
    reducing, so insertion terminates), then the pivot rows are back-reduced
    and the standard free-column construction yields the canonical basis: the
    same vectors dense rref would produce, with free coordinates set to 1.
    """
    pivots: dict[int, dict[int, Fraction]] = {}
    for incoming in rows:
        row = {c: Fraction(v) for c, v in incoming.items() if v}
        while row:
            lead = min(row)
            if lead in pivots:
                f = row[lead]
                for c, v in pivots[lead].items():
                    s = row.get(c, Fraction(0)) - f * v
                    if s:
                        row[c] = s
                    else:
                        row.pop(c, None)
            else:
                inv = 1 / row[lead]
                pivots[lead] = {c: v * inv for c, v in row.items()}
                break
    # Back-substitute so every pivot row is reduced against all later pivots.
    for lead in sorted(pivots, reverse=True):
        prow = pivots[lead]
        for other_lead, orow in pivots.items():
            if other_lead < lead and lead in orow:
                f = orow[lead]
                for c, v in prow.items():
                    s = orow.get(c, Fraction(0)) - f * v
                    if s:
                        orow[c] = s
                    else:
                        orow.pop(c, None)
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free_cols:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for lead, prow in pivots.items():
            if f in prow:
                vec[lead] = -prow[f]
        basis.append(tuple(vec))
    return basis


def nullspace(m: QMatrix) -> "Subspace":
    """Right nullspace {v : m v = 0} as a canonical subspace."""
    rows = [
        {j: x for j, x in enumerate(row) if x}
        for row in m.data
    ]
    return Subspace.from_vectors(m.cols, nullspace_of_rows(rows, m.cols))


class Subspace:
    """Subspace of Q^ambient, held as a reduced-echelon row basis."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: int, basis: Sequence[Sequence[Scalar]]):
        rows = [[Fraction(x) for x in v] for v in basis]
        for v in rows:
            if len(v) != ambient:
                raise AmbientMismatch(f"vector of length {len(v)} in ambient {ambient}")
        reduced, rank_, _ = _rref_rows(rows)
        self.ambient = ambient
        self.basis: tuple[tuple[Fraction, ...], ...] = tuple(
            tuple(r) for r in reduced[:rank_]
        )

    @staticmethod
    def from_vectors(ambient: int, vectors: Iterable[Sequence[Scalar]]) -> "Subspace":
        return Subspace(ambient, list(vectors))

    @staticmethod
    def zero(ambient: int) -> "Subspace":
        return Subspace(ambient, [])

    @staticmethod
    def full(ambient: int) -> "Subspace":
        return Subspace(ambient, QMatrix.identity(ambient).data)

    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient, self.basis))

    def contains_vector(self, v: Sequence[Scalar]) -> bool:
        if len(v) != self.ambient:
            raise AmbientMismatch("vector length differs from ambient dimension")
        residue = [Fraction(x) for x in v]
        for row in self.basis:
            lead = next(j for j, x in enumerate(row) if x)
            if residue[lead]:
                f = residue[lead]
                residue = [a - f * b for a, b in zip(residue, row)]
        return not any(residue)

    def contains(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        return all(self.contains_vector(v) for v in other.basis)

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace(self.ambient, list(self.basis) + list(other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        """Intersection via the relation space {(a, b) : a A = b B}."""
        self._check_ambient(other)
        da, db = self.dim(), other.dim()
        if da == 0 or db == 0:
            return Subspace.zero(self.ambient)
        # Columns 0..da-1 weigh self.basis, columns da..da+db-1 weigh other.basis.
        rows = []
        for col in range(self.ambient):
            row: dict[int, Fraction] = {}
            for i in range(da):
                if self.basis[i][col]:
                    row[i] = self.basis[i][col]
            for j in range(db):
                if other.basis[j][col]:
                    row[da + j] = -other.basis[j][col]
            if row:
                rows.append(row)
        vectors = []
        for rel in nullspace_of_rows(rows, da + db):
            vec = [Fraction(0)] * self.ambient
            for i in range(da):
                if rel[i]:
                    for j in range(self.ambient):
                        vec[j] += rel[i] * self.basis[i][j]
            vectors.append(vec)
        return Subspace.from_vectors(self.ambient, vectors)

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.ambient}, dim={self.dim()})"

    def _check_ambient(self, other: "Subspace") -> None:
        if self.ambient != other.ambient:
            raise AmbientMismatch(
                f"ambient dimensions differ: {self.ambient} vs {other.ambient}"
            )
