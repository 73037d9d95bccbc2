"""Dense and block-structured linear algebra over GF(q).

Matrices hold integer field encodings (see :mod:`pmdsarray.gf`).  Pivoting is
first-nonzero; there is no notion of magnitude in a finite field.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .gf import FieldSpec


class MatrixError(ValueError):
    pass


class NotSquare(MatrixError):
    pass


class Singular(MatrixError):
    pass


class Inconsistent(MatrixError):
    pass


class PoleCollision(MatrixError):
    pass


Rows = list[list[int]]


def rref(rows: Sequence[Sequence[int]], field: FieldSpec, ncols: int | None = None) -> tuple[Rows, list[int]]:
    """Reduced row echelon form of ``rows``, pivoting only on the first ``ncols`` columns.

    Returns all rows (pivot rows first, in pivot order) and the pivot columns;
    rows past ``len(pivots)`` are zero on the first ``ncols`` columns.
    """
    a = [list(r) for r in rows]
    if not a:
        return [], []
    width = len(a[0]) if ncols is None else ncols
    pivots: list[int] = []
    top = 0
    for col in range(width):
        piv = next((i for i in range(top, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[top], a[piv] = a[piv], a[top]
        prow = field.scale(a[top], field.inv(a[top][col]))
        a[top] = prow
        for i in range(len(a)):
            if i != top and a[i][col]:
                field.axpy(a[i], prow, a[i][col], col)
        pivots.append(col)
        top += 1
        if top == len(a):
            break
    return a, pivots


def rank_rows(rows: Sequence[Sequence[int]], field: FieldSpec) -> int:
    a = [list(r) for r in rows]
    if not a:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank = 0
    for col in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        prow = a[rank]
        inv = field.inv(prow[col])
        for i in range(rank + 1, n_rows):
            if a[i][col]:
                field.axpy(a[i], prow, field.mul(a[i][col], inv), col)
        rank += 1
        if rank == n_rows:
            break
    return rank


def det_rows(rows: Sequence[Sequence[int]], field: FieldSpec) -> int:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NotSquare(f"{n}x{len(rows[0]) if rows else 0} matrix has no determinant")
    a = [list(r) for r in rows]
    det = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = field.neg(det)
        prow = a[col]
        det = field.mul(det, prow[col])
        inv = field.inv(prow[col])
        for i in range(col + 1, n):
            if a[i][col]:
                field.axpy(a[i], prow, field.mul(a[i][col], inv), col)
    return det


def matmul_rows(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], field: FieldSpec) -> Rows:
    if a and len(a[0]) != len(b):
        raise MatrixError("inner dimensions differ")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k, x in enumerate(row):
            if x:
                field.axpy(acc, b[k], field.neg(x))
        out.append(acc)
    return out


def matvec(a: Sequence[Sequence[int]], x: Sequence[int], field: FieldSpec) -> list[int]:
    return [field.dot(row, x) for row in a]


def solve_rows(a: Sequence[Sequence[int]], rhs: Sequence[Sequence[int]], field: FieldSpec,
               unique: bool = False) -> Rows:
    """Solve ``a @ X = rhs`` for a matrix right-hand side (list of rows).

    Free variables are set to zero.  Raises :class:`Inconsistent` when no
    solution exists and, with ``unique=True``, :class:`Singular` when the
    solution is not unique.
    """
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    if len(rhs) != n_rows:
        raise MatrixError("rhs row count differs from matrix")
    k = len(rhs[0]) if rhs else 0
    aug = [list(a[i]) + list(rhs[i]) for i in range(n_rows)]
    red, pivots = rref(aug, field, n_cols)
    if any(any(row[n_cols:]) for row in red[len(pivots):]):
        raise Inconsistent("system has no solution")
    if unique and len(pivots) < n_cols:
        raise Singular(f"rank {len(pivots)} < {n_cols} unknowns")
    x = [[0] * k for _ in range(n_cols)]
    for row, col in zip(red, pivots):
        x[col] = row[n_cols:]
    return x


# -- DenseMatrix --------------------------------------------------------------

@dataclass(frozen=True)
class DenseMatrix:
    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...]
    field: FieldSpec

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise MatrixError("data does not match the stated shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], field: FieldSpec) -> "DenseMatrix":
        rows = [tuple(field.validate(int(x)) for x in r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, tuple(rows), field)

    @classmethod
    def identity(cls, n: int, field: FieldSpec) -> "DenseMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: FieldSpec) -> "DenseMatrix":
        return cls.from_rows([[0] * cols for _ in range(rows)], field)

    @classmethod
    def diagonal(cls, values: Sequence[int], field: FieldSpec) -> "DenseMatrix":
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], field)

    def tolist(self) -> Rows:
        return [list(r) for r in self.data]

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def __matmul__(self, other: "DenseMatrix") -> "DenseMatrix":
        return DenseMatrix.from_rows(matmul_rows(self.data, other.data, self.field), self.field)

    def __add__(self, other: "DenseMatrix") -> "DenseMatrix":
        F = self.field
        return DenseMatrix.from_rows(
            [[F.add(x, y) for x, y in zip(r, s)] for r, s in zip(self.data, other.data)], F
        )

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix.from_rows([list(c) for c in zip(*self.data)] if self.data else [], self.field)

    T = property(transpose)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "DenseMatrix":
        return DenseMatrix.from_rows([[self.data[i][j] for j in col_idx] for i in row_idx], self.field)

    def hstack(self, other: "DenseMatrix") -> "DenseMatrix":
        return DenseMatrix.from_rows([list(a) + list(b) for a, b in zip(self.data, other.data)], self.field)

    def vstack(self, other: "DenseMatrix") -> "DenseMatrix":
        return DenseMatrix.from_rows(self.tolist() + other.tolist(), self.field)


def rank(m: DenseMatrix) -> int:
    return rank_rows(m.data, m.field)


def det(m: DenseMatrix) -> int:
    if m.rows != m.cols:
        raise NotSquare(f"{m.rows}x{m.cols} matrix has no determinant")
    return det_rows(m.data, m.field)


def solve(m: DenseMatrix, rhs: Sequence[int]) -> list[int]:
    """Return ``x`` with ``m @ x == rhs`` (a particular solution if not unique)."""
    x = solve_rows(m.data, [[v] for v in rhs], m.field)
    return [row[0] for row in x]


def inverse(m: DenseMatrix) -> DenseMatrix:
    if m.rows != m.cols:
        raise NotSquare("only square matrices have inverses")
    eye = [[int(i == j) for j in range(m.rows)] for i in range(m.rows)]
    return DenseMatrix.from_rows(solve_rows(m.data, eye, m.field, unique=True), m.field)


# -- Cauchy-Vandermonde ---------------------------------------------------------

def cv_matrix(c: Sequence[int], d: Sequence[int], field: FieldSpec) -> DenseMatrix:
    """Rows ``[1/(c_i - d_0) .. 1/(c_i - d_{l-1}), 1, c_i, .., c_i^(n-l-1)]``."""
    n, l = len(c), len(d)
    if l > n:
        raise MatrixError("more poles than points")
    rows = []
    for ci in c:
        row = []
        for dj in d:
            diff = field.sub(ci, dj)
            if diff == 0:
                raise PoleCollision(f"point {ci} coincides with a pole")
            row.append(field.inv(diff))
        row.extend(field.pow(ci, k) for k in range(n - l))
        rows.append(row)
    return DenseMatrix.from_rows(rows, field)


def cv_det(c: Sequence[int], d: Sequence[int], field: FieldSpec) -> int:
    """Closed-form determinant of :func:`cv_matrix`."""
    n, l = len(c), len(d)
    if l > n:
        raise MatrixError("more poles than points")
    num = 1
    for i in range(n):
        for j in range(i + 1, n):
            num = field.mul(num, field.sub(c[j], c[i]))
    for i in range(l):
        for j in range(i + 1, l):
            num = field.mul(num, field.sub(d[i], d[j]))
    den = 1
    for ci in c:
        for dj in d:
            diff = field.sub(ci, dj)
            if diff == 0:
                raise PoleCollision(f"point {ci} coincides with a pole")
            den = field.mul(den, diff)
    return field.div(num, den)


# -- BlockMatrix ---------------------------------------------------------------

@dataclass(frozen=True)
class Diagonal:
    values: tuple[int, ...]


Block = Union[None, Diagonal, DenseMatrix]


@dataclass(frozen=True)
class BlockMatrix:
    """Grid of ell x ell blocks: ``None`` (zero), :class:`Diagonal` or :class:`DenseMatrix`."""

    block_rows: int
    block_cols: int
    ell: int
    field: FieldSpec
    blocks: tuple[tuple[Block, ...], ...]

    def __post_init__(self):
        if len(self.blocks) != self.block_rows or any(len(r) != self.block_cols for r in self.blocks):
            raise MatrixError("block grid does not match the stated shape")
        for row in self.blocks:
            for b in row:
                if isinstance(b, Diagonal) and len(b.values) != self.ell:
                    raise MatrixError("diagonal block has the wrong length")
                if isinstance(b, DenseMatrix) and (b.rows, b.cols) != (self.ell, self.ell):
                    raise MatrixError("dense block has the wrong shape")

    @classmethod
    def build(cls, grid: Sequence[Sequence[Block]], ell: int, field: FieldSpec) -> "BlockMatrix":
        grid = tuple(tuple(r) for r in grid)
        return cls(len(grid), len(grid[0]) if grid else 0, ell, field, grid)

    def block_rows_of(self, i: int, j: int) -> Rows:
        b = self.blocks[i][j]
        ell = self.ell
        if b is None:
            return [[0] * ell for _ in range(ell)]
        if isinstance(b, Diagonal):
            return [[b.values[a] if a == c else 0 for c in range(ell)] for a in range(ell)]
        return b.tolist()

    def is_diagonal(self) -> bool:
        return all(b is None or isinstance(b, Diagonal) for row in self.blocks for b in row)

    def thick_columns(self, cols: Sequence[int]) -> "BlockMatrix":
        return BlockMatrix.build([[row[j] for j in cols] for row in self.blocks], self.ell, self.field)

    def thick_rows(self, rows: Sequence[int]) -> "BlockMatrix":
        return BlockMatrix.build([self.blocks[i] for i in rows], self.ell, self.field)

    def scalar_slice(self, a: int) -> Rows:
        """Entry ``a`` of every diagonal block: the decoupled system for row index ``a``."""
        if not self.is_diagonal():
            raise MatrixError("scalar slices need an all-diagonal block matrix")
        return [[b.values[a] if b is not None else 0 for b in row] for row in self.blocks]

    def expand(self) -> DenseMatrix:
        return expand(self)


def expand(b: BlockMatrix) -> DenseMatrix:
    ell = b.ell
    rows = [[0] * (b.block_cols * ell) for _ in range(b.block_rows * ell)]
    for i, grid_row in enumerate(b.blocks):
        for j, blk in enumerate(grid_row):
            if blk is None:
                continue
            if isinstance(blk, Diagonal):
                for a, v in enumerate(blk.values):
                    rows[i * ell + a][j * ell + a] = v
            else:
                for a in range(ell):
                    rows[i * ell + a][j * ell: (j + 1) * ell] = blk.data[a]
    return DenseMatrix(len(rows), b.block_cols * ell, tuple(tuple(r) for r in rows), b.field)
