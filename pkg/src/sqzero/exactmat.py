"""Exact dense linear algebra over arbitrary-precision rationals.

All matrices are immutable, row-major, with gmpy2.mpq entries (always in
lowest terms, positive denominator). Every operation is exact; there is no
floating point anywhere in this module.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

from gmpy2 import mpq

Scalar = Union[int, str, mpq]


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes."""


class NonSquareError(ValueError):
    """A square matrix was required."""


class SingularMatrixError(ValueError):
    """An invertible matrix was required."""


def to_q(x: Scalar) -> mpq:
    """Coerce an int, "p/q" string, or mpq to a normalized rational."""
    return x if isinstance(x, mpq) else mpq(x)


_Q0 = mpq(0)
_Q1 = mpq(1)


class Matrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Sequence[Scalar]):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        if len(data) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
        self.rows = rows
        self.cols = cols
        self._data = tuple(to_q(x) for x in data)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Scalar]]) -> "Matrix":
        rows = [list(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if rows else 0
        if any(len(r) != n for r in rows):
            raise ValueError("ragged rows")
        return cls(m, n, [x for r in rows for x in r])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, [_Q0] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [_Q1 if i == j else _Q0 for i in range(n) for j in range(n)])

    @classmethod
    def elementary(cls, n: int, i: int, j: int, value: Scalar = 1) -> "Matrix":
        """n x n matrix with a single entry `value` at (i, j)."""
        data = [_Q0] * (n * n)
        data[i * n + j] = to_q(value)
        return cls(n, n, data)

    @classmethod
    def column(cls, entries: Iterable[Scalar]) -> "Matrix":
        entries = list(entries)
        return cls(len(entries), 1, entries)

    def __getitem__(self, ij) -> mpq:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self._data[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self._data[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return tuple(self._data[i * self.cols + j] for i in range(self.rows))

    def to_lists(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for x in self._data)

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for x in self._data)

    def transpose(self) -> "Matrix":
        return Matrix(
            self.cols,
            self.rows,
            [self._data[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(f"{self.shape} + {other.shape}")
        return Matrix(self.rows, self.cols, [a + b for a, b in zip(self._data, other._data)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(f"{self.shape} - {other.shape}")
        return Matrix(self.rows, self.cols, [a - b for a, b in zip(self._data, other._data)])

    def scale(self, c: Scalar) -> "Matrix":
        c = to_q(c)
        return Matrix(self.rows, self.cols, [c * x for x in self._data])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return matmul(self, other)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        data = [self._data[i * self.cols + j] for i in row_idx for j in col_idx]
        return Matrix(len(row_idx), len(col_idx), data)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"Matrix({self.rows}x{self.cols}: {body})"


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Exact matrix product."""
    if a.cols != b.rows:
        raise DimensionMismatchError(f"{a.shape} @ {b.shape}")
    m, k, n = a.rows, a.cols, b.cols
    ad, bd = a._data, b._data
    out = [_Q0] * (m * n)
    for i in range(m):
        arow = ad[i * k : (i + 1) * k]
        base = i * n
        for p in range(k):
            x = arow[p]
            if x == 0:
                continue
            boff = p * n
            for j in range(n):
                y = bd[boff + j]
                if y != 0:
                    out[base + j] += x * y
    return Matrix(m, n, out)


def _eliminate(a: Matrix):
    """Row-reduce a copy of `a` in place; return (echelon rows, rank, swap parity).

    Pivoting picks the first nonzero entry in each column (exact arithmetic
    needs no magnitude heuristics).
    """
    m, n = a.rows, a.cols
    rows = [list(a.row(i)) for i in range(m)]
    rank = 0
    swaps = 0
    for col in range(n):
        piv = next((r for r in range(rank, m) if rows[r][col] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
            swaps += 1
        pval = rows[rank][col]
        for r in range(rank + 1, m):
            f = rows[r][col]
            if f == 0:
                continue
            ratio = f / pval
            for c in range(col, n):
                rows[r][c] -= ratio * rows[rank][c]
        rank += 1
        if rank == m:
            break
    return rows, rank, swaps


def rank(a: Matrix) -> int:
    """Exact linear rank via rational Gaussian elimination."""
    return _eliminate(a)[1]


def det(a: Matrix) -> mpq:
    """Exact determinant by elimination with exact pivoting."""
    if not a.is_square():
        raise NonSquareError(f"det of {a.shape}")
    n = a.rows
    if n == 0:
        return _Q1
    rows, rk, swaps = _eliminate(a)
    if rk < n:
        return _Q0
    d = _Q1 if swaps % 2 == 0 else -_Q1
    for i in range(n):
        d *= rows[i][i]
    return d


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Exact solution of a x = b for square invertible a."""
    if not a.is_square():
        raise NonSquareError(f"solve with {a.shape}")
    if a.rows != b.rows:
        raise DimensionMismatchError(f"{a.shape} vs rhs {b.shape}")
    n, k = a.rows, b.cols
    aug = Matrix(n, n + k, [x for i in range(n) for x in (*a.row(i), *b.row(i))])
    rows, rk, _ = _eliminate(aug)
    if rk < n:
        raise SingularMatrixError("matrix is singular")
    # back substitution
    sol = [[None] * k for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for j in range(k):
            s = rows[i][n + j]
            for c in range(i + 1, n):
                s -= rows[i][c] * sol[c][j]
            sol[i][j] = s / rows[i][i]
    return Matrix.from_rows(sol)


def det_rank_one_update(a: Matrix, u: Matrix, v: Matrix) -> mpq:
    """det(a + u v^T) via the matrix determinant lemma (1 + v^T a^-1 u) det(a).

    `a` must be invertible; for singular `a` compute det(a + u v^T) directly.
    """
    if not a.is_square():
        raise NonSquareError(f"{a.shape}")
    if u.shape != (a.rows, 1) or v.shape != (a.rows, 1):
        raise DimensionMismatchError(f"vectors {u.shape}, {v.shape} for {a.shape}")
    d = det(a)
    if d == 0:
        raise SingularMatrixError("determinant lemma needs invertible a")
    x = solve(a, u)
    dot = sum((v[i, 0] * x[i, 0] for i in range(a.rows)), _Q0)
    return (1 + dot) * d


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Matrix P with P e_j = e_perm[j], i.e. P[perm[j], j] = 1."""
    n = len(perm)
    data = [_Q0] * (n * n)
    for j, i in enumerate(perm):
        data[i * n + j] = _Q1
    return Matrix(n, n, data)
