"""Standard-subspace machinery for nonnegative matrices.

Standard subspaces of R^n are spans of subsets of the standard basis; we
represent them by their index sets. A nonnegative square-zero matrix is
supported on (nonzero rows) x (nonzero columns) with those two sets disjoint,
which yields a canonical three-block decomposition with maximal middle block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .exactmat import Matrix, matmul


class NegativeEntryError(ValueError):
    """A nonnegative matrix was required."""


class NotCubeZeroError(ValueError):
    """U^3 = 0 was required."""


class NotSquareZeroError(ValueError):
    """T^2 = 0 was required; T is not representable in three-block form."""


def _require_nonnegative(a: Matrix) -> None:
    if not a.is_nonnegative():
        raise NegativeEntryError("matrix has a negative entry")


@dataclass(frozen=True)
class IndexSet:
    """Sorted duplicate-free indices inside an ambient dimension."""

    indices: Tuple[int, ...]
    ambient: int

    def __post_init__(self):
        idx = self.indices
        if list(idx) != sorted(set(idx)):
            raise ValueError("indices must be sorted and duplicate-free")
        if idx and (idx[0] < 0 or idx[-1] >= self.ambient):
            raise ValueError("index out of range")

    @classmethod
    def of(cls, indices: Sequence[int], ambient: int) -> "IndexSet":
        return cls(tuple(sorted(set(indices))), ambient)

    def complement(self) -> "IndexSet":
        inside = set(self.indices)
        return IndexSet(tuple(i for i in range(self.ambient) if i not in inside), self.ambient)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self.indices


def disjoint_complement(s: IndexSet) -> IndexSet:
    """Complementary coordinate span: indices not in s."""
    return s.complement()


@dataclass(frozen=True)
class IndexPartition:
    """Ordered triple of disjoint index sets covering {0..n-1}."""

    i1: IndexSet
    i2: IndexSet
    i3: IndexSet

    def __post_init__(self):
        n = self.i1.ambient
        if self.i2.ambient != n or self.i3.ambient != n:
            raise ValueError("mismatched ambient dimensions")
        s1, s2, s3 = set(self.i1), set(self.i2), set(self.i3)
        if s1 & s2 or s1 & s3 or s2 & s3:
            raise ValueError("index sets overlap")
        if len(s1) + len(s2) + len(s3) != n:
            raise ValueError("index sets do not cover {0..n-1}")

    @property
    def n(self) -> int:
        return self.i1.ambient

    def order(self) -> Tuple[int, ...]:
        """All indices in block order (i1, i2, i3)."""
        return (*self.i1, *self.i2, *self.i3)


@dataclass(frozen=True)
class BlockForm:
    """A matrix supported only on the i1 x i3 block of a partition."""

    partition: IndexPartition
    block: Matrix  # |i1| x |i3|

    def __post_init__(self):
        if self.block.shape != (len(self.partition.i1), len(self.partition.i3)):
            raise ValueError(
                f"block {self.block.shape} does not match partition "
                f"({len(self.partition.i1)}, {len(self.partition.i3)})"
            )


def null_ideal(a: Matrix) -> IndexSet:
    """Indices of zero columns of a nonnegative square matrix.

    For nonnegative a, a|x| = 0 iff the support of x lies in the zero
    columns, so these indices span the null ideal.
    """
    _require_nonnegative(a)
    if not a.is_square():
        raise ValueError("null ideal needs a square matrix")
    zero_cols = [j for j in range(a.cols) if all(x == 0 for x in a.col(j))]
    return IndexSet(tuple(zero_cols), a.cols)


def triple_decomposition(u: Matrix) -> IndexPartition:
    """Partition from iterated null ideals of a nonnegative cube-zero matrix.

    i1 spans N(u), i2 spans N(u)^d intersected with N(u^2), i3 spans N(u^2)^d.
    Permuting by (i1, i2, i3) puts u in strictly upper block-triangular form.
    """
    _require_nonnegative(u)
    u2 = matmul(u, u)
    if not matmul(u2, u).is_zero():
        raise NotCubeZeroError("u^3 != 0")
    n1 = set(null_ideal(u))
    n2 = set(null_ideal(u2))
    n = u.rows
    i1 = IndexSet(tuple(sorted(n1)), n)
    i2 = IndexSet(tuple(sorted(n2 - n1)), n)
    i3 = IndexSet(tuple(i for i in range(n) if i not in n2), n)
    return IndexPartition(i1, i2, i3)


def square_zero_supports(t: Matrix) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """(nonzero-row indices, nonzero-column indices) of t."""
    nz_rows = tuple(i for i in range(t.rows) if any(x != 0 for x in t.row(i)))
    nz_cols = tuple(j for j in range(t.cols) if any(x != 0 for x in t.col(j)))
    return nz_rows, nz_cols


def product_form_decomposition(t: Matrix) -> BlockForm:
    """Canonical three-block form of a nonnegative matrix with t^2 = 0.

    i1 = nonzero rows, i3 = nonzero columns, i2 = the rest, which maximizes
    the middle block. The extracted block has no zero rows or columns.
    """
    _require_nonnegative(t)
    if not t.is_square():
        raise ValueError("need a square matrix")
    if not matmul(t, t).is_zero():
        raise NotSquareZeroError("t^2 != 0: not representable in three-block form")
    n = t.rows
    nz_rows, nz_cols = square_zero_supports(t)
    used = set(nz_rows) | set(nz_cols)
    part = IndexPartition(
        IndexSet(nz_rows, n),
        IndexSet(tuple(i for i in range(n) if i not in used), n),
        IndexSet(nz_cols, n),
    )
    return BlockForm(part, t.submatrix(nz_rows, nz_cols))


def assemble_from_form(form: BlockForm) -> Matrix:
    """n x n matrix that is zero except for the block on i1 x i3 positions."""
    part = form.partition
    n = part.n
    data = [[0] * n for _ in range(n)]
    for bi, i in enumerate(part.i1):
        for bj, j in enumerate(part.i3):
            data[i][j] = form.block[bi, bj]
    return Matrix.from_rows(data)
