"""The built-in separating instance and its determinant-lemma analysis.

The 4x4 matrix below has linear rank 3 but nonnegative rank 4. Embedded as
the (1,3) block of an 11x11 matrix with a 3-dimensional middle block, it
satisfies the necessary rank condition for being a commutator of nonnegative
square-zero matrices while failing the sufficient nonnegative-rank condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from gmpy2 import mpq

from .exactmat import Matrix, det, matmul, rank
from .lattice import (
    BlockForm,
    IndexPartition,
    IndexSet,
    NegativeEntryError,
    assemble_from_form,
    square_zero_supports,
)


def build_T13() -> Matrix:
    """The 4x4 rank-3 matrix whose nonnegative rank is 4."""
    return Matrix.from_rows(
        [
            [1, 1, 0, 0],
            [1, 0, 1, 0],
            [0, 1, 0, 1],
            [0, 0, 1, 1],
        ]
    )


def build_counterexample_T() -> Matrix:
    """11x11 matrix with build_T13() on rows 0..3 x columns 7..10."""
    part = IndexPartition(
        IndexSet(tuple(range(4)), 11),
        IndexSet(tuple(range(4, 7)), 11),
        IndexSet(tuple(range(7, 11)), 11),
    )
    return assemble_from_form(BlockForm(part, build_T13()))


def _vec(entries: Sequence) -> Tuple[mpq, ...]:
    v = tuple(mpq(x) for x in entries)
    if len(v) != 4:
        raise ValueError("expected a 4-vector")
    if any(x < 0 for x in v):
        raise NegativeEntryError("vector has a negative entry")
    return v


def case_formula_values(u: Sequence, v: Sequence) -> Tuple[mpq, mpq]:
    """Closed-form determinants of both case submatrices of T13 + u v^T."""
    u = _vec(u)
    v = _vec(v)
    case1 = 1 + v[1] * u[0] + v[2] * u[1] + v[3] * (u[2] - u[0])
    case2 = 1 + v[0] * (u[0] - u[2]) + v[1] * u[2] + v[2] * u[3]
    return case1, case2


@dataclass(frozen=True)
class Lemma23Report:
    """Consistency record for the rank(T13 + u v^T) >= 3 argument."""

    case_tag: str  # "case1" (u1 <= u3) | "case2" (u3 <= u1)
    formula_value: mpq
    direct_determinant: mpq
    rank_of_sum: int


def lemma23_check(u: Sequence, v: Sequence) -> Lemma23Report:
    """Pick the applicable case, evaluate its determinant formula, and
    recompute the same 3x3 submatrix determinant by elimination.

    Case 1 (u1 <= u3) deletes the first column and last row; case 2 deletes
    the second row and last column. Ties go to case 1.
    """
    u = _vec(u)
    v = _vec(v)
    t = build_T13()
    outer = Matrix.from_rows([[ui * vj for vj in v] for ui in u])
    s = t + outer
    if u[0] <= u[2]:
        tag = "case1"
        sub = s.submatrix([0, 1, 2], [1, 2, 3])
        formula = case_formula_values(u, v)[0]
    else:
        tag = "case2"
        sub = s.submatrix([0, 2, 3], [0, 1, 2])
        formula = case_formula_values(u, v)[1]
    direct = det(sub)
    rk = rank(s)
    report = Lemma23Report(tag, formula, direct, rk)
    assert report.formula_value == report.direct_determinant
    assert report.formula_value >= 1
    assert report.rank_of_sum >= 3
    return report


@dataclass(frozen=True)
class SearchSummary:
    """Outcome of a randomized search for an exact commutator representation.

    Evidence only: a certified negative verdict comes from the
    nonnegative-rank certificate, never from this search.
    """

    trials: int
    seed: int
    max_entry: int
    prng: str
    min_distance: Optional[mpq]
    zero_hits: int


def _search_partition(t: Matrix) -> Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]:
    nz_rows, nz_cols = square_zero_supports(t)
    i3 = tuple(j for j in nz_cols if j not in nz_rows)
    used = set(nz_rows) | set(i3)
    i2 = tuple(i for i in range(t.rows) if i not in used)
    return nz_rows, i2, i3


def randomized_commutator_search(
    t: Matrix, trials: int, seed: int = 0, max_entry: int = 3
) -> SearchSummary:
    """Sample nonnegative square-zero pairs (M, N) in the forced block shapes
    and record the minimum entrywise distance between MN - NM and t.

    The middle indices are randomly 2-colored per trial and per factor so
    that M^2 = N^2 = 0 holds by construction; the commutator then lives on
    the (1,3) block only. Deterministic for a fixed seed (Philox stream).
    """
    if not t.is_nonnegative():
        raise NegativeEntryError("matrix has a negative entry")
    prng_name = "philox4x64"
    if trials == 0:
        return SearchSummary(0, seed, max_entry, prng_name, None, 0)

    i1, i2, i3 = _search_partition(t)
    d1, d2, d3 = len(i1), len(i2), len(i3)
    block_pos = {(i, j) for i in i1 for j in i3}
    baseline = max(
        (abs(t[i, j]) for i in range(t.rows) for j in range(t.cols) if (i, j) not in block_pos),
        default=mpq(0),
    )
    target_exact = t.submatrix(i1, i3)
    if any(x.denominator != 1 for row in target_exact.to_lists() for x in row):
        raise ValueError("randomized search supports integer targets only")
    target = np.array(
        [[int(t[i, j]) for j in i3] for i in i1], dtype=np.int64
    ).reshape(d1, d3)

    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    min_dist = None
    zero_hits = 0
    done = 0
    chunk_size = 20000
    while done < trials:
        c = min(chunk_size, trials - done)
        if d2 == 0:
            c13 = np.zeros((c, d1, d3), dtype=np.int64)
        else:
            m12 = rng.integers(0, max_entry + 1, (c, d1, d2))
            m23 = rng.integers(0, max_entry + 1, (c, d2, d3))
            n12 = rng.integers(0, max_entry + 1, (c, d1, d2))
            n23 = rng.integers(0, max_entry + 1, (c, d2, d3))
            col_m = rng.integers(0, 2, (c, d2))
            col_n = rng.integers(0, 2, (c, d2))
            m12 *= (col_m == 0)[:, None, :]
            m23 *= (col_m == 1)[:, :, None]
            n12 *= (col_n == 0)[:, None, :]
            n23 *= (col_n == 1)[:, :, None]
            c13 = np.einsum("tij,tjk->tik", m12, n23) - np.einsum("tij,tjk->tik", n12, m23)
        if d1 and d3:
            dists = np.abs(c13 - target[None, :, :]).reshape(c, -1).max(axis=1)
        else:
            dists = np.zeros(c, dtype=np.int64)
        chunk_min = mpq(int(dists.min())) if dists.size else mpq(0)
        chunk_min = max(chunk_min, baseline)
        zero_hits += int(np.count_nonzero((dists == 0)) if baseline == 0 else 0)
        if min_dist is None or chunk_min < min_dist:
            min_dist = chunk_min
        done += c
    return SearchSummary(trials, seed, max_entry, prng_name, min_dist, zero_hits)
