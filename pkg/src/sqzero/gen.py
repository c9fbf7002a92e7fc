"""Deterministic generators of structured instances for property testing.

All randomness comes from counter-based Philox streams keyed on the config
seed, so identical configs replicate bit-for-bit regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from gmpy2 import mpq

from .exactmat import Matrix, matmul
from .lattice import BlockForm, IndexPartition, IndexSet, assemble_from_form
from .squarezero import SquareZeroWitness, construct_factors_from_form

PRNG_NAME = "philox4x64"


class InvalidConfigError(ValueError):
    """Generator configuration violates its invariants."""


class BudgetExceededError(ValueError):
    """Exhaustive enumeration would exceed the candidate budget."""


@dataclass(frozen=True)
class GenConfig:
    """Shape and distribution parameters for instance generation.

    Entries are uniform integers in [0, max_entry], scaled by a fixed
    denominator, and are nonzero with probability `density`.
    """

    seed: int
    dims: Tuple[int, int, int]
    inner_dim: int
    max_entry: int = 3
    denominator: int = 1
    density: float = 1.0

    def __post_init__(self):
        if len(self.dims) != 3 or any(d < 0 for d in self.dims):
            raise InvalidConfigError(f"bad dims {self.dims}")
        if self.inner_dim < 0:
            raise InvalidConfigError("inner_dim must be >= 0")
        if self.max_entry < 1:
            raise InvalidConfigError("max_entry must be >= 1")
        if self.denominator < 1:
            raise InvalidConfigError("denominator must be >= 1")
        if not (0 < self.density <= 1):
            raise InvalidConfigError("density must be in (0, 1]")


def _stream(cfg: GenConfig, stream: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([cfg.seed % 2**64, stream], dtype=np.uint64))
    )


def _sample_block(rng: np.random.Generator, rows: int, cols: int, cfg: GenConfig) -> Matrix:
    vals = rng.integers(0, cfg.max_entry + 1, (rows, cols))
    mask = rng.random((rows, cols)) < cfg.density
    vals = vals * mask
    return Matrix(
        rows,
        cols,
        [mpq(int(vals[i, j]), cfg.denominator) for i in range(rows) for j in range(cols)],
    )


def contiguous_partition(dims: Tuple[int, int, int]) -> IndexPartition:
    d1, d2, d3 = dims
    n = d1 + d2 + d3
    return IndexPartition(
        IndexSet(tuple(range(d1)), n),
        IndexSet(tuple(range(d1, d1 + d2)), n),
        IndexSet(tuple(range(d1 + d2, n)), n),
    )


def gen_witness(cfg: GenConfig, stream: int = 0) -> Tuple[Matrix, SquareZeroWitness]:
    """Sample nonnegative factors of the (1,3) block and assemble both the
    target matrix and its verified witness."""
    d1, d2, d3 = cfg.dims
    if cfg.inner_dim > d2:
        raise InvalidConfigError(f"inner_dim {cfg.inner_dim} > middle dim {d2}")
    rng = _stream(cfg, stream)
    left = _sample_block(rng, d1, cfg.inner_dim, cfg)
    right = _sample_block(rng, cfg.inner_dim, d3, cfg)
    form = BlockForm(contiguous_partition(cfg.dims), matmul(left, right))
    witness = construct_factors_from_form(form, left, right)
    return assemble_from_form(form), witness


@dataclass(frozen=True)
class CommutatorPairDraw:
    """Result of rejection-sampling a square-zero pair with nonnegative
    commutator; exhaustion is a normal outcome."""

    m: Optional[Matrix]
    n: Optional[Matrix]
    draws: int
    accepted: bool


def _assemble_strict_upper(dims, b12: Matrix, b13: Matrix, b23: Matrix) -> Matrix:
    d1, d2, d3 = dims
    n = d1 + d2 + d3
    data = [[0] * n for _ in range(n)]
    for i in range(d1):
        for j in range(d2):
            data[i][d1 + j] = b12[i, j]
        for j in range(d3):
            data[i][d1 + d2 + j] = b13[i, j]
    for i in range(d2):
        for j in range(d3):
            data[d1 + i][d1 + d2 + j] = b23[i, j]
    return Matrix.from_rows(data)


def gen_commutator_pair(cfg: GenConfig, max_rejects: int = 1000, stream: int = 0) -> CommutatorPairDraw:
    """Rejection-sample (M, N) with M^2 = N^2 = 0 and MN - NM >= 0.

    Middle indices are randomly 2-colored per factor: the 12-block columns
    live on one color and the 23-block rows on the other, which forces the
    square-zero side conditions structurally. Draws are rejected until the
    commutator's (1,3) block is entrywise nonnegative.
    """
    if max_rejects < 1:
        raise InvalidConfigError("max_rejects must be >= 1")
    d1, d2, d3 = cfg.dims
    rng = _stream(cfg, stream + 1_000_000)
    for draw in range(1, max_rejects + 1):
        blocks = {}
        for name in ("M", "N"):
            color = rng.integers(0, 2, d2)
            b12 = _sample_block(rng, d1, d2, cfg)
            b13 = _sample_block(rng, d1, d3, cfg)
            b23 = _sample_block(rng, d2, d3, cfg)
            b12 = Matrix(
                d1,
                d2,
                [b12[i, j] if color[j] == 0 else mpq(0) for i in range(d1) for j in range(d2)],
            )
            b23 = Matrix(
                d2,
                d3,
                [b23[i, j] if color[i] == 1 else mpq(0) for i in range(d2) for j in range(d3)],
            )
            blocks[name] = (b12, b13, b23)
        m12, _, m23 = blocks["M"]
        n12, _, n23 = blocks["N"]
        c13 = matmul(m12, n23) - matmul(n12, m23)
        if c13.is_nonnegative():
            m = _assemble_strict_upper(cfg.dims, *blocks["M"])
            n = _assemble_strict_upper(cfg.dims, *blocks["N"])
            return CommutatorPairDraw(m, n, draw, True)
    return CommutatorPairDraw(None, None, max_rejects, False)


def gen_tiny_exhaustive(n: int, entry_set: Sequence[int]) -> Iterator[Matrix]:
    """All nonnegative n x n matrices over entry_set with T^2 = 0, exactly
    once each, in deterministic order.

    For nonnegative T, T^2 = 0 iff the nonzero-row and nonzero-column index
    sets are disjoint, so enumeration runs over disjoint support pairs (A, B)
    with cell values restricted to A x B; each matrix appears for exactly one
    pair (its exact supports). Aborts if the candidate count exceeds 10^7.
    """
    if n < 1 or n > 5:
        raise InvalidConfigError("n must be in 1..5")
    entries = sorted(set(int(e) for e in entry_set))
    if any(e < 0 for e in entries):
        raise InvalidConfigError("entry set must be nonnegative")
    if 0 not in entries:
        return  # every cell nonzero forces overlapping row/column supports
    base = len(entries)

    subsets = []
    for mask in range(1 << n):
        subsets.append(tuple(i for i in range(n) if mask >> i & 1))

    budget = 0
    pairs = []
    for a in subsets:
        rest = [i for i in range(n) if i not in a]
        for bmask in range(1 << len(rest)):
            b = tuple(rest[i] for i in range(len(rest)) if bmask >> i & 1)
            if (a and not b) or (b and not a):
                continue  # rows need columns to be nonzero, and vice versa
            pairs.append((a, b))
            budget += base ** (len(a) * len(b))
            if budget > 10**7:
                raise BudgetExceededError("more than 10^7 candidates")

    for a, b in pairs:
        cells = [(i, j) for i in a for j in b]
        for assignment in iter_product(entries, repeat=len(cells)):
            rows_hit = set()
            cols_hit = set()
            for (i, j), v in zip(cells, assignment):
                if v != 0:
                    rows_hit.add(i)
                    cols_hit.add(j)
            if rows_hit != set(a) or cols_hit != set(b):
                continue
            data = [[0] * n for _ in range(n)]
            for (i, j), v in zip(cells, assignment):
                data[i][j] = v
            yield Matrix.from_rows(data)
