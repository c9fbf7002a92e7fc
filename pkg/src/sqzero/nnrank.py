"""Certified two-sided bounds on the nonnegative rank.

The lower bound is max(linear rank, exact rectangle cover number of the
support); the upper bound is always backed by an explicit exact nonnegative
factorization (or the zero rule). A floating-point NMF heuristic may discover
tighter factorizations, but its output only counts after continued-fraction
rationalization and exact re-verification over the rationals.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import List, Optional, Tuple

import numpy as np
from gmpy2 import mpq

from .exactmat import Matrix, SingularMatrixError, matmul, rank, solve
from .lattice import NegativeEntryError


class CoverTimeout(Exception):
    """Rectangle-cover branch and bound exceeded its time budget."""


@dataclass(frozen=True)
class SupportPattern:
    """Entrywise nonzero indicator of a matrix."""

    rows: int
    cols: int
    mask: Tuple[Tuple[bool, ...], ...]

    @classmethod
    def from_matrix(cls, a: Matrix) -> "SupportPattern":
        mask = tuple(tuple(x != 0 for x in a.row(i)) for i in range(a.rows))
        return cls(a.rows, a.cols, mask)

    def true_cells(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.rows) for j in range(self.cols) if self.mask[i][j]]


@dataclass(frozen=True)
class Rectangle:
    """An all-true combinatorial rectangle row_set x col_set of a pattern."""

    row_set: Tuple[int, ...]
    col_set: Tuple[int, ...]


def support_pattern(a: Matrix) -> SupportPattern:
    return SupportPattern.from_matrix(a)


def maximal_rectangles(b: SupportPattern) -> List[Rectangle]:
    """All maximal all-true rectangles of the pattern.

    Column sets of maximal rectangles are exactly the nonempty intersections
    of row supports, so we close the row supports under intersection.
    """
    supports = {}
    for i in range(b.rows):
        s = frozenset(j for j in range(b.cols) if b.mask[i][j])
        if s:
            supports[i] = s
    closed = set(supports.values())
    frontier = set(closed)
    while frontier:
        new = set()
        for c in frontier:
            for s in supports.values():
                inter = c & s
                if inter and inter not in closed:
                    new.add(inter)
        closed |= new
        frontier = new
    rects = []
    seen = set()
    for c in closed:
        r = frozenset(i for i, s in supports.items() if c <= s)
        full = frozenset.intersection(*(supports[i] for i in r))
        if full != c or (r, c) in seen:
            continue
        seen.add((r, c))
        rects.append(Rectangle(tuple(sorted(r)), tuple(sorted(c))))
    rects.sort(key=lambda rc: (-len(rc.row_set) * len(rc.col_set), rc.row_set, rc.col_set))
    return rects


def rectangle_cover_number(b: SupportPattern, time_limit: Optional[float] = None) -> int:
    """Exact minimum number of rectangles covering the true cells.

    Branch and bound over maximal rectangles: branch on the uncovered cell
    hitting the fewest rectangles, try larger rectangles first, prune with
    ceil(remaining / max rectangle area). Raises CoverTimeout past the budget.
    """
    cells = b.true_cells()
    if not cells:
        return 0
    deadline = None if time_limit is None else time.monotonic() + time_limit
    rects = maximal_rectangles(b)
    rect_cells = [frozenset((i, j) for i in r.row_set for j in r.col_set) for r in rects]
    max_area = max(len(rc) for rc in rect_cells)
    covering = {c: [k for k, rc in enumerate(rect_cells) if c in rc] for c in cells}

    # greedy incumbent
    uncovered = set(cells)
    greedy = 0
    while uncovered:
        k = max(range(len(rect_cells)), key=lambda k: (len(rect_cells[k] & uncovered), -k))
        uncovered -= rect_cells[k]
        greedy += 1
    best = greedy

    all_cells = frozenset(cells)

    def search(uncovered: frozenset, used: int) -> None:
        nonlocal best
        if deadline is not None and time.monotonic() > deadline:
            raise CoverTimeout
        if not uncovered:
            best = min(best, used)
            return
        if used + ceil(len(uncovered) / max_area) >= best:
            return
        cell = min(uncovered, key=lambda c: (len(covering[c]), c))
        for k in covering[cell]:
            search(uncovered - rect_cells[k], used + 1)

    search(all_cells, 0)
    return best


def rank2_exact_factorization(a: Matrix) -> Tuple[Matrix, Matrix]:
    """Exact nonnegative factorization of a nonnegative matrix of rank <= 2.

    The nonzero columns live in a pointed two-dimensional cone, so two of
    them generate all others with nonnegative coefficients; L collects those
    extreme columns and R the coefficients. L @ R = a exactly.
    """
    if not a.is_nonnegative():
        raise NegativeEntryError("matrix has a negative entry")
    r = rank(a)
    if r > 2:
        raise ValueError(f"rank {r} > 2")
    m, n = a.shape
    if r == 0:
        return Matrix.zeros(m, 0), Matrix.zeros(0, n)
    cols = [a.col(j) for j in range(n)]
    nz = [j for j in range(n) if any(x != 0 for x in cols[j])]
    if r == 1:
        j0 = nz[0]
        c = cols[j0]
        i0 = next(i for i in range(m) if c[i] != 0)
        coeffs = [a[i0, j] / c[i0] for j in range(n)]
        left = Matrix(m, 1, list(c))
        right = Matrix(1, n, coeffs)
        assert matmul(left, right) == a
        return left, right

    # rank 2: coordinates of each nonzero column in a basis of two columns
    j0 = nz[0]
    j1 = next(j for j in nz if rank(a.submatrix(range(m), [j0, j])) == 2)
    basis = a.submatrix(range(m), [j0, j1])
    # two rows making the basis invertible
    i0 = next(i for i in range(m) if basis[i, 0] != 0 or basis[i, 1] != 0)
    i1 = next(
        i
        for i in range(m)
        if basis[i0, 0] * basis[i, 1] - basis[i0, 1] * basis[i, 0] != 0
    )
    delta = basis[i0, 0] * basis[i1, 1] - basis[i0, 1] * basis[i1, 0]
    coords = {}
    for j in nz:
        b0, b1 = a[i0, j], a[i1, j]
        x = (b0 * basis[i1, 1] - b1 * basis[i0, 1]) / delta
        y = (basis[i0, 0] * b1 - basis[i1, 0] * b0) / delta
        coords[j] = (x, y)

    def cross(p, q):
        return p[0] * q[1] - p[1] * q[0]

    for ju in nz:
        pu = coords[ju]
        for jw in nz:
            pw = coords[jw]
            d = cross(pu, pw)
            if d == 0:
                continue
            alphas = {}
            ok = True
            for j in nz:
                alpha = cross(coords[j], pw) / d
                beta = cross(pu, coords[j]) / d
                if alpha < 0 or beta < 0:
                    ok = False
                    break
                alphas[j] = (alpha, beta)
            if not ok:
                continue
            left = a.submatrix(range(m), [ju, jw])
            rdata = [[0] * n for _ in range(2)]
            for j in nz:
                rdata[0][j], rdata[1][j] = alphas[j]
            right = Matrix.from_rows(rdata)
            if matmul(left, right) == a:
                return left, right
    raise RuntimeError("no extreme column pair found for a rank-2 nonnegative matrix")


def nmf_heuristic(
    a: Matrix,
    k: int,
    restarts: int = 8,
    iterations: int = 500,
    seed: int = 0,
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Approximate nonnegative factorization by multiplicative updates.

    Deterministic for a fixed seed: restart r draws from a Philox stream
    keyed (seed, r), and the best residual wins with index tie-break, so the
    result is independent of scheduling. Residual is the max absolute entry
    error. When k >= min(rows, cols) an exact identity embedding is returned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    m, n = a.shape
    fa = np.array([[float(x) for x in a.row(i)] for i in range(m)])
    if k >= min(m, n):
        if m <= n:
            w = np.zeros((m, k))
            w[:, :m] = np.eye(m)
            h = np.zeros((k, n))
            h[:m, :] = fa
        else:
            w = np.zeros((m, k))
            w[:, :n] = fa
            h = np.zeros((k, n))
            h[:n, :] = np.eye(n)
        return w, h, 0.0

    eps = 1e-12
    scale = max(fa.max(), 1.0)
    best = None
    for r in range(restarts):
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, r], dtype=np.uint64)))
        w = rng.uniform(0.1, 1.0, (m, k)) * np.sqrt(scale / k)
        h = rng.uniform(0.1, 1.0, (k, n)) * np.sqrt(scale / k)
        for _ in range(iterations):
            h *= (w.T @ fa) / (w.T @ w @ h + eps)
            w *= (fa @ h.T) / (w @ h @ h.T + eps)
        residual = float(np.abs(w @ h - fa).max())
        if best is None or (residual, r) < (best[2], best[3]):
            best = (w, h, residual, r)
    return best[0], best[1], best[2]


def _round_to_rationals(arr: np.ndarray, bound: int) -> Matrix:
    rows, cols = arr.shape
    flat = [
        max(mpq(Fraction(float(x)).limit_denominator(bound)), mpq(0))
        for row in arr
        for x in row
    ]
    return Matrix(rows, cols, flat)


def _solve_right_factor(a: Matrix, left: Matrix) -> Optional[Matrix]:
    """Exact nonnegative R with left @ R = a, via normal equations, or None."""
    try:
        gram = matmul(left.transpose(), left)
        right = solve(gram, matmul(left.transpose(), a))
    except SingularMatrixError:
        return None
    if right.is_nonnegative() and matmul(left, right) == a:
        return right
    return None


def _anchor_factorization(a: Matrix, w: np.ndarray) -> Optional[Tuple[Matrix, Matrix]]:
    """Exact factorization with columns of `a` itself as the left factor.

    Each float factor column nominates its most parallel column of `a` as an
    anchor; if the anchors span the others with nonnegative coefficients the
    factorization is exact by construction.
    """
    m, n = a.shape
    k = w.shape[1]
    if k > n:
        return None
    fa = np.array([[float(x) for x in a.row(i)] for i in range(m)])
    norms = np.linalg.norm(fa, axis=0)
    usable = [j for j in range(n) if norms[j] > 0]
    if len(usable) < k:
        return None
    anchors: List[int] = []
    for col in range(k):
        wc = w[:, col]
        wn = np.linalg.norm(wc)
        if wn == 0:
            return None
        scores = sorted(
            usable, key=lambda j: -float(fa[:, j] @ wc) / (norms[j] * wn)
        )
        pick = next((j for j in scores if j not in anchors), None)
        if pick is None:
            return None
        anchors.append(pick)
    left = a.submatrix(range(m), anchors)
    right = _solve_right_factor(a, left)
    if right is None:
        return None
    return left, right


def rationalize_factorization(
    a: Matrix, w: np.ndarray, h: np.ndarray
) -> Optional[Tuple[Matrix, Matrix]]:
    """Turn float NMF factors into an exact rational factorization of a.

    Tries anchor columns or rows of `a` suggested by the float factors, then
    denominator-bounded rounding of one factor with the other solved exactly
    (the floats carry a scaling ambiguity, so rounding both rarely multiplies
    back exactly). Only pairs with L @ R = a exactly are returned.
    """
    exact = _anchor_factorization(a, w)
    if exact is not None:
        return exact
    exact = _anchor_factorization(a.transpose(), h.transpose())
    if exact is not None:
        return exact[1].transpose(), exact[0].transpose()
    for bound in (1, 2, 6, 12, 60, 1000, 10**6):
        try:
            left = _round_to_rationals(w, bound)
            right = _round_to_rationals(h, bound)
        except (ValueError, OverflowError):
            continue
        solved = _solve_right_factor(a, left)
        if solved is not None:
            return left, solved
        solved = _solve_right_factor(a.transpose(), right.transpose())
        if solved is not None:
            return solved.transpose(), right
        if matmul(left, right) == a:
            return left, right
    return None


@dataclass(frozen=True)
class NNRankBounds:
    """Certified interval [lower, upper] for the nonnegative rank."""

    lower: int
    upper: int
    lower_certificate: dict
    upper_certificate: dict

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _factorization_certificate(a: Matrix, left: Matrix, right: Matrix, rule: str) -> dict:
    assert left.is_nonnegative() and right.is_nonnegative()
    assert matmul(left, right) == a
    return {"kind": "factorization", "rule": rule, "inner_dim": left.cols, "L": left, "R": right}


def _trivial_factorization(a: Matrix) -> Tuple[Matrix, Matrix]:
    """a = selection @ nonzero-rows (or nonzero-cols @ selection), inner dim
    min(#nonzero rows, #nonzero cols)."""
    m, n = a.shape
    nz_rows = [i for i in range(m) if any(x != 0 for x in a.row(i))]
    nz_cols = [j for j in range(n) if any(x != 0 for x in a.col(j))]
    if len(nz_rows) <= len(nz_cols):
        body = a.submatrix(nz_rows, range(n))
        sel = [[1 if i == nz_rows[p] else 0 for p in range(len(nz_rows))] for i in range(m)]
        return Matrix.from_rows(sel) if nz_rows else Matrix.zeros(m, 0), body
    body = a.submatrix(range(m), nz_cols)
    sel = [[1 if j == nz_cols[p] else 0 for j in range(n)] for p in range(len(nz_cols))]
    return body, Matrix.from_rows(sel) if nz_cols else Matrix.zeros(0, n)


def nonneg_rank_bounds(
    a: Matrix,
    nmf_restarts: int = 8,
    nmf_iterations: int = 500,
    seed: int = 0,
    cover_time_limit: Optional[float] = None,
) -> NNRankBounds:
    """Certified interval for the nonnegative rank of a nonnegative matrix.

    The upper certificate, when a factorization, has been re-verified exactly;
    no floating-point value enters the returned bounds. If the rectangle-cover
    search times out, the lower bound falls back to the linear rank.
    """
    if not a.is_nonnegative():
        raise NegativeEntryError("matrix has a negative entry")
    if a.rows == 0 or a.cols == 0 or a.is_zero():
        return NNRankBounds(0, 0, {"kind": "zero"}, {"kind": "zero"})

    r = rank(a)
    pattern = support_pattern(a)
    try:
        cover = rectangle_cover_number(pattern, time_limit=cover_time_limit)
    except CoverTimeout:
        cover = None
    if cover is not None and cover >= r:
        lower = cover
        lower_cert = {"kind": "rectangle-cover", "value": cover}
    else:
        lower = r
        lower_cert = {"kind": "linear-rank", "value": r}
        if cover is None:
            lower_cert["cover_search"] = "timed-out"

    nz_rows = sum(1 for i in range(a.rows) if any(x != 0 for x in a.row(i)))
    nz_cols = sum(1 for j in range(a.cols) if any(x != 0 for x in a.col(j)))
    base_upper = min(nz_rows, nz_cols)

    if r <= 2:
        left, right = rank2_exact_factorization(a)
        return NNRankBounds(lower, r, lower_cert, _factorization_certificate(a, left, right, "rank2"))
    if r == base_upper:
        left, right = _trivial_factorization(a)
        return NNRankBounds(
            lower, base_upper, lower_cert, _factorization_certificate(a, left, right, "trivial")
        )

    left, right = _trivial_factorization(a)
    upper = base_upper
    upper_cert = _factorization_certificate(a, left, right, "trivial")
    for k in range(lower, base_upper):
        w, h, _residual = nmf_heuristic(a, k, restarts=nmf_restarts, iterations=nmf_iterations, seed=seed)
        exact = rationalize_factorization(a, w, h)
        if exact is not None:
            upper = k
            upper_cert = _factorization_certificate(a, exact[0], exact[1], "nmf-rationalized")
            break
    return NNRankBounds(lower, upper, lower_cert, upper_cert)
