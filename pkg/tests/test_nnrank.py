import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_cover_number
from sqzero.counterexample import build_T13
from sqzero.exactmat import Matrix, matmul, permutation_matrix, rank
from sqzero.lattice import NegativeEntryError
from sqzero.nnrank import (
    SupportPattern,
    nmf_heuristic,
    nonneg_rank_bounds,
    rank2_exact_factorization,
    rationalize_factorization,
    rectangle_cover_number,
    support_pattern,
)


def nonneg_matrix(rows, cols, hi=3):
    return st.lists(
        st.lists(st.integers(0, hi), min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    ).map(Matrix.from_rows)


class TestSupportPattern:
    def test_zero(self):
        p = support_pattern(Matrix.zeros(2, 3))
        assert not any(any(r) for r in p.mask)

    def test_identity(self):
        p = support_pattern(Matrix.identity(3))
        assert all(p.mask[i][j] == (i == j) for i in range(3) for j in range(3))

    def test_t13_row_supports(self):
        p = support_pattern(build_T13())
        supports = [tuple(j for j in range(4) if p.mask[i][j]) for i in range(4)]
        assert supports == [(0, 1), (0, 2), (1, 3), (2, 3)]


class TestRectangleCover:
    def test_all_true(self):
        p = SupportPattern(3, 3, tuple((True,) * 3 for _ in range(3)))
        assert rectangle_cover_number(p) == 1

    def test_diagonal(self):
        p = support_pattern(Matrix.identity(3))
        assert rectangle_cover_number(p) == 3

    def test_t13_cover_is_4(self):
        t13 = build_T13()
        mask = [[t13[i, j] != 0 for j in range(4)] for i in range(4)]
        # independent oracle: no 2x2 all-ones submatrix, so every rectangle
        # covers at most 2 of the 8 cells, forcing >= 4; 4 rows achieve it
        for i1 in range(4):
            for i2 in range(i1 + 1, 4):
                common = [j for j in range(4) if mask[i1][j] and mask[i2][j]]
                assert len(common) <= 1
        assert brute_cover_number(mask) == 4
        assert rectangle_cover_number(support_pattern(t13)) == 4

    def test_empty_pattern(self):
        assert rectangle_cover_number(support_pattern(Matrix.zeros(2, 2))) == 0

    @settings(max_examples=40, deadline=None)
    @given(a=nonneg_matrix(3, 4, hi=1))
    def test_matches_brute_force(self, a):
        mask = [[a[i, j] != 0 for j in range(4)] for i in range(3)]
        assert rectangle_cover_number(support_pattern(a)) == brute_cover_number(mask)

    @settings(max_examples=30, deadline=None)
    @given(a=nonneg_matrix(3, 3, hi=1))
    def test_cell_count_rule(self, a):
        # with no 1x2 or 2x1 all-true sub-block (two true cells sharing a row
        # or a column) the cover equals the cell count
        mask = [[a[i, j] != 0 for j in range(3)] for i in range(3)]
        cells = sum(sum(r) for r in mask)
        has_pair = any(sum(r) >= 2 for r in mask) or any(
            sum(mask[i][j] for i in range(3)) >= 2 for j in range(3)
        )
        if not has_pair:
            assert rectangle_cover_number(support_pattern(a)) == cells


class TestRank2Factorization:
    def test_rank_one_outer_product(self):
        u, v = [2, 0, 3], [1, 4, 0, 2]
        a = Matrix.from_rows([[x * y for y in v] for x in u])
        left, right = rank2_exact_factorization(a)
        assert left.cols == 1
        assert matmul(left, right) == a
        assert right.is_nonnegative()

    def test_rank_two_example(self):
        a = Matrix.from_rows([[2, 1, 0], [0, 1, 2]])
        left, right = rank2_exact_factorization(a)
        assert matmul(left, right) == a
        assert left == Matrix.from_rows([[2, 0], [0, 2]])
        assert right == Matrix.from_rows([["1", "1/2", "0"], ["0", "1/2", "1"]])

    def test_identity2(self):
        left, right = rank2_exact_factorization(Matrix.identity(2))
        assert matmul(left, right) == Matrix.identity(2)

    def test_rank3_rejected(self):
        with pytest.raises(ValueError):
            rank2_exact_factorization(Matrix.identity(3))

    @settings(max_examples=50, deadline=None)
    @given(
        u1=st.lists(st.integers(0, 4), min_size=3, max_size=3),
        v1=st.lists(st.integers(0, 4), min_size=4, max_size=4),
        u2=st.lists(st.integers(0, 4), min_size=3, max_size=3),
        v2=st.lists(st.integers(0, 4), min_size=4, max_size=4),
    )
    def test_random_sums_of_two_rank_ones(self, u1, v1, u2, v2):
        a = Matrix.from_rows(
            [[u1[i] * v1[j] + u2[i] * v2[j] for j in range(4)] for i in range(3)]
        )
        left, right = rank2_exact_factorization(a)
        assert matmul(left, right) == a
        assert left.is_nonnegative() and right.is_nonnegative()
        assert left.cols == rank(a)


class TestNmfHeuristic:
    def test_recovers_planted_factorization(self):
        # some columns of the product are the planted generators themselves,
        # so anchor extraction can certify the heuristic's answer exactly
        left = Matrix.from_rows([[1, 0, 2], [0, 1, 1], [2, 1, 0], [1, 1, 1], [0, 2, 1]])
        right = Matrix.from_rows([[1, 0, 0, 1, 2], [0, 1, 0, 1, 0], [0, 0, 1, 0, 1]])
        a = matmul(left, right)
        assert rank(a) == 3
        w, h, residual = nmf_heuristic(a, 3, restarts=16, iterations=2000, seed=5)
        # the float heuristic only needs to get close; exactness comes from
        # the certified rationalization below
        assert residual < 0.05
        exact = rationalize_factorization(a, w, h)
        assert exact is not None
        assert matmul(exact[0], exact[1]) == a
        assert exact[0].is_nonnegative() and exact[1].is_nonnegative()
        assert exact[0].cols == 3

    def test_t13_at_k3_stays_away_from_zero(self):
        _, _, residual = nmf_heuristic(build_T13(), 3, restarts=12, iterations=1500, seed=0)
        assert residual > 1e-3

    def test_identity_embedding_when_k_large(self):
        a = Matrix.from_rows([[1, 2, 3], [4, 5, 6]])
        w, h, residual = nmf_heuristic(a, 2, seed=0)
        assert residual == 0.0
        assert np.array_equal(w @ h, np.array([[1.0, 2, 3], [4, 5, 6]]))

    def test_deterministic_per_seed(self):
        a = build_T13()
        r1 = nmf_heuristic(a, 3, restarts=4, iterations=100, seed=9)
        r2 = nmf_heuristic(a, 3, restarts=4, iterations=100, seed=9)
        assert np.array_equal(r1[0], r2[0]) and np.array_equal(r1[1], r2[1])
        assert r1[2] == r2[2]


class TestBounds:
    def test_t13(self):
        b = nonneg_rank_bounds(build_T13())
        assert (b.lower, b.upper) == (4, 4)
        assert b.exact
        assert b.lower_certificate == {"kind": "rectangle-cover", "value": 4}

    def test_identity4(self):
        b = nonneg_rank_bounds(Matrix.identity(4))
        assert (b.lower, b.upper) == (4, 4)

    def test_zero(self):
        b = nonneg_rank_bounds(Matrix.zeros(3, 2))
        assert (b.lower, b.upper) == (0, 0)

    def test_rank2_closes_with_certificate(self):
        a = Matrix.from_rows([[1, 1, 2], [0, 1, 1], [1, 2, 3]])
        assert rank(a) == 2
        b = nonneg_rank_bounds(a)
        assert (b.lower, b.upper) == (2, 2)
        cert = b.upper_certificate
        assert cert["kind"] == "factorization"
        assert matmul(cert["L"], cert["R"]) == a
        assert cert["L"].is_nonnegative() and cert["R"].is_nonnegative()

    def test_rejects_negative(self):
        with pytest.raises(NegativeEntryError):
            nonneg_rank_bounds(Matrix.from_rows([[1, -1]]))

    @settings(max_examples=25, deadline=None)
    @given(a=nonneg_matrix(3, 4), data=st.data())
    def test_permutation_and_zero_line_invariance(self, a, data):
        b = nonneg_rank_bounds(a)
        assert b.lower <= b.upper
        rperm = data.draw(st.permutations(range(3)))
        cperm = data.draw(st.permutations(range(4)))
        shuffled = matmul(matmul(permutation_matrix(rperm), a), permutation_matrix(cperm))
        b2 = nonneg_rank_bounds(shuffled)
        assert (b.lower, b.upper) == (b2.lower, b2.upper)
        # deleting zero rows/columns changes nothing
        nz_rows = [i for i in range(3) if any(x != 0 for x in a.row(i))]
        nz_cols = [j for j in range(4) if any(x != 0 for x in a.col(j))]
        b3 = nonneg_rank_bounds(a.submatrix(nz_rows, nz_cols))
        assert (b.lower, b.upper) == (b3.lower, b3.upper)

    @settings(max_examples=25, deadline=None)
    @given(
        a=nonneg_matrix(3, 3),
        d1=st.lists(st.integers(1, 5), min_size=3, max_size=3),
        d2=st.lists(st.integers(1, 5), min_size=3, max_size=3),
    )
    def test_lower_bound_diagonal_scaling_invariance(self, a, d1, d2):
        scaled = Matrix.from_rows(
            [[mpq(d1[i]) * a[i, j] * mpq(d2[j]) for j in range(3)] for i in range(3)]
        )
        assert nonneg_rank_bounds(scaled).lower == nonneg_rank_bounds(a).lower

    @settings(max_examples=40, deadline=None)
    @given(a=nonneg_matrix(3, 5))
    def test_small_instances_close(self, a):
        # min dimension <= 3 always closes the interval
        b = nonneg_rank_bounds(a)
        assert b.exact
