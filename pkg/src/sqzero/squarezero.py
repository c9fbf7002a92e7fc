"""Decision procedures for products and commutators of nonnegative
square-zero matrices.

A nonnegative T is a product MN of nonnegative square-zero matrices (with
NM = 0) iff T^2 = 0 and the nonnegative rank of its canonical middle-free
block fits inside the middle block: the verdict is three-valued because the
nonnegative rank is interval-certified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .exactmat import Matrix, matmul, rank
from .lattice import (
    BlockForm,
    IndexPartition,
    NegativeEntryError,
    NotSquareZeroError,
    assemble_from_form,
    product_form_decomposition,
    triple_decomposition,
)
from .nnrank import NNRankBounds, nonneg_rank_bounds


class WitnessConstructionError(ValueError):
    """Inputs cannot be assembled into a valid square-zero witness."""


@dataclass(frozen=True)
class SquareZeroWitness:
    """A pair (M, N) with M^2 = N^2 = NM = 0 realizing T = MN."""

    m: Matrix
    n: Matrix

    @property
    def u(self) -> Matrix:
        """The cube-zero root M + N."""
        return self.m + self.n


IDENTITY_NAMES = ("T=MN", "M^2=0", "N^2=0", "NM=0", "M>=0", "N>=0")


@dataclass(frozen=True)
class WitnessReport:
    """Per-identity outcome of checking a witness against a target T."""

    checks: dict

    @property
    def all_hold(self) -> bool:
        return all(self.checks.values())

    def violated(self) -> list:
        return [name for name, ok in self.checks.items() if not ok]


def verify_witness(w: SquareZeroWitness, t: Matrix) -> WitnessReport:
    """Check every defining identity exactly; violations are report content."""
    m, n = w.m, w.n
    if m.shape != n.shape or m.shape != t.shape or not t.is_square():
        raise ValueError("dimension mismatch between witness and target")
    return WitnessReport(
        {
            "T=MN": matmul(m, n) == t,
            "M^2=0": matmul(m, m).is_zero(),
            "N^2=0": matmul(n, n).is_zero(),
            "NM=0": matmul(n, m).is_zero(),
            "M>=0": m.is_nonnegative(),
            "N>=0": n.is_nonnegative(),
        }
    )


def construct_factors_from_form(form: BlockForm, left: Matrix, right: Matrix) -> SquareZeroWitness:
    """Witness from an exact nonnegative factorization of the (1,3) block.

    M carries `left` on i1 x (first k middle indices), N carries `right` on
    (first k middle indices) x i3; then MN reassembles the block matrix.
    """
    part = form.partition
    k = left.cols
    if right.rows != k:
        raise WitnessConstructionError(f"inner dimensions differ: {left.cols} vs {right.rows}")
    if k > len(part.i2):
        raise WitnessConstructionError(f"inner dimension {k} exceeds middle block size {len(part.i2)}")
    if left.rows != len(part.i1) or right.cols != len(part.i3):
        raise WitnessConstructionError("factor shapes do not match the partition")
    if not (left.is_nonnegative() and right.is_nonnegative()):
        raise WitnessConstructionError("factors must be nonnegative")
    if matmul(left, right) != form.block:
        raise WitnessConstructionError("L @ R does not equal the (1,3) block")

    nn = part.n
    mid = part.i2.indices[:k]
    mdata = [[0] * nn for _ in range(nn)]
    ndata = [[0] * nn for _ in range(nn)]
    for bi, i in enumerate(part.i1):
        for p, j in enumerate(mid):
            mdata[i][j] = left[bi, p]
    for p, i in enumerate(mid):
        for bj, j in enumerate(part.i3):
            ndata[i][j] = right[p, bj]
    w = SquareZeroWitness(Matrix.from_rows(mdata), Matrix.from_rows(ndata))
    assert matmul(w.m, w.n) == assemble_from_form(form)
    return w


def cube_zero_root(w: SquareZeroWitness) -> Matrix:
    """U = M + N, with U^2 = MN and U^3 = 0 checked exactly."""
    report = verify_witness(w, matmul(w.m, w.n))
    if not report.all_hold:
        raise WitnessConstructionError(f"witness identities violated: {report.violated()}")
    u = w.u
    u2 = matmul(u, u)
    assert u2 == matmul(w.m, w.n)
    assert matmul(u2, u).is_zero()
    return u


def form_from_cube_zero(u: Matrix):
    """Block form of T = U^2 from a nonnegative cube-zero U.

    Returns (form, U12, U23) with form.block = U12 @ U23, so the middle block
    dimension bounds the inner dimension of this factorization.
    """
    part = triple_decomposition(u)
    t = matmul(u, u)
    u12 = u.submatrix(part.i1.indices, part.i2.indices)
    u23 = u.submatrix(part.i2.indices, part.i3.indices)
    block = t.submatrix(part.i1.indices, part.i3.indices)
    assert matmul(u12, u23) == block
    form = BlockForm(part, block)
    assert assemble_from_form(form) == t
    return form, u12, u23


@dataclass(frozen=True)
class Verdict:
    """Three-valued answer with a verified certificate or an obstruction."""

    answer: str  # "yes" | "no" | "unknown"
    witness: Optional[SquareZeroWitness] = None
    obstruction: Optional[str] = None
    form: Optional[BlockForm] = None
    bounds: Optional[NNRankBounds] = None

    def __post_init__(self):
        if self.answer not in ("yes", "no", "unknown"):
            raise ValueError(self.answer)
        if self.answer == "yes" and self.witness is None:
            raise ValueError("yes verdict requires a witness")
        if self.answer == "no" and self.obstruction is None:
            raise ValueError("no verdict requires an obstruction")


def decide_square_zero_product(t: Matrix, **bound_opts) -> Verdict:
    """Is t = MN for nonnegative M, N with M^2 = N^2 = NM = 0?

    "no" carries either "T^2 != 0" or a certified nonnegative-rank lower
    bound exceeding the middle dimension; "unknown" only when the certified
    interval straddles the middle dimension.
    """
    if not t.is_nonnegative():
        raise NegativeEntryError("matrix has a negative entry")
    try:
        form = product_form_decomposition(t)
    except NotSquareZeroError:
        return Verdict("no", obstruction="T^2 != 0")
    d2 = len(form.partition.i2)
    bounds = nonneg_rank_bounds(form.block, **bound_opts)
    cert = bounds.upper_certificate
    if cert["kind"] == "zero":
        zero = Matrix.zeros(t.rows, t.cols)
        return Verdict("yes", witness=SquareZeroWitness(zero, zero), form=form, bounds=bounds)
    if cert["kind"] == "factorization" and cert["inner_dim"] <= d2:
        w = construct_factors_from_form(form, cert["L"], cert["R"])
        return Verdict("yes", witness=w, form=form, bounds=bounds)
    if bounds.lower > d2:
        return Verdict(
            "no",
            obstruction=f"nonnegative-rank lower bound {bounds.lower} > dim L2 = {d2}",
            form=form,
            bounds=bounds,
        )
    return Verdict("unknown", form=form, bounds=bounds)


@dataclass(frozen=True)
class CommutatorReport:
    """Outcome of analyzing C = MN - NM for square-zero nonnegative M, N."""

    commutator: Matrix
    is_nonnegative: bool
    annihilation: dict = field(default_factory=dict)  # MT, TM, NT, TN
    partition: Optional[IndexPartition] = None
    t13_block: Optional[Matrix] = None
    rank_of_block: Optional[int] = None
    dim_l2: Optional[int] = None
    necessary_condition_holds: Optional[bool] = None


def commutator_analysis(m: Matrix, n: Matrix) -> CommutatorReport:
    """Verify every necessary condition on a nonnegative commutator.

    Requires M, N nonnegative with M^2 = N^2 = 0. When C = MN - NM is
    nonnegative the report asserts the four annihilation identities, the
    cube-zero sum, the block factorization of the (1,3) block, and the
    linear-rank budget; a negative entry in C is a reported outcome.
    """
    if m.shape != n.shape or not m.is_square():
        raise ValueError("M and N must be square of equal size")
    if not (m.is_nonnegative() and n.is_nonnegative()):
        raise NegativeEntryError("M and N must be nonnegative")
    if not matmul(m, m).is_zero():
        raise ValueError("M^2 != 0")
    if not matmul(n, n).is_zero():
        raise ValueError("N^2 != 0")

    c = matmul(m, n) - matmul(n, m)
    if not c.is_nonnegative():
        return CommutatorReport(commutator=c, is_nonnegative=False)

    annihilation = {
        "MT=0": matmul(m, c).is_zero(),
        "TM=0": matmul(c, m).is_zero(),
        "NT=0": matmul(n, c).is_zero(),
        "TN=0": matmul(c, n).is_zero(),
    }
    s = m + n
    s2 = matmul(s, s)
    assert matmul(s2, s).is_zero()
    part = triple_decomposition(s)
    i1, i2, i3 = part.i1.indices, part.i2.indices, part.i3.indices
    t13 = c.submatrix(i1, i3)
    m12 = m.submatrix(i1, i2)
    m23 = m.submatrix(i2, i3)
    n12 = n.submatrix(i1, i2)
    n23 = n.submatrix(i2, i3)
    assert matmul(m12 - n12, m23 + n23) == t13
    rk = rank(t13)
    return CommutatorReport(
        commutator=c,
        is_nonnegative=True,
        annihilation=annihilation,
        partition=part,
        t13_block=t13,
        rank_of_block=rk,
        dim_l2=len(i2),
        necessary_condition_holds=all(annihilation.values()) and rk <= len(i2),
    )


def necessary_condition_check(t: Matrix) -> bool:
    """True iff t^2 = 0 and rank of the canonical (1,3) block fits the middle."""
    if not t.is_nonnegative():
        raise NegativeEntryError("matrix has a negative entry")
    try:
        form = product_form_decomposition(t)
    except NotSquareZeroError:
        return False
    return rank(form.block) <= len(form.partition.i2)
