"""Exact rational linear programming.

A two-phase primal simplex over ``fractions.Fraction`` with Bland's rule
(smallest-index entering column, smallest basic index on ratio ties), so
every run terminates and is deterministic.  On top of it:

* conversion of equality programs to interleaved inequality pairs,
* dualization of inequality programs (max b'y, A'y <= c, y <= 0),
* complementary-slackness index sets of a dual optimum, and
* recovery of a primal optimal point by recursing on the slackness
  information: split block-decomposable systems, otherwise pin the first
  variable to the minimum it attains among optimal solutions and strip it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .numerics import dot
from .structure import SparseIntMatrix, block_partition


@dataclass(frozen=True)
class IlpInstance:
    """A program min c'x subject to Ax = b ("eq") or Ax <= b ("leq"), x >= 0."""

    a: SparseIntMatrix
    b: tuple[int, ...]
    c: tuple[int, ...]
    form: str  # "eq" | "leq"

    def __post_init__(self):
        if self.form not in ("eq", "leq"):
            raise ValueError(f"unknown form {self.form!r}")
        if len(self.b) != self.a.n_rows:
            raise ValueError(f"b has length {len(self.b)}, expected {self.a.n_rows}")
        if len(self.c) != self.a.n_cols:
            raise ValueError(f"c has length {len(self.c)}, expected {self.a.n_cols}")

    @property
    def n_rows(self) -> int:
        return self.a.n_rows

    @property
    def n_cols(self) -> int:
        return self.a.n_cols


OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SolveStatus:
    kind: str
    x: tuple | None = None
    objective: Fraction | None = None

    @staticmethod
    def optimal(x: Sequence, objective) -> "SolveStatus":
        return SolveStatus(OPTIMAL, tuple(x), Fraction(objective))

    @staticmethod
    def infeasible() -> "SolveStatus":
        return SolveStatus(INFEASIBLE)

    @staticmethod
    def unbounded() -> "SolveStatus":
        return SolveStatus(UNBOUNDED)

    @property
    def is_optimal(self) -> bool:
        return self.kind == OPTIMAL


# --------------------------------------------------------------------------
# simplex core: min c'x, rows with senses "le"/"eq", x >= 0, exact arithmetic
# --------------------------------------------------------------------------

def _pivot(tableau, obj, basis, pr, pc):
    row = tableau[pr]
    pv = row[pc]
    tableau[pr] = [x / pv for x in row]
    prow = tableau[pr]
    for i, r in enumerate(tableau):
        if i != pr and r[pc] != 0:
            f = r[pc]
            tableau[i] = [x - f * y for x, y in zip(r, prow)]
    if obj[pc] != 0:
        f = obj[pc]
        obj[:] = [x - f * y for x, y in zip(obj, prow)]
    basis[pr] = pc


def _run_phase(tableau, obj, basis, allowed_cols):
    """Iterate pivots until optimal or unbounded (Bland's rule)."""
    n = len(tableau)
    while True:
        entering = None
        for j in allowed_cols:
            if obj[j] < 0:
                entering = j
                break
        if entering is None:
            return OPTIMAL
        leaving = None
        best_ratio = None
        for i in range(n):
            coef = tableau[i][entering]
            if coef > 0:
                ratio = tableau[i][-1] / coef
                if leaving is None or ratio < best_ratio or (
                    ratio == best_ratio and basis[i] < basis[leaving]
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving is None:
            return UNBOUNDED
        _pivot(tableau, obj, basis, leaving, entering)


def solve_rows(rows: Sequence[Sequence], senses: Sequence[str], b: Sequence, c: Sequence) -> SolveStatus:
    """Two-phase simplex on explicit dense rows; all data becomes Fraction.

    ``senses[i]`` is "le" or "eq".  Deterministic: the same input always
    pivots through the same sequence.
    """
    n, m = len(rows), len(c)
    n_slack = sum(1 for s in senses if s == "le")
    ncols = m + n_slack + n

    tableau = []
    slack_at = 0
    for i in range(n):
        row = [Fraction(x) for x in rows[i]] + [Fraction(0)] * (n_slack + n) + [Fraction(b[i])]
        if senses[i] == "le":
            row[m + slack_at] = Fraction(1)
            slack_at += 1
        elif senses[i] != "eq":
            raise ValueError(f"unknown sense {senses[i]!r}")
        if row[-1] < 0:
            row = [-x for x in row]
        row[m + n_slack + i] = Fraction(1)  # artificial, added after sign fix
        tableau.append(row)
    basis = [m + n_slack + i for i in range(n)]

    # phase 1: minimize the sum of artificials
    cost1 = [Fraction(0)] * ncols + [Fraction(0)]
    for j in range(m + n_slack, ncols):
        cost1[j] = Fraction(1)
    obj = list(cost1)
    for i in range(n):
        f = obj[basis[i]]
        if f != 0:
            obj = [x - f * y for x, y in zip(obj, tableau[i])]
    status = _run_phase(tableau, obj, basis, range(ncols))
    assert status == OPTIMAL  # phase-1 objective is bounded below by 0
    if -obj[-1] != 0:
        return SolveStatus.infeasible()

    # drive leftover artificials out of the basis (their rhs is 0 here)
    structural = range(m + n_slack)
    drop_rows = []
    for i in range(n):
        if basis[i] >= m + n_slack:
            pc = next((j for j in structural if tableau[i][j] != 0), None)
            if pc is None:
                drop_rows.append(i)  # redundant constraint
            else:
                _pivot(tableau, obj, basis, i, pc)
    for i in reversed(drop_rows):
        del tableau[i]
        del basis[i]

    # phase 2: original objective, artificial columns barred from entering
    cost2 = [Fraction(c[j]) for j in range(m)] + [Fraction(0)] * (n_slack + n) + [Fraction(0)]
    obj = list(cost2)
    for i in range(len(tableau)):
        f = obj[basis[i]]
        if f != 0:
            obj = [x - f * y for x, y in zip(obj, tableau[i])]
    status = _run_phase(tableau, obj, basis, structural)
    if status == UNBOUNDED:
        return SolveStatus.unbounded()
    x = [Fraction(0)] * m
    for i, bi in enumerate(basis):
        if bi < m:
            x[bi] = tableau[i][-1]
    return SolveStatus.optimal(x, dot(c, x) if m else 0)


def _instance_rows(inst: IlpInstance) -> list[list[int]]:
    return inst.a.to_dense()


def _strip_zero_columns(a: SparseIntMatrix, c: Sequence):
    """Remove all-zero columns; report whether any carried negative cost."""
    zeros = a.zero_columns()
    if not zeros:
        return a, list(c), list(range(a.n_cols)), False
    zset = set(zeros)
    keep = [j for j in range(a.n_cols) if j not in zset]
    negative = any(c[j] < 0 for j in zeros)
    return a.submatrix(range(a.n_rows), keep), [c[j] for j in keep], keep, negative


def _reinsert_zeros(x: Sequence, keep: Sequence[int], m: int, zero_value) -> tuple:
    out = [zero_value] * m
    for pos, j in enumerate(keep):
        out[j] = x[pos]
    return tuple(out)


def simplex_solve(inst: IlpInstance) -> SolveStatus:
    """Exact optimum of the LP; deterministic vertex when one exists.

    All-zero columns are removed first: with nonnegative cost they sit at
    zero in some optimum, while a negative cost makes the program
    unbounded as soon as the rest is feasible.
    """
    a, c, keep, neg_zero_cost = _strip_zero_columns(inst.a, inst.c)
    senses = ["eq" if inst.form == "eq" else "le"] * a.n_rows
    st = solve_rows(a.to_dense(), senses, inst.b, c)
    if st.kind == INFEASIBLE:
        return st
    if neg_zero_cost:
        return SolveStatus.unbounded()
    if st.kind == UNBOUNDED:
        return st
    if len(keep) != inst.n_cols:
        return SolveStatus.optimal(
            _reinsert_zeros(st.x, keep, inst.n_cols, Fraction(0)), st.objective
        )
    return st


def eq_to_leq(inst: IlpInstance) -> IlpInstance:
    """Replace each equality row by an adjacent <=/>= pair.

    The two rows derived from one equality stay adjacent, which keeps the
    block structure (and hence the depth) of the constraint matrix intact.
    """
    if inst.form != "eq":
        raise ValueError("eq_to_leq expects an equality-form instance")
    entries = []
    b2 = []
    for (r, c, v) in inst.a.entries:
        entries.append((2 * r, c, v))
        entries.append((2 * r + 1, c, -v))
    for bi in inst.b:
        b2.extend((bi, -bi))
    a2 = SparseIntMatrix.from_entries(2 * inst.n_rows, inst.n_cols, entries)
    return IlpInstance(a2, tuple(b2), inst.c, "leq")


@dataclass(frozen=True)
class DualProgram:
    """The dual max b'y, A'y <= c, y <= 0 of an inequality program.

    ``as_leq`` is the sign-flipped form min b'u, -A'u <= c, u >= 0 that the
    simplex consumes directly (y = -u); ``as_eq_with_slacks`` additionally
    carries one slack per constraint, min b'u, -A'u + Iz = c.
    """

    primal: IlpInstance
    as_leq: IlpInstance
    as_eq_with_slacks: IlpInstance

    def y_from_leq_solution(self, u: Sequence) -> tuple:
        return tuple(-ui for ui in u[: self.primal.n_rows])

    def solve(self) -> SolveStatus:
        """Status of the dual itself: optimal carries (y*, b'y*)."""
        st = simplex_solve(self.as_leq)
        if not st.is_optimal:
            return st
        y = self.y_from_leq_solution(st.x)
        return SolveStatus.optimal(y, -st.objective)


def dualize(inst: IlpInstance) -> DualProgram:
    if inst.form != "leq":
        raise ValueError("dualize expects an inequality-form instance")
    at_neg = [(c, r, -v) for (r, c, v) in inst.a.entries]
    a_leq = SparseIntMatrix.from_entries(inst.n_cols, inst.n_rows, at_neg)
    leq = IlpInstance(a_leq, inst.c, inst.b, "leq")
    slack_entries = list(at_neg) + [(j, inst.n_rows + j, 1) for j in range(inst.n_cols)]
    a_eq = SparseIntMatrix.from_entries(inst.n_cols, inst.n_rows + inst.n_cols, slack_entries)
    eq = IlpInstance(a_eq, inst.c, inst.b + (0,) * inst.n_cols, "eq")
    return DualProgram(inst, leq, eq)


@dataclass(frozen=True)
class SlacknessSets:
    """Rows forced tight (strictly negative dual value) and columns forced
    to zero (strictly slack dual constraint) by a dual optimum."""

    x_rows: frozenset[int]
    y_cols: frozenset[int]


def slackness_sets(inst: IlpInstance, y_star: Sequence) -> SlacknessSets:
    if inst.form != "leq":
        raise ValueError("slackness_sets expects an inequality-form instance")
    if len(y_star) != inst.n_rows:
        raise ValueError("dual vector has wrong length")
    if any(yi > 0 for yi in y_star):
        raise ValueError("dual vector must be <= 0")
    col_products = [Fraction(0)] * inst.n_cols
    for (r, c, v) in inst.a.entries:
        col_products[c] += v * Fraction(y_star[r])
    for j in range(inst.n_cols):
        if col_products[j] > inst.c[j]:
            raise ValueError("dual vector violates A'y <= c")
    x_rows = frozenset(i for i in range(inst.n_rows) if Fraction(y_star[i]) < 0)
    y_cols = frozenset(j for j in range(inst.n_cols) if col_products[j] < inst.c[j])
    return SlacknessSets(x_rows, y_cols)


class _RecoveryStats:
    __slots__ = ("depth", "max_depth")

    def __init__(self):
        self.depth = 0
        self.max_depth = 0


def recover_solution(inst: IlpInstance, _stats: _RecoveryStats | None = None) -> SolveStatus:
    """Optimal point of an inequality program built from dual solves only
    at the leaves of a split/strip recursion.

    Each node solves the dual of its subprogram, derives the slackness
    sets, fixes the first variable to the least value it takes among
    optimal solutions, and recurses with that column substituted out.
    Block-decomposable nodes split into independent parts instead.
    """
    if inst.form != "leq":
        raise ValueError("recover_solution expects an inequality-form instance")
    stats = _stats or _RecoveryStats()
    a, c, keep, neg_zero_cost = _strip_zero_columns(inst.a, inst.c)
    st = _recover(a, [Fraction(bi) for bi in inst.b], c, stats)
    if st.kind == INFEASIBLE:
        return st
    if neg_zero_cost or st.kind == UNBOUNDED:
        return SolveStatus.unbounded()
    if len(keep) != inst.n_cols:
        return SolveStatus.optimal(
            _reinsert_zeros(st.x, keep, inst.n_cols, Fraction(0)), st.objective
        )
    return st


def _recover(a: SparseIntMatrix, b: list[Fraction], c: list[int], stats: _RecoveryStats) -> SolveStatus:
    if a.n_cols == 0:
        if all(bi >= 0 for bi in b):
            return SolveStatus.optimal((), 0)
        return SolveStatus.infeasible()

    stats.depth += 1
    stats.max_depth = max(stats.max_depth, stats.depth)
    try:
        part = block_partition(a)
        if len(part) > 1:
            return _recover_split(a, b, c, part, stats)
        return _recover_strip(a, b, c, stats)
    finally:
        stats.depth -= 1


def _recover_split(a, b, c, part, stats) -> SolveStatus:
    x = [Fraction(0)] * a.n_cols
    unbounded = False
    for blk in part:
        if not blk.cols:
            if any(b[r] < 0 for r in blk.rows):
                return SolveStatus.infeasible()
            continue
        if not blk.rows:
            # an unconstrained column: optimum 0 unless its cost is negative
            j = blk.cols[0]
            if c[j] < 0:
                unbounded = True
            continue
        sub = _recover(blk.matrix, [b[r] for r in blk.rows], [c[j] for j in blk.cols], stats)
        if sub.kind == INFEASIBLE:
            return sub
        if sub.kind == UNBOUNDED:
            unbounded = True
            continue
        for j, val in zip(blk.cols, sub.x):
            x[j] = val
    if unbounded:
        return SolveStatus.unbounded()
    return SolveStatus.optimal(x, dot(c, x))


def _recover_strip(a, b, c, stats) -> SolveStatus:
    n, m = a.n_rows, a.n_cols
    dense = a.to_dense()
    # dual of the current node: min b'u, -A'u <= c, u >= 0  (y = -u)
    dual_rows = [[-dense[i][j] for i in range(n)] for j in range(m)]
    dual_st = solve_rows(dual_rows, ["le"] * m, c, b)
    if dual_st.kind == UNBOUNDED:
        return SolveStatus.infeasible()
    if dual_st.kind == INFEASIBLE:
        st = solve_rows(dense, ["le"] * n, b, c)
        assert st.kind != OPTIMAL  # strong duality forbids a primal optimum here
        return st
    y = [-ui for ui in dual_st.x]
    lam = -dual_st.objective

    col_products = [sum(dense[i][j] * y[i] for i in range(n)) for j in range(m)]
    tight_rows = [i for i in range(n) if y[i] < 0]
    zero_cols = {j for j in range(m) if col_products[j] < c[j]}

    if 0 in zero_cols:
        xi = Fraction(0)
    else:
        keep = [j for j in range(m) if j not in zero_cols]
        rows = [[dense[i][j] for j in keep] for i in range(n)]
        senses = ["le"] * n
        rhs = list(b)
        for i in tight_rows:
            rows.append([dense[i][j] for j in keep])
            senses.append("eq")
            rhs.append(b[i])
        goal = [0] * len(keep)
        goal[keep.index(0)] = 1
        hat = solve_rows(rows, senses, rhs, goal)
        assert hat.is_optimal  # feasible by slackness, bounded below by 0
        xi = hat.objective

    sub_a = a.drop_first_column()
    sub_b = [b[i] - xi * dense[i][0] for i in range(n)]
    sub = _recover(sub_a, sub_b, c[1:], stats)
    assert sub.is_optimal  # the residual program inherits feasibility and boundedness
    x = (xi,) + sub.x
    obj = dot(c, x)
    assert obj == lam  # every slackness-compatible point attains the dual value
    return SolveStatus.optimal(x, obj)
