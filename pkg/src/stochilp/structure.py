"""Sparse integer matrices and block-structure detection.

A matrix is stored as a sorted list of nonzero entries.  On top of that
this module computes:

* the finest block-diagonal partition (in the given row/column order),
* the recursive column-stripping depth of a matrix,
* the primal graph (columns adjacent when they share a nonzero row),
* elimination forests witnessing small primal treedepth, and
* (r,s)-stochastic decompositions (r global columns, then blocks with at
  most s columns each).

The two searches are exhaustive with memoization; they are meant for
desk-scale matrices (components of up to ~20 columns), where they match
the contracts of the fixed-parameter algorithms they stand in for.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence


@dataclass(frozen=True)
class SparseIntMatrix:
    """Integer matrix given by its nonzero entries, sorted by (row, col)."""

    n_rows: int
    n_cols: int
    entries: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise ValueError("negative dimension")
        prev = None
        for (r, c, v) in self.entries:
            if not (0 <= r < self.n_rows and 0 <= c < self.n_cols):
                raise ValueError(f"entry ({r},{c}) out of range for {self.n_rows}x{self.n_cols}")
            if v == 0:
                raise ValueError(f"zero entry stored at ({r},{c})")
            if prev is not None and (r, c) <= prev:
                raise ValueError(f"entries not strictly sorted at ({r},{c})")
            prev = (r, c)

    @staticmethod
    def from_entries(n_rows: int, n_cols: int, entries: Iterable[tuple[int, int, int]]) -> "SparseIntMatrix":
        cleaned = sorted((r, c, int(v)) for (r, c, v) in entries if v != 0)
        seen = set()
        for (r, c, _) in cleaned:
            if (r, c) in seen:
                raise ValueError(f"duplicate entry at ({r},{c})")
            seen.add((r, c))
        return SparseIntMatrix(n_rows, n_cols, tuple(cleaned))

    @staticmethod
    def from_dense(rows: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        n = len(rows)
        m = len(rows[0]) if rows else 0
        entries = []
        for i, row in enumerate(rows):
            if len(row) != m:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                if v != 0:
                    entries.append((i, j, int(v)))
        return SparseIntMatrix(n, m, tuple(entries))

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for (r, c, v) in self.entries:
            out[r][c] = v
        return out

    def norm_inf(self) -> int:
        return max((abs(v) for (_, _, v) in self.entries), default=0)

    def rows_nonzero(self) -> list[list[tuple[int, int]]]:
        """Per row, the list of (col, value) pairs."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n_rows)]
        for (r, c, v) in self.entries:
            out[r].append((c, v))
        return out

    def cols_nonzero(self) -> list[list[tuple[int, int]]]:
        """Per column, the list of (row, value) pairs."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n_cols)]
        for (r, c, v) in self.entries:
            out[c].append((r, v))
        return out

    def column(self, j: int) -> tuple[int, ...]:
        col = [0] * self.n_rows
        for (r, c, v) in self.entries:
            if c == j:
                col[r] = v
        return tuple(col)

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix.from_entries(
            self.n_cols, self.n_rows, ((c, r, v) for (r, c, v) in self.entries)
        )

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseIntMatrix":
        rmap = {r: i for i, r in enumerate(rows)}
        cmap = {c: j for j, c in enumerate(cols)}
        ents = [(rmap[r], cmap[c], v) for (r, c, v) in self.entries if r in rmap and c in cmap]
        return SparseIntMatrix.from_entries(len(rows), len(cols), ents)

    def drop_first_column(self) -> "SparseIntMatrix":
        return SparseIntMatrix.from_entries(
            self.n_rows, self.n_cols - 1,
            ((r, c - 1, v) for (r, c, v) in self.entries if c != 0),
        )

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> "SparseIntMatrix":
        """Reorder so that new row i is old row ``row_order[i]`` (same for columns)."""
        if sorted(row_order) != list(range(self.n_rows)) or sorted(col_order) != list(range(self.n_cols)):
            raise ValueError("orders must be permutations")
        rpos = {old: new for new, old in enumerate(row_order)}
        cpos = {old: new for new, old in enumerate(col_order)}
        return SparseIntMatrix.from_entries(
            self.n_rows, self.n_cols,
            ((rpos[r], cpos[c], v) for (r, c, v) in self.entries),
        )

    def zero_columns(self) -> list[int]:
        used = {c for (_, c, _) in self.entries}
        return [j for j in range(self.n_cols) if j not in used]

    def mat_vec(self, x: Sequence) -> tuple:
        if len(x) != self.n_cols:
            raise ValueError(f"mat_vec: vector length {len(x)} != {self.n_cols}")
        out = [0] * self.n_rows
        for (r, c, v) in self.entries:
            out[r] += v * x[c]
        return tuple(out)


@dataclass(frozen=True)
class Block:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    matrix: SparseIntMatrix


@dataclass(frozen=True)
class BlockPartition:
    blocks: tuple[Block, ...]

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


def block_partition(m: SparseIntMatrix) -> BlockPartition:
    """The unique finest block-diagonal partition in the given order.

    Entries are scanned in lexicographic order; a cut is valid after sorted
    position p exactly when the prefix rows end strictly before the suffix
    rows start and the prefix's maximum column is strictly below the
    suffix's minimum column.  (Checking only the two adjacent entries is
    not enough: an earlier wide entry can block the cut.)  Zero rows and
    zero columns falling between nonzero groups, or at the matrix edges,
    become their own degenerate blocks.
    """
    ents = m.entries
    groups: list[list[tuple[int, int, int]]] = []
    if ents:
        prefix_maxcol = []
        mc = -1
        for (_, c, _) in ents:
            mc = max(mc, c)
            prefix_maxcol.append(mc)
        suffix_mincol = [0] * len(ents)
        mn = m.n_cols
        for i in range(len(ents) - 1, -1, -1):
            mn = min(mn, ents[i][1])
            suffix_mincol[i] = mn
        cur = [ents[0]]
        for i in range(1, len(ents)):
            if ents[i - 1][0] < ents[i][0] and prefix_maxcol[i - 1] < suffix_mincol[i]:
                groups.append(cur)
                cur = [ents[i]]
            else:
                cur.append(ents[i])
        groups.append(cur)

    blocks: list[Block] = []

    def add_zero_blocks(row_lo, row_hi, col_lo, col_hi):
        for c in range(col_lo, col_hi):
            blocks.append(Block((), (c,), SparseIntMatrix(0, 1, ())))
        for r in range(row_lo, row_hi):
            blocks.append(Block((r,), (), SparseIntMatrix(1, 0, ())))

    next_row, next_col = 0, 0
    for g in groups:
        rlo = min(e[0] for e in g)
        rhi = max(e[0] for e in g)
        clo = min(e[1] for e in g)
        chi = max(e[1] for e in g)
        add_zero_blocks(next_row, rlo, next_col, clo)
        rows = tuple(range(rlo, rhi + 1))
        cols = tuple(range(clo, chi + 1))
        blocks.append(Block(rows, cols, m.submatrix(rows, cols)))
        next_row, next_col = rhi + 1, chi + 1
    add_zero_blocks(next_row, m.n_rows, next_col, m.n_cols)
    return BlockPartition(tuple(blocks))


def depth(m: SparseIntMatrix) -> int:
    """Recursive column-stripping depth of a matrix (order-sensitive)."""
    if m.n_cols == 0:
        return 0
    part = block_partition(m)
    if len(part) > 1:
        return max(depth(b.matrix) for b in part)
    return 1 + depth(m.drop_first_column())


def primal_graph(m: SparseIntMatrix) -> dict[int, set[int]]:
    """Graph on columns; an edge joins columns sharing a nonzero row."""
    adj: dict[int, set[int]] = {j: set() for j in range(m.n_cols)}
    for cols_vals in m.rows_nonzero():
        cols = [c for (c, _) in cols_vals]
        for a, b in combinations(cols, 2):
            adj[a].add(b)
            adj[b].add(a)
    return adj


def connected_components(adj: dict[int, set[int]], vertices: Iterable[int] | None = None) -> list[list[int]]:
    verts = sorted(adj) if vertices is None else sorted(vertices)
    vset = set(verts)
    seen: set[int] = set()
    comps = []
    for v in verts:
        if v in seen:
            continue
        comp = []
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w in vset and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class EliminationForest:
    """Parent per column (None marks a root) plus the declared depth."""

    parents: tuple[int | None, ...]
    depth: int

    def node_depths(self) -> list[int]:
        out = [0] * len(self.parents)

        def d(j):
            if out[j]:
                return out[j]
            p = self.parents[j]
            out[j] = 1 if p is None else d(p) + 1
            return out[j]

        for j in range(len(self.parents)):
            d(j)
        return out

    def validate(self, m: SparseIntMatrix) -> bool:
        """Depth within bound and row cliques along ancestor chains."""
        nd = self.node_depths()
        if nd and max(nd) > self.depth:
            return False

        def ancestors(j):
            out = {j}
            while self.parents[j] is not None:
                j = self.parents[j]
                out.add(j)
            return out

        anc = [ancestors(j) for j in range(len(self.parents))]
        for cols_vals in m.rows_nonzero():
            cols = [c for (c, _) in cols_vals]
            for a, b in combinations(cols, 2):
                if a not in anc[b] and b not in anc[a]:
                    return False
        return True


class _TreedepthSearch:
    """Exhaustive elimination-forest search with memoization on vertex sets."""

    def __init__(self, adj: dict[int, set[int]]):
        self.adj = adj
        self.memo: dict[tuple[frozenset, int], list | None] = {}

    def forest(self, vertices: frozenset, budget: int) -> list | None:
        """A forest of depth <= budget over the induced subgraph, or None.

        Trees are (root, children) pairs; roots are tried in ascending
        order so the result is deterministic.
        """
        if not vertices:
            return []
        key = (vertices, budget)
        if key in self.memo:
            return self.memo[key]
        comps = connected_components(self.adj, vertices)
        if len(comps) > 1:
            out: list = []
            for comp in comps:
                sub = self.forest(frozenset(comp), budget)
                if sub is None:
                    out = None
                    break
                out.extend(sub)
            self.memo[key] = out
            return out
        if budget <= 0:
            self.memo[key] = None
            return None
        comp = comps[0]
        if len(comp) == 1:
            res = [(comp[0], [])]
            self.memo[key] = res
            return res
        for root in comp:
            sub = self.forest(vertices - {root}, budget - 1)
            if sub is not None:
                res = [(root, sub)]
                self.memo[key] = res
                return res
        self.memo[key] = None
        return None


def _forest_to_parents(forest: list, n_cols: int) -> tuple[list[int | None], list[int]]:
    """Flatten (root, children) trees into a parent array and pre-order."""
    parents: list[int | None] = [None] * n_cols
    preorder: list[int] = []

    def visit(tree, parent):
        node, children = tree
        parents[node] = parent
        preorder.append(node)
        for ch in sorted(children, key=lambda t: t[0]):
            visit(ch, node)

    for tree in sorted(forest, key=lambda t: t[0]):
        visit(tree, None)
    return parents, preorder


def find_depth_permutation(
    m: SparseIntMatrix, d: int
) -> tuple[tuple[int, ...], tuple[int, ...], EliminationForest] | None:
    """Row/column orders under which the matrix has depth <= d, or None.

    Searches an elimination forest of the primal graph of depth <= d;
    columns are laid out in pre-order and rows sorted by the pre-order
    position of their deepest nonzero column (a row's support is a clique,
    hence a root-to-node chain).  Returns None when the primal treedepth
    exceeds d.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    adj = primal_graph(m)
    forest = _TreedepthSearch(adj).forest(frozenset(range(m.n_cols)), d)
    if forest is None:
        return None
    parents, preorder = _forest_to_parents(forest, m.n_cols)
    pos = {c: i for i, c in enumerate(preorder)}
    row_keys = []
    for r, cols_vals in enumerate(m.rows_nonzero()):
        key = max((pos[c] for (c, _) in cols_vals), default=m.n_cols)
        row_keys.append((key, r))
    row_order = tuple(r for (_, r) in sorted(row_keys))
    col_order = tuple(preorder)
    ef = EliminationForest(tuple(parents), d)
    permuted = m.permuted(row_order, col_order)
    if depth(permuted) > d:
        raise AssertionError("pre-order layout exceeded the forest depth")
    return row_order, col_order, ef


@dataclass(frozen=True)
class StochasticDecomposition:
    """Witness that a matrix takes two-stage block form under permutations.

    After applying ``row_order``/``col_order`` the first ``r`` columns are
    the global ones and each remaining block has at most s columns.
    """

    r: int
    t: int
    row_order: tuple[int, ...]
    col_order: tuple[int, ...]
    global_cols: tuple[int, ...]
    blocks: tuple[tuple[SparseIntMatrix, SparseIntMatrix], ...]
    block_rows: tuple[tuple[int, ...], ...] = field(default=())
    block_cols: tuple[tuple[int, ...], ...] = field(default=())

    def validate(self, m: SparseIntMatrix, s: int) -> bool:
        if any(b.n_cols > s for (_, b) in self.blocks):
            return False
        perm = m.permuted(self.row_order, self.col_order).to_dense()
        expect = [[0] * m.n_cols for _ in range(m.n_rows)]
        row0, col0 = 0, self.r
        for (a_i, b_i) in self.blocks:
            ad, bd = a_i.to_dense(), b_i.to_dense()
            for rr in range(a_i.n_rows):
                for cc in range(a_i.n_cols):
                    expect[row0 + rr][cc] = ad[rr][cc]
                for cc in range(b_i.n_cols):
                    expect[row0 + rr][col0 + cc] = bd[rr][cc]
            row0 += a_i.n_rows
            col0 += b_i.n_cols
        return row0 == m.n_rows and col0 == m.n_cols and perm == expect


def find_rs_decomposition(m: SparseIntMatrix, r: int, s: int) -> StochasticDecomposition | None:
    """Find <= r global columns whose removal leaves blocks of <= s columns.

    Exhaustive over candidate sets drawn from oversized components of the
    primal graph (vertices of small components never need removing), in
    ascending size then lexicographic order.  Returns None when no such
    set exists.
    """
    if r < 0 or s < 0:
        raise ValueError("r and s must be >= 0")
    adj = primal_graph(m)

    def oversized(removed: frozenset) -> list[list[int]]:
        remaining = set(adj) - removed
        return [c for c in connected_components(adj, remaining) if len(c) > s]

    chosen: tuple[int, ...] | None = None
    if not oversized(frozenset()):
        chosen = ()
    else:
        candidates = sorted({v for comp in oversized(frozenset()) for v in comp})
        for size in range(1, r + 1):
            for x in combinations(candidates, size):
                if not oversized(frozenset(x)):
                    chosen = x
                    break
            if chosen is not None:
                break
    if chosen is None:
        return None
    return _build_rs_decomposition(m, adj, chosen)


def _build_rs_decomposition(
    m: SparseIntMatrix, adj: dict[int, set[int]], global_cols: tuple[int, ...]
) -> StochasticDecomposition:
    gset = set(global_cols)
    comps = connected_components(adj, set(adj) - gset)
    rows_by_comp: list[list[int]] = [[] for _ in comps]
    comp_of_col = {}
    for i, comp in enumerate(comps):
        for c in comp:
            comp_of_col[c] = i
    leftover_rows = []
    for rr, cols_vals in enumerate(m.rows_nonzero()):
        local = {comp_of_col[c] for (c, _) in cols_vals if c not in gset}
        if len(local) > 1:
            raise AssertionError("row spans two separated components")
        if local:
            rows_by_comp[local.pop()].append(rr)
        else:
            leftover_rows.append(rr)  # rows supported on global columns only, or zero rows

    col_order = list(global_cols)
    row_order: list[int] = []
    blocks = []
    block_rows = []
    block_cols = []
    for i, comp in enumerate(comps):
        rows = rows_by_comp[i]
        a_i = m.submatrix(rows, list(global_cols))
        b_i = m.submatrix(rows, comp)
        blocks.append((a_i, b_i))
        block_rows.append(tuple(rows))
        block_cols.append(tuple(comp))
        col_order.extend(comp)
        row_order.extend(rows)
    if leftover_rows:
        a_i = m.submatrix(leftover_rows, list(global_cols))
        blocks.append((a_i, SparseIntMatrix(len(leftover_rows), 0, ())))
        block_rows.append(tuple(leftover_rows))
        block_cols.append(())
        row_order.extend(leftover_rows)
    return StochasticDecomposition(
        r=len(global_cols),
        t=len(blocks),
        row_order=tuple(row_order),
        col_order=tuple(col_order),
        global_cols=tuple(global_cols),
        blocks=tuple(blocks),
        block_rows=tuple(block_rows),
        block_cols=tuple(block_cols),
    )
