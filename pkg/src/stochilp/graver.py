"""Graver bases: minimal kernel vectors under the conformal order.

``x conformal_leq y`` holds when x sits in the same orthant as y and is
dominated coordinatewise.  The Graver basis of an integer matrix consists
of the minimal nonzero integer kernel vectors under that order; it is
computed here by a completion procedure: seed with a lattice basis of the
integer kernel, close under pairwise sums reduced to conformal normal
form, then keep the minimal elements.  Candidates are processed in
ascending l1 norm, which both confirms small elements first and makes the
run deterministic.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .numerics import norm_inf, norm_one, vec_add, vec_sub
from .structure import SparseIntMatrix

SIZE_GUARD = 8  # columns; beyond this an explicit norm_cap is required
DEFAULT_CAP_CLAMP = 10**6


class BudgetExceeded(RuntimeError):
    """Completion hit the norm cap; ``partial`` holds the elements found."""

    def __init__(self, cap: int, partial: frozenset):
        super().__init__(f"graver completion exceeded norm cap {cap}")
        self.cap = cap
        self.partial = partial


def conformal_leq(x: Sequence, y: Sequence) -> bool:
    """Componentwise |x_i| <= |y_i| with x_i y_i >= 0."""
    if len(x) != len(y):
        raise ValueError(f"conformal_leq: lengths {len(x)} != {len(y)}")
    return all(abs(a) <= abs(b) and a * b >= 0 for a, b in zip(x, y))


def kernel_lattice_basis(a: SparseIntMatrix) -> list[tuple[int, ...]]:
    """A lattice basis of the integer kernel of ``a``.

    Works on the columns of [A; I] with unimodular integer column
    operations (Euclidean reduction per row); columns whose top part ends
    up zero carry a basis of ker in their identity part.
    """
    n, m = a.n_rows, a.n_cols
    dense = a.to_dense()
    cols = []
    for j in range(m):
        top = [dense[i][j] for i in range(n)]
        bot = [0] * m
        bot[j] = 1
        cols.append(top + bot)

    fixed = 0
    for row in range(n):
        while True:
            nzs = [k for k in range(fixed, m) if cols[k][row] != 0]
            if len(nzs) <= 1:
                break
            nzs.sort(key=lambda k: (abs(cols[k][row]), k))
            base = nzs[0]
            for k in nzs[1:]:
                q = cols[k][row] // cols[base][row]
                if q:
                    cols[k] = [x - q * y for x, y in zip(cols[k], cols[base])]
        nzs = [k for k in range(fixed, m) if cols[k][row] != 0]
        if nzs:
            cols[fixed], cols[nzs[0]] = cols[nzs[0]], cols[fixed]
            fixed += 1
    return [tuple(col[n:]) for col in cols[fixed:]]


@dataclass(frozen=True)
class GraverBasis:
    fingerprint: tuple
    elements: frozenset[tuple[int, ...]]

    def __len__(self):
        return len(self.elements)


def _normal_form(s, elems):
    """Subtract conformal elements until none fits; may reach zero."""
    reduced = True
    while reduced and any(s):
        reduced = False
        for g in elems:
            if conformal_leq(g, s):
                s = vec_sub(s, g)
                reduced = True
                break
    return s


def _minimal_filter(elems) -> frozenset:
    out = set()
    for g in elems:
        if not any(h != g and conformal_leq(h, g) for h in elems):
            out.add(g)
    return frozenset(out)


def default_norm_cap(a: SparseIntMatrix) -> int:
    m = a.n_cols
    return min((2 * m * a.norm_inf() + 1) ** m, DEFAULT_CAP_CLAMP)


def graver_basis(a: SparseIntMatrix, norm_cap: int | None = None) -> GraverBasis:
    """The complete Graver basis of ``a`` (closed under negation).

    Raises BudgetExceeded when an irreducible element above the cap shows
    up; the default cap is the column-count worst-case bound clamped to
    10**6.  Matrices wider than the size guard need an explicit cap.
    """
    m = a.n_cols
    if norm_cap is None:
        if m > SIZE_GUARD:
            raise ValueError(f"{m} columns exceeds the size guard {SIZE_GUARD}; pass norm_cap")
        norm_cap = default_norm_cap(a)
    fingerprint = (a.n_rows, a.n_cols, a.entries)

    seeds = kernel_lattice_basis(a)
    if not seeds:
        return GraverBasis(fingerprint, frozenset())

    elems: list[tuple[int, ...]] = []
    elem_set: set[tuple[int, ...]] = set()
    queue: list[tuple[int, tuple[int, ...]]] = []
    for v in seeds:
        heapq.heappush(queue, (norm_one(v), v))
        neg = tuple(-x for x in v)
        heapq.heappush(queue, (norm_one(neg), neg))

    while queue:
        _, s = heapq.heappop(queue)
        s = _normal_form(s, elems)
        if not any(s):
            continue
        if norm_inf(s) > norm_cap:
            raise BudgetExceeded(norm_cap, _minimal_filter(elem_set))
        neg = tuple(-x for x in s)
        for new in (s, neg):
            if new in elem_set:
                continue
            for g in elems:
                cand = vec_add(new, g)
                if any(cand):
                    heapq.heappush(queue, (norm_one(cand), cand))
            elems.append(new)
            elem_set.add(new)

    return GraverBasis(fingerprint, _minimal_filter(elem_set))


def graver_norm(basis: GraverBasis) -> int:
    """g_inf: the largest l-infinity norm over basis elements."""
    return max((norm_inf(g) for g in basis.elements), default=0)


def graver_rows_bound(n_rows: int, delta: int) -> int:
    return (2 * n_rows * delta + 1) ** n_rows


def graver_cols_bound(n_cols: int, delta: int) -> int:
    return (2 * n_cols * delta + 1) ** n_cols


def conformal_decompose(
    v: Sequence[int], a: SparseIntMatrix, basis: GraverBasis | None = None
) -> list[tuple[int, ...]]:
    """Write a kernel vector as a conformal sum of Graver elements.

    Greedy: subtract the lexicographically smallest basis element that is
    conformally below the remainder; the l1 norm drops by the element's
    norm each round, so the loop terminates.
    """
    v = tuple(int(x) for x in v)
    if any(a.mat_vec(v)):
        raise ValueError("vector is not in the integer kernel")
    if basis is None:
        basis = graver_basis(a)
    ordered = sorted(basis.elements)
    parts: list[tuple[int, ...]] = []
    rem = v
    while any(rem):
        g = next((g for g in ordered if conformal_leq(g, rem)), None)
        if g is None:
            raise AssertionError("kernel vector with no conformal Graver part")
        parts.append(g)
        rem = vec_sub(rem, g)
    return parts
