"""Exact arbitrary-precision arithmetic and small dense linear algebra.

Everything in this package computes over Python ints and
``fractions.Fraction``; there is no floating point anywhere.  Vectors are
plain tuples, matrices are sequences of row sequences.  Scalars serialize
as decimal strings ("-42", "3/7") so arbitrary precision survives JSON
round trips.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

IntVec = tuple[int, ...]
RatVec = tuple[Fraction, ...]


class DimensionError(ValueError):
    """Raised on shape mismatches in vector/matrix operations."""


def format_scalar(x: int | Fraction) -> str:
    """Serialize an integer or rational as a decimal string."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def parse_int(s: str) -> int:
    try:
        return int(s, 10)
    except (TypeError, ValueError):
        raise ValueError(f"not a decimal integer string: {s!r}") from None


def parse_rat(s: str) -> Fraction:
    """Parse "p" or "p/q" into a canonical Fraction (q > 0, reduced)."""
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(int(num, 10), int(den, 10))
        return Fraction(int(s, 10))
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational string: {s!r}") from None


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionError(f"dot: lengths {len(u)} != {len(v)}")
    return sum(a * b for a, b in zip(u, v))


def vec_add(u: Sequence, v: Sequence) -> tuple:
    if len(u) != len(v):
        raise DimensionError(f"add: lengths {len(u)} != {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> tuple:
    if len(u) != len(v):
        raise DimensionError(f"sub: lengths {len(u)} != {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(k, u: Sequence) -> tuple:
    return tuple(k * a for a in u)


def norm_inf(u: Sequence):
    return max((abs(a) for a in u), default=0)


def norm_one(u: Sequence):
    return sum(abs(a) for a in u)


def _check_square(m: Sequence[Sequence[int]]) -> int:
    d = len(m)
    for row in m:
        if len(row) != d:
            raise DimensionError(f"matrix is {d}x{len(row)}, expected square")
    return d


def det(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix.

    Fraction-free Bareiss elimination: all intermediate values stay
    integral and polynomially bounded, divisions are exact.
    """
    d = _check_square(m)
    if d == 0:
        return 1
    a = [list(map(int, row)) for row in m]
    sign = 1
    prev = 1
    for k in range(d - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, d) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[d - 1][d - 1]


def lcm_list(xs: Sequence[int]) -> int:
    """Least common multiple of a nonempty sequence of positive integers."""
    if not xs:
        raise ValueError("lcm_list: empty sequence")
    for x in xs:
        if x <= 0:
            raise ValueError(f"lcm_list: nonpositive element {x}")
    return math.lcm(*xs)


def solve_square(m: Sequence[Sequence[int]], v: Sequence) -> RatVec | None:
    """Solve Mx = v exactly for square integer M.

    Returns the unique rational solution when M is invertible and None
    when M is singular (regardless of whether v lies in the image; callers
    here only use invertible matrices).
    """
    d = _check_square(m)
    if len(v) != d:
        raise DimensionError(f"solve_square: rhs length {len(v)} != {d}")
    aug = [[Fraction(m[i][j]) for j in range(d)] + [Fraction(v[i])] for i in range(d)]
    for col in range(d):
        pivot = next((r for r in range(col, d) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(d):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(aug[i][d] for i in range(d))


def mat_vec(m: Sequence[Sequence[int]], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def is_integral(v: Sequence) -> bool:
    return all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1) for x in v)


def to_int_vec(v: Sequence) -> IntVec:
    if not is_integral(v):
        raise ValueError(f"vector is not integral: {v}")
    return tuple(int(x) for x in v)
