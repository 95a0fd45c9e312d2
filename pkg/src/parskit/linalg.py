"""Sparse Gauss-Jordan elimination over the rationals.

Rows are ``{column: Fraction}`` dicts and right-hand sides are
``{key: Fraction}`` dicts, so one elimination solves for every key (every
target normal form) at once.  Pivot choice is deterministic: the lowest
unused row holding the current column.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Hashable

from .errors import SingularSystem

Row = dict[int, Fraction]
Rhs = dict[Hashable, Fraction]


def _axpy(dst: dict, src: dict, f: Fraction, index=None, row=None):
    """dst -= f * src, dropping exact zeros."""
    for k, v in src.items():
        new = dst.get(k, 0) - f * v
        if new:
            dst[k] = new
            if index is not None:
                index[k].add(row)
        elif k in dst:
            del dst[k]
            if index is not None:
                index[k].discard(row)


def solve(matrix: list[Row], rhs: list[Rhs]) -> list[Rhs]:
    """Solve ``matrix @ x = rhs`` exactly for a square nonsingular system."""
    n = len(matrix)
    if len(rhs) != n:
        raise ValueError("matrix and rhs differ in length")
    rows = [{c: Fraction(v) for c, v in r.items() if v} for r in matrix]
    b = [{k: Fraction(v) for k, v in r.items() if v} for r in rhs]
    cols: dict[int, set[int]] = defaultdict(set)
    for i, r in enumerate(rows):
        for c in r:
            if not 0 <= c < n:
                raise ValueError(f"column {c} out of range")
            cols[c].add(i)

    used: set[int] = set()
    pivot_row = [0] * n
    for k in range(n):
        candidates = [i for i in cols[k] if i not in used]
        if not candidates:
            raise SingularSystem(f"no pivot for column {k}")
        p = min(candidates)
        used.add(p)
        pivot_row[k] = p
        piv = rows[p][k]
        if piv != 1:
            rows[p] = {c: v / piv for c, v in rows[p].items()}
            b[p] = {key: v / piv for key, v in b[p].items()}
        for i in sorted(cols[k] - {p}):
            f = rows[i][k]
            _axpy(rows[i], rows[p], f, cols, i)
            _axpy(b[i], b[p], f)
    return [b[pivot_row[k]] for k in range(n)]
