"""Exact integer linear algebra: rank, nullspace, primitive vectors.

Elimination is fraction-free (Bareiss style) so every intermediate value is
an integer; Python integers never overflow.
"""
from __future__ import annotations

from math import gcd
from typing import Sequence


def _echelon(rows: Sequence[Sequence[int]], ncols: int):
    """Row echelon form by fraction-free elimination; returns (rows, pivots)."""
    a = [list(r) for r in rows]
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, len(a)):
            f = a[i][c]
            row_i = a[i]
            row_r = a[r]
            for k in range(c, ncols):
                row_i[k] = (piv * row_i[k] - f * row_r[k]) // prev
        prev = piv
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(rows: Sequence[Sequence[int]], ncols: int | None = None) -> int:
    if not rows:
        return 0
    ncols = len(rows[0]) if ncols is None else ncols
    return len(_echelon(rows, ncols)[1])


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def nullspace(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Integer basis of ``{x : rows @ x = 0}``, one primitive vector per free column."""
    if not rows:
        return [tuple(int(i == k) for i in range(ncols)) for k in range(ncols)]
    ech, pivots = _echelon(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        # back-substitute with x_f = D (a common denominator keeps things integral)
        x = [0] * ncols
        x_num = {f: 1}
        den = 1
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            row = ech[r]
            s = 0
            for k, val in x_num.items():
                s += row[k] * val
            # row[c] * x_c + s / den = 0  ->  x_c = -s / (den * row[c])
            scale = row[c]
            x_num = {k: val * scale for k, val in x_num.items()}
            x_num[c] = -s
            den *= scale
        for k, val in x_num.items():
            x[k] = val
        v = primitive(x)
        if den < 0:
            v = tuple(-t for t in v)
        basis.append(v)
    return basis


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))
