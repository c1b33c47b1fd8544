"""Small exact linear algebra: rational inverses and kernels over Q(zeta_8)."""

from __future__ import annotations

from typing import Sequence

from .scalar import ONE, ZERO, Cyclo8, Q


def rational_inverse(rows: Sequence[Sequence]) -> list:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    n = len(rows)
    a = [[Q(x) for x in row] + [Q(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def row_reduce(rows: list, ncols: int) -> tuple:
    """Reduced row echelon form over Q(zeta_8); returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv if x else ZERO for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y if y else x for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: list, ncols: int) -> list:
    """Basis of {x : rows . x = 0} as lists of Cyclo8, one per free column."""
    red, pivots = row_reduce(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, p in zip(red, pivots):
            if row[f]:
                x[p] = -row[f]
        basis.append(x)
    return basis


def as_cyclo(x) -> Cyclo8:
    return x if isinstance(x, Cyclo8) else Cyclo8.rational(x)
