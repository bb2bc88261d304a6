"""Exact Gaussian elimination over GaussScalar matrices (lists of rows)."""

from __future__ import annotations

from typing import Sequence

from .algebra import ONE, ZERO, GaussScalar

Matrix = list[list[GaussScalar]]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[GaussScalar.coerce(x) for x in row] for row in rows]


def rref(a: Sequence[Sequence[GaussScalar]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((k for k in range(r, rows) if not m[k][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for k in range(rows):
            if k != r and not m[k][c].is_zero():
                f = m[k][c]
                m[k] = [x - f * y for x, y in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Sequence[Sequence[GaussScalar]]) -> int:
    return len(rref(a)[1]) if a else 0


def nullspace(a: Sequence[Sequence[GaussScalar]], ncols: int | None = None) -> list[list[GaussScalar]]:
    """Basis of ``{x : a x = 0}``, one vector per free column."""
    if not a:
        n = ncols or 0
        return [[ONE if k == j else ZERO for k in range(n)] for j in range(n)]
    m, pivots = rref(a)
    n = len(m[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -m[r][f]
        basis.append(v)
    return basis


def conj_transpose(a: Sequence[Sequence[GaussScalar]]) -> Matrix:
    return [[a[r][c].conjugate() for r in range(len(a))] for c in range(len(a[0]))]


def matmul(a: Sequence[Sequence[GaussScalar]], b: Sequence[Sequence[GaussScalar]]) -> Matrix:
    cols = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in cols:
            s = ZERO
            for x, y in zip(row, col):
                if not x.is_zero() and not y.is_zero():
                    s = s + x * y
            out_row.append(s)
        out.append(out_row)
    return out


def identity(n: int) -> Matrix:
    return [[ONE if r == c else ZERO for c in range(n)] for r in range(n)]


def is_unitary(u: Sequence[Sequence[GaussScalar]]) -> bool:
    n = len(u)
    if any(len(row) != n for row in u):
        return False
    return matmul(u, conj_transpose(u)) == identity(n)


def is_hermitian(h: Sequence[Sequence[GaussScalar]]) -> bool:
    n = len(h)
    return all(h[r][c] == h[c][r].conjugate() for r in range(n) for c in range(n))


def hermitian_psd(h: Sequence[Sequence[GaussScalar]]) -> bool:
    """Exact positive-semidefiniteness test by symmetric elimination.

    Pivots are taken on the diagonal.  A negative pivot, or a zero pivot whose
    row is not identically zero, rules out semidefiniteness.
    """
    if not is_hermitian(h):
        return False
    m = [list(row) for row in h]
    n = len(m)
    for k in range(n):
        d = m[k][k]
        if not d.is_real():
            return False
        if d.re < 0:
            return False
        if d.is_zero():
            if any(not m[k][j].is_zero() for j in range(k + 1, n)):
                return False
            continue
        inv = d.inverse()
        for r in range(k + 1, n):
            f = m[r][k] * inv
            if f.is_zero():
                continue
            for c in range(k + 1, n):
                m[r][c] = m[r][c] - f * m[k][c]
    return True
