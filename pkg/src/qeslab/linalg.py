"""Exact linear algebra over the rationals.

Matrices are plain lists of lists of ``Fraction``.  Everything here is
small and dense: the spectral matrices of the finite monomial modules
rarely exceed a few dozen rows, so clarity beats asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list  # list[list[Fraction]]
Vector = list  # list[Fraction]


def identity(n: int) -> Matrix:
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    out = zeros(n, m)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] += c * bt[j]
    return out


def mat_add(a: Matrix, b: Matrix, scale: Fraction = Fraction(1)) -> Matrix:
    return [[x + scale * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c: Fraction) -> Matrix:
    return [[c * x for x in row] for row in a]


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def mat_vec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return [sum((c * x for c, x in zip(row, v)), Fraction(0)) for row in a]


def char_poly_coeffs(m: Matrix) -> list:
    """Coefficients ``[c0, ..., c_{n-1}, 1]`` of det(lambda*I - M), ascending.

    Faddeev-LeVerrier recursion: exact over Fraction, the only divisions
    are by integers.
    """
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    a = [row[:] for row in m]
    for k in range(1, n + 1):
        c = -trace(a) / k
        coeffs[n - k] = c
        if k < n:
            for i in range(n):
                a[i][i] += c
            a = mat_mul(m, a)
    return coeffs


def eval_matrix_poly(coeffs: Sequence[Fraction], m: Matrix) -> Matrix:
    """Evaluate a polynomial (ascending coefficients) at a square matrix."""
    n = len(m)
    result = mat_scale(identity(n), coeffs[-1])
    for c in reversed(coeffs[:-1]):
        result = mat_mul(result, m)
        for i in range(n):
            result[i][i] += c
    return result


def rref(a: Matrix) -> tuple:
    """Reduced row-echelon form; returns (rref_matrix, pivot_columns)."""
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def kernel_basis(a: Matrix) -> list:
    """Exact basis of the null space, one vector per free column.

    Vectors are normalized so the free coordinate equals 1; the basis is
    ordered by free-column index, which makes the choice reproducible.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    red, pivots = rref(a)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * cols
        v[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][free]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Sequence[Fraction]):
    """One exact solution of A x = b, or None if inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [Fraction(b[i])] for i in range(rows)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x
