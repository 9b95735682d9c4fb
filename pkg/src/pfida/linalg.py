"""Small dense matrices and vectors over symbolic expressions.

Matrices are lists of rows of Expr.  Inverses use the adjugate formula,
which is exact and keeps entries rational in the inputs; all systems in
the benchmark registry have n <= 3.
"""

from __future__ import annotations

from .errors import DimensionError
from .expr import Bin, Expr, Neg, Num, as_expr, simplify


def as_matrix(rows):
    return [[as_expr(e) for e in row] for row in rows]


def as_vector(entries):
    return [as_expr(e) for e in entries]


def zeros(r, c):
    return [[Num(0) for _ in range(c)] for _ in range(r)]


def identity(n):
    return [[Num(1) if i == j else Num(0) for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def mat_add(A, B):
    return [[Bin("+", a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[Bin("-", a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    c = as_expr(c)
    return [[Bin("*", c, a) for a in row] for row in A]


def mat_mul(A, B):
    if len(B) != len(A[0]):
        raise DimensionError(f"cannot multiply {_shape(A)} by {_shape(B)}")
    Bt = transpose(B)
    return [[_dot(row, col) for col in Bt] for row in A]


def mat_vec(A, v):
    if len(v) != len(A[0]):
        raise DimensionError(f"cannot apply {_shape(A)} to vector of length {len(v)}")
    return [_dot(row, v) for row in A]


def vec_dot(u, v):
    return _dot(u, v)


def _dot(u, v):
    total = None
    for a, b in zip(u, v):
        if isinstance(a, Num) and a.value == 0.0:
            continue
        if isinstance(b, Num) and b.value == 0.0:
            continue
        term = Bin("*", a, b)
        total = term if total is None else Bin("+", total, term)
    return Num(0) if total is None else total


def _shape(A):
    return f"{len(A)}x{len(A[0])}"


def det(A):
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionError("determinant needs a square matrix")
    if n == 1:
        return A[0][0]
    if n == 2:
        return simplify(Bin("-", Bin("*", A[0][0], A[1][1]), Bin("*", A[0][1], A[1][0])))
    if n == 3:
        total = None
        for j in range(3):
            m = _minor(A, 0, j)
            term = Bin("*", A[0][j], m)
            if j == 1:
                term = Neg(term)
            total = term if total is None else Bin("+", total, term)
        return simplify(total)
    raise DimensionError(f"symbolic determinant limited to n <= 3, got n = {n}")


def _minor(A, i, j):
    rows = [r for k, r in enumerate(A) if k != i]
    sub = [[e for l, e in enumerate(r) if l != j] for r in rows]
    if len(sub) == 1:
        return sub[0][0]
    return Bin("-", Bin("*", sub[0][0], sub[1][1]), Bin("*", sub[0][1], sub[1][0]))


def adjugate(A):
    n = len(A)
    if n == 1:
        return [[Num(1)]]
    if n == 2:
        return [[A[1][1], Neg(A[0][1])], [Neg(A[1][0]), A[0][0]]]
    if n == 3:
        out = zeros(3, 3)
        for i in range(3):
            for j in range(3):
                cof = _minor(A, j, i)
                out[i][j] = simplify(Neg(cof) if (i + j) % 2 else cof)
        return out
    raise DimensionError(f"symbolic adjugate limited to n <= 3, got n = {n}")


def inverse(A):
    d = det(A)
    if isinstance(d, Num) and d.value == 0.0:
        raise DimensionError("matrix is identically singular")
    return [[simplify(Bin("/", e, d)) for e in row] for row in adjugate(A)]
