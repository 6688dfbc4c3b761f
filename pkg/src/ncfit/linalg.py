"""Dense exact linear algebra over Q and cyclotomic fields.

Matrices are lists of rows.  Entries may be ints, Fractions or
CycloElements; every routine here is field-generic except the Bareiss
determinant, which is used as a fast path when all entries are rational.
Vectors are row vectors and maps act on the right (x -> x M).
"""

import math
from fractions import Fraction

from .errors import DivisionByZero, ShapeError
from .scalars import CycloElement


def zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def shape(M):
    return len(M), (len(M[0]) if M else 0)


def matmul(A, B):
    if not A:
        return []
    n = len(B)
    if len(A[0]) != n:
        raise ShapeError(f"cannot multiply {shape(A)} by {shape(B)}")
    c = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [Fraction(0)] * c
        for k, a in enumerate(row):
            if a:
                Bk = B[k]
                for j in range(c):
                    b = Bk[j]
                    if b:
                        acc[j] = acc[j] + a * b
        out.append(acc)
    return out


def vecmat(v, M):
    return matmul([list(v)], M)[0] if M else []


def transpose(M):
    return [list(r) for r in zip(*M)] if M else []


def is_zero_matrix(M):
    return all(not x for row in M for x in row)


def _is_rational(x):
    if isinstance(x, CycloElement):
        return x.is_rational()
    return True


def _to_frac(x):
    return x.to_rational() if isinstance(x, CycloElement) else Fraction(x)


def bareiss_int(M):
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        Ak = A[k]
        for i in range(k + 1, n):
            Ai = A[i]
            aik = Ai[k]
            for j in range(k + 1, n):
                Ai[j] = (akk * Ai[j] - aik * Ak[j]) // prev
            Ai[k] = 0
        prev = akk
    return sign * A[n - 1][n - 1]


def det(M):
    """Exact determinant; the empty matrix has determinant 1."""
    n = len(M)
    if any(len(r) != n for r in M):
        raise ShapeError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    if all(_is_rational(x) for r in M for x in r):
        rows = []
        scale = 1
        for r in M:
            fr = [_to_frac(x) for x in r]
            L = 1
            for q in fr:
                L = L * q.denominator // math.gcd(L, q.denominator)
            rows.append([int(q * L) for q in fr])
            scale *= L
        return Fraction(bareiss_int(rows), scale)
    A = [list(r) for r in M]
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            result = -result
        p = A[k][k]
        result = result * p
        inv = p.inverse() if isinstance(p, CycloElement) else 1 / Fraction(p)
        for i in range(k + 1, n):
            if A[i][k]:
                f = A[i][k] * inv
                Ai, Ak = A[i], A[k]
                for j in range(k + 1, n):
                    if Ak[j]:
                        Ai[j] = Ai[j] - f * Ak[j]
    return result


def _inv(x):
    if isinstance(x, CycloElement):
        return x.inverse()
    if x == 0:
        raise DivisionByZero("pivot is zero")
    return 1 / Fraction(x)


def rref(M):
    """Reduced row echelon form and pivot columns."""
    A = [list(r) for r in M]
    rows, cols = shape(A)
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = _inv(A[r][c])
        A[r] = [x * inv if x else x for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                Ar = A[r]
                A[i] = [a - f * b if b else a for a, b in zip(A[i], Ar)]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M):
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def row_basis(M):
    """Basis (as rref rows) of the row space."""
    if not M or not M[0]:
        return []
    return rref(M)[0]


def left_kernel(M):
    """Basis of {v : v M = 0} as a list of row vectors."""
    rows, cols = shape(M)
    if rows == 0:
        return []
    # v M = 0  <=>  M^T v^T = 0
    T = transpose(M) if cols else []
    return right_kernel(T, rows)


def right_kernel(M, ncols=None):
    """Basis of {v : M v^T = 0}."""
    if ncols is None:
        ncols = len(M[0]) if M else 0
    if not M:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, piv = rref(M)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(v)
    return basis


def solve_left(M, b):
    """Some x with x M = b, or None when b is not in the row space."""
    rows, cols = shape(M)
    if rows == 0:
        return [] if all(not x for x in b) else None
    # augment: columns of M^T | b
    T = transpose(M)
    aug = [list(T[j]) + [b[j]] for j in range(cols)]
    R, piv = rref(aug)
    if rows in piv:
        return None
    x = [Fraction(0)] * rows
    for i, c in enumerate(piv):
        x[c] = R[i][rows]
    return x


def inverse(M):
    n = len(M)
    aug = [list(M[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular")
    return [r[n:] for r in R]


def in_row_space(M, v):
    return solve_left(M, v) is not None


def complement_basis(sub_rows, ambient_rows):
    """Rows of ``ambient_rows`` extending a basis of span(sub_rows).

    Returns rows w_1..w_k from the ambient list such that span(sub) +
    span(w) = span(ambient) and the sum is direct.
    """
    basis = row_basis(sub_rows) if sub_rows else []
    cur = list(basis)
    r = len(cur)
    out = []
    for w in ambient_rows:
        test = cur + [w]
        if rank(test) > r:
            cur = test
            r += 1
            out.append(list(w))
    return out
