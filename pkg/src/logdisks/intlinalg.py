"""Exact integer linear algebra on numpy object arrays.

Provides the Smith normal form with unimodular transforms, and the derived
lattice utilities (kernel, rank, solving Ax = b over Z, quotient group
structure).  All arrays use dtype=object so that Python ints keep arbitrary
precision.
"""

from __future__ import annotations

from math import gcd

import numpy as np


def _obj(a) -> np.ndarray:
    arr = np.array(a, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def exgcd(a: int, b: int) -> np.ndarray:
    """2x2 unimodular M with M @ [a, b] = [gcd(a, b), 0].

    When a divides b the transform is elementary (M[0] = [+-1, 0]), which is
    what makes the normal-form clearing loops terminate.
    """
    if a != 0 and b % a == 0:
        s = 1 if a > 0 else -1
        return np.array([[s, 0], [-s * (b // a), s]], dtype=object)
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    g = old_r
    if g == 0:
        return np.array([[1, 0], [0, 1]], dtype=object)
    # Rows: Bezout row and a kernel row; determinant is +1.
    return np.array([[old_s, old_t], [-b // g, a // g]], dtype=object)


def smith_normal_form(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (U, D, V) with U @ A @ V = D diagonal, U, V unimodular.

    Diagonal entries are non-negative and form a divisibility chain
    d1 | d2 | ... with zeros last.
    """
    A = _obj(A)
    m, n = A.shape
    D = A.copy()
    U = np.eye(m, dtype=object)
    V = np.eye(n, dtype=object)
    k = min(m, n)

    def clear(i: int) -> None:
        # Make D[i, i] the only nonzero entry in its row and column at >= i.
        while True:
            moved = False
            for j in range(i + 1, m):
                if D[j, i] != 0:
                    M = exgcd(int(D[i, i]), int(D[j, i]))
                    D[[i, j], :] = M @ D[[i, j], :]
                    U[[i, j], :] = M @ U[[i, j], :]
                    moved = True
            for j in range(i + 1, n):
                if D[i, j] != 0:
                    M = exgcd(int(D[i, i]), int(D[i, j])).T
                    D[:, [i, j]] = D[:, [i, j]] @ M
                    V[:, [i, j]] = V[:, [i, j]] @ M
                    moved = True
            if not moved:
                return

    for i in range(k):
        # Pivot search over the remaining submatrix.
        pivot = None
        for r in range(i, m):
            for c in range(i, n):
                if D[r, c] != 0:
                    pivot = (r, c)
                    break
            if pivot:
                break
        if pivot is None:
            break
        r, c = pivot
        if r != i:
            D[[i, r], :] = D[[r, i], :]
            U[[i, r], :] = U[[r, i], :]
        if c != i:
            D[:, [i, c]] = D[:, [c, i]]
            V[:, [i, c]] = V[:, [c, i]]
        clear(i)

    for i in range(k):
        if D[i, i] < 0:
            D[i, :] = -D[i, :]
            U[i, :] = -U[i, :]

    # Enforce the divisibility chain by folding violations back in.
    i = 0
    while i < k - 1:
        a, b = int(D[i, i]), int(D[i + 1, i + 1])
        if a != 0 and b != 0 and b % a != 0:
            V[:, i] = V[:, i] + V[:, i + 1]
            D[:, i] = D[:, i] + D[:, i + 1]
            clear(i)
            for j in range(k):
                if D[j, j] < 0:
                    D[j, :] = -D[j, :]
                    U[j, :] = -U[j, :]
            i = 0
            continue
        i += 1
    return U, D, V


def diagonal(D) -> list[int]:
    return [int(D[i, i]) for i in range(min(D.shape))]


def rank(A) -> int:
    A = _obj(A)
    if A.size == 0:
        return 0
    _, D, _ = smith_normal_form(A)
    return sum(1 for d in diagonal(D) if d != 0)


def kernel_basis(A) -> list[list[int]]:
    """Basis (as rows) of {x : A @ x = 0} over Z, columns of A as images."""
    A = _obj(A)
    m, n = A.shape
    if n == 0:
        return []
    if A.size == 0:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    U, D, V = smith_normal_form(A)
    r = sum(1 for d in diagonal(D) if d != 0)
    return [[int(V[i, j]) for i in range(n)] for j in range(r, n)]


def solve(A, b) -> list[int] | None:
    """One integer solution x of A @ x = b, or None."""
    A = _obj(A)
    m, n = A.shape
    b = np.array(list(b), dtype=object).reshape(-1)
    if b.shape[0] != m:
        raise ValueError("dimension mismatch")
    if n == 0:
        return [] if all(x == 0 for x in b) else None
    U, D, V = smith_normal_form(A)
    c = U @ b
    y = [0] * n
    for i in range(m):
        d = int(D[i, i]) if i < min(m, n) else 0
        ci = int(c[i])
        if d == 0:
            if ci != 0:
                return None
        else:
            y[i] = ci // d
            if ci % d != 0:
                return None
    x = V @ np.array(y, dtype=object)
    return [int(v) for v in x]


def in_column_span(A, v) -> bool:
    """Whether v lies in the lattice spanned by the columns of A."""
    return solve(A, v) is not None


def cokernel_invariants(A) -> tuple[int, list[int]]:
    """Structure of Z^m / column-span(A): (free rank, torsion orders >= 2)."""
    A = _obj(A)
    m, n = A.shape
    if n == 0 or A.size == 0:
        return m, []
    _, D, _ = smith_normal_form(A)
    diag = diagonal(D)
    nonzero = [d for d in diag if d != 0]
    torsion = [d for d in nonzero if d > 1]
    return m - len(nonzero), torsion


def invert_unimodular(U) -> np.ndarray:
    """Exact inverse of a unimodular integer matrix."""
    U = _obj(U)
    m = U.shape[0]
    inv = np.zeros((m, m), dtype=object)
    for i in range(m):
        e = [0] * m
        e[i] = 1
        col = solve(U, e)
        if col is None:
            raise ValueError("matrix is not unimodular")
        for j in range(m):
            inv[j, i] = col[j]
    return inv


def lattice_basis(vectors: list[list[int]]) -> list[list[int]]:
    """Basis (rows) of the lattice spanned by the given integer vectors."""
    vectors = [v for v in vectors]
    if not vectors:
        return []
    A = _obj(vectors).T  # columns are the vectors
    U, D, V = smith_normal_form(A)
    diag = diagonal(D)
    r = sum(1 for d in diag if d != 0)
    if r == 0:
        return []
    Uinv = invert_unimodular(U)
    m = A.shape[0]
    return [[int(Uinv[j, i] * diag[i]) for j in range(m)] for i in range(r)]


def coordinates_in_basis(basis: list[list[int]], v: list[int]) -> list[int] | None:
    """Coordinates of v in an integer basis (rows), or None if outside."""
    if not basis:
        return [] if all(x == 0 for x in v) else None
    A = _obj(basis).T
    return solve(A, v)


def gcd_vector(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    return g
