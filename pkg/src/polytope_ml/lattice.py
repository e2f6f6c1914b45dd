"""Exact integer linear algebra on lists of Python ints.

Matrices are plain ``list[list[int]]`` (row-major). Python integers are
arbitrary precision, and rationals are :class:`fractions.Fraction`, so nothing
in here ever rounds.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

IntMatrix = list[list[int]]


def gcd_of_vector(v: Sequence[int]) -> int:
    """Non-negative gcd of the entries; 0 iff every entry is 0."""
    if len(v) == 0:
        raise ValueError("empty input")
    return math.gcd(*(int(x) for x in v))


def is_primitive(v: Sequence[int]) -> bool:
    return gcd_of_vector(v) == 1


def lcm_of(values) -> int:
    out = 1
    for x in values:
        out = math.lcm(out, int(x))
    return out


def _copy(M) -> IntMatrix:
    return [[int(x) for x in row] for row in M]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M) -> IntMatrix:
    if not M:
        return []
    return [list(col) for col in zip(*M)]


def matmul(A, B) -> list:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def hermite_normal_form(M) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H == U @ M``, ``U`` unimodular, and ``H`` in
    row echelon form: positive pivots, zero rows at the bottom, and entries
    above each pivot reduced into ``[0, pivot)``.
    """
    H = _copy(M)
    if not H or not H[0]:
        raise ValueError("empty matrix")
    m, n = len(H), len(H[0])
    U = identity(m)

    def swap(i, j):
        H[i], H[j] = H[j], H[i]
        U[i], U[j] = U[j], U[i]

    def combine(i, j, a, b, c, d):
        # rows (i, j) <- (a*row_i + b*row_j, c*row_i + d*row_j); ad - bc = +-1
        hi, hj, ui, uj = H[i], H[j], U[i], U[j]
        H[i] = [a * x + b * y for x, y in zip(hi, hj)]
        H[j] = [c * x + d * y for x, y in zip(hi, hj)]
        U[i] = [a * x + b * y for x, y in zip(ui, uj)]
        U[j] = [c * x + d * y for x, y in zip(ui, uj)]

    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if H[i][col] == 0:
                continue
            if H[r][col] == 0:
                swap(r, i)
                continue
            x, y = H[r][col], H[i][col]
            g, s, t = _xgcd(x, y)
            # [s t; -y/g x/g] has determinant 1
            combine(r, i, s, t, -y // g, x // g)
        if H[r][col] == 0:
            continue
        if H[r][col] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        p = H[r][col]
        for i in range(r):
            q = H[i][col] // p
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return H, U


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) > 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def rank(M) -> int:
    if not M or not M[0]:
        return 0
    H, _ = hermite_normal_form(M)
    return sum(1 for row in H if any(row))


def integer_kernel_basis(M) -> IntMatrix:
    """Basis (as rows) of the saturated lattice ``{x in Z^c : M x = 0}``.

    Computed from the HNF of ``M^T``: the rows of the unimodular transform
    that land on zero rows span the whole integer kernel, not a sublattice.
    """
    M = _copy(M)
    if not M:
        raise ValueError("empty matrix")
    c = len(M[0])
    if c == 0:
        return []
    H, U = hermite_normal_form(transpose(M))
    return [U[i] for i in range(c) if not any(H[i])]


def determinant(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    A = _copy(M)
    sign, prev = 1, 1
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
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def lattice_index(vectors) -> int:
    """Index of the lattice spanned by ``vectors`` inside Z^d (0 if not full rank)."""
    H, _ = hermite_normal_form(vectors)
    rows = [row for row in H if any(row)]
    d = len(H[0])
    if len(rows) < d:
        return 0
    return abs(determinant(rows))


def solve_in_lattice(v: Sequence[int], basis) -> list[int] | None:
    """Integer coefficients ``c`` with ``c @ basis == v``, or ``None``."""
    if not basis:
        return [] if not any(v) else None
    H, U = hermite_normal_form(basis)
    rest = [int(x) for x in v]
    coeffs_h = [0] * len(H)
    for i, row in enumerate(H):
        if not any(row):
            break
        piv = next(j for j, x in enumerate(row) if x)
        q, rem = divmod(rest[piv], row[piv])
        if rem:
            return None
        coeffs_h[i] = q
        if q:
            rest = [a - q * b for a, b in zip(rest, row)]
    if any(rest):
        return None
    # v = coeffs_h @ H = (coeffs_h @ U) @ basis
    return [sum(coeffs_h[i] * U[i][j] for i in range(len(U))) for j in range(len(U[0]))]


def same_lattice(A, B) -> bool:
    """True iff the row lattices of ``A`` and ``B`` coincide."""
    return all(solve_in_lattice(a, B) is not None for a in A) and all(
        solve_in_lattice(b, A) is not None for b in B
    )


def inverse_rational(M) -> list[list[Fraction]]:
    """Inverse of a square matrix over Q by Gauss-Jordan elimination."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for i in range(n):
            if i != col and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return [row[n:] for row in A]


def random_unimodular(d: int, rng, steps: int = 6, max_entry: int | None = None) -> IntMatrix:
    """Random product of elementary matrices and signed permutations (det +-1)."""
    while True:
        M = identity(d)
        perm = [int(i) for i in rng.permutation(d)]
        M = [M[i] for i in perm]
        for _ in range(steps):
            i, j = (int(x) for x in rng.choice(d, size=2, replace=False))
            c = int(rng.choice([-1, 1]))
            M[i] = [a + c * b for a, b in zip(M[i], M[j])]
        if rng.random() < 0.5:
            M[0] = [-x for x in M[0]]
        if max_entry is None or max(abs(x) for row in M for x in row) <= max_entry:
            return M
