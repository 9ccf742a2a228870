"""Exact integer and rational matrix routines.

Matrices are tuples of row tuples holding ``int`` or ``Fraction`` entries.
Everything here is exact; nothing touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Sequence

Matrix = tuple  # tuple[tuple[int | Fraction, ...], ...]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zeros(rows: int, cols: int) -> Matrix:
    return tuple((0,) * cols for _ in range(rows))


def transpose(a: Matrix) -> Matrix:
    if not a:
        return ()
    return tuple(zip(*a))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def direct_sum(*blocks: Matrix) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return as_matrix(out)


def diag(entries: Sequence) -> Matrix:
    return direct_sum(*[((x,),) for x in entries]) if entries else ()


def det(a: Matrix):
    """Determinant by fraction-free Bareiss elimination.

    Integer input gives an ``int``; rational input a ``Fraction``.
    """
    n = len(a)
    if n == 0:
        return 1
    if any(isinstance(x, Fraction) for row in a for x in row):
        den = 1
        for row in a:
            for x in row:
                den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
        scaled = [[int(Fraction(x) * den) for x in row] for row in a]
        return Fraction(_bareiss(scaled), den ** n)
    return _bareiss([list(r) for r in a])


def _bareiss(m: list[list[int]]) -> int:
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse(a: Matrix) -> Matrix:
    """Exact rational inverse by Gauss-Jordan; raises ValueError if singular."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def rank(a: Matrix) -> int:
    m = [[Fraction(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(a: Matrix) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ A == H``.  Pivots of
    ``H`` are positive, entries above a pivot lie in ``[0, pivot)`` and rows
    below the rank are zero.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    h = [list(r) for r in a]
    u = [list(r) for r in identity(rows)]

    def combine(i, k, p, q, r, s):
        # (row_i, row_k) <- (p*row_i + q*row_k, r*row_i + s*row_k)
        for m in (h, u):
            ri, rk = m[i], m[k]
            m[i] = [p * x + q * y for x, y in zip(ri, rk)]
            m[k] = [r * x + s * y for x, y in zip(ri, rk)]

    piv_row = 0
    for c in range(cols):
        if piv_row == rows:
            break
        for k in range(piv_row + 1, rows):
            if h[k][c] == 0:
                continue
            x, y = h[piv_row][c], h[k][c]
            g, p, q = _xgcd(x, y)
            combine(piv_row, k, p, q, -y // g, x // g)
        if h[piv_row][c] == 0:
            continue
        if h[piv_row][c] < 0:
            h[piv_row] = [-x for x in h[piv_row]]
            u[piv_row] = [-x for x in u[piv_row]]
        pv = h[piv_row][c]
        for k in range(piv_row):
            f = h[k][c] // pv
            if f:
                h[k] = [x - f * y for x, y in zip(h[k], h[piv_row])]
                u[k] = [x - f * y for x, y in zip(u[k], u[piv_row])]
        piv_row += 1
    return as_matrix(h), as_matrix(u)


def smith_normal_form(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``(D, U, V)`` with ``U @ A @ V == D``.

    ``D`` is diagonal with nonnegative entries ``d1 | d2 | ...``; ``U`` and
    ``V`` are unimodular.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [list(r) for r in a]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        m[dst] = [x + f * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in m:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(rows, cols)):
        while True:
            nz = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if m[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = m[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    add_row(i, t, -(m[i][t] // p))
                    dirty |= m[i][t] != 0
            for j in range(t + 1, cols):
                if m[t][j]:
                    add_col(j, t, -(m[t][j] // p))
                    dirty |= m[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if m[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if t < rows and t < cols and m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
    return as_matrix(m), as_matrix(u), as_matrix(v)


def invariant_factors(a: Matrix) -> tuple[int, ...]:
    d, _, _ = smith_normal_form(a)
    return tuple(d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i])


def integer_kernel(a: Matrix, ncols: int | None = None) -> Matrix:
    """Z-basis of ``{n in Z^d : A n = 0}`` as the columns of a d x m matrix.

    The basis is canonical: its transpose is in Hermite normal form.  An empty
    kernel gives a d x 0 matrix (``d`` empty rows).
    """
    d = ncols if ncols is not None else (len(a[0]) if a else 0)
    if not a:
        return identity(d)
    h, u = hermite_normal_form(transpose(a))
    basis = [u[i] for i in range(d) if not any(h[i])]
    if not basis:
        return tuple(() for _ in range(d))
    canon, _ = hermite_normal_form(as_matrix(basis))
    return transpose(canon)


def char_poly(m: Matrix) -> tuple[int, ...]:
    """Characteristic polynomial det(xI - M) of an integer matrix.

    Coefficients are returned in ascending powers, ``c[i]`` multiplying
    ``x**i``; ``c[-1] == 1``.  Faddeev-LeVerrier with exact division.
    """
    n = len(m)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = zeros(n, n)
    for k in range(1, n + 1):
        prod = matmul(m, mk)
        mk = tuple(tuple(x + (coeffs[n - k + 1] if i == j else 0) for j, x in enumerate(row))
                   for i, row in enumerate(prod))
        am = matmul(m, mk)
        tr = sum(am[i][i] for i in range(n))
        q, r = divmod(-tr, k)
        assert r == 0, "non-integral characteristic polynomial"
        coeffs[n - k] = q
    return tuple(coeffs)


@lru_cache(maxsize=4096)
def principal_minor_sum(m: Matrix, p: int):
    """Sum of all p x p principal minors, i.e. the trace of the p-th exterior power."""
    n = len(m)
    if not 0 <= p <= n:
        raise ValueError(f"p={p} outside [0, {n}]")
    total = 0
    for idx in combinations(range(n), p):
        total += det(tuple(tuple(m[i][j] for j in idx) for i in idx))
    return total


def poly_divmod(num: Sequence[int], den: Sequence[int]) -> tuple[list, list]:
    """Divide ascending-coefficient polynomials; ``den`` must be monic."""
    num = list(num)
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    dq = len(den) - 1
    if len(num) - 1 < dq:
        return [0], num
    q = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        q[i - dq] = c
        if c:
            for j in range(dq + 1):
                num[i - dq + j] -= c * den[j]
    rem = num[:dq] or [0]
    return q, rem


def poly_eval(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
