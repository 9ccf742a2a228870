"""Lattices given by rational Gram matrices, and dual-lattice shells.

Coordinates: lattice vectors are integer vectors in the lattice basis; dual
vectors are integer vectors ``n`` in the dual basis, so that
``|v|^2 = n^T G^{-1} n`` and ``v . a = n . q`` for ``a`` with lattice
coordinates ``q``.  An isometry with point matrix ``M`` fixes the dual vector
``n`` iff ``M^T n = n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from . import linalg
from .isometry import AffineIsometry
from .linalg import Matrix


@dataclass(frozen=True)
class Lattice:
    gram: Matrix

    def __post_init__(self):
        g = tuple(tuple(Fraction(x) for x in row) for row in self.gram)
        d = len(g)
        if d == 0 or any(len(row) != d for row in g):
            raise ValueError("Gram matrix must be square and nonempty")
        if any(g[i][j] != g[j][i] for i in range(d) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")
        for k in range(1, d + 1):
            if linalg.det(tuple(row[:k] for row in g[:k])) <= 0:
                raise ValueError("Gram matrix is not positive definite")
        object.__setattr__(self, "gram", g)

    @property
    def d(self) -> int:
        return len(self.gram)

    @cached_property
    def dual_gram(self) -> Matrix:
        return linalg.inverse(self.gram)

    @property
    def covolume_squared(self) -> Fraction:
        return linalg.det(self.gram)

    @property
    def covolume(self) -> float:
        return sqrt_fraction(self.covolume_squared)

    def dual_norm(self, n: Sequence[int]) -> Fraction:
        a = self.dual_gram
        return sum((a[i][j] * n[i] * n[j] for i in range(self.d) for j in range(self.d)),
                   Fraction(0))

    def change_basis(self, p: Matrix) -> Lattice:
        """Same lattice in the basis given by the columns of unimodular ``p``."""
        return Lattice(linalg.matmul(linalg.matmul(linalg.transpose(p), self.gram), p))


def standard_lattice(d: int) -> Lattice:
    return Lattice(linalg.identity(d))


def sqrt_fraction(x: Fraction) -> float:
    """Correctly scaled float square root of a nonnegative rational."""
    x = Fraction(x)
    return math.sqrt(x.numerator) / math.sqrt(x.denominator)


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Rational square root when ``x`` is a rational square, else None."""
    x = Fraction(x)
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class Shell:
    q: Fraction
    vectors: tuple


def _ldl(a: Matrix) -> tuple[list[Fraction], list[list[Fraction]]]:
    # q(n) = sum_i diag[i] * (n_i + sum_{j>i} r[i][j] n_j)^2
    d = len(a)
    diag = [Fraction(0)] * d
    r = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        diag[i] = a[i][i] - sum(diag[k] * r[k][i] ** 2 for k in range(i))
        for j in range(i + 1, d):
            r[i][j] = (a[i][j] - sum(diag[k] * r[k][i] * r[k][j] for k in range(i))) / diag[i]
    return diag, r


def _scaled_form(a: Matrix) -> tuple[list[list[int]], int]:
    """Integer matrix ``A'`` and scale ``D`` with ``A = A' / D``."""
    den = 1
    for row in a:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return [[int(x * den) for x in row] for row in a], den


# Relative slack on float interval bounds; rounding error is ~1e-15, so every
# admissible vector is inside the widened box and the exact filter does the rest.
_SLACK = 1e-7


@lru_cache(maxsize=64)
def _enumerate(lattice: Lattice, cutoff: Fraction) -> tuple:
    """Exact list of (scaled norm, vector) with n^T A n <= cutoff."""
    a = lattice.dual_gram
    d = lattice.d
    diag_q, r_q = _ldl(a)
    diag = [float(x) for x in diag_q]
    r = [[float(x) for x in row] for row in r_q]
    a_int, den = _scaled_form(a)
    bound = math.floor(cutoff * den)
    fcut = float(cutoff) * (1 + _SLACK) + _SLACK
    n = [0] * d
    out = []

    def rec(i: int, budget: float):
        ri = r[i]
        center = -sum(ri[j] * n[j] for j in range(i + 1, d))
        rad = math.sqrt(max(budget, 0.0) / diag[i]) * (1 + _SLACK) + _SLACK
        for v in range(math.ceil(center - rad), math.floor(center + rad) + 1):
            n[i] = v
            rest = budget - diag[i] * (v - center) ** 2
            if i == 0:
                val = sum(a_int[k][l] * n[k] * n[l] for k in range(d) for l in range(d)
                          if n[k] and n[l])
                if val <= bound:
                    out.append((val, tuple(n)))
            else:
                rec(i - 1, rest + _SLACK * fcut)
        n[i] = 0

    rec(d - 1, fcut)
    return den, tuple(out)


def shells_up_to(lattice: Lattice, cutoff) -> list[Shell]:
    """All dual-lattice vectors with squared norm <= cutoff, grouped into shells.

    Shells are sorted by exact squared norm; vectors inside a shell are in
    lexicographic order.
    """
    cutoff = Fraction(cutoff)
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    den, found = _enumerate(lattice, cutoff)
    groups: dict[int, list] = {}
    for val, n in found:
        groups.setdefault(val, []).append(n)
    return [Shell(Fraction(val, den), tuple(sorted(groups[val]))) for val in sorted(groups)]


def fixed_dual_vectors(lattice: Lattice, f: AffineIsometry, shell: Shell) -> list[tuple]:
    """Vectors of the shell fixed by the point part of ``f`` (``M^T n = n``)."""
    mt = linalg.transpose(f.matrix)
    return [n for n in shell.vectors if linalg.matvec(mt, n) == n]


def sublattice_covolume(lattice: Lattice, k: Matrix) -> tuple[Fraction, float]:
    """Gram determinant of the columns of ``k`` and the m-volume it gives."""
    k = linalg.as_matrix(k)
    m = len(k[0]) if k else 0
    if m == 0:
        return Fraction(1), 1.0
    g = linalg.matmul(linalg.matmul(linalg.transpose(k), lattice.gram), k)
    det = linalg.det(g)
    if det == 0:
        raise ValueError("sublattice generators are linearly dependent")
    return Fraction(det), sqrt_fraction(det)
