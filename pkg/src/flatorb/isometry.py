"""Affine isometries of R^d written in lattice coordinates.

An isometry is stored as ``x -> M x + t`` where ``M`` is an integer matrix
acting on lattice coordinates and ``t`` is a rational translation.  The
"precomposed" description ``gamma o L_a`` (translate by ``a`` first) is
recovered with :func:`a_of`; the two are related by ``t = M a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .linalg import Matrix

DEFAULT_MAX_ORDER = 2048


class IsometryError(ValueError):
    """Raised for invalid isometries or holonomy data."""


def frac_mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def reduce_mod1(v: Iterable) -> tuple[Fraction, ...]:
    return tuple(frac_mod1(Fraction(x)) for x in v)


def is_integral(v: Iterable) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


@dataclass(frozen=True)
class AffineIsometry:
    matrix: Matrix
    translation: tuple
    gram: Matrix = field(compare=False, repr=False)

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        d = len(m)
        if any(len(row) != d for row in m):
            raise IsometryError("point matrix must be square")
        if any(not isinstance(x, int) for row in m for x in row):
            raise IsometryError("point matrix must be integral in lattice coordinates")
        if len(self.translation) != d or len(self.gram) != d:
            raise IsometryError("dimension mismatch between matrix, translation and Gram")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", tuple(Fraction(x) for x in self.translation))
        object.__setattr__(self, "gram", tuple(tuple(Fraction(x) for x in r) for r in self.gram))

    @property
    def d(self) -> int:
        return len(self.matrix)

    @property
    def det(self) -> int:
        return linalg.det(self.matrix)

    @property
    def fixed_dim(self) -> int:
        """Dimension of the +1-eigenspace of the point part."""
        return fixed_space_dim(self.matrix)

    def is_identity(self) -> bool:
        return self.matrix == linalg.identity(self.d) and is_integral(self.translation)

    def is_gram_orthogonal(self) -> bool:
        m = self.matrix
        return linalg.matmul(linalg.matmul(linalg.transpose(m), self.gram), m) == self.gram

    def apply(self, x: Sequence) -> tuple:
        return tuple(y + t for y, t in zip(linalg.matvec(self.matrix, x), self.translation))

    def reduced(self) -> AffineIsometry:
        return AffineIsometry(self.matrix, reduce_mod1(self.translation), self.gram)

    def key(self) -> tuple:
        """Hashable coset key: point matrix and translation modulo Z^d."""
        return self.matrix, reduce_mod1(self.translation)


def identity_isometry(gram: Matrix) -> AffineIsometry:
    d = len(gram)
    return AffineIsometry(linalg.identity(d), (Fraction(0),) * d, gram)


def from_precomposed(matrix: Matrix, a: Sequence, gram: Matrix) -> AffineIsometry:
    """Build ``gamma o L_a``, i.e. ``x -> M (x + a)``."""
    t = linalg.matvec(linalg.as_matrix(matrix), [Fraction(x) for x in a])
    return AffineIsometry(matrix, t, gram)


def compose(f: AffineIsometry, g: AffineIsometry, reduce: bool = True) -> AffineIsometry:
    """``f o g``: x -> M_f (M_g x + t_g) + t_f."""
    if f.gram != g.gram:
        raise IsometryError("cannot compose isometries of different Gram matrices")
    m = linalg.matmul(f.matrix, g.matrix)
    t = tuple(x + y for x, y in zip(linalg.matvec(f.matrix, g.translation), f.translation))
    if reduce:
        t = reduce_mod1(t)
    return AffineIsometry(m, t, f.gram)


def a_of(f: AffineIsometry) -> tuple[Fraction, ...]:
    """The translation ``a`` with ``f = M o L_a``, reduced into [0, 1)^d."""
    minv = linalg.inverse(f.matrix)
    return reduce_mod1(linalg.matvec(minv, f.translation))


def group_closure(gens: Sequence[AffineIsometry], gram: Matrix,
                  max_order: int = DEFAULT_MAX_ORDER) -> list[AffineIsometry]:
    """Coset representatives of the holonomy group generated by ``gens``.

    One representative per point matrix, translations reduced mod Z^d.  The
    identity (with zero translation) comes first; the rest are sorted.
    """
    gram = tuple(tuple(Fraction(x) for x in r) for r in gram)
    for g in gens:
        if g.gram != gram:
            raise IsometryError("generator Gram matrix differs from the lattice Gram matrix")
        if not g.is_gram_orthogonal():
            raise IsometryError(f"generator {g.matrix} is not orthogonal for the Gram matrix")
        if abs(g.det) != 1:
            raise IsometryError(f"generator {g.matrix} is not unimodular")
    ident = identity_isometry(gram)
    found = {ident.matrix: ident}
    frontier = [ident]
    gens = [g.reduced() for g in gens]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                e = compose(g, h)
                old = found.get(e.matrix)
                if old is None:
                    if len(found) >= max_order:
                        raise IsometryError(f"group closure exceeds {max_order} elements")
                    found[e.matrix] = e
                    nxt.append(e)
                elif old.translation != e.translation:
                    raise IsometryError(
                        "identity point matrix arises with a non-lattice translation; "
                        "the lattice is not the full translation subgroup")
        frontier = nxt
    rest = sorted((e for e in found.values() if e is not ident), key=lambda e: e.key())
    return [ident] + rest


def exterior_trace(f: AffineIsometry, p: int) -> int:
    """Trace of the action on p-vectors (sum of principal p-minors)."""
    return linalg.principal_minor_sum(f.matrix, p)


def fixed_space_dim(m: Matrix) -> int:
    d = len(m)
    return d - linalg.rank(linalg.sub(m, linalg.identity(d)))


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Ascending coefficients of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for k in range(1, n):
        if n % k == 0:
            num, rem = linalg.poly_divmod(num, cyclotomic(k))
            assert not any(rem)
    return tuple(num)


def _totient(n: int) -> int:
    return sum(1 for j in range(1, n + 1) if math.gcd(j, n) == 1)


def cyclotomic_factors(cp: Sequence[int]) -> dict[int, int]:
    """Multiplicity of each cyclotomic factor of an integer polynomial.

    Raises IsometryError if the polynomial is not a product of cyclotomics.
    """
    deg = len(cp) - 1
    rest = list(cp)
    out: dict[int, int] = {}
    n = 1
    while len(rest) > 1:
        if n > 2 * deg * deg + 2:
            raise IsometryError("characteristic polynomial has roots off the unit circle "
                                "or of infinite order")
        if _totient(n) <= len(rest) - 1:
            phi = cyclotomic(n)
            while len(rest) - 1 >= len(phi) - 1:
                q, r = linalg.poly_divmod(rest, phi)
                if any(r):
                    break
                rest = q
                out[n] = out.get(n, 0) + 1
        n += 1
    if rest != [1]:
        raise IsometryError("characteristic polynomial is not a product of cyclotomic factors")
    return out


@dataclass(frozen=True)
class EigenvalueType:
    """Rotation angles (as fractions of a full turn) and the -1 multiplicity.

    ``turns`` holds theta_j / (2 pi), each strictly between 0 and 1/2.
    """

    turns: tuple
    r: int
    d: int

    def __post_init__(self):
        turns = tuple(sorted(Fraction(x) for x in self.turns))
        if any(not 0 < x < Fraction(1, 2) for x in turns):
            raise ValueError("rotation angles must lie strictly in (0, pi)")
        if 2 * len(turns) + self.r > self.d or self.r < 0:
            raise ValueError("2s + r exceeds the dimension")
        object.__setattr__(self, "turns", turns)

    @property
    def s(self) -> int:
        return len(self.turns)

    @property
    def angles(self) -> tuple[float, ...]:
        return tuple(2 * math.pi * float(x) for x in self.turns)

    @property
    def plus_multiplicity(self) -> int:
        return self.d - 2 * self.s - self.r

    def __str__(self) -> str:
        angles = ",".join(f"2pi*{x}" for x in self.turns)
        return f"E({angles};{self.r or ''})"


def orthonormal_form(f: AffineIsometry) -> np.ndarray:
    """Point part as a float orthogonal matrix (Cholesky change of basis)."""
    g = np.array([[float(x) for x in row] for row in f.gram])
    s = np.linalg.cholesky(g).T  # g = s^T s
    m = np.array(f.matrix, dtype=float)
    return s @ m @ np.linalg.inv(s)


def eigenvalue_type(f: AffineIsometry, tol: float = 1e-9) -> EigenvalueType:
    """Eigenvalue type, read off an exact cyclotomic factorization.

    The +1 multiplicity is checked against the exact fixed-space dimension and
    the numeric spectrum is checked to lie on the unit circle.
    """
    d = f.d
    factors = cyclotomic_factors(linalg.char_poly(f.matrix))
    plus = factors.get(1, 0)
    if plus != f.fixed_dim:
        raise IsometryError("algebraic and geometric +1 multiplicities disagree")
    turns = []
    for n, mult in factors.items():
        if n <= 2:
            continue
        for j in range(1, (n + 1) // 2):
            if math.gcd(j, n) == 1:
                turns.extend([Fraction(j, n)] * mult)
    ev = np.linalg.eigvals(orthonormal_form(f))
    if np.max(np.abs(np.abs(ev) - 1.0)) >= tol:
        raise IsometryError("numeric eigenvalues are not of unit modulus")
    return EigenvalueType(tuple(turns), factors.get(2, 0), d)


def det_complement(f: AffineIsometry) -> int:
    """|det(Id - A)| where A is the restriction to the complement of the fixed space."""
    return matrix_det_complement(f.matrix)


def matrix_det_complement(m: Matrix) -> int:
    # char_poly = (x - 1)^dim_fixed * q(x); the answer is |q(1)|
    cp = list(linalg.char_poly(m))
    for _ in range(fixed_space_dim(m)):
        cp, rem = linalg.poly_divmod(cp, (-1, 1))
        if any(rem):
            raise IsometryError("fixed-space dimension exceeds algebraic multiplicity of 1")
    return abs(linalg.poly_eval(cp, 1))


def is_orientation_preserving(f: AffineIsometry) -> bool:
    return f.det == 1
