"""Hodge p-spectra of flat orbifolds from the holonomy multiplicity formula.

The multiplicity of the eigenvalue 4 pi^2 q on p-forms is

    m(p, q) = 1/|F| * sum_{gamma in F} tr_p(gamma) * e_q(gamma),

where e_q(gamma) sums exp(2 pi i v . a(gamma)) over dual vectors v of squared
norm q fixed by gamma.  Phases are reduced mod 1 exactly before they are
evaluated in floating point; the result must round to an integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .isometry import AffineIsometry, a_of, exterior_trace
from .lattice import Shell, shells_up_to
from .orbifold import FlatOrbifoldSpec

ROUNDING_TOL = 1e-6


class SpectrumError(RuntimeError):
    """A multiplicity failed to round to an integer within tolerance."""


@dataclass(frozen=True)
class SpectrumTable:
    spec_name: str
    p: int
    cutoff: Fraction
    rows: tuple  # (q: Fraction, multiplicity: int), ascending q
    max_residual: float = 0.0

    def as_dict(self) -> dict:
        return {
            "spec": self.spec_name,
            "p": self.p,
            "cutoff": str(self.cutoff),
            "rows": [{"q": str(q), "lambda": 4 * math.pi ** 2 * float(q), "multiplicity": m}
                     for q, m in self.rows],
        }

    def multiplicity(self, q) -> int:
        return dict(self.rows).get(Fraction(q), 0)


def _phase_data(f: AffineIsometry) -> tuple[np.ndarray, int]:
    a = a_of(f)
    den = math.lcm(*(x.denominator for x in a))
    return np.array([int(x * den) for x in a], dtype=np.int64), den


def _shell_array(shell: Shell) -> np.ndarray:
    return np.array(shell.vectors, dtype=np.int64).reshape(len(shell.vectors), -1)


def _e_term(f: AffineIsometry, vectors: np.ndarray) -> complex:
    m = np.array(f.matrix, dtype=np.int64)
    fixed = vectors[np.all(vectors @ m == vectors, axis=1)]
    if len(fixed) == 0:
        return 0j
    num, den = _phase_data(f)
    residues = (fixed @ num) % den
    return complex(np.exp(2j * np.pi * residues / den).sum())


def e_term(spec: FlatOrbifoldSpec, f: AffineIsometry, shell: Shell) -> complex:
    """Sum of exp(2 pi i v . a) over shell vectors fixed by ``f``."""
    if not shell.vectors:
        return 0j
    return _e_term(f, _shell_array(shell))


def p_spectrum(spec: FlatOrbifoldSpec, p: int, cutoff) -> SpectrumTable:
    """Multiplicity table of the p-spectrum for squared dual norms q <= cutoff."""
    d = spec.d
    if not 0 <= p <= d:
        raise ValueError(f"p={p} outside [0, {d}]")
    cutoff = Fraction(cutoff)
    shells = shells_up_to(spec.lattice, cutoff)
    traces = [exterior_trace(f, p) for f in spec.holonomy]
    rows = []
    worst = 0.0
    for shell in shells:
        vecs = _shell_array(shell)
        total = sum(tr * _e_term(f, vecs) for f, tr in zip(spec.holonomy, traces))
        m = total / spec.order
        rounded = round(m.real)
        resid = max(abs(m.imag), abs(m.real - rounded))
        if resid >= ROUNDING_TOL:
            raise SpectrumError(
                f"{spec.name}: p={p}, q={shell.q}: multiplicity {m} is not an integer")
        worst = max(worst, resid)
        if rounded < 0:
            raise SpectrumError(f"{spec.name}: p={p}, q={shell.q}: negative multiplicity")
        if rounded or shell.q == 0:
            rows.append((shell.q, rounded))
    if not rows or rows[0][0] != 0:
        rows.insert(0, (Fraction(0), 0))
    return SpectrumTable(spec.name, p, cutoff, tuple(rows), worst)


@dataclass(frozen=True)
class Divergence:
    q: Fraction
    first: int
    second: int

    def __str__(self) -> str:
        return f"DIVERGES at q={self.q}: {self.first} vs {self.second}"


EQUAL = "EQUAL"


def compare_spectra(a: SpectrumTable, b: SpectrumTable) -> str | Divergence:
    """``EQUAL`` or the first q (ascending) where the multiplicities differ."""
    if a.p != b.p or a.cutoff != b.cutoff:
        raise ValueError("tables must share degree p and cutoff")
    ma, mb = dict(a.rows), dict(b.rows)
    for q in sorted(set(ma) | set(mb)):
        if ma.get(q, 0) != mb.get(q, 0):
            return Divergence(q, ma.get(q, 0), mb.get(q, 0))
    return EQUAL


def mutual_isospectrality(specs: Sequence[FlatOrbifoldSpec], p: int, cutoff
                          ) -> list[list[str | Divergence]]:
    tables = [p_spectrum(s, p, cutoff) for s in specs]
    return [[compare_spectra(x, y) for y in tables] for x in tables]


def heat_trace(table: SpectrumTable, t: float) -> float:
    """Truncated heat trace sum m * exp(-4 pi^2 q t)."""
    return math.fsum(m * math.exp(-4 * math.pi ** 2 * float(q) * t) for q, m in table.rows)


def format_tsv(table: SpectrumTable) -> str:
    lines = ["q_num\tq_den\tlambda_float\tmultiplicity"]
    for q, m in table.rows:
        lam = 4 * math.pi ** 2 * float(q)
        lines.append(f"{q.numerator}\t{q.denominator}\t{lam:.12g}\t{m}")
    return "\n".join(lines) + "\n"
