"""Reproduction suite: every acceptance criterion as a self-contained check.

Each check takes a catalog resolver (so a deliberately broken catalog can be
injected) and returns a :class:`CheckResult`.  Tolerances are fixed here.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable

import numpy as np
from scipy.linalg import null_space

from . import linalg
from .heat import (
    NOT_DETERMINED,
    B_parity,
    b01_eigentype,
    b0p_stratum_exact,
    codimension_aggregates,
    heat_trace_check,
    singular_volume_from_spectrum,
)
from .isometry import AffineIsometry, EigenvalueType, eigenvalue_type, matrix_det_complement
from .krawtchouk import krawtchouk, krawtchouk_zeros, odd_dimension_zero_scan
from .lattice import shells_up_to
from .orbifold import (
    CATALOG_NAMES,
    FIVE_ORBIFOLDS,
    GLOBAL,
    FlatOrbifoldSpec,
    catalog,
    orientability,
    singular_strata,
)
from .spectrum import EQUAL, compare_spectra, p_spectrum

Catalog = Callable[[str], FlatOrbifoldSpec]

EIGENTYPE_TOL = 1e-9
HEAT_TOL = {"torus(2)": 1e-3, "sphere_244": 1e-3, "O(4,2)": 1e-2}
ROUNDING_TOL = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        head = f"{status}  {self.name}  ({self.seconds:.2f}s)"
        if self.failures:
            head += "\n" + "\n".join(f"      - {f}" for f in self.failures)
        return head


class _Collector:
    def __init__(self):
        self.failures: list[str] = []

    def expect(self, cond: bool, msg: str):
        if not cond:
            self.failures.append(msg)


def _run(name: str, body, budget: float, cat: Catalog) -> CheckResult:
    col = _Collector()
    start = time.perf_counter()
    try:
        body(col, cat)
    except Exception as exc:  # a crash is a failed criterion, not a crashed suite
        col.failures.append(f"raised {type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    if elapsed > budget:
        col.failures.append(f"took {elapsed:.1f}s, budget {budget:.0f}s")
    return CheckResult(name, not col.failures, elapsed, col.failures)


# ---------------------------------------------------------------------------


def _krawtchouk(col: _Collector, cat: Catalog):
    for d in range(1, 13):
        for k in range(d + 1):
            col.expect(krawtchouk(d, 0, k) == 1, f"K_0^{d}({k}) != 1")
            col.expect(krawtchouk(d, d, k) == (-1) ** k, f"K_{d}^{d}({k}) != (-1)^{k}")
    for d in range(2, 13, 2):
        col.expect(krawtchouk_zeros(d, 1) == [d // 2], f"zeros of K_1^{d} != [{d // 2}]")
    for d, zs in ((4, [1, 3]), (9, [3, 6]), (16, [6, 10])):
        col.expect(krawtchouk_zeros(d, 2) == zs, f"zeros of K_2^{d} != {zs}")
    for d in (4, 6, 8, 10):
        zeros = set(krawtchouk_zeros(d, d // 2))
        col.expect(set(range(1, d, 2)) <= zeros, f"odd k missing from zeros of K_{d // 2}^{d}")
        for p in range(1, d + 1, 2):
            col.expect(krawtchouk(d, p, d // 2) == 0, f"K_{p}^{d}({d // 2}) != 0")
    scan = odd_dimension_zero_scan(17)
    for d in (3, 5, 7, 11, 13, 15):
        col.expect(scan[d] == [], f"unexpected integral zeros in odd d={d}: {scan[d]}")
    for d in (9, 17):
        col.expect(bool(scan[d]), f"no integral zero found in d={d}")
    col.expect({(2, 3), (2, 6)} <= set(scan[9]), "d=9 scan lacks (2,3), (2,6)")


def _involution_pairs(col: _Collector, cat: Catalog):
    for d, k, p, cutoff in ((4, 2, 1, 16), (4, 2, 3, 16), (9, 3, 2, 9)):
        res = compare_spectra(p_spectrum(cat(f"O({d},{k})"), p, cutoff),
                              p_spectrum(cat(f"M({d},{k})"), p, cutoff))
        col.expect(res == EQUAL, f"O({d},{k}) vs M({d},{k}) at p={p}: {res}")
    group = [cat(n) for n in ("O(9,3)", "O(9,6)", "M(9,3)", "M(9,6)")]
    tables = [p_spectrum(s, 2, 9) for s in group]
    for i in range(len(group)):
        for j in range(i + 1, len(group)):
            res = compare_spectra(tables[i], tables[j])
            col.expect(res == EQUAL, f"{group[i].name} vs {group[j].name} at p=2: {res}")
    res = compare_spectra(p_spectrum(cat("O(4,2)"), 0, 4), p_spectrum(cat("M(4,2)"), 0, 4))
    col.expect(res != EQUAL and (res.q, res.first, res.second) == (1, 6, 4),
               f"negative control O(4,2) vs M(4,2) at p=0 gave {res}")


def _strata_census(col: _Collector, cat: Catalog):
    for d, k in ((2, 1), (4, 2), (9, 3)):
        strata = singular_strata(cat(f"O({d},{k})"))
        col.expect(len(strata) == 2 ** k, f"O({d},{k}): {len(strata)} strata, expected {2 ** k}")
        for s in strata:
            col.expect(s.codim == k and s.isotropy_order == 2 and s.primary,
                       f"O({d},{k}): stratum codim={s.codim} iso={s.isotropy_order} "
                       f"primary={s.primary}")
        m_spec = cat(f"M({d},{k})")
        col.expect(singular_strata(m_spec) == [], f"M({d},{k}) has singular strata")
        for spec in (cat(f"O({d},{k})"), m_spec):
            orientable = orientability(spec) == GLOBAL
            col.expect(orientable == (k % 2 == 0),
                       f"{spec.name}: orientable={orientable} but k={k}")


def _mirror_length(strata) -> tuple[float, Fraction | None]:
    mirrors = [s for s in strata if s.codim == 1]
    exact = [s.volume.exact for s in mirrors]
    total_exact = sum(exact, Fraction(0)) if all(e is not None for e in exact) else None
    return sum(s.volume.value for s in mirrors), total_exact


def _five_orbifolds(col: _Collector, cat: Catalog):
    specs = [cat(n) for n in FIVE_ORBIFOLDS]
    tables = [p_spectrum(s, 1, 25) for s in specs]
    for i in range(5):
        for j in range(i + 1, 5):
            res = compare_spectra(tables[i], tables[j])
            col.expect(res == EQUAL, f"{specs[i].name} vs {specs[j].name} at p=1: {res}")
    census = [singular_strata(s) for s in specs]
    v1 = census[0]
    edges = [s for s in v1 if s.dim == 1]
    corners = [s for s in v1 if s.dim == 0]
    col.expect(len(edges) == 4 and all(s.volume.exact == Fraction(1, 2) for s in edges),
               "variant 1 should have 4 mirror edges of length 1/2")
    col.expect(len(corners) == 4 and all(s.isotropy_order == 4 for s in corners),
               "variant 1 should have 4 corners with isotropy of order 4")
    col.expect(_mirror_length(v1)[1] == 2, "variant 1 total mirror length != 2")
    v3 = census[2]
    col.expect(sorted((s.dim, s.isotropy_order) for s in v3) == [(0, 2), (0, 2)],
               "variant 3 should have exactly two order-2 cone points and no mirrors")
    v5 = census[4]
    col.expect(all(s.dim == 0 for s in v5) and
               sorted(s.isotropy_order for s in v5) == [2, 4, 4],
               "variant 5 cone orders should be {4,4,2}")
    lengths = [_mirror_length(census[i])[0] for i in (0, 1, 3)]
    for i in range(3):
        for j in range(i + 1, 3):
            col.expect(abs(lengths[i] - lengths[j]) > 1e-9,
                       f"mirror lengths not distinct: {lengths}")
    zero = [p_spectrum(s, 0, 25) for s in specs]
    for i in range(5):
        for j in range(i + 1, 5):
            if compare_spectra(zero[i], zero[j]) != EQUAL:
                continue
            ai = codimension_aggregates(census[i], 0).get(1, 0.0)
            aj = codimension_aggregates(census[j], 0).get(1, 0.0)
            col.expect(abs(ai - aj) > 1e-9,
                       f"{specs[i].name} and {specs[j].name}: equal 0-spectra to q=25 and "
                       f"equal codimension-1 heat aggregates")


def _numeric_b01(matrix: np.ndarray) -> float:
    """tr(M) / |det(Id - A)| with A the restriction to the non-fixed complement."""
    d = matrix.shape[0]
    fixed = null_space(matrix - np.eye(d), rcond=1e-9)
    comp = null_space(fixed.T) if fixed.size else np.eye(d)
    a = comp.T @ matrix @ comp
    return float(np.trace(matrix)) / abs(np.linalg.det(np.eye(a.shape[0]) - a))


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _heat_invariants(col: _Collector, cat: Catalog):
    for name in CATALOG_NAMES:
        spec = cat(name)
        for stratum in singular_strata(spec):
            for m in stratum.iso_max_elements:
                f = AffineIsometry(m, (0,) * spec.d, spec.lattice.gram)
                exact = Fraction(linalg.principal_minor_sum(m, 1), matrix_det_complement(m))
                formula = b01_eigentype(eigenvalue_type(f), spec.d, stratum.codim)
                col.expect(abs(float(exact) - formula) < EIGENTYPE_TOL,
                           f"{name}: b0^1 routes disagree ({exact} vs {formula})")
    rng = random.Random(20240601)
    for _ in range(500):
        s = rng.randint(0, 3)
        turns = []
        for _ in range(s):
            m = rng.randint(3, 12)
            turns.append(Fraction(rng.randint(1, (m - 1) // 2), m))
        r = rng.randint(0, 3)
        if s == 0 and r == 0:
            r = 1
        plus = rng.randint(0, 3)
        d = 2 * s + r + plus
        etype = EigenvalueType(tuple(turns), r, d)
        blocks = [_rotation(th) for th in etype.angles] + [-np.eye(r), np.eye(plus)]
        mat = np.zeros((d, d))
        off = 0
        for b in blocks:
            n = b.shape[0]
            mat[off:off + n, off:off + n] = b
            off += n
        numeric = _numeric_b01(mat)
        formula = b01_eigentype(etype, d, 2 * s + r)
        col.expect(abs(numeric - formula) < EIGENTYPE_TOL,
                   f"{etype} in d={d}: {numeric} vs {formula}")
    for m in (2, 3, 4, 6):
        spec = cat(f"hex_cone_d6({m})")
        for stratum in singular_strata(spec):
            order = stratum.isotropy_order
            want = Fraction((order - 1) ** 2, 2) * stratum.volume.exact
            got = b0p_stratum_exact(stratum, 1)
            col.expect(stratum.codim == 2 and got == want,
                       f"hex_cone_d6({m}): b0^1 = {got}, closed form {want} (order {order})")
    for name in ("torus(2)", "M(2,1)", "M(4,2)", "M(9,3)", "klein_bottle"):
        spec = cat(name)
        for p in range(spec.d + 1):
            col.expect(B_parity(spec, p).B_minus_exact == 0, f"{name}: B_-^{p} != 0")
    for name, p in (("O(4,1)", 0), ("O(4,1)", 1), ("O(9,3)", 1)):
        spec = cat(name)
        strata = singular_strata(spec)
        total = sum(s.volume.exact for s in strata)
        got = singular_volume_from_spectrum(spec, p, strata)
        col.expect(isinstance(got, Fraction) and got == total,
                   f"{name}, p={p}: recovered volume {got}, census {total}")
    col.expect(singular_volume_from_spectrum(cat("O(9,3)"), 2) == NOT_DETERMINED,
               "O(9,3), p=2 should be not determined")
    for name in ("O(4,2)", "O(9,6)", "hex_cone_d6(3)"):
        spec = cat(name)
        strata = singular_strata(spec)
        for p in range(spec.d + 1):
            col.expect(singular_volume_from_spectrum(spec, p, strata) == NOT_DETERMINED,
                       f"{name}, p={p}: even codimension should be not determined")


# cutoffs for the property sweep, by dimension
_SWEEP_CUTOFF = {1: 25, 2: 25, 3: 16, 4: 16, 6: 4, 9: 4}


def _spectrum_properties(col: _Collector, cat: Catalog):
    for name in CATALOG_NAMES:
        spec = cat(name)
        cutoff = _SWEEP_CUTOFF.get(spec.d, 4)
        tables = [p_spectrum(spec, p, cutoff) for p in range(spec.d + 1)]
        for t in tables:
            col.expect(t.max_residual < ROUNDING_TOL,
                       f"{name}, p={t.p}: rounding residual {t.max_residual}")
        qs = sorted({q for t in tables for q, _ in t.rows if q > 0})
        for q in qs:
            alt = sum((-1) ** t.p * t.multiplicity(q) for t in tables)
            col.expect(alt == 0, f"{name}: alternating sum at q={q} is {alt}")
        if spec.order == 1:
            shells = {s.q: len(s.vectors) for s in shells_up_to(spec.lattice, cutoff)}
            for t in tables:
                for q, size in shells.items():
                    col.expect(t.multiplicity(q) == comb(spec.d, t.p) * size,
                               f"{name}, p={t.p}, q={q}: torus multiplicity mismatch")
    for name in ("torus(2)", "torus(3)", "O(4,2)"):
        spec = cat(name)
        cutoff = _SWEEP_CUTOFF[spec.d]
        for p in range(spec.d + 1):
            a, b = p_spectrum(spec, p, cutoff), p_spectrum(spec, spec.d - p, cutoff)
            col.expect(a.rows == b.rows, f"{name}: Hodge duality fails for p={p}")


def _heat_numeric(col: _Collector, cat: Catalog):
    cases = (("torus(2)", 0, 100, (0.01, 0.02, 0.05)),
             ("sphere_244", 0, 100, (0.01, 0.02, 0.05)),
             ("O(4,2)", 1, 25, (0.02,)))
    for name, p, cutoff, ts in cases:
        for row in heat_trace_check(cat(name), p, cutoff, ts):
            col.expect(row.relative_error < HEAT_TOL[name],
                       f"{name}, p={p}, t={row.t}: relative error {row.relative_error:.3e} "
                       f">= {HEAT_TOL[name]:g}")


CRITERIA = (
    ("1 krawtchouk zeros", _krawtchouk, 1.0),
    ("2 O_k/M_k isospectrality", _involution_pairs, 120.0),
    ("3 strata census", _strata_census, 10.0),
    ("4 five flat 2-orbifolds", _five_orbifolds, 60.0),
    ("5 heat invariants", _heat_invariants, 10.0),
    ("6 spectrum engine properties", _spectrum_properties, 120.0),
    ("7 heat trace numerics", _heat_numeric, 30.0),
)


def run_check(index: int, cat: Catalog = catalog) -> CheckResult:
    name, body, budget = CRITERIA[index]
    return _run(name, body, budget, cat)


def run_all(cat: Catalog = catalog) -> list[CheckResult]:
    return [run_check(i, cat) for i in range(len(CRITERIA))]
