"""Leading heat-trace data of flat orbifolds.

For a primary stratum N the leading coefficient is

    b0(N) = vol(N) * sum_{gamma in Iso^max(N)} tr_p(gamma) / |det(Id - A_gamma)|,

and the small-time heat trace is compared with the two-term prediction

    P(t) = (4 pi t)^(-d/2) C(d,p) vol(O) + sum_N (4 pi t)^(-dim N / 2) b0(N) / |Iso(N)|.

For flat metrics the higher coefficients are taken to vanish; the numeric
check below is how that assumption is exercised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from scipy import integrate

from . import linalg
from .isometry import EigenvalueType, matrix_det_complement
from .krawtchouk import krawtchouk
from .lattice import sqrt_fraction
from .orbifold import FlatOrbifoldSpec, SingularStratum, singular_strata
from .spectrum import heat_trace, p_spectrum

NOT_DETERMINED = "not determined"


def b0_coefficient(stratum: SingularStratum, p: int) -> Fraction:
    """sum over Iso^max of tr_p / |det(Id - A)|, always rational."""
    return sum((Fraction(linalg.principal_minor_sum(m, p), matrix_det_complement(m))
                for m in stratum.iso_max_elements), Fraction(0))


def b0p_stratum(stratum: SingularStratum, p: int, d: int | None = None) -> float:
    if d is not None and d != stratum.dim + stratum.codim:
        raise ValueError("dimension does not match the stratum")
    return float(b0_coefficient(stratum, p)) * stratum.volume.value


def b0p_stratum_exact(stratum: SingularStratum, p: int) -> Fraction | None:
    vol = stratum.volume.exact
    return None if vol is None else b0_coefficient(stratum, p) * vol


def b01_eigentype(etype: EigenvalueType, d: int, k: int) -> float:
    """b0^1 contribution of one element from its eigenvalue type and codimension k."""
    if k != 2 * etype.s + etype.r:
        raise ValueError(f"codimension {k} != 2s + r = {2 * etype.s + etype.r}")
    first = d - k - etype.r + sum(2 * math.cos(th) for th in etype.angles)
    prod = 1.0
    for th in etype.angles:
        prod /= math.sin(th / 2) ** 2
    return first * prod / 2 ** k


@dataclass(frozen=True)
class ParityInvariants:
    B_plus: float
    B_minus: float
    k_plus: int | None
    k_minus: int | None
    B_plus_exact: Fraction | None = None
    B_minus_exact: Fraction | None = None


def _aggregate(strata: Sequence[SingularStratum], p: int) -> tuple[float, Fraction | None]:
    total = 0.0
    exact: Fraction | None = Fraction(0)
    for s in strata:
        total += b0p_stratum(s, p) / s.isotropy_order
        e = b0p_stratum_exact(s, p)
        exact = None if exact is None or e is None else exact + e / s.isotropy_order
    return total, exact


def B_parity(spec: FlatOrbifoldSpec, p: int,
             strata: Sequence[SingularStratum] | None = None) -> ParityInvariants:
    """Aggregates over primary strata of minimal even / odd codimension."""
    if strata is None:
        strata = singular_strata(spec)
    primary = [s for s in strata if s.primary]
    out = {}
    for sign, parity in (("plus", 0), ("minus", 1)):
        codims = [s.codim for s in primary if s.codim % 2 == parity]
        if not codims:
            out[sign] = (0.0, Fraction(0), None)
            continue
        k = min(codims)
        val, exact = _aggregate([s for s in primary if s.codim == k], p)
        out[sign] = (val, exact, k)
    return ParityInvariants(out["plus"][0], out["minus"][0], out["plus"][2], out["minus"][2],
                            out["plus"][1], out["minus"][1])


def codimension_aggregates(strata: Sequence[SingularStratum], p: int) -> dict[int, float]:
    """sum of b0^p(N) / |Iso(N)| per codimension."""
    out: dict[int, float] = {}
    for s in strata:
        if s.primary:
            out[s.codim] = out.get(s.codim, 0.0) + b0p_stratum(s, p) / s.isotropy_order
    return dict(sorted(out.items()))


def singular_volume_from_spectrum(spec: FlatOrbifoldSpec, p: int,
                                  strata: Sequence[SingularStratum] | None = None):
    """Recover the singular-set volume from the odd-parity aggregate.

    Returns an exact ``Fraction`` when the aggregate is exact, a float
    otherwise, or ``NOT_DETERMINED`` when the codimension is even or the
    Krawtchouk value vanishes.
    """
    if strata is None:
        strata = singular_strata(spec)
    codims = {s.codim for s in strata}
    if len(codims) != 1:
        raise ValueError("singular set must be nonempty and of a single codimension")
    k = codims.pop()
    if k % 2 == 0:
        return NOT_DETERMINED
    kv = krawtchouk(spec.d, p, k)
    if kv == 0:
        return NOT_DETERMINED
    inv = B_parity(spec, p, strata)
    if inv.B_minus_exact is not None:
        return 2 ** (k + 1) * inv.B_minus_exact / kv
    return 2 ** (k + 1) * inv.B_minus / kv


@dataclass(frozen=True)
class HeatReport:
    spec_name: str
    p: int
    a0: float
    b0: tuple  # (stratum index, b0 value, exact value or None)
    B_plus: float
    B_minus: float
    k_plus: int | None
    k_minus: int | None
    c: dict = field(default_factory=dict)  # j -> coefficient of t^(j/2)

    def as_dict(self) -> dict:
        return {
            "spec": self.spec_name,
            "p": self.p,
            "a0": self.a0,
            "b0": [{"stratum": i, "value": v, "exact": None if e is None else str(e)}
                   for i, v, e in self.b0],
            "B_plus": self.B_plus,
            "B_minus": self.B_minus,
            "k_plus": self.k_plus,
            "k_minus": self.k_minus,
            "c": {str(j): v for j, v in self.c.items()},
        }


def heat_report(spec: FlatOrbifoldSpec, p: int,
                strata: Sequence[SingularStratum] | None = None) -> HeatReport:
    if strata is None:
        strata = singular_strata(spec)
    a0 = comb(spec.d, p) * spec.volume
    b0 = tuple((i, b0p_stratum(s, p), b0p_stratum_exact(s, p)) for i, s in enumerate(strata))
    inv = B_parity(spec, p, strata)
    c = {0: a0}
    for k, agg in codimension_aggregates(strata, p).items():
        c[k] = c.get(k, 0.0) + (4 * math.pi) ** (k / 2) * agg
    return HeatReport(spec.name, p, a0, b0, inv.B_plus, inv.B_minus, inv.k_plus, inv.k_minus, c)


def predicted_trace(spec: FlatOrbifoldSpec, p: int, t: float,
                    strata: Sequence[SingularStratum] | None = None) -> float:
    if strata is None:
        strata = singular_strata(spec)
    total = (4 * math.pi * t) ** (-spec.d / 2) * comb(spec.d, p) * spec.volume
    for s in strata:
        if s.primary:
            total += (4 * math.pi * t) ** (-s.dim / 2) * b0p_stratum(s, p) / s.isotropy_order
    return total


def truncation_tail_bound(spec: FlatOrbifoldSpec, p: int, cutoff, t: float) -> float:
    """Upper bound for sum over q > cutoff of m * exp(-4 pi^2 q t).

    Uses |m| <= C(d,p) * (shell size) and counts dual vectors of norm <= R by
    packing fundamental cells into a ball of radius R + (sum of dual basis
    lengths).
    """
    d = spec.d
    dual = spec.lattice.dual_gram
    diam = sum(sqrt_fraction(dual[i][i]) for i in range(d))
    covol_dual = 1.0 / spec.lattice.covolume
    ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1)

    def integrand(r):
        count = ball * (r + diam) ** d / covol_dual
        return count * 8 * math.pi ** 2 * t * r * math.exp(-4 * math.pi ** 2 * t * r * r)

    val, _ = integrate.quad(integrand, math.sqrt(float(cutoff)), math.inf)
    return comb(d, p) * val


@dataclass(frozen=True)
class HeatCheckRow:
    t: float
    truncated: float
    predicted: float
    relative_error: float
    tail_bound: float


def heat_trace_check(spec: FlatOrbifoldSpec, p: int, cutoff, t_list: Sequence[float]
                     ) -> list[HeatCheckRow]:
    """Relative error between the truncated spectral heat trace and the two-term asymptote."""
    if any(t <= 0 for t in t_list):
        raise ValueError("heat times must be positive")
    table = p_spectrum(spec, p, cutoff)
    strata = singular_strata(spec)
    rows = []
    for t in t_list:
        s_val = heat_trace(table, t)
        pred = predicted_trace(spec, p, t, strata)
        rows.append(HeatCheckRow(t, s_val, pred, abs(s_val - pred) / abs(pred),
                                 truncation_tail_bound(spec, p, cutoff, t)))
    return rows
