"""Flat orbifolds Sigma \\ R^d: specifications, singular strata and a catalog.

A specification is a lattice plus coset representatives of the holonomy
group, each an :class:`~flatorb.isometry.AffineIsometry` with translation
reduced mod Z^d.

The census works on the torus T = R^d / Z^d.  Each nontrivial coset
``x -> M x + t`` fixes a finite union of affine subtori with direction space
``ker(M - I)``; these are found with a Smith normal form.  Subtori are then
grouped into holonomy orbits, and every orbit becomes one stratum whose
volume in the quotient is ``vol_T(C) * |pointwise stabilizer| / |setwise
stabilizer|``.  In dimension 2 the one-dimensional loci are further cut
into arcs at the singular points lying on them.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

from . import linalg
from .isometry import (
    AffineIsometry,
    IsometryError,
    eigenvalue_type,
    frac_mod1,
    from_precomposed,
    group_closure,
    is_integral,
    a_of,
)
from .lattice import Lattice, exact_sqrt, sqrt_fraction, sublattice_covolume
from .linalg import Matrix


class SpecError(ValueError):
    """Invalid orbifold specification (bad JSON, bad data or unknown name)."""


@dataclass(frozen=True)
class FlatOrbifoldSpec:
    name: str
    lattice: Lattice
    holonomy: tuple  # AffineIsometry, identity first

    @property
    def d(self) -> int:
        return self.lattice.d

    @property
    def order(self) -> int:
        return len(self.holonomy)

    @property
    def volume(self) -> float:
        return self.lattice.covolume / self.order

    @property
    def volume_squared(self) -> Fraction:
        return self.lattice.covolume_squared / self.order ** 2

    def nontrivial(self) -> tuple:
        return self.holonomy[1:]


def validate(name: str, gram: Matrix, generators: Sequence[AffineIsometry] = ()) -> FlatOrbifoldSpec:
    """Close the generators into a holonomy group and check every invariant."""
    lattice = Lattice(gram)
    try:
        holonomy = group_closure(list(generators), lattice.gram)
    except IsometryError as exc:
        raise SpecError(f"{name}: {exc}") from exc
    return FlatOrbifoldSpec(name, lattice, tuple(holonomy))


def spec_from_precomposed(name: str, gram: Matrix, gens: Sequence[tuple]) -> FlatOrbifoldSpec:
    """Build a spec from ``(matrix, a)`` pairs meaning ``gamma o L_a``."""
    g = tuple(tuple(Fraction(x) for x in row) for row in gram)
    return validate(name, g, [from_precomposed(m, a, g) for m, a in gens])


def change_basis(spec: FlatOrbifoldSpec, p: Matrix) -> FlatOrbifoldSpec:
    """The same orbifold written in the lattice basis given by the columns of ``p``."""
    if abs(linalg.det(p)) != 1:
        raise ValueError("basis change must be unimodular")
    pinv = tuple(tuple(int(x) for x in row) for row in linalg.inverse(p))
    lattice = spec.lattice.change_basis(p)
    gens = [AffineIsometry(linalg.matmul(linalg.matmul(pinv, f.matrix), p),
                           linalg.matvec(pinv, f.translation), lattice.gram)
            for f in spec.nontrivial()]
    return validate(spec.name, lattice.gram, gens)


# ---------------------------------------------------------------------------
# singular strata


@dataclass(frozen=True)
class Volume:
    """A volume ``scale * sqrt(gram_det)`` kept exact where possible."""

    scale: Fraction
    gram_det: Fraction

    @property
    def value(self) -> float:
        return float(self.scale) * sqrt_fraction(self.gram_det)

    @property
    def exact(self) -> Fraction | None:
        root = exact_sqrt(self.gram_det)
        return None if root is None else self.scale * root

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class SingularStratum:
    dim: int
    codim: int
    isotropy_order: int
    isotropy_elements: tuple
    iso_max_elements: tuple
    primary: bool
    volume: Volume
    component_count: int | str
    orientation_preserving_isotropy: bool
    representative: tuple = field(default=(), compare=False)
    isotropy_type: tuple = field(default=(), compare=False)


@lru_cache(maxsize=None)
def _subspace(basis: Matrix) -> tuple[Matrix, Matrix]:
    """Canonical d x m basis of a saturated sublattice and a projector onto its quotient.

    The projector ``R`` ((d-m) x d, integral) is surjective onto Z^(d-m) with
    kernel the real span of the basis, so ``R x mod 1`` identifies the
    coset ``x + span + Z^d``.
    """
    d = len(basis)
    m = len(basis[0]) if d else 0
    if m == 0:
        return basis, linalg.identity(d)
    canon, _ = linalg.hermite_normal_form(linalg.transpose(basis))
    canon = linalg.transpose(tuple(r for r in canon if any(r)))
    proj = linalg.transpose(linalg.integer_kernel(linalg.transpose(canon)))
    return canon, proj


@dataclass(frozen=True)
class _Subtorus:
    base: tuple
    basis: Matrix  # canonical, columns

    @property
    def dim(self) -> int:
        return len(self.basis[0]) if self.basis and self.basis[0] else 0

    def key(self) -> tuple:
        _, proj = _subspace(self.basis)
        return self.basis, tuple(frac_mod1(x) for x in linalg.matvec(proj, self.base))

    def image(self, g: AffineIsometry) -> _Subtorus:
        basis = self.basis
        if self.dim:
            basis, _ = _subspace(linalg.matmul(g.matrix, basis))
        return _Subtorus(g.apply(self.base), basis)

    def fixed_pointwise_by(self, g: AffineIsometry) -> bool:
        if self.dim and linalg.matmul(g.matrix, self.basis) != self.basis:
            return False
        return is_integral(linalg.sub((g.apply(self.base),), (self.base,))[0])


def fixed_subtori(f: AffineIsometry) -> list[_Subtorus]:
    """Components of the fixed set of ``f`` acting on the torus R^d / Z^d.

    Solves ``(M - I) x + t = 0 (mod Z^d)`` through ``U (M - I) V = D``.
    """
    d = f.d
    a = linalg.sub(f.matrix, linalg.identity(d))
    dmat, u, v = linalg.smith_normal_form(a)
    ut = linalg.matvec(u, f.translation)
    diag = [dmat[i][i] for i in range(d)]
    r = sum(1 for x in diag if x)
    if not is_integral(ut[r:]):
        return []
    kernel = linalg.integer_kernel(a)
    basis, _ = _subspace(kernel) if kernel[0] else (kernel, None)
    choices = [[(-ut[i] + j) / diag[i] for j in range(diag[i])] for i in range(r)]
    out = []
    for ys in product(*choices):
        y = list(ys) + [Fraction(0)] * (d - r)
        base = tuple(frac_mod1(x) for x in linalg.matvec(v, y))
        out.append(_Subtorus(base, basis))
    return out


def _arc_parameter(basis: Matrix) -> tuple[tuple[int, ...], tuple[int, ...]]:
    b = tuple(row[0] for row in basis)
    g, p, q = linalg._xgcd(b[0], b[1])
    return b, (p // g, q // g)


def _arc_strata(c: _Subtorus, points: list[_Subtorus], set_stab: list[AffineIsometry],
                pw_order: int) -> list[tuple[Fraction, Fraction, tuple]]:
    """Cut a circle at singular points; return (arc fraction, scale, midpoint) per arc orbit.

    ``scale`` multiplies the circle length to give the arc-orbit length in the
    quotient.
    """
    b, w = _arc_parameter(c.basis)

    def param(x):
        diff = [xi - ci for xi, ci in zip(x, c.base)]
        return frac_mod1(sum(wi * di for wi, di in zip(w, diff)))

    actions = []
    for g in set_stab:
        mb = linalg.matvec(g.matrix, b)
        eps = 1 if mb == b else -1
        actions.append((eps, param(g.apply(c.base))))
    g_eff = len(set_stab) // pw_order
    cuts = sorted({param(p.base) for p in points})
    if not cuts:
        return [(Fraction(1), Fraction(1, g_eff), c.base)]
    arcs = [(s, cuts[(i + 1) % len(cuts)] + (1 if i + 1 == len(cuts) else 0))
            for i, s in enumerate(cuts)]

    def arc_of(s):
        for i, (lo, hi) in enumerate(arcs):
            if lo < s < hi or lo < s + 1 < hi:
                return i
        raise AssertionError("image of an arc midpoint hit a cut point")

    seen: set[int] = set()
    out = []
    for i, (lo, hi) in enumerate(arcs):
        if i in seen:
            continue
        mid = (lo + hi) / 2
        orbit = {arc_of(frac_mod1(eps * mid + shift)) for eps, shift in actions}
        seen |= orbit
        length = hi - lo
        mid_pt = tuple(frac_mod1(x + mid * bi) for x, bi in zip(c.base, b))
        out.append((length, length * len(orbit) / g_eff, mid_pt))
    return out


def _isotropy_type(elements: Sequence[AffineIsometry]) -> tuple:
    return (len(elements), tuple(sorted(str(eigenvalue_type(e)) for e in elements)))


def singular_strata(spec: FlatOrbifoldSpec) -> list[SingularStratum]:
    """Census of the singular strata of a validated spec."""
    d = spec.d
    found: dict[tuple, _Subtorus] = {}
    for f in spec.nontrivial():
        for c in fixed_subtori(f):
            found.setdefault(c.key(), c)

    orbits: list[list[_Subtorus]] = []
    assigned: set[tuple] = set()
    for key in sorted(found):
        if key in assigned:
            continue
        c = found[key]
        members = {}
        for g in spec.holonomy:
            img = c.image(g)
            members.setdefault(img.key(), img)
        assigned |= set(members)
        orbits.append([c] + [m for k, m in sorted(members.items()) if k != key])

    points = [c for c in found.values() if c.dim == 0]
    strata = []
    for orbit in orbits:
        c = orbit[0]
        pw = [g for g in spec.holonomy if c.fixed_pointwise_by(g)]
        set_stab = [g for g in spec.holonomy if c.image(g).key() == c.key()]
        iso = tuple(g.matrix for g in pw)
        iso_max = tuple(g.matrix for g in pw if g.fixed_dim == c.dim)
        orient = all(linalg.det(m) == 1 for m in iso)
        itype = _isotropy_type(pw)
        common = dict(dim=c.dim, codim=d - c.dim, isotropy_order=len(pw),
                      isotropy_elements=iso, iso_max_elements=iso_max,
                      primary=bool(iso_max), orientation_preserving_isotropy=orient,
                      isotropy_type=itype)
        if c.dim == 0:
            strata.append(SingularStratum(volume=Volume(Fraction(1), Fraction(1)),
                                          component_count=1, representative=c.base, **common))
            continue
        gdet, _ = sublattice_covolume(spec.lattice, c.basis)
        if d == 2 and c.dim == 1:
            on_c = [pt for pt in points if _Subtorus(pt.base, c.basis).key() == c.key()]
            for _, scale, mid in _arc_strata(c, on_c, set_stab, len(pw)):
                strata.append(SingularStratum(volume=Volume(scale, gdet), component_count=1,
                                              representative=mid, **common))
        else:
            scale = Fraction(len(pw), len(set_stab))
            strata.append(SingularStratum(volume=Volume(scale, gdet), component_count="unrefined",
                                          representative=c.base, **common))
    strata.sort(key=lambda s: (s.codim, s.isotropy_order, s.representative))
    return strata


def total_volume(strata: Sequence[SingularStratum]) -> float:
    return sum(s.volume.value for s in strata)


GLOBAL = "globally orientable"
LOCAL_ONLY = "locally orientable only"
NOT_LOCAL = "not locally orientable"


def orientability(spec: FlatOrbifoldSpec, strata: Sequence[SingularStratum] | None = None) -> str:
    if all(f.det == 1 for f in spec.holonomy):
        return GLOBAL
    if strata is None:
        strata = singular_strata(spec)
    if all(s.orientation_preserving_isotropy for s in strata):
        return LOCAL_ONLY
    return NOT_LOCAL


# ---------------------------------------------------------------------------
# catalog

HALF = Fraction(1, 2)
HEX_GRAM = ((1, HALF), (HALF, 1))
# planar rotation generating a cyclic point group of order m, with its Gram matrix
_CYCLIC = {
    2: (((1, 0), (0, 1)), ((-1, 0), (0, -1))),
    3: (HEX_GRAM, ((-1, -1), (1, 0))),
    4: (((1, 0), (0, 1)), ((0, -1), (1, 0))),
    6: (HEX_GRAM, ((0, -1), (1, 1))),
}

REFLECT_X_AXIS = ((1, 0), (0, -1))
REFLECT_Y_AXIS = ((-1, 0), (0, 1))
REFLECT_DIAG = ((0, 1), (1, 0))
REFLECT_ANTIDIAG = ((0, -1), (-1, 0))
QUARTER_TURN = ((0, -1), (1, 0))


def involution(d: int, k: int) -> Matrix:
    """diag(-1 (k times), +1 (d - k times))."""
    return linalg.diag([-1] * k + [1] * (d - k))


def torus(d: int = 2, gram: Matrix | None = None) -> FlatOrbifoldSpec:
    return validate(f"torus({d})", gram if gram is not None else linalg.identity(d))


def orbifold_O(d: int, k: int) -> FlatOrbifoldSpec:
    if not (d >= 2 and 1 <= k <= d - 1):
        raise SpecError(f"O(d,k) needs d >= 2 and 1 <= k <= d-1, got ({d},{k})")
    return spec_from_precomposed(f"O({d},{k})", linalg.identity(d),
                                 [(involution(d, k), (0,) * d)])


def manifold_M(d: int, k: int, a: Sequence | None = None) -> FlatOrbifoldSpec:
    if not (d >= 2 and 1 <= k <= d - 1):
        raise SpecError(f"M(d,k) needs d >= 2 and 1 <= k <= d-1, got ({d},{k})")
    a = tuple(Fraction(x) for x in a) if a is not None else (0,) * (d - 1) + (HALF,)
    if len(a) != d or any((2 * x).denominator != 1 for x in a):
        raise SpecError("a must be a vector in (1/2 Z)^d")
    if not any(frac_mod1(x) == HALF for x in a[k:]):
        raise SpecError("one of the last d-k entries of a must be 1/2")
    name = f"M({d},{k})" if a == (0,) * (d - 1) + (HALF,) else \
        f"M({d},{k},[{','.join(str(x) for x in a)}])"
    return spec_from_precomposed(name, linalg.identity(d), [(involution(d, k), a)])


def hex_cone_d6(m: int = 3) -> FlatOrbifoldSpec:
    """Planar cyclic rotation of order m times the identity on Z^4."""
    if m not in _CYCLIC:
        raise SpecError(f"no crystallographic planar rotation of order {m}")
    g2, rot = _CYCLIC[m]
    gram = linalg.direct_sum(g2, linalg.identity(4))
    mat = linalg.direct_sum(rot, linalg.identity(4))
    return spec_from_precomposed(f"hex_cone_d6({m})", gram, [(mat, (0,) * 6)])


_Z2 = ((1, 0), (0, 1))
_PLANAR = {
    "square_2222": [(REFLECT_X_AXIS, (0, 0)), (REFLECT_Y_AXIS, (0, 0))],
    "disk_22star": [(REFLECT_X_AXIS, (HALF, 0)), (REFLECT_Y_AXIS, (0, 0))],
    "rp2_22x": [(REFLECT_X_AXIS, (HALF, 0)), (REFLECT_Y_AXIS, (0, HALF))],
    "disk_2star22": [(REFLECT_DIAG, (0, 0)), (REFLECT_ANTIDIAG, (0, 0))],
    "sphere_244": [(QUARTER_TURN, (0, 0))],
}
FIVE_ORBIFOLDS = tuple(_PLANAR)

_NAME_RE = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$")


def _parse_args(text: str | None) -> list:
    if not text:
        return []
    out = []
    for part in re.findall(r"\[[^\]]*\]|[^,]+", text):
        part = part.strip()
        if part.startswith("["):
            out.append([Fraction(x.strip()) for x in part[1:-1].split(",") if x.strip()])
        else:
            out.append(int(part))
    return out


def catalog(name: str) -> FlatOrbifoldSpec:
    """Resolve a built-in name such as ``O(4,2)``, ``M(4,2)``, ``sphere_244``."""
    m = _NAME_RE.match(name)
    if not m:
        raise SpecError(f"unknown built-in orbifold {name!r}")
    head, args = m.group(1), m.group(2)
    try:
        vals = _parse_args(args)
    except ValueError as exc:
        raise SpecError(f"bad arguments in {name!r}") from exc
    if head in _PLANAR and not vals:
        return spec_from_precomposed(head, _Z2, _PLANAR[head])
    if head == "torus":
        return torus(*(vals or [2]))
    if head == "O" and len(vals) == 2:
        return orbifold_O(*vals)
    if head == "M" and len(vals) in (2, 3):
        return manifold_M(*vals)
    if head == "cylinder" and not vals:
        spec = orbifold_O(2, 1)
        return FlatOrbifoldSpec("cylinder", spec.lattice, spec.holonomy)
    if head == "klein_bottle" and not vals:
        spec = manifold_M(2, 1, (0, HALF))
        return FlatOrbifoldSpec("klein_bottle", spec.lattice, spec.holonomy)
    if head == "hex_cone_d6" and len(vals) <= 1:
        return hex_cone_d6(*vals)
    raise SpecError(f"unknown built-in orbifold {name!r}")


CATALOG_NAMES = (
    "torus(2)", "torus(3)", "O(2,1)", "O(4,1)", "O(4,2)", "O(9,3)", "M(2,1)", "M(4,2)",
    "M(9,3)", *FIVE_ORBIFOLDS, "cylinder", "klein_bottle", "hex_cone_d6(3)",
)


# ---------------------------------------------------------------------------
# JSON spec files


def _rat_str(x: Fraction) -> str:
    return str(Fraction(x))


def spec_to_dict(spec: FlatOrbifoldSpec) -> dict:
    """Normalized JSON form; every nontrivial holonomy coset is listed as a generator."""
    return {
        "name": spec.name,
        "dim": spec.d,
        "gram": [[_rat_str(x) for x in row] for row in spec.lattice.gram],
        "generators": [{"matrix": [list(r) for r in f.matrix],
                        "a": [_rat_str(x) for x in a_of(f)]} for f in spec.nontrivial()],
    }


def dumps_spec(spec: FlatOrbifoldSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)


def spec_from_dict(data: dict) -> FlatOrbifoldSpec:
    try:
        name = str(data["name"])
        d = int(data["dim"])
        gram = [[Fraction(str(x)) for x in row] for row in data["gram"]]
        gens = []
        for g in data.get("generators", []):
            mat = [[int(x) for x in row] for row in g["matrix"]]
            a = [Fraction(str(x)) for x in g.get("a", [0] * d)]
            if len(mat) != d or any(len(r) != d for r in mat) or len(a) != d:
                raise SpecError(f"generator dimensions do not match dim={d}")
            gens.append((mat, a))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"malformed spec: {exc}") from exc
    if len(gram) != d or any(len(r) != d for r in gram):
        raise SpecError(f"gram must be {d} x {d}")
    try:
        return spec_from_precomposed(name, gram, gens)
    except (IsometryError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"{name}: {exc}") from exc


def loads_spec(text: str) -> FlatOrbifoldSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SpecError("spec file must hold a JSON object")
    return spec_from_dict(data)


def resolve(ref: str) -> FlatOrbifoldSpec:
    """``builtin:<name>`` or a path to a JSON spec file."""
    if ref.startswith("builtin:"):
        return catalog(ref[len("builtin:"):])
    try:
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read spec file {ref!r}: {exc.strerror}") from exc
    return loads_spec(text)
