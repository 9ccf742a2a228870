from fractions import Fraction

import pytest

from flatorb import linalg
from flatorb.isometry import (
    AffineIsometry,
    IsometryError,
    a_of,
    compose,
    cyclotomic,
    det_complement,
    eigenvalue_type,
    exterior_trace,
    from_precomposed,
    group_closure,
    identity_isometry,
    is_orientation_preserving,
)
from flatorb.krawtchouk import krawtchouk

H = Fraction(1, 2)
Z2 = linalg.identity(2)
HEX = ((1, H), (H, 1))
HEX_ROT = ((0, -1), (1, -1))


def iso(m, t, gram=None):
    return AffineIsometry(m, t, gram if gram is not None else linalg.identity(len(m)))


def test_compose_identity_and_involution():
    g = iso(((0, -1), (1, 0)), (H, 0))
    assert compose(identity_isometry(Z2), g) == g
    minus = iso(((-1, 0), (0, -1)), (0, 0))
    assert compose(minus, minus) == identity_isometry(Z2)


def test_glides_compose_to_half_turn():
    g1 = from_precomposed(((1, 0), (0, -1)), (H, 0), Z2)
    g2 = from_precomposed(((-1, 0), (0, 1)), (0, H), Z2)
    h = compose(g1, g2)
    assert h.matrix == ((-1, 0), (0, -1))
    assert a_of(h) == (H, H)


def test_a_of_examples():
    assert a_of(iso(((-1, 0), (0, -1)), (H, H))) == (H, H)
    assert a_of(identity_isometry(Z2)) == (0, 0)
    assert a_of(iso(((-1, 0), (0, 1)), (0, H))) == (0, H)


def test_compose_rejects_gram_mismatch():
    with pytest.raises(IsometryError):
        compose(identity_isometry(Z2), identity_isometry(HEX))


def test_closure_sizes():
    inv = iso(linalg.diag([-1, -1, 1, 1]), (0, 0, 0, 0))
    assert len(group_closure([inv], linalg.identity(4))) == 2
    quarter = iso(((0, -1), (1, 0)), (0, 0))
    assert len(group_closure([quarter], Z2)) == 4
    klein = group_closure([iso(((1, 0), (0, -1)), (0, 0)), iso(((-1, 0), (0, 1)), (0, 0))], Z2)
    assert len(klein) == 4
    assert all(compose(f, f).matrix == Z2 for f in klein)


def test_closure_identity_first():
    g = group_closure([iso(((0, -1), (1, 0)), (0, 0))], Z2)
    assert g[0].is_identity()


def test_closure_rejects_non_orthogonal():
    with pytest.raises(IsometryError):
        group_closure([iso(((1, 1), (0, 1)), (0, 0))], Z2)


def test_closure_rejects_extra_translation():
    # a glide squared gives a pure half-lattice translation
    g = iso(((1, 0), (0, -1)), (H, 0))
    with pytest.raises(IsometryError):
        group_closure([g, iso(((1, 0), (0, -1)), (0, 0))], Z2)


def test_closure_overflow():
    with pytest.raises(IsometryError):
        group_closure([iso(((0, -1), (1, 0)), (0, 0))], Z2, max_order=3)


@pytest.mark.parametrize("d,k", [(2, 1), (4, 2), (6, 3), (9, 3)])
def test_exterior_trace_involution(d, k):
    f = iso(linalg.diag([-1] * k + [1] * (d - k)), (0,) * d)
    for p in range(d + 1):
        assert exterior_trace(f, p) == krawtchouk(d, p, k)


def test_exterior_trace_identity_and_hex():
    assert exterior_trace(identity_isometry(linalg.identity(5)), 2) == 10
    gram = linalg.direct_sum(HEX, linalg.identity(4))
    f = iso(linalg.direct_sum(HEX_ROT, linalg.identity(4)), (0,) * 6, gram)
    assert exterior_trace(f, 1) == 3


def test_eigenvalue_types():
    e = eigenvalue_type(iso(linalg.diag([-1, -1, -1, 1, 1]), (0,) * 5))
    assert (e.turns, e.r, e.plus_multiplicity) == ((), 3, 2)
    e = eigenvalue_type(iso(((0, -1), (1, 0)), (0, 0)))
    assert e.turns == (Fraction(1, 4),) and e.r == 0
    e = eigenvalue_type(iso(HEX_ROT, (0, 0), HEX))
    assert e.turns == (Fraction(1, 3),)
    assert str(e) == "E(2pi*1/3;)"


def test_eigenvalue_type_order_six():
    e = eigenvalue_type(iso(((0, -1), (1, 1)), (0, 0), HEX))
    assert e.turns == (Fraction(1, 6),)


def test_det_complement():
    assert det_complement(iso(linalg.diag([-1, -1, -1, 1]), (0,) * 4)) == 8
    assert det_complement(iso(HEX_ROT, (0, 0), HEX)) == 3
    assert det_complement(identity_isometry(linalg.identity(3))) == 1


def test_orientation():
    assert is_orientation_preserving(iso(((-1, 0), (0, -1)), (0, 0)))
    assert not is_orientation_preserving(iso(((1, 0), (0, -1)), (0, 0)))
    assert not is_orientation_preserving(iso(linalg.diag([-1, -1, -1, 1]), (0,) * 4))


def test_cyclotomic_polys():
    assert cyclotomic(1) == (-1, 1)
    assert cyclotomic(4) == (1, 0, 1)
    assert cyclotomic(6) == (1, -1, 1)
    assert cyclotomic(12) == (1, 0, -1, 0, 1)


def test_rejects_non_integral_matrix():
    with pytest.raises(IsometryError):
        AffineIsometry(((H, 0), (0, 1)), (0, 0), Z2)
