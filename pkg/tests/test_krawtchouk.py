from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from flatorb.krawtchouk import binom, krawtchouk, krawtchouk_zeros, odd_dimension_zero_scan


def test_named_values():
    assert all(krawtchouk(7, 0, k) == 1 for k in range(8))
    assert krawtchouk(6, 1, 3) == 0
    assert krawtchouk(4, 2, 1) == 0 and krawtchouk(9, 2, 3) == 0
    assert krawtchouk(5, 5, 3) == -1


def test_zero_lists():
    assert krawtchouk_zeros(2, 1) == [1]
    assert krawtchouk_zeros(6, 3) == [1, 3, 5]
    assert krawtchouk_zeros(4, 2) == [1, 3]


def test_scan():
    scan = odd_dimension_zero_scan(17)
    assert sorted(scan) == list(range(3, 18, 2))
    assert all(scan[d] == [] for d in (3, 5, 7, 11, 13, 15))
    assert {(2, 3), (2, 6)} <= set(scan[9])
    assert scan[17]


def test_binom_out_of_range():
    assert binom(3, -1) == 0 and binom(3, 4) == 0 and binom(5, 2) == 10


@pytest.mark.parametrize("args", [(0, 0, 0), (3, 4, 0), (3, -1, 0)])
def test_rejects_bad_arguments(args):
    with pytest.raises(ValueError):
        krawtchouk(*args)


def test_scan_rejects_small_range():
    with pytest.raises(ValueError):
        odd_dimension_zero_scan(2)


dims = st.integers(1, 20)


@given(dims.flatmap(lambda d: st.tuples(st.just(d), st.integers(0, d), st.integers(0, d))))
def test_symmetry(dpk):
    # C(d,k) K_p(k) = C(d,p) K_k(p)
    d, p, k = dpk
    assert comb(d, k) * krawtchouk(d, p, k) == comb(d, p) * krawtchouk(d, k, p)


@given(dims.flatmap(lambda d: st.tuples(st.just(d), st.integers(0, d))))
def test_generating_function(dk):
    d, k = dk
    z = sympy.symbols("z")
    poly = sympy.Poly(sympy.expand((1 - z) ** k * (1 + z) ** (d - k)), z)
    coeffs = poly.all_coeffs()[::-1]
    assert [krawtchouk(d, p, k) for p in range(d + 1)] == [int(c) for c in coeffs]


@given(dims.flatmap(lambda d: st.tuples(st.just(d), st.integers(0, d), st.integers(0, d))))
def test_reflection_in_k(dpk):
    d, p, k = dpk
    assert krawtchouk(d, p, d - k) == (-1) ** p * krawtchouk(d, p, k)
