import itertools
from fractions import Fraction
from math import comb, gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatorb import linalg
from flatorb.krawtchouk import krawtchouk

HEX_ROT = ((0, -1), (1, -1))


def int_matrices(rows, cols, lo=-4, hi=4):
    return st.lists(st.lists(st.integers(lo, hi), min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows).map(linalg.as_matrix)


def square(max_n=4):
    return st.integers(1, max_n).flatmap(lambda n: int_matrices(n, n))


# --- Hermite ---------------------------------------------------------------

def test_hnf_identity():
    h, u = linalg.hermite_normal_form(linalg.identity(3))
    assert h == linalg.identity(3) and u == linalg.identity(3)


def test_hnf_already_reduced():
    h, _ = linalg.hermite_normal_form(((2, 0), (0, 2)))
    assert h == ((2, 0), (0, 2))


def test_hnf_solvability_matches_brute_force():
    a = ((1, 2), (3, 4))
    h, u = linalg.hermite_normal_form(a)
    assert linalg.matmul(u, a) == h
    reach = {linalg.matvec(linalg.transpose(a), x)
             for x in itertools.product(range(-20, 21), repeat=2)}
    hinv_t = linalg.inverse(linalg.transpose(h))
    for b in itertools.product(range(-4, 5), repeat=2):
        # x H = b has an integral solution iff b is in the row lattice
        x = linalg.matvec(hinv_t, b)
        assert all(Fraction(c).denominator == 1 for c in x) == (b in reach)


@settings(max_examples=60, deadline=None)
@given(int_matrices(3, 4))
def test_hnf_is_unimodular_transform(a):
    h, u = linalg.hermite_normal_form(a)
    assert abs(linalg.det(u)) == 1
    assert linalg.matmul(u, a) == h
    pivots = []
    for row in h:
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            pivots.append(nz[0])
            assert row[nz[0]] > 0
    assert pivots == sorted(set(pivots))


# --- Smith -----------------------------------------------------------------

def test_snf_zero_and_identity():
    assert linalg.smith_normal_form(linalg.zeros(2, 3))[0] == linalg.zeros(2, 3)
    assert linalg.smith_normal_form(linalg.identity(3))[0] == linalg.identity(3)


def test_snf_invariant_factors_from_minors():
    a = ((2, 4), (6, 8))
    assert linalg.invariant_factors(a) == (2, 4)
    g1 = 0
    for x in itertools.chain.from_iterable(a):
        g1 = gcd(g1, x)
    assert (g1, abs(linalg.det(a)) // g1) == (2, 4)


@settings(max_examples=60, deadline=None)
@given(int_matrices(3, 3))
def test_snf_properties(a):
    d, u, v = linalg.smith_normal_form(a)
    assert linalg.matmul(linalg.matmul(u, a), v) == d
    assert abs(linalg.det(u)) == 1 and abs(linalg.det(v)) == 1
    diag = [d[i][i] for i in range(3)]
    assert all(d[i][j] == 0 for i in range(3) for j in range(3) if i != j)
    for x, y in zip(diag, diag[1:]):
        assert (y == 0) or (x != 0 and y % x == 0)
    assert abs(linalg.det(a)) == abs(diag[0] * diag[1] * diag[2])


# --- kernel ----------------------------------------------------------------

def test_kernel_of_zero_is_everything():
    k = linalg.integer_kernel(linalg.zeros(3, 3))
    assert linalg.rank(k) == 3


def test_kernel_reflection_axis():
    k = linalg.integer_kernel(((2, 0), (0, 0)))
    assert k == ((0,), (1,))


def test_kernel_known_nullity():
    b = ((1, 0), (2, 1), (0, 3), (1, 1))
    p = ((1, 2, 0, -1), (0, 1, 1, 3))
    a = linalg.matmul(b, p)
    k = linalg.integer_kernel(a)
    assert len(k[0]) == 2
    assert linalg.matmul(a, k) == linalg.zeros(4, 2)


@settings(max_examples=60, deadline=None)
@given(int_matrices(2, 4))
def test_kernel_is_saturated(a):
    k = linalg.integer_kernel(a)
    m = len(k[0])
    assert m == 4 - linalg.rank(a)
    if m:
        assert linalg.matmul(a, k) == linalg.zeros(2, m)
        assert linalg.invariant_factors(k) == (1,) * m


# --- characteristic polynomial, minors ---------------------------------------

def test_char_poly_examples():
    assert linalg.char_poly(linalg.identity(2)) == (1, -2, 1)
    assert linalg.char_poly(HEX_ROT) == (1, 1, 1)
    assert linalg.char_poly(linalg.diag([-1, -1, -1])) == (1, 3, 3, 1)


@pytest.mark.parametrize("d", range(1, 7))
def test_minor_sum_identity(d):
    for p in range(d + 1):
        assert linalg.principal_minor_sum(linalg.identity(d), p) == comb(d, p)


@pytest.mark.parametrize("d", range(1, 8))
def test_minor_sum_involution_is_krawtchouk(d):
    for k in range(d + 1):
        m = linalg.diag([-1] * k + [1] * (d - k))
        for p in range(d + 1):
            assert linalg.principal_minor_sum(m, p) == krawtchouk(d, p, k)


def test_minor_sum_hex_rotation_plus_line():
    assert linalg.principal_minor_sum(linalg.direct_sum(HEX_ROT, linalg.identity(1)), 1) == 0


def test_minor_sum_bad_degree():
    with pytest.raises(ValueError):
        linalg.principal_minor_sum(linalg.identity(2), 3)


@settings(max_examples=80, deadline=None)
@given(square())
def test_char_poly_coefficients_are_minor_sums(m):
    n = len(m)
    cp = linalg.char_poly(m)
    assert cp[n] == 1
    for p in range(n + 1):
        assert cp[n - p] == (-1) ** p * linalg.principal_minor_sum(m, p)


@settings(max_examples=60, deadline=None)
@given(square(3))
def test_det_matches_leibniz(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = sign
        for i in range(n):
            prod *= m[i][perm[i]]
        total += prod
    assert linalg.det(m) == total


def test_inverse_rational():
    a = ((Fraction(1), Fraction(1, 2)), (Fraction(1, 2), Fraction(1)))
    assert linalg.matmul(a, linalg.inverse(a)) == linalg.identity(2)
