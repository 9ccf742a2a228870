import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatorb import linalg
from flatorb.isometry import AffineIsometry, identity_isometry
from flatorb.lattice import (
    Lattice,
    fixed_dual_vectors,
    shells_up_to,
    standard_lattice,
    sublattice_covolume,
)

H = Fraction(1, 2)
HEX = Lattice(((1, H), (H, 1)))


def brute_counts(gram_inv, cutoff, box):
    d = len(gram_inv)
    out = Counter()
    for n in itertools.product(range(-box, box + 1), repeat=d):
        q = sum(n[i] * gram_inv[i][j] * n[j] for i in range(d) for j in range(d))
        if q <= cutoff:
            out[Fraction(q)] += 1
    return out


def test_unit_shells():
    shells = shells_up_to(standard_lattice(3), 1)
    assert [(s.q, len(s.vectors)) for s in shells] == [(0, 1), (1, 6)]


def test_square_second_shell():
    shells = {s.q: s.vectors for s in shells_up_to(standard_lattice(2), 2)}
    assert sorted(shells[2]) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def test_hexagonal_first_shell():
    # dual of A2 with unit minimal vectors: first nonzero shell at 4/3, six vectors
    brute = brute_counts(HEX.dual_gram, 2, 3)
    shells = shells_up_to(HEX, 2)
    assert [(s.q, len(s.vectors)) for s in shells] == sorted(brute.items())
    assert shells[1].q == Fraction(4, 3) and len(shells[1].vectors) == 6


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_theta_counts_match_brute_force(d):
    shells = shells_up_to(standard_lattice(d), 25)
    got = {s.q: len(s.vectors) for s in shells}
    assert got == dict(brute_counts(linalg.identity(d), 25, 5))


def positive_grams():
    def build(entries):
        b = np.array(entries, dtype=object).reshape(3, 3)
        b = b + np.identity(3, dtype=int) * 4  # diagonally dominant
        g = [[sum(Fraction(b[k][i]) * b[k][j] for k in range(3)) / 2 for j in range(3)]
             for i in range(3)]
        return tuple(tuple(r) for r in g)
    return st.lists(st.integers(-1, 1), min_size=9, max_size=9).map(build)


@settings(max_examples=15, deadline=None)
@given(positive_grams())
def test_random_gram_matches_brute_force(gram):
    lat = Lattice(gram)
    cutoff = Fraction(3, 2)
    # |n_i| <= sqrt(cutoff * G_ii) bounds every vector of dual norm <= cutoff
    box = max(math.isqrt(int(cutoff * gram[i][i]) + 1) + 1 for i in range(3))
    want = brute_counts(lat.dual_gram, cutoff, box)
    got = {s.q: len(s.vectors) for s in shells_up_to(lat, cutoff)}
    assert got == dict(want)


@settings(max_examples=15, deadline=None)
@given(positive_grams())
def test_shells_closed_under_negation(gram):
    for s in shells_up_to(Lattice(gram), 3):
        vecs = set(s.vectors)
        assert {tuple(-x for x in v) for v in vecs} == vecs


def test_rejects_indefinite_gram():
    with pytest.raises(ValueError):
        Lattice(((1, 2), (2, 1)))
    with pytest.raises(ValueError):
        shells_up_to(standard_lattice(2), -1)


def test_fixed_dual_vectors():
    z4 = standard_lattice(4)
    shell = shells_up_to(z4, 1)[1]
    assert fixed_dual_vectors(z4, identity_isometry(z4.gram), shell) == list(shell.vectors)
    g = AffineIsometry(linalg.diag([-1, -1, 1, 1]), (0,) * 4, z4.gram)
    assert sorted(fixed_dual_vectors(z4, g, shell)) == sorted(
        [(0, 0, 1, 0), (0, 0, -1, 0), (0, 0, 0, 1), (0, 0, 0, -1)])
    minus = AffineIsometry(linalg.diag([-1] * 4), (0,) * 4, z4.gram)
    shells = shells_up_to(z4, 2)
    assert fixed_dual_vectors(z4, minus, shells[0]) == [(0, 0, 0, 0)]
    assert all(not fixed_dual_vectors(z4, minus, s) for s in shells[1:])


def test_fixed_vectors_commute_with_holonomy():
    # a vector fixed by g stays fixed after applying any element commuting with g
    z4 = standard_lattice(4)
    g = AffineIsometry(linalg.diag([-1, -1, 1, 1]), (0,) * 4, z4.gram)
    swap = ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
    for shell in shells_up_to(z4, 4):
        fixed = set(fixed_dual_vectors(z4, g, shell))
        assert {linalg.matvec(linalg.transpose(swap), v) for v in fixed} == fixed


def test_sublattice_covolume():
    z4 = standard_lattice(4)
    assert sublattice_covolume(z4, ((1, 0), (0, 1), (0, 0), (0, 0))) == (1, 1.0)
    det, vol = sublattice_covolume(standard_lattice(2), ((1,), (1,)))
    assert det == 2 and vol == pytest.approx(math.sqrt(2), abs=1e-15)
    assert sublattice_covolume(HEX, ((1,), (0,)))[0] == 1
    with pytest.raises(ValueError):
        sublattice_covolume(standard_lattice(2), ((1, 2), (1, 2)))
