import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from annular_linfty.errors import ContractionInvalid, NotADifferential
from annular_linfty.f2 import F2Matrix
from annular_linfty.homology import (ModuleContraction, contract_onto_homology, homology_dimension,
                                     identity_contraction, image_basis, inverse, kernel_basis, rank)

from factory import random_graded_complex, random_invertible


def dense_rank(a: np.ndarray) -> int:
    """Plain row reduction on a dense 0/1 array, used as an oracle."""
    a = a.copy() % 2
    r = 0
    for c in range(a.shape[1]):
        piv = next((i for i in range(r, a.shape[0]) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


matrices = st.integers(1, 9).flatmap(lambda r: st.integers(1, 9).flatmap(
    lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c),
                       min_size=r, max_size=r))).map(np.array)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_rank_matches_dense_oracle(a):
    assert rank(F2Matrix.from_dense(a)) == dense_rank(a)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_kernel_and_image(a):
    m = F2Matrix.from_dense(a)
    ker = kernel_basis(m)
    assert len(ker) == m.ncols - rank(m)
    for support in ker:
        x = F2Matrix.from_entries(m.ncols, 1, [(s, 0) for s in support])
        assert (m @ x).is_zero()
    cols = image_basis(m)
    assert len(cols) == rank(m)
    assert rank(m.submatrix(list(range(m.nrows)), cols)) == len(cols)


def test_homology_dimension_of_short_complex():
    d_in = F2Matrix.from_entries(2, 1, [(0, 0)])
    d_out = F2Matrix.from_entries(1, 2, [(0, 0)])
    assert homology_dimension(d_in, d_out) == 0


def test_inverse():
    rng = random.Random(3)
    for n in range(1, 8):
        m = random_invertible(n, rng)
        assert m @ inverse(m) == F2Matrix.identity(n)
    with pytest.raises(ValueError):
        inverse(F2Matrix.zeros(2, 2))


def test_identity_contraction_on_zero_differential():
    c = identity_contraction(3)
    assert not c.failures()


def test_not_a_differential():
    d = F2Matrix.from_entries(2, 2, [(0, 0)])
    with pytest.raises(NotADifferential):
        contract_onto_homology(d)


def test_grading_checked():
    d = F2Matrix.from_entries(2, 2, [(1, 0)])
    with pytest.raises(ContractionInvalid):
        contract_onto_homology(d, [(0,), (2,)])


def test_failures_named():
    d = F2Matrix.from_entries(2, 2, [(1, 0)])
    c = contract_onto_homology(d)
    bad = ModuleContraction(d, c.i, c.q, F2Matrix.zeros(2, 2))
    assert "Id - i q = T d + d T" in bad.failures()
    with pytest.raises(ContractionInvalid):
        bad.verify()


@pytest.mark.parametrize("pivot", ["canonical", "reverse"])
def test_random_graded_complexes(pivot):
    rng = random.Random(20)
    for _ in range(200):
        d, grads, expected = random_graded_complex(rng)
        c = contract_onto_homology(d, grads, pivot=pivot)
        assert c.failures() == []
        got = {}
        for b in c.small_basis:
            got[grads[b]] = got.get(grads[b], 0) + 1
        assert got == expected
        assert c.small_dim == d.ncols - 2 * rank(d)


def test_shuffled_basis_gives_same_homology():
    rng = random.Random(5)
    for _ in range(50):
        d, grads, expected = random_graded_complex(rng, 24)
        perm = list(range(d.ncols))
        rng.shuffle(perm)
        shuffled = F2Matrix.from_entries(d.nrows, d.ncols, [(perm[r], perm[c]) for r, c in d.entries()])
        g2 = [None] * len(grads)
        for old, new in enumerate(perm):
            g2[new] = grads[old]
        c = contract_onto_homology(shuffled, g2)
        assert c.failures() == []
        assert sorted(g2[b] for b in c.small_basis) == sorted(
            g for g, k in expected.items() for _ in range(k))


def test_canonical_pivot_is_deterministic():
    rng = random.Random(9)
    d, grads, _ = random_graded_complex(rng, 40)
    a = contract_onto_homology(d, grads)
    b = contract_onto_homology(d, grads)
    assert a.i == b.i and a.q == b.q and a.T == b.T and a.small_basis == b.small_basis
