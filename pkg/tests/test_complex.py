import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtdasim.complex import (
    Simplex,
    SimplexSet,
    critical_scales,
    enumerate_k_simplices,
    pairwise_distances,
    simplex_diameters,
    simplex_proportion,
    validate_distance_matrix,
)
from qtdasim.errors import InvalidInputError

TRIANGLE = [[0, 3, 4], [3, 0, 5], [4, 5, 0]]


def random_matrix(seed, n):
    rng = np.random.default_rng(seed)
    d = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    d[iu] = rng.uniform(size=iu[0].size)
    return validate_distance_matrix(d + d.T)


def test_validate_accepts_and_freezes():
    D = validate_distance_matrix(TRIANGLE)
    assert D.n == 3
    with pytest.raises(ValueError):
        D.d[0, 1] = 7.0


@pytest.mark.parametrize(
    "raw",
    [
        [[0, 3], [3, 1]],
        [[0, -1], [-1, 0]],
        [[0, 1], [2, 0]],
        [[0, math.nan], [math.nan, 0]],
        [[0, 1, 2], [1, 0]],
        [],
        [[0, 1]],
    ],
)
def test_validate_rejects(raw):
    with pytest.raises(InvalidInputError):
        validate_distance_matrix(raw)


def test_validate_symmetrises_within_tolerance():
    D = validate_distance_matrix([[0, 1.0], [1.0 + 1e-13, 0]])
    assert D.d[0, 1] == D.d[1, 0]


def test_pairwise_distances_right_triangle():
    D = pairwise_distances([[0, 0], [3, 0], [3, 4]], "euclidean")
    np.testing.assert_allclose(D.d, [[0, 3, 5], [3, 0, 4], [5, 4, 0]])


def test_pairwise_distances_other_metrics():
    pts = [[0, 0], [3, 4]]
    assert pairwise_distances(pts, "manhattan").d[0, 1] == 7
    assert pairwise_distances(pts, "chebyshev").d[0, 1] == 4


@pytest.mark.parametrize("pts, metric", [([[0, 0], [1]], "euclidean"), ([[0.0]], "cosine"), ([], "euclidean")])
def test_pairwise_distances_rejects(pts, metric):
    with pytest.raises(InvalidInputError):
        pairwise_distances(pts, metric)


def test_simplex_ket_encoding():
    s = Simplex.from_vertices([0, 1], 3)
    assert s.bits == 0b011
    assert str(s) == "|110>"
    assert Simplex.from_ket("|101>").vertices == (0, 2)
    assert Simplex.from_ket("011").dimension == 1


def test_simplex_faces_are_ordered_by_omitted_vertex():
    s = Simplex.from_vertices([0, 2, 3], 4)
    assert [(l, f.vertices) for l, f in s.faces()] == [(0, (2, 3)), (1, (0, 3)), (2, (0, 2))]
    assert Simplex.from_vertices([1], 4).faces() == []


@pytest.mark.parametrize("bits, n", [(0, 3), (8, 3)])
def test_simplex_rejects_bad_bits(bits, n):
    with pytest.raises(InvalidInputError):
        Simplex(bits, n)


def test_simplex_set_requires_canonical_members():
    a, b = Simplex.from_vertices([0, 1], 3), Simplex.from_vertices([0, 2], 3)
    with pytest.raises(InvalidInputError):
        SimplexSet(1, 1.0, 3, (b, a))
    with pytest.raises(InvalidInputError):
        SimplexSet(0, 1.0, 3, (a,))
    s = SimplexSet.from_simplices([b, a, b], 1, 3)
    assert [x.bits for x in s] == [3, 5]
    assert s.index == {3: 0, 5: 1}


def test_three_point_simplices_at_both_scales():
    D = validate_distance_matrix(TRIANGLE)
    assert [str(s) for s in enumerate_k_simplices(D, 3.5, 1)] == ["|110>"]
    assert [str(s) for s in enumerate_k_simplices(D, 4.5, 1)] == ["|110>", "|101>"]
    assert len(enumerate_k_simplices(D, 4.5, 2)) == 0
    assert len(enumerate_k_simplices(D, 5.0, 2)) == 1


def test_edge_test_is_inclusive():
    D = validate_distance_matrix(TRIANGLE)
    assert len(enumerate_k_simplices(D, 3.0, 1)) == 1
    assert len(enumerate_k_simplices(D, np.nextafter(3.0, 0), 1)) == 0


def test_enumerate_rejects_bad_arguments():
    D = validate_distance_matrix(TRIANGLE)
    with pytest.raises(InvalidInputError):
        enumerate_k_simplices(D, 1.0, 3)
    with pytest.raises(InvalidInputError):
        enumerate_k_simplices(D, -1.0, 1)


def test_critical_scales_and_proportion():
    D = validate_distance_matrix(TRIANGLE)
    assert critical_scales(D) == [3.0, 4.0, 5.0]
    assert simplex_proportion(D, 4.5, 1) == pytest.approx(2 / 3)
    assert simplex_proportion(D, 0.0, 0) == 1.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7), st.floats(0, 1))
def test_complex_is_downward_closed(seed, n, eps):
    D = random_matrix(seed, n)
    for k in range(1, n):
        lower = enumerate_k_simplices(D, eps, k - 1)
        for s in enumerate_k_simplices(D, eps, k):
            assert all(f in lower for _, f in s.faces())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7), st.integers(0, 3))
def test_filtration_is_nested(seed, n, k):
    k = min(k, n - 1)
    D = random_matrix(seed, n)
    scales = sorted(critical_scales(D))
    prev = set()
    for eps in scales:
        cur = {s.bits for s in enumerate_k_simplices(D, eps, k)}
        assert prev <= cur
        prev = cur


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7), st.integers(0, 3), st.floats(0, 1))
def test_diameters_match_clique_test(seed, n, k, eps):
    k = min(k, n - 1)
    D = random_matrix(seed, n)
    diam = simplex_diameters(D.d, k)
    combos = list(itertools.combinations(range(n), k + 1))
    found = {Simplex.from_vertices(c, n).bits for c, x in zip(combos, diam) if x <= eps}
    assert found == {s.bits for s in enumerate_k_simplices(D, eps, k)}
