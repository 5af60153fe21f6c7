from itertools import combinations_with_replacement
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhsbench import jacobi
from qhsbench.augmented import (AugmentedDiagram, PrimeSupport, dim_augmented, enumerate_augmented,
                                multiset_count)
from qhsbench.jacobi import DiagramVector, canonicalize, connected_classes, theta

EMPTY = canonicalize(jacobi.JacobiDiagram((), ()))[0]


def theta_plus_degree_four():
    big = next(cd for cd in connected_classes(8) if not cd.self_negating)
    (key,) = jacobi.disjoint_union(DiagramVector.of(theta()), DiagramVector.basis(big)).terms
    return jacobi.CanonicalDiagram.from_key(key)


def test_degree_examples():
    assert AugmentedDiagram(theta_plus_degree_four(), (5, 2, 5)).degree == 13
    assert AugmentedDiagram(EMPTY, (2,)).degree == 1
    assert AugmentedDiagram(canonicalize(theta())[0], ()).degree == 2


def test_weights_must_be_prime():
    with pytest.raises(ValueError):
        AugmentedDiagram(EMPTY, (4,))
    with pytest.raises(ValueError):
        PrimeSupport((2, 9))
    with pytest.raises(ValueError):
        PrimeSupport((3, 3))
    assert PrimeSupport.parse("5,2,3").primes == (2, 3, 5)
    assert PrimeSupport.parse("").primes == ()


def test_dim_examples():
    p = PrimeSupport((2, 3, 5))
    assert dim_augmented(0, p) == 1
    assert dim_augmented(0, PrimeSupport(())) == 1
    assert dim_augmented(1, p) == 3
    assert dim_augmented(2, p) == 1 + comb(4, 2)


def test_enumerate_examples():
    (only,) = enumerate_augmented(1, PrimeSupport((2,)))
    assert only.weights == (2,) and only.jacobi_part.vertex_count == 0
    assert len(enumerate_augmented(2, PrimeSupport((2, 3)))) == 4


@pytest.mark.parametrize("n", range(0, 7))
def test_enumeration_length_and_degrees(n):
    p = PrimeSupport((2, 3, 5))
    items = enumerate_augmented(n, p)
    assert len(items) == dim_augmented(n, p)
    assert len(set(items)) == len(items)
    assert all(a.degree == n for a in items)


@pytest.mark.parametrize("n", range(0, 9))
def test_empty_support_reduces_to_diagram_space(n):
    expected = jacobi.dim(n // 2) if n % 2 == 0 else 0
    assert dim_augmented(n, PrimeSupport(())) == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 8), st.integers(0, 4), st.integers(0, 4))
def test_monotone_in_support_size(n, a, b):
    primes = (2, 3, 5, 7, 11)
    small, large = sorted((a, b))
    assert dim_augmented(n, PrimeSupport(primes[:small])) <= dim_augmented(n, PrimeSupport(primes[:large]))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6))
def test_multiset_count_matches_brute_force(m, r):
    assert multiset_count(m, r) == sum(1 for _ in combinations_with_replacement(range(m), r))


def test_json_roundtrip():
    a = AugmentedDiagram(canonicalize(theta())[0], (2, 5, 5))
    assert AugmentedDiagram.from_json(a.to_json()) == a
    assert a.to_json()["weights"] == [2, 5, 5]
