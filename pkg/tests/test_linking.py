import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import odd_homogeneous_class
from qhsbench.linalg import IntMatrix
from qhsbench.linking import (CapacityError, Linking, LinkingError, cyclic, from_framing_matrix,
                              is_isomorphic, miranda_generator, multiple, nu_p, orthogonal_sum,
                              smallest_nonresidue, two_equivalence_class, wall_generator)


def test_construction_checks():
    with pytest.raises(LinkingError):
        Linking((3,), ((Fraction(1, 2),),))
    with pytest.raises(LinkingError):
        Linking((2, 2), ((0, Fraction(1, 2)), (0, 0)))
    assert cyclic(5, Fraction(7, 5)).gram == ((Fraction(2, 5),),)


def test_wall_generators():
    assert wall_generator("A", 3, 1).gram == ((Fraction(1, 3),),)
    assert wall_generator("B", 3, 1).gram == ((Fraction(2, 3),),)
    assert wall_generator("B", 5, 1).gram == ((Fraction(2, 5),),)
    assert smallest_nonresidue(9) == 2
    with pytest.raises(LinkingError):
        wall_generator("A", 2, 1)
    with pytest.raises(LinkingError):
        wall_generator("A", 4, 1)


@pytest.mark.parametrize("kind", "ABCDEF")
@pytest.mark.parametrize("k", [1, 2, 3])
def test_two_adic_generators_nondegenerate(kind, k):
    assert miranda_generator(kind, k).is_nondegenerate()


@pytest.mark.parametrize("p,k", [(3, 1), (3, 2), (5, 1), (7, 1)])
def test_generators_nondegenerate(p, k):
    assert wall_generator("A", p, k).is_nondegenerate()
    assert wall_generator("B", p, k).is_nondegenerate()


def test_degenerate_detected():
    assert not Linking((2, 2), ((0, 0), (0, Fraction(1, 2)))).is_nondegenerate()


def test_normalize_splits_primary_parts():
    n = cyclic(6, Fraction(1, 6)).normalize()
    assert n.orders == (2, 3)
    assert n.gram == ((Fraction(1, 2), 0), (0, Fraction(2, 3)))
    assert is_isomorphic(n, cyclic(6, Fraction(1, 6)))


def test_nu_p_and_classes():
    a = wall_generator("A", 3, 2)
    assert nu_p(a, 3) == 2 and nu_p(a, 2) == 0
    assert two_equivalence_class(a) == two_equivalence_class(multiple(wall_generator("A", 3, 1), 2))
    assert two_equivalence_class(Linking((), ())).valuations == ()


def test_class_is_additive():
    rng = random.Random(0)
    gens = [wall_generator("A", 3, 1), wall_generator("B", 5, 1), miranda_generator("E", 1),
            miranda_generator("C", 2)]
    for _ in range(20):
        a, b = rng.choice(gens), rng.choice(gens)
        assert two_equivalence_class(orthogonal_sum(a, b)) == two_equivalence_class(a) + two_equivalence_class(b)


def test_isomorphism_examples():
    a3, b3 = wall_generator("A", 3, 1), wall_generator("B", 3, 1)
    assert is_isomorphic(a3, a3)
    assert not is_isomorphic(a3, b3)
    assert is_isomorphic(multiple(a3, 2), multiple(b3, 2))
    assert not is_isomorphic(a3, wall_generator("A", 5, 1))


def test_isomorphism_capacity():
    big = cyclic(2 ** 11, Fraction(1, 2 ** 11))
    with pytest.raises(CapacityError):
        is_isomorphic(big, big)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7, 9, 25]), st.integers(1, 24), st.integers(1, 24))
def test_cyclic_isomorphism_matches_unit_squares(q, a, b):
    if gcd(a, q) != 1 or gcd(b, q) != 1:
        return
    x, y = cyclic(q, Fraction(a, q)), cyclic(q, Fraction(b, q))
    # on Z_q: isomorphic iff b = u^2 a (mod q) for some unit u
    expected = any((u * u * a - b) % q == 0 for u in range(1, q) if gcd(u, q) == 1)
    assert is_isomorphic(x, y) == expected


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.lists(st.integers(1, 6), min_size=2, max_size=2),
       st.lists(st.integers(1, 6), min_size=2, max_size=2))
def test_rank_two_odd_forms_match_discriminant(p, xs, ys):
    if any(v % p == 0 for v in xs + ys):
        return
    a = orthogonal_sum(cyclic(p, Fraction(xs[0], p)), cyclic(p, Fraction(xs[1], p)))
    b = orthogonal_sum(cyclic(p, Fraction(ys[0], p)), cyclic(p, Fraction(ys[1], p)))
    assert is_isomorphic(a, b) == (odd_homogeneous_class(xs, p) == odd_homogeneous_class(ys, p))


def test_two_adic_relations_valuations():
    for k in (1, 2):
        A, B, C, D, E, F = (miranda_generator(x, k) for x in "ABCDEF")
        pairs = [(orthogonal_sum(A, E), orthogonal_sum(multiple(A, 2), B)),
                 (multiple(E, 2), multiple(F, 2)),
                 (multiple(A, 2), multiple(C, 2)),
                 (multiple(B, 2), multiple(D, 2))]
        for lhs, rhs in pairs:
            assert nu_p(lhs, 2) == nu_p(rhs, 2)


def test_from_framing_lens_space():
    for p in (2, 3, 5, 7):
        l = from_framing_matrix(IntMatrix([[p]]))
        assert l.orders == (p,)
        assert l.gram == ((1 - Fraction(1, p),),)
    assert from_framing_matrix(IntMatrix([[0, 1], [1, 0]])).orders == ()
    with pytest.raises(LinkingError):
        from_framing_matrix(IntMatrix([[2, 1], [1, 2], [0, 0]]))
    with pytest.raises(LinkingError):
        from_framing_matrix(IntMatrix([[1, 1], [1, 1]]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-12, 12).filter(lambda x: x != 0), min_size=1, max_size=3))
def test_from_framing_diagonal_valuations(diag):
    l = from_framing_matrix(IntMatrix.diag(diag))
    det = 1
    for x in diag:
        det *= abs(x)
    assert l.size == det
    for q in (2, 3, 5, 7, 11):
        v = 0
        while det % q ** (v + 1) == 0:
            v += 1
        assert nu_p(l, q) == v


def test_from_framing_invariant_under_basis_change():
    rng = random.Random(3)
    for _ in range(20):
        a, b, c = rng.randint(-6, 6), rng.randint(-3, 3), rng.randint(-6, 6)
        L = IntMatrix([[a, b], [b, c]])
        if a * c - b * b == 0 or abs(a * c - b * b) > 200:
            continue
        t = rng.randint(-3, 3)
        P = IntMatrix([[1, t], [0, 1]])
        L2 = P.transpose() @ L @ P
        assert is_isomorphic(from_framing_matrix(L), from_framing_matrix(L2))


def test_json_roundtrip():
    l = miranda_generator("F", 2)
    assert Linking.from_json(l.to_json()) == l
