import itertools

import pytest
from hypothesis import given, settings, strategies as st

from pmdsarray.gf import (
    DivisionByZero,
    FieldElement,
    FieldMismatch,
    FieldSpec,
    IncompatibleTower,
    NoSuchSubgroup,
    NotPrime,
    ReducibleModulus,
    divisors,
    embedding,
    field_new,
    find_subgroup,
    independent_over_subfield,
    is_prime,
    prime_factors,
    smallest_irreducible,
    subfield_basis,
    three_wise_independent,
)

FIELDS = [(2, 1), (13, 1), (2, 4), (3, 2), (5, 2), (11, 3), (2, 8)]


def test_number_theory_helpers():
    assert [x for x in range(20) if is_prime(x)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_factors(65535) == [3, 5, 17, 257]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_constructor_errors():
    with pytest.raises(NotPrime):
        FieldSpec(15)
    with pytest.raises(ReducibleModulus):
        FieldSpec(2, 2, [1, 0, 1])  # x^2 + 1 = (x + 1)^2
    with pytest.raises(ReducibleModulus):
        FieldSpec(3, 2, [0, 0, 1])


def test_gf256_standard_modulus():
    F = field_new(2, 8, [1, 1, 0, 1, 1, 0, 0, 0, 1])  # x^8 + x^4 + x^3 + x + 1
    assert F.mul(0x53, 0xCA) == 0x01
    assert F.mul(0x57, 0x83) == 0xC1


def test_smallest_irreducible():
    assert smallest_irreducible(2, 2) == [1, 1, 1]
    assert smallest_irreducible(11, 3) == [4, 1, 0, 1]


@pytest.mark.parametrize("p,m", FIELDS)
def test_tables_match_schoolbook(p, m):
    F = field_new(p, m)
    elems = range(F.q) if F.q <= 64 else range(0, F.q, max(1, F.q // 61))
    for a, b in itertools.product(elems, repeat=2):
        assert F.mul(a, b) == F.mul_reference(a, b)
    assert F.order(F.primitive) == F.q - 1


@pytest.mark.parametrize("p,m", FIELDS)
def test_field_axioms_exhaustive_small(p, m):
    F = field_new(p, m)
    sample = list(range(min(F.q, 40)))
    for a in sample:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, F.q - 1) == 1
            assert F.pow(a, -1) == F.inv(a)
        for b in sample:
            assert F.add(a, b) == F.add(b, a)
            assert F.sub(F.add(a, b), b) == a
            assert F.add(a, b) == F.from_coeffs(
                [(x + y) % p for x, y in zip(F.to_coeffs(a), F.to_coeffs(b))])


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_distributive_and_associative(pm, data):
    F = field_new(*pm)
    a, b, c = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))


def test_division_by_zero():
    F = field_new(13)
    with pytest.raises(DivisionByZero):
        F.inv(0)
    with pytest.raises(ZeroDivisionError):
        F.div(3, 0)


def test_field_element_wrapper():
    F = field_new(13)
    a, b = F(5), F(12)
    assert a * b == 8
    assert (a + b).value == 4
    assert a / a == 1
    assert a ** 4 == 1
    assert -a == 8
    assert a.inv() * a == 1
    with pytest.raises(FieldMismatch):
        _ = a + field_new(11)(3)
    assert isinstance(a, FieldElement) and int(a) == 5


def test_axpy_and_dot():
    F = field_new(11, 3)
    dst = [1, 2, 3, 4]
    src = [5, 6, 7, 8]
    expect = [F.sub(d, F.mul(9, s)) for d, s in zip(dst, src)]
    F.axpy(dst, src, 9)
    assert dst == expect
    assert F.dot([1, 2], [3, 4]) == F.add(3, F.mul(2, 4))


def test_serialisation_round_trip():
    F = field_new(11, 3)
    assert FieldSpec.from_dict(F.to_dict()) == F


def test_find_subgroup_gf13():
    G = find_subgroup(field_new(13), 4, 2)
    assert G.generator == 5 and G.order == 4
    assert G.elements() == [1, 5, 12, 8]
    assert G.coset_reps == (1, 2)
    assert (12 // G.order) == 3
    G.check()


def test_find_subgroup_picks_smallest_order():
    G = find_subgroup(field_new(11), 4, 2)
    assert G.order == 5
    with pytest.raises(NoSuchSubgroup):
        find_subgroup(field_new(7), 4, 2)


@pytest.mark.parametrize("q,min_order,cosets", [(13, 2, 2), (17, 8, 2), (61, 8, 4), (1331, 10, 3)])
def test_subgroup_invariants(q, min_order, cosets):
    F = field_new(11, 3) if q == 1331 else field_new(q)
    G = find_subgroup(F, min_order, cosets)
    assert G.order >= min_order and (F.q - 1) // G.order >= cosets
    elems = G.elements()
    assert len(set(elems)) == G.order
    assert all(F.pow(x, G.order) == 1 for x in elems)
    assert len(G.coset_reps) == cosets
    for a, b in itertools.combinations(G.coset_reps, 2):
        assert not G.same_coset(a, b)


def test_tower_embedding_is_homomorphism():
    small, big = field_new(2, 2), field_new(2, 6)
    emb = embedding(small, big)
    for a, b in itertools.product(range(4), repeat=2):
        assert emb(small.mul(a, b)) == big.mul(emb(a), emb(b))
        assert emb(small.add(a, b)) == big.add(emb(a), emb(b))
    with pytest.raises(IncompatibleTower):
        embedding(field_new(2, 2), field_new(2, 3))


def test_subfield_basis_spans():
    big, small = field_new(11, 3), field_new(11)
    emb, basis = subfield_basis(big, small)
    assert independent_over_subfield(basis, emb)
    # every element is a unique GF(11) combination of the basis
    seen = {big.add(big.add(a, big.mul(b, basis[1])), big.mul(c, basis[2]))
            for a in range(11) for b in range(11) for c in range(11)}
    assert len(seen) == big.q


def test_three_wise_independence():
    big, small = field_new(11, 3), field_new(11)
    emb, (v0, v1, v2) = subfield_basis(big, small)
    theta = [big.add(v0, big.add(big.mul(i, v1), big.mul(i * i % 11, v2))) for i in range(5)]
    assert three_wise_independent(theta, emb)
    collinear = [theta[0], theta[1], big.add(theta[0], big.mul(3, theta[1]))]
    assert not three_wise_independent(collinear, emb)
    assert not three_wise_independent([theta[0], big.mul(7, theta[0])], emb)
