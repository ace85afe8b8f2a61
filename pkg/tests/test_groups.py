from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from conftest import A4, D4, Q8, S3, S4, group
from hurwitzkit.errors import CapExceeded, InvalidPermutation, ParseError
from hurwitzkit.groups import (center, centralizer, close_generators, commutator, commutator_subgroup,
                               conjugacy_class, conjugacy_classes, format_cycles, group_from_text,
                               is_generating, normal_closure, parse_cycles, subgroup_generated)

CASES = {"S3": S3, "S4": S4, "A4": A4, "D4": D4, "Q8": Q8, "Z6": (6, ["(1 2 3 4 5 6)"]),
         "S5": (5, ["(1 2)", "(1 2 3 4 5)"])}


def sympy_group(degree, gens):
    return PermutationGroup([Permutation(list(parse_cycles(g, degree))) for g in gens])


def test_parse_composes_left_to_right():
    # (1 2) then (1 3): 1 -> 2 -> 2, 2 -> 1 -> 3, 3 -> 3 -> 1
    assert parse_cycles("(1 2)(1 3)", 3) == (1, 2, 0)
    assert parse_cycles("()", 3) == (0, 1, 2)
    assert parse_cycles("identity", 2) == (0, 1)


@pytest.mark.parametrize("bad", ["(1 2", "(1 a)", "(0 1)"])
def test_parse_rejects(bad):
    with pytest.raises(ParseError):
        parse_cycles(bad, 3)


@pytest.mark.parametrize("bad", ["(1 1)", "(1 5)"])
def test_parse_not_a_permutation(bad):
    with pytest.raises(InvalidPermutation):
        parse_cycles(bad, 3)


@given(st.permutations(list(range(7))))
def test_format_round_trip(img):
    assert parse_cycles(format_cycles(img), 7) == tuple(img)


def test_close_generators_small():
    assert group(*S3).order == 6
    assert close_generators([]).order == 1


def test_seven_point_generators():
    # these three permutations all fix the point 8
    G = group(8, "(1 2)(3 4 5)", "(1 2 3)(4 5 6 7)", "(1 2 3 4 5 6 7)")
    assert G.order == 5040
    assert group(8, "(1 2)", "(1 2 3 4 5 6 7 8)").order == 40320


def test_elements_bfs_from_identity():
    G = group(*S4)
    assert G.element(0) == (0, 1, 2, 3)
    # generators come right after the identity
    assert {G.format(1), G.format(2)} == {"(1 2)", "(1 2 3 4)"}


def test_cap_and_invalid():
    with pytest.raises(CapExceeded):
        close_generators([parse_cycles("(1 2)", 5), parse_cycles("(1 2 3 4 5)", 5)], cap=50)
    with pytest.raises(InvalidPermutation):
        close_generators([(0, 0, 1)])


def test_group_text():
    G = group_from_text("# a comment\ndegree: 4\n(1 2 3)  # trailing\n(2 3 4)\n")
    assert G.order == 12 and G.degree == 4
    with pytest.raises(ParseError):
        group_from_text("degree: x\n(1 2)")


@pytest.mark.parametrize("name", sorted(CASES))
def test_structure_against_sympy(name):
    degree, gens = CASES[name]
    G, H = group(degree, *gens), sympy_group(degree, gens)
    assert G.order == H.order()
    assert sorted(len(c.members) for c in conjugacy_classes(G)) == sorted(len(c) for c in H.conjugacy_classes())
    assert center(G).order == H.center().order()
    assert commutator_subgroup(G).order == H.derived_subgroup().order()
    assert math.factorial(degree) % G.order == 0


@pytest.mark.parametrize("name", sorted(CASES))
def test_conjugacy_classes_partition(name):
    G = group(*CASES[name])
    classes = conjugacy_classes(G)
    seen = [g for c in classes for g in c.members]
    assert sorted(seen) == list(range(G.order))
    for c in classes:
        assert c.representative == min(c.members)
        assert conjugacy_class(G, c.members[-1]).members == c.members


def test_conj_convention():
    G = group(*S3)
    a, b = G.parse_element("(1 2)"), G.parse_element("(1 3)")
    assert G.format(G.conj(a, b)) == "(2 3)"
    assert G.conj(a, b) == G.product([G.inv(b), a, b])


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_group_axioms(data):
    G = group(*S4)
    x, y, z = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))
    assert G.mul(x, G.inv(x)) == 0 == G.mul(G.inv(x), x)
    assert G.mul(x, 0) == x
    assert G.power(x, G.element_order(x)) == 0


def test_product_convention():
    G = group(*S3)
    a, b = G.parse_element("(1 2)"), G.parse_element("(2 3)")
    # first a, then b: 1 -> 2 -> 3
    assert G.element(G.mul(a, b))[0] == 2


def test_subgroups():
    G = group(*S4)
    t = G.parse_element("(1 2)")
    assert subgroup_generated(G, [t]).order == 2
    assert is_generating(G, [t, G.parse_element("(2 3 4)")])
    assert not is_generating(G, [t, G.parse_element("(3 4)")])
    assert normal_closure(G, [G.parse_element("(1 2)(3 4)")]).order == 4
    assert centralizer(G, [t]).order == 4
    assert commutator(G, t, G.parse_element("(2 3)")) == G.product(
        [G.inv(t), G.inv(G.parse_element("(2 3)")), t, G.parse_element("(2 3)")])


def test_q8_center():
    G = group(*Q8)
    assert center(G).order == 2
    assert sorted(len(c.members) for c in conjugacy_classes(G)) == [1, 1, 2, 2, 2]
