from __future__ import annotations

import itertools

import pytest

from conftest import D4, Q8, Q8_IJK, S3, S4, equip
from hurwitzkit import enumeration
from hurwitzkit.enumeration import enumerate_classes, enumerate_tuples, move_generators
from hurwitzkit.facsemi import alpha, chi_coefficients, same_class
from oracles import closure, conj_class, count_classes, from_cycles


def oracle(degree, gens, reps, tau, generating=True):
    G = closure([from_cycles(g, degree) for g in gens], degree)
    classes = [conj_class(from_cycles(r, degree), G) for r in reps]
    return count_classes(classes, tau, degree, generating, G)


CASES = [
    (S3, ["(1 2)"], (4,)),
    (S3, ["(1 2)"], (5,)),
    (S3, ["(1 2)"], (6,)),
    (S4, ["(1 2)"], (4,)),
    (S4, ["(1 2)"], (6,)),
    (S4, ["(1 2)", "(1 2 3)"], (2, 3)),
    (S4, ["(1 2)", "(1 2 3)"], (4, 2)),
    (D4, ["(1 2 3 4)", "(1 3)"], (2, 2)),
    (D4, ["(1 2 3 4)", "(1 3)"], (4, 2)),
    (Q8, Q8_IJK, (2, 2, 0)),
    (Q8, Q8_IJK, (1, 1, 2)),
]


@pytest.mark.parametrize("grp,reps,tau", CASES)
@pytest.mark.parametrize("generating", [True, False])
def test_counts_match_brute_force(grp, reps, tau, generating):
    eg = equip(*grp, reps)
    got = enumerate_classes(eg, tau, 0, generating)
    assert got.count == oracle(*grp, reps, tau, generating)


@pytest.mark.parametrize("width", [1, 2, 3])
@pytest.mark.parametrize("grp,reps,tau", CASES[3:])
def test_multiword_codes_agree(monkeypatch, grp, reps, tau, width):
    eg = equip(*grp, reps)
    packed = enumerate_classes(eg, tau, 0, False)
    monkeypatch.setattr(enumeration, "MAX_WORD_COLUMNS", width)
    split = enumerate_classes(eg, tau, 0, False)
    assert (split.count, split.representatives, split.orbit_sizes) == (packed.count, packed.representatives, packed.orbit_sizes)


def test_clebsch_hurwitz_values(s3):
    counts = {k: enumerate_classes(s3, (k,)).count for k in range(2, 11)}
    assert counts == {2: 0, 3: 0, 4: 1, 5: 0, 6: 1, 7: 0, 8: 1, 9: 0, 10: 1}


def test_tuples_have_the_product(s4_mixed):
    G = s4_mixed.group
    target = G.parse_element("(1 2)(3 4)")
    rows = enumerate_tuples(s4_mixed, (2, 1), target)
    assert len(rows) > 0
    assert all(G.product(r) == target for r in rows.tolist())
    # all sorted-pattern tuples with that product, by direct listing
    c0, c1 = (c.members for c in s4_mixed.classes)
    expect = sum(1 for a, b, c in itertools.product(c0, c0, c1) if G.product([a, b, c]) == target)
    assert len(rows) == expect
    listed = [tuple(r) for r in rows.tolist()]
    assert listed == sorted(listed)


def test_representatives_are_class_minima(s4):
    res = enumerate_classes(s4, (6,), 0, False)
    assert sum(res.orbit_sizes) == res.n_tuples
    for rep in res.representatives:
        assert alpha(s4, rep) == 0
    # distinct representatives lie in distinct classes
    reps = res.representatives
    for a, b in itertools.combinations(reps, 2):
        assert not same_class(s4, a, b)


def test_threads_agree(s4):
    one = enumerate_classes(s4, (6,), 0, True)
    two = enumerate_classes(s4, (6,), 0, True, threads=2)
    assert one == two


def test_cap(s4):
    res = enumerate_classes(s4, (8,), cap_tuples=1000)
    assert res.capped and res.count is None
    with pytest.raises(ValueError):
        int(res)


def test_bad_tau(s4):
    with pytest.raises(ValueError):
        enumerate_classes(s4, (1, 1))
    with pytest.raises(ValueError):
        enumerate_classes(s4, (0,))


def test_move_generators_shape():
    gens = move_generators([0, 0, 1])
    assert ("s", 0) in gens and ("A", 0, 2) in gens and ("A", 1, 2) in gens and len(gens) == 3


def test_chi_single_class(s3):
    coeffs = chi_coefficients(s3, 6)
    assert [coeffs[(k,)].count for k in range(1, 7)] == [0, 0, 0, 1, 0, 1]


def test_single_tuple_shortcut():
    eg = equip(5, ["(1 2 3 4 5)"], ["(1 2 3 4 5)", "(1 3 5 2 4)"])
    res = enumerate_classes(eg, (5, 5))
    assert res.count == 1 and res.n_tuples == 1
