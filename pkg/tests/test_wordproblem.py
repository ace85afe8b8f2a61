from __future__ import annotations

import random
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.combinatorics.fp_groups import FpGroup
from sympy.combinatorics.free_groups import free_group

from conftest import A4, D4, Q8, Q8_IJK, S3, S4, equip
from hurwitzkit.cgraph import CGraph, build_cgraph, prune_free_factors
from hurwitzkit.errors import CapExceeded, PositionOutOfRange
from hurwitzkit.wordproblem import (CGroupSolver, Letters, all_reductions, braid_step, coset_tilde_group,
                                    normalize, reduce_word, refine_partition, tilde_group, universe_size,
                                    word_universe, words_equal_in_cgroup)

GRAPHS = {
    "s3": (S3, ["(1 2)"]),
    "s4": (S4, ["(1 2)"]),
    "a4": (A4, ["(1 2 3)"]),
    "d4": (D4, ["(1 2 3 4)", "(1 3)"]),
    "q8": (Q8, Q8_IJK),
    "s4_mixed": (S4, ["(1 2)", "(1 2 3)"]),
}


@lru_cache(maxsize=None)
def reduced(name):
    grp, reps = GRAPHS[name]
    return prune_free_factors(build_cgraph(equip(*grp, reps)))[0]


def sympy_tilde_order(gamma: CGraph) -> int:
    """|G~| from an independent coset enumeration of the same presentation."""
    n = gamma.n_vertices
    F, *y = free_group(" ".join(f"y{v}" for v in range(n)))
    rels = [y[v] ** int(gamma.vertex_period[v]) for v in range(n)]
    rels += [y[u] ** -1 * y[v] * y[u] * y[int(gamma.action[u, v])] ** -1
             for u in range(n) for v in range(n) if u != v]
    return FpGroup(F, rels).order()


# frozen: |G~| and |[G~, G~]| (sympy coset enumeration agrees, see below)
TILDE = {"s3": (6, 3), "s4": (24, 12), "a4": (24, 8), "d4": (8, 2), "q8": (16, 2), "s4_mixed": (72, 12)}


@pytest.mark.parametrize("name", sorted(TILDE))
def test_coset_route(name):
    tg = coset_tilde_group(reduced(name))
    assert (tg.order, tg.commutator_order) == TILDE[name]


@pytest.mark.parametrize("name", ["s3", "a4", "d4", "q8"])
def test_tilde_order_matches_sympy(name):
    assert sympy_tilde_order(reduced(name)) == TILDE[name][0]


@pytest.mark.parametrize("name", ["s3", "s4", "a4", "d4", "q8"])
def test_partition_route(name):
    part = refine_partition(reduced(name), "letters")
    tg = tilde_group(part, reduced(name))
    assert part.N == tg.order == TILDE[name][0]
    tg.verify()
    tg.check_abelianization()
    assert sorted(x for b in part.classes for x in b) == list(range(len(part.universe)))


@pytest.mark.parametrize("name", ["s3", "d4"])
def test_strategies_agree(name):
    g = reduced(name)
    lit = refine_partition(g, "literal")
    let = refine_partition(g, "letters")
    assert lit.classes == let.classes
    assert lit.strategy == "literal" and let.strategy == "letters"


def test_s3_trace():
    part = refine_partition(reduced("s3"), "literal")
    assert [r["N"] for r in part.trace][0] == 16
    assert part.N == 6
    assert part.to_json()["universe_size"] == 16


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_universe_size(name):
    g = reduced(name)
    n = universe_size(g)
    if n <= 20_000:
        assert len(word_universe(g)) == n
    else:
        with pytest.raises(CapExceeded):
            word_universe(g, cap=20_000)


def test_universe_sizes_frozen():
    assert [universe_size(reduced(k)) for k in ("s3", "d4", "s4", "a4")] == [16, 65, 1957, 7365]


def test_rewriting_basics():
    g = reduced("s3")
    assert reduce_word((0, 1, 1, 2), g) == (0, 2)
    assert reduce_word((0, 1, 2), g) == (0, 1, 2)
    assert sorted(all_reductions((0, 0, 1, 1), [2, 2, 2])) == [(0, 0), (1, 1)]
    with pytest.raises(PositionOutOfRange):
        braid_step((0, 1), 2, g)


@lru_cache(maxsize=None)
def _s4_tools():
    return Letters(reduced("s4")), CGroupSolver(reduced("s4"))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 5), max_size=9), st.integers(0, 100))
def test_normalize_preserves_class(w, seed):
    L, solver = _s4_tools()
    nw = normalize(w, L)
    assert all(nw.count(v) < 2 for v in set(nw))
    assert solver.tilde.evaluate(nw) == solver.tilde.evaluate(w)
    if len(w) >= 2:
        j = random.Random(seed).randrange(1, len(w))
        moved = braid_step(w, j, L)
        assert braid_step(moved, j, L, inverse=True) == tuple(w)
        assert solver.equal(moved, w)


def test_solver_counts_free_letters():
    eg = equip(6, ["(1 2 3 4 5 6)"], ["(1 2 3 4 5 6)", "(1 3 5)(2 4 6)"])
    gamma = build_cgraph(eg)
    assert words_equal_in_cgroup(gamma, [0, 1, 0], [0, 0, 1])
    assert not words_equal_in_cgroup(gamma, [0, 0], [1, 1])


def test_solver_example():
    gamma = build_cgraph(equip(*S3, ["(1 2)"]))
    solver = CGroupSolver(gamma)
    # y0 y1 = y_{pi_1(0)} y0 is a defining relation
    c = int(gamma.action[1, 0])
    assert solver.equal([1, 0], [0, c]) or solver.equal([0, 1], [int(gamma.action[0, 1]), 0])
    assert solver.equal([0, 0], [1, 1])
    assert not solver.equal([0, 1], [1, 0])
    assert not solver.equal([0, 0], [0])
