import random
from fractions import Fraction
from itertools import combinations

import pytest

from rainbow_factors import colouring as col
from rainbow_factors import hypergraph as hg
from rainbow_factors.factors import enumerate_copies, enumerate_factors, find_rainbow_factor_bruteforce, is_factor
from rainbow_factors.lll import (
    BadEvent,
    build_dependency_graph,
    build_events,
    event_degrees,
    lll_parameters,
    rainbow_repair,
    switching_multigraph_A,
)

from conftest import EDGE, TRIANGLE, k4_proper, random_graph


def oracle_event_counts(G, H, C):
    copies = enumerate_copies(G, H)
    a = sum(
        1 for c in copies for e, f in combinations(sorted(c.edges), 2) if C[e] == C[f]
    )
    b = 0
    for c1, c2 in combinations(copies, 2):
        if c1.vertices.isdisjoint(c2.vertices):
            b += sum(1 for e in c1.edges for f in c2.edges if C[e] == C[f])
    return a, b


def test_event_examples():
    K4 = hg.complete(4, 2)
    assert build_events(K4, EDGE, col.rainbow_colouring(K4)) == []
    events = build_events(K4, EDGE, k4_proper())
    assert [ev.kind for ev in events] == ["B"] * 3
    events = build_events(hg.complete(6, 2), TRIANGLE, col.gen_prefix_colouring(6, 2))
    assert sum(ev.kind == "A" for ev in events) == 20


@pytest.mark.parametrize("seed", range(6))
def test_event_counts_match_oracle(seed):
    G = hg.complete(6, 2)
    C = col.gen_random_bounded(G, Fraction(1, 3), seed)
    for H in (EDGE, TRIANGLE):
        events = build_events(G, H, C)
        a, b = oracle_event_counts(G, H, C)
        assert sum(ev.kind == "A" for ev in events) == a
        assert sum(ev.kind == "B" for ev in events) == b
        assert all(ev.is_consistent(C) for ev in events)


def test_positive_only_filters_unrealisable():
    G = hg.cycle(6)
    C = col.monochromatic_colouring(G)
    every = build_events(G, EDGE, C)
    positive = build_events(G, EDGE, C, positive_only=True)
    factors = enumerate_factors(G, EDGE)
    assert set(positive) <= set(every)
    for ev in positive:
        assert any(all(c in F for c in ev.copies) for F in factors)
    assert len(positive) < len(every)


def test_dependency_graph_examples():
    assert build_dependency_graph([]).edges() == []
    K4 = hg.complete(4, 2)
    g = build_dependency_graph(build_events(K4, EDGE, k4_proper()))
    assert g.edges() == [(0, 1), (0, 2), (1, 2)]
    d = event_degrees(g)
    assert (d.d_A, d.d_B) == (0, 2)
    a = BadEvent("A", ((0, 1), (0, 2)), (), frozenset({0, 1, 2}))
    b = BadEvent("A", ((3, 4), (3, 5)), (), frozenset({3, 4, 5}))
    assert build_dependency_graph([a, b]).edges() == []
    assert "graph" in g.to_dot()


@pytest.mark.parametrize("seed", range(4))
def test_adjacency_is_support_intersection(seed):
    G = random_graph(7, 2, 0.7, random.Random(seed))
    C = col.gen_random_bounded(G, Fraction(2, 7), seed)
    events = build_events(G, EDGE, C)
    g = build_dependency_graph(events)
    edges = set(g.edges())
    for i, j in combinations(range(len(events)), 2):
        assert ((i, j) in edges) == bool(events[i].support & events[j].support)
    assert all(i not in nbrs for i, nbrs in enumerate(g.adjacency))


def test_event_degree_bounds_reported():
    g = build_dependency_graph(build_events(hg.complete(4, 2), EDGE, k4_proper()))
    d = event_degrees(g, n=4, h=2, r=2, mu=Fraction(1, 2))
    assert d.bound_A == 64 * Fraction(1, 2) * 4
    assert event_degrees(build_dependency_graph([])).d_B == 0


def test_lll_parameter_examples():
    P = lll_parameters(10, 2, 2, Fraction(1, 16))
    assert P.p_A == Fraction(384, 10)
    assert P.p_B == Fraction(294912, 100)
    assert P.condition == 0 and P.holds
    assert lll_parameters(10, 2, 2).gamma == Fraction(1, 16)
    assert not lll_parameters(10, 2, 2, Fraction(1, 16), d_A=1).holds


def test_multigraph_k4():
    K4 = hg.complete(4, 2)
    factors = enumerate_factors(K4, EDGE)
    H0 = next(c for F in factors for c in F if c.vertices == {0, 1})
    M = switching_multigraph_A(K4, EDGE, col.rainbow_colouring(K4), H0, factors, 2)
    assert len(M.left) == 1 and len(M.right) == 2
    assert M.ratio == Fraction(1, 3) and M.ratio_bound() == Fraction(1, 2)
    assert sum(M.left_degrees()) == sum(M.right_degrees()) == len(M.edges)
    assert all(H0 not in M.right[j] for _, j in M.edges)


def test_multigraph_empty_left():
    K4 = hg.complete(4, 2)
    factors = [F for F in enumerate_factors(K4, EDGE) if not any(c.vertices == {0, 1} for c in F)]
    H0 = enumerate_copies(K4, EDGE)[0]
    M = switching_multigraph_A(K4, EDGE, col.rainbow_colouring(K4), H0, factors, 2)
    assert M.ratio == 0 and M.edges == []


def test_repair_examples():
    K4 = hg.complete(4, 2)
    res = rainbow_repair(K4, EDGE, col.rainbow_colouring(K4), 2, seed=0)
    assert res.ok and res.steps == 0
    res = rainbow_repair(K4, EDGE, k4_proper(), 2, seed=0, max_steps=20)
    assert res.status == "budget-exhausted"
    res = rainbow_repair(hg.cycle(6), TRIANGLE, col.rainbow_colouring(hg.cycle(6)), 2, seed=0)
    assert res.status == "no-initial-factor"
    K12 = hg.complete(12, 2)
    C = col.gen_random_bounded(K12, Fraction(1, 12), 5)
    res = rainbow_repair(K12, TRIANGLE, C, 2, seed=5)
    assert res.ok and res.steps == 0


@pytest.mark.parametrize("seed", range(10))
def test_repair_sound_against_oracle(seed):
    rng = random.Random(seed)
    G = random_graph(6, 2, 0.85, rng)
    C = col.gen_random_bounded(G, Fraction(1, 3), seed)
    for H in (EDGE, TRIANGLE):
        res = rainbow_repair(G, H, C, 3, seed, max_steps=30)
        if res.ok:
            assert is_factor(G, H, res.factor) and col.is_rainbow(C, res.factor.edges)
            assert find_rainbow_factor_bruteforce(G, H, C) is not None
