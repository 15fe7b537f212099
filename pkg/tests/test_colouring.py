from collections import Counter
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rainbow_factors import colouring as col
from rainbow_factors import hypergraph as hg
from rainbow_factors.colouring import Colouring, colour_clash, is_mu_bounded, is_rainbow, min_mu
from rainbow_factors.errors import InputError

from conftest import k4_proper


def oracle_min_mu(C: Colouring) -> Fraction:
    """Definition-level recount, independent of the library's bookkeeping."""
    G = C.host
    n, r = G.n, G.r
    best = Fraction(0)
    for colour in set(C.assignment.values()):
        cls = [e for e in G.edges if C[e] == colour]
        best = max(best, Fraction(len(cls), n ** (r - 1)))
        for I in combinations(range(n), r - 1):
            through = sum(1 for e in cls if set(I) <= set(e))
            best = max(best, Fraction(through, n))
    return best


@st.composite
def colourings(draw):
    r = draw(st.integers(2, 3))
    n = draw(st.integers(r, 6))
    pool = list(combinations(range(n), r))
    edges = draw(st.lists(st.sampled_from(pool), unique=True, min_size=1))
    G = hg.Hypergraph(n, r, edges)
    k = draw(st.integers(1, len(edges)))
    return Colouring(G, {e: draw(st.integers(0, k - 1)) for e in G.edges})


def test_is_rainbow_examples():
    C = k4_proper()
    assert is_rainbow(C, [])
    assert is_rainbow(C, [(0, 1)])
    assert colour_clash(C, [(0, 1), (2, 3)]) == ((0, 1), (2, 3))
    assert not is_rainbow(C, [(0, 1), (2, 3)])


def test_unknown_edge_is_an_input_error():
    with pytest.raises(InputError):
        is_rainbow(k4_proper(), [(0, 5)])


def test_min_mu_examples():
    G = hg.cycle(7)
    assert min_mu(col.rainbow_colouring(G)) == Fraction(1, 7)
    assert min_mu(k4_proper()) == Fraction(1, 2)
    assert min_mu(col.gen_prefix_colouring(4, 3)) == Fraction(1, 2)


def test_is_mu_bounded_examples():
    C = k4_proper()
    assert is_mu_bounded(C, 1)
    bad = is_mu_bounded(C, Fraction(1, 4))
    assert not bad and bad.condition == "global"
    assert is_mu_bounded(C, Fraction(1, 2))


def test_local_violation_names_the_set():
    C = col.gen_prefix_colouring(4, 3)
    v = is_mu_bounded(C, Fraction(1, 4))
    assert not v and v.condition == "local"
    assert v.witness["subset"] == [0, 1]


@given(colourings())
def test_min_mu_matches_oracle(C):
    assert min_mu(C) == oracle_min_mu(C)


@given(colourings(), st.fractions(min_value=Fraction(1, 100), max_value=2))
def test_bounded_iff_above_min_mu(C, mu):
    assert bool(is_mu_bounded(C, mu)) == (mu >= min_mu(C))


def test_prefix_examples():
    C = col.gen_prefix_colouring(4, 3)
    assert C[(0, 1, 2)] == C[(0, 1, 3)]
    assert len({C[(0, 1, 2)], C[(0, 2, 3)], C[(1, 2, 3)]}) == 3
    assert max(Counter(C.assignment.values()).values()) == 2
    D = col.gen_prefix_colouring(3, 2)
    assert D[(0, 1)] == D[(0, 2)] != D[(1, 2)]


@pytest.mark.parametrize("n, r", [(4, 2), (6, 2), (5, 3), (7, 3), (6, 4)])
def test_prefix_class_facts(n, r):
    C = col.gen_prefix_colouring(n, r)
    for colour, cls in C.classes().items():
        assert cls
        assert len(cls) <= n - r + 1
        assert len({e[: r - 1] for e in cls}) == 1


@pytest.mark.parametrize("r, n, h", [(2, 6, 3), (3, 6, 4), (3, 8, 4)])
def test_prefix_has_no_rainbow_complete_copy(r, n, h):
    C = col.gen_prefix_colouring(n, r)
    K = list(combinations(range(h), r))
    for image in permutations(range(n), h):
        edges = [tuple(sorted(image[i] for i in e)) for e in K]
        assert len({C[e] for e in edges}) < len(edges)


def test_random_bounded_at_one_over_n_is_rainbow():
    G = hg.complete(6, 2)
    C = col.gen_random_bounded(G, Fraction(1, 6), seed=3)
    assert len(set(C.assignment.values())) == len(G)


@given(st.integers(3, 7), st.fractions(min_value=Fraction(1, 3), max_value=1), st.integers(0, 2**32))
@settings(max_examples=40)
def test_random_bounded_respects_mu_and_seed(n, mu, seed):
    G = hg.complete(n, 2)
    mu = max(mu, Fraction(1, n))
    C = col.gen_random_bounded(G, mu, seed)
    assert is_mu_bounded(C, mu)
    assert C == col.gen_random_bounded(G, mu, seed)


def test_random_bounded_rejects_tiny_mu():
    with pytest.raises(InputError):
        col.gen_random_bounded(hg.complete(5, 2), Fraction(1, 10), seed=0)


def test_text_round_trip(tmp_path):
    G = hg.complete(5, 3)
    C = col.gen_random_bounded(G, Fraction(2, 5), seed=11)
    hg.save(G, tmp_path / "g.txt")
    col.save(C, tmp_path / "c.txt", "g.txt")
    assert col.load(tmp_path / "c.txt") == C
    assert col.loads(col.dumps(C, "g.txt"), G) == C


def test_loads_rejects_partial_assignment():
    G = hg.complete(3, 2)
    with pytest.raises(InputError):
        col.loads("hypergraph g.txt\n0 1 0\n", G)
