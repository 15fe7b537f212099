from __future__ import annotations

import random
from itertools import combinations

import pytest

from rainbow_factors import colouring as col
from rainbow_factors import hypergraph as hg
from rainbow_factors.factors import Copy, PartialFactor
from rainbow_factors.switching import SwitchContext

EDGE = hg.single_edge(2)
TRIANGLE = hg.complete(3, 2)


def pair_factor(*pairs) -> PartialFactor:
    return PartialFactor(Copy.from_image(EDGE, p) for p in pairs)


def triangle_factor(*triples) -> PartialFactor:
    return PartialFactor(Copy.from_image(TRIANGLE, t) for t in triples)


def k4_proper() -> col.Colouring:
    """K_4 coloured by its three perfect matchings."""
    return col.Colouring.from_classes(hg.complete(4, 2), [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]])


def random_graph(n: int, r: int, q: float, rng: random.Random) -> hg.Hypergraph:
    return hg.Hypergraph(n, r, [e for e in combinations(range(n), r) if rng.random() < q])


@pytest.fixture
def k4_ctx() -> SwitchContext:
    G = hg.complete(4, 2)
    F0 = pair_factor((0, 1), (2, 3))
    return SwitchContext(G, EDGE, col.rainbow_colouring(G), F0, F0.copies[0])


# -- independent switching oracle -----------------------------------------


def all_copies(G: hg.Hypergraph, H: hg.Hypergraph) -> list[tuple[frozenset, frozenset]]:
    """Every (vertex set, edge set) that is the image of some injection of H."""
    from itertools import permutations

    found = set()
    for image in permutations(range(G.n), H.n):
        edges = frozenset(tuple(sorted(image[v] for v in e)) for e in H.edges)
        if edges <= G.edges:
            found.add((frozenset(image), edges))
    return sorted(found, key=lambda c: (sorted(c[0]), sorted(c[1])))


def oracle_switchings(G, H, C, F0, H0, m) -> set[frozenset]:
    """Feasible switchings of size m by generating every m-set of disjoint copies and filtering."""
    copies = all_copies(G, H)
    h0 = set(H0.vertices)
    f0 = [c.vertices for c in F0]
    found = set()

    def check(Y) -> bool:
        VY = set().union(*(c[0] for c in Y))
        if not h0 <= VY:
            return False
        if any(not (V <= VY or V.isdisjoint(VY)) for V in f0):
            return False
        if any(len(c[0] & h0) > 1 for c in Y):
            return False
        reduced = [e for c in Y for e in c[1] if h0.isdisjoint(e)]
        colours = [C.assignment[e] for e in reduced]
        if len(set(colours)) != len(colours):
            return False
        untouched = {C.assignment[e] for c in F0 if c.vertices.isdisjoint(VY) for e in c.edges}
        return not untouched.intersection(colours)

    def grow(start, chosen, used):
        if len(chosen) == m:
            if check(chosen):
                found.add(frozenset(chosen))
            return
        for i in range(start, len(copies)):
            if copies[i][0].isdisjoint(used):
                grow(i + 1, chosen + [copies[i]], used | copies[i][0])

    grow(0, [], frozenset())
    return found


def as_oracle_form(Y) -> frozenset:
    return frozenset((c.vertices, frozenset(c.edges)) for c in Y)


def switching_instances(count: int, seed: int = 2024):
    """Random r=2 instances (n <= 10) with a factor F0 and a mu-bounded colouring.

    Yields (ctx, m) pairs; graphs without an H-factor are redrawn.
    """
    from fractions import Fraction

    from rainbow_factors.factors import find_factor

    rng = random.Random(seed)
    # a switching needs at least h copies to cover V(H0), so triangles use m = 3
    shapes = [(EDGE, 6), (EDGE, 8), (EDGE, 10), (TRIANGLE, 9), (TRIANGLE, 9)]
    made = 0
    while made < count:
        H, n = shapes[made % len(shapes)]
        G = random_graph(n, 2, rng.uniform(0.5, 0.95), rng)
        F0 = find_factor(G, H)
        if F0 is None:
            continue
        mu = rng.choice([Fraction(1, n), Fraction(2, n), Fraction(3, n), Fraction(1, 2)])
        C = col.gen_random_bounded(G, mu, rng.getrandbits(32))
        H0 = F0.copies[rng.randrange(len(F0))]
        m = 3 if H == TRIANGLE else rng.choice([2, 3])
        yield SwitchContext(G, H, C, F0, H0), m
        made += 1


# -- acceptance reporting -------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def bijection_chi_square(ctx: SwitchContext, p, seed: int, trials: int) -> tuple[float, int]:
    """Chi-square statistic of the vertex-to-part bijections, summed over copies.

    For each copy of F0 the observed bijections (one per trial in which the
    copy joined) are tallied over all h! possibilities; copies are sampled
    independently, so the statistic has ``|F0| * (h! - 1)`` degrees of freedom.
    """
    from collections import Counter
    from itertools import permutations

    from rainbow_factors.shuffle import sample

    h = ctx.H.n
    seen: dict = {c: Counter() for c in ctx.F0}
    for t in range(trials):
        s = sample(ctx, p, seed, t)
        where = {v: i for i, part in enumerate(s.P) for v in part}
        for c in s.X:
            seen[c][tuple(where[v] for v in sorted(c.vertices))] += 1
    stat = 0.0
    outcomes = list(permutations(range(h)))
    for tally in seen.values():
        total = sum(tally.values())
        expected = total / len(outcomes)
        stat += sum((tally[o] - expected) ** 2 / expected for o in outcomes)
    return stat, len(ctx.F0) * (len(outcomes) - 1)
