import math
from collections import Counter
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from rainbow_factors import colouring as col
from rainbow_factors import hypergraph as hg
from rainbow_factors.errors import InputError
from rainbow_factors.factors import Copy, PartialFactor
from rainbow_factors.shuffle import (
    EVENTS,
    b_I,
    binomial_point_mass,
    default_p,
    e1_exact,
    estimate_events,
    f_I,
    jl_set,
    sample,
)
from rainbow_factors.switching import SwitchContext

from conftest import EDGE, TRIANGLE, bijection_chi_square, pair_factor, triangle_factor


def perfect_matching_ctx(n: int, C=None) -> SwitchContext:
    G = hg.complete(n, 2)
    F0 = pair_factor(*[(2 * i, 2 * i + 1) for i in range(n // 2)])
    return SwitchContext(G, EDGE, C or col.rainbow_colouring(G), F0, F0.copies[0])


def three_graph_ctx(n: int) -> SwitchContext:
    G = hg.complete(n, 3)
    H = hg.single_edge(3)
    F0 = PartialFactor(Copy.from_image(H, (3 * i, 3 * i + 1, 3 * i + 2)) for i in range(n // 3))
    return SwitchContext(G, H, col.rainbow_colouring(G), F0, F0.copies[0])


def test_sample_is_deterministic_and_transverse():
    ctx = perfect_matching_ctx(12)
    for trial in range(50):
        a = sample(ctx, Fraction(1, 3), 5, trial)
        assert a == sample(ctx, Fraction(1, 3), 5, trial)
        assert ctx.H0 in a.X and all(c in ctx.F0 for c in a.X)
        assert a.P.is_valid_for(a.X)


def test_sample_rejects_bad_p():
    ctx = perfect_matching_ctx(4)
    for p in (0, 1, Fraction(3, 2)):
        with pytest.raises(InputError):
            sample(ctx, p, 0)


def test_mean_size_over_many_trials():
    ctx = perfect_matching_ctx(22)
    assert len(ctx.F0) == 11
    trials, p = 100_000, Fraction(1, 2)
    sizes = np.array([len(sample(ctx, p, 17, t).X) for t in range(trials)])
    sigma = math.sqrt(10 * 0.25 / trials)
    assert abs(sizes.mean() - 6) <= 3 * sigma


def test_inclusion_frequency():
    ctx = three_graph_ctx(12)
    trials, p = 20_000, Fraction(1, 3)
    included = Counter()
    for t in range(trials):
        included.update(sample(ctx, p, 3, t).X)
    assert included[ctx.H0] == trials
    for c in ctx.F0:
        if c != ctx.H0:
            assert abs(included[c] / trials - 1 / 3) <= 3 * math.sqrt(2 / 9 / trials)


def test_bijections_uniform():
    stat, df = bijection_chi_square(three_graph_ctx(9), Fraction(1, 2), 4, 6000)
    assert stat <= df + 3 * math.sqrt(2 * df)


def test_f_I_examples(k4_ctx):
    F0 = k4_ctx.F0
    assert len(f_I(F0, [])) == 0
    assert k4_ctx.H0 in f_I(F0, k4_ctx.H0.vertices)
    assert f_I(F0, [0, 2]) == F0


def test_b_I_examples():
    G6 = hg.complete(6, 2)
    F = triangle_factor((0, 1, 2), (3, 4, 5))
    ctx = SwitchContext(G6, TRIANGLE, col.rainbow_colouring(G6), F, F.copies[0])
    assert all(b_I(ctx, [v]) == frozenset() for v in range(6))

    G4 = hg.complete(4, 2)
    F0 = pair_factor((0, 1), (2, 3))
    mono = SwitchContext(G4, EDGE, col.monochromatic_colouring(G4), F0, F0.copies[0])
    assert b_I(mono, [0]) == {2, 3}
    with pytest.raises(InputError):
        b_I(mono, [0, 1])


def test_b_I_avoids_excluded_vertices():
    ctx = perfect_matching_ctx(8, col.gen_random_bounded(hg.complete(8, 2), Fraction(1, 2), 4))
    for v in range(8):
        B = b_I(ctx, [v])
        assert B.isdisjoint(f_I(ctx.F0, [v]).vertices | ctx.h0_vertices)
        assert len(B) <= 8


def test_jl_set_examples():
    G6 = hg.complete(6, 2)
    F = triangle_factor((0, 1, 2), (3, 4, 5))
    ctx = SwitchContext(G6, TRIANGLE, col.rainbow_colouring(G6), F, F.copies[0])
    assert jl_set(ctx, [3]) == []

    ctx3 = three_graph_ctx(6)
    assert jl_set(ctx3, [0, 1]) == []


def test_jl_set_clauses():
    ctx = three_graph_ctx(12)
    owner = {v: c for c in ctx.F0 for v in c.vertices}
    L = (3,)
    Js = jl_set(ctx, L)
    assert Js
    for J in Js:
        e = tuple(sorted(L + J))
        assert e in ctx.G.edges
        assert ctx.h0_vertices.isdisjoint(J)
        assert {owner[v] for v in L}.isdisjoint(owner[v] for v in J)
        assert len({owner[v] for v in e}) == len(e)


def test_conflicts_bounded_by_b_I():
    G = hg.complete(12, 3)
    ctx = three_graph_ctx(12)
    C = col.gen_random_bounded(G, Fraction(1, 4), 8)
    ctx = SwitchContext(G, ctx.H, C, ctx.F0, ctx.H0)
    colours = ctx.factor_colours()
    r, h = 3, 3
    for t in range(40):
        s = sample(ctx, Fraction(1, 2), 21, t)
        VX = s.X.vertices
        owner = {v: c for c in s.X for v in c.vertices}
        for I in combinations(sorted(VX - ctx.h0_vertices), r - 1):
            if len({owner[v] for v in I}) < len(I):
                continue
            conflicts = [v for v in VX - set(I) if C[tuple(sorted((*I, v)))] in colours]
            assert len(conflicts) <= len(VX & b_I(ctx, I)) + r * h


def test_rainbow_events_certain():
    ctx = three_graph_ctx(12)
    est = estimate_events(ctx, epsilon=0, m=2, trials=300, seed=1)
    assert est.hits["E2"] == est.hits["E3"] == 300
    assert est.hits["all"] <= min(est.hits[k] for k in EVENTS[:-1])


def test_estimates_e1_and_conjunction():
    ctx = perfect_matching_ctx(10)
    est = estimate_events(ctx, epsilon=4, m=2, trials=4000, seed=2)
    exact = float(e1_exact(5, default_p(10, 2, 2), 2))
    assert est.e1_exact == pytest.approx(exact)
    assert abs(est.frequency("E1") - exact) <= 3 * est.e1_sigma()
    assert est.hits["E2"] == est.hits["E3"] == 4000
    assert est.hits["all"] <= min(est.hits[k] for k in EVENTS[:-1])
    assert est.to_csv().startswith("event,hits,trials")
    with pytest.raises(InputError):
        estimate_events(ctx, 1, 2, trials=0, seed=0)


def test_default_p_makes_mean_m():
    for n, h, m in [(22, 2, 6), (30, 3, 4)]:
        assert 1 + (n // h - 1) * default_p(n, h, m) == m


def test_binomial_examples():
    assert binomial_point_mass(2, Fraction(1, 2), 1).exact == Fraction(1, 2)
    pm = binomial_point_mass(100, Fraction(1, 20), 5)
    assert pm.value == pytest.approx(0.1800, abs=5e-5) and pm.holds
    one = binomial_point_mass(7, 1, 7)
    assert one.exact == 1 and one.holds
    with pytest.raises(InputError):
        binomial_point_mass(10, Fraction(1, 3), 3)


def test_binomial_high_precision_branch():
    pm = binomial_point_mass(1800, Fraction(14, 1800), 14)
    assert pm.exact is None and pm.holds
    reference = math.comb(1800, 14) * Fraction(14, 1800) ** 14 * Fraction(1786, 1800) ** 1786
    assert pm.value == pytest.approx(float(reference), rel=1e-12)
