"""Random partial factors with uniformly random transverse partitions.

Each copy of ``F0`` other than ``H0`` joins ``X`` independently with
probability ``p``; every copy in ``X`` then sends its vertices to parts
``1..h`` through an independent uniform bijection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable

import mpmath
import numpy as np

from . import hypergraph as hg
from .errors import InputError
from .factors import PartialFactor
from .switching import SwitchContext, TransversePartition, is_suitable

EXACT_PMF_MAX_N = 200
PMF_DPS = 40


@dataclass(frozen=True)
class ShuffleSample:
    X: PartialFactor
    P: TransversePartition
    p: Fraction
    seed: int | tuple


def default_p(n: int, h: int, m: int) -> Fraction:
    """Inclusion probability making ``E|X| = m``."""
    return Fraction(m - 1, n // h - 1)


def trial_rng(seed, trial: int | None = None) -> np.random.Generator:
    entropy = [seed] if trial is None else [seed, trial]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def sample(ctx: SwitchContext, p, seed, trial: int | None = None) -> ShuffleSample:
    p = Fraction(p)
    if not 0 < p < 1:
        raise InputError(f"need 0 < p < 1, got {p}")
    rng = trial_rng(seed, trial)
    h = ctx.H.n
    others = [c for c in ctx.F0 if c != ctx.H0]
    keep = rng.random(len(others)) < float(p)
    X = [ctx.H0] + [c for c, k in zip(others, keep) if k]
    parts: list[list[int]] = [[] for _ in range(h)]
    for c in sorted(X, key=lambda c: c.key):
        for v, i in zip(sorted(c.vertices), rng.permutation(h)):
            parts[i].append(v)
    return ShuffleSample(PartialFactor(X), TransversePartition(parts), p, seed if trial is None else (seed, trial))


def f_I(F0: PartialFactor, I: Iterable[int]) -> PartialFactor:
    """Copies of ``F0`` meeting ``I``."""
    I = set(I)
    return PartialFactor(c for c in F0 if c.vertices & I)


def b_I(ctx: SwitchContext, I: Iterable[int]) -> frozenset[int]:
    """Vertices outside ``V(F_I) | V(H0)`` completing ``I`` to an edge with an F0 colour."""
    I = tuple(ctx.G.check_vertices(I))
    if len(I) != ctx.G.r - 1:
        raise InputError(f"|I| must be r-1={ctx.G.r - 1}, got {len(I)}")
    excluded = f_I(ctx.F0, I).vertices | ctx.h0_vertices
    colours = ctx.factor_colours()
    out = set()
    for v in range(ctx.G.n):
        if v in excluded or v in I:
            continue
        e = hg.as_edge((*I, v))
        if e in ctx.G.edges and ctx.C[e] in colours:
            out.add(v)
    return frozenset(out)


def jl_set(ctx: SwitchContext, L: Iterable[int]) -> list[tuple[int, ...]]:
    """All ``J`` avoiding ``V(H0)`` with ``F_L``, ``F_J`` disjoint and ``L + J`` a transverse edge.

    Transversality is with respect to ``F0``.
    """
    L = tuple(ctx.G.check_vertices(L))
    G, F0 = ctx.G, ctx.F0
    owner = {v: c for c in F0 for v in c.vertices}
    FL = {owner[v] for v in L}
    out = []
    for e in sorted(G.edges):
        if not set(L).issubset(e):
            continue
        J = tuple(v for v in e if v not in L)
        if ctx.h0_vertices.intersection(J):
            continue
        FJ = {owner[v] for v in J}
        if FL & FJ:
            continue
        if len({owner[v] for v in e}) != len(e):
            continue
        out.append(J)
    return out


def d_prime(ctx: SwitchContext, L: Iterable[int], part: Iterable[int]) -> int:
    part = set(part)
    return sum(1 for J in jl_set(ctx, L) if part.issuperset(J))


# -- events ---------------------------------------------------------------


@dataclass
class EventEstimates:
    trials: int
    hits: dict[str, int]
    p: Fraction
    m: int
    e1_exact: float
    seed: int
    parameters: dict = field(default_factory=dict)

    def frequency(self, name: str) -> float:
        return self.hits[name] / self.trials

    def radius(self, name: str) -> float:
        """Three binomial standard errors at the observed frequency."""
        f = self.frequency(name)
        return 3 * math.sqrt(f * (1 - f) / self.trials)

    def e1_sigma(self) -> float:
        return math.sqrt(self.e1_exact * (1 - self.e1_exact) / self.trials)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "p": str(self.p),
            "m": self.m,
            "hits": dict(self.hits),
            "frequencies": {k: self.frequency(k) for k in self.hits},
            "radii": {k: self.radius(k) for k in self.hits},
            "e1_exact": self.e1_exact,
            "e1_sigma": self.e1_sigma(),
            "parameters": self.parameters,
        }

    def to_csv(self) -> str:
        rows = ["event,hits,trials,frequency,radius"]
        for k in self.hits:
            rows.append(f"{k},{self.hits[k]},{self.trials},{self.frequency(k):.6f},{self.radius(k):.6f}")
        rows.append(f"E1_exact,,{self.trials},{self.e1_exact:.6f},{3 * self.e1_sigma():.6f}")
        return "\n".join(rows) + "\n"


EVENTS = ("E1", "E2", "E3", "E4", "all")


def e1_exact(copies: int, p, m: int) -> Fraction:
    """P[|X| = m] when ``copies - 1`` copies join independently with probability ``p``."""
    p = Fraction(p)
    k = m - 1
    if not 0 <= k <= copies - 1:
        return Fraction(0)
    return comb(copies - 1, k) * p**k * (1 - p) ** (copies - 1 - k)


def estimate_events(
    ctx: SwitchContext,
    epsilon,
    m: int,
    trials: int,
    seed: int,
    delta_hat=0,
    p=None,
    ell: int = 1,
) -> EventEstimates:
    """Monte Carlo frequencies of the four sampler events and their conjunction.

    E1 is ``|X| = m``; E2 the same-colour pair condition and E3 the sparsity
    condition of suitability at ``epsilon``; E4 asks every part to have
    minimum ``ell``-degree at least ``(delta_hat + epsilon/2) * m**(r-ell)``.
    Trial ``t`` draws from the stream seeded by ``(seed, t)``.
    """
    if trials <= 0:
        raise InputError("trials must be positive")
    n, h, r = ctx.G.n, ctx.H.n, ctx.G.r
    if not 1 <= ell < r:
        raise InputError(f"ell must satisfy 1 <= ell < r={r}")
    p = default_p(n, h, m) if p is None else Fraction(p)
    epsilon = Fraction(epsilon)
    target = (Fraction(delta_hat) + epsilon / 2) * m ** (r - ell)

    suit_cache: dict[PartialFactor, tuple[bool, bool]] = {}
    part_cache: dict[tuple[int, ...], bool] = {}
    hits = dict.fromkeys(EVENTS, 0)
    for t in range(trials):
        s = sample(ctx, p, seed, t)
        if s.X not in suit_cache:
            suit_cache[s.X] = (
                bool(is_suitable(ctx, s.X, epsilon, conditions=("pairs",))),
                bool(is_suitable(ctx, s.X, epsilon, conditions=("sparse",))),
            )
        e2, e3 = suit_cache[s.X]
        e4 = True
        for part in s.P:
            if part not in part_cache:
                d = hg.part_min_degree(ctx.G, part, ell)
                part_cache[part] = d is None or d >= target
            e4 = e4 and part_cache[part]
        e1 = len(s.X) == m
        for name, hit in zip(EVENTS, (e1, e2, e3, e4, e1 and e2 and e3 and e4)):
            hits[name] += hit
    return EventEstimates(
        trials=trials,
        hits=hits,
        p=p,
        m=m,
        e1_exact=float(e1_exact(len(ctx.F0), p, m)),
        seed=seed,
        parameters={"epsilon": str(epsilon), "delta_hat": str(delta_hat), "ell": ell, "target": str(target)},
    )


# -- binomial point mass --------------------------------------------------


@dataclass(frozen=True)
class PointMass:
    value: float
    exact: Fraction | None
    bound: float
    holds: bool
    error: float


def binomial_point_mass(n: int, p, m: int) -> PointMass:
    """``P[Bin(n, p) = m]`` and whether it is at least ``1/(4 sqrt(m))``.

    Requires ``n*p == m`` exactly. Exact rational arithmetic up to
    ``n = 200``; beyond that 40-digit mpmath with the error bound reported.
    """
    p = Fraction(p)
    if m < 1 or n < m:
        raise InputError("need 1 <= m <= n")
    if n * p != m:
        raise InputError(f"n*p = {n * p} is not m = {m}")
    bound = 1 / (4 * math.sqrt(m))
    if n <= EXACT_PMF_MAX_N:
        exact = comb(n, m) * p**m * (1 - p) ** (n - m)
        # pmf >= 1/(4 sqrt m)  <=>  16 m pmf^2 >= 1, decided exactly
        return PointMass(float(exact), exact, bound, 16 * m * exact**2 >= 1, 0.0)
    with mpmath.workdps(PMF_DPS):
        pm = mpmath.mpf(p.numerator) / p.denominator
        value = mpmath.binomial(n, m) * pm**m * (1 - pm) ** (n - m)
        err = value * mpmath.mpf(10) ** (-(PMF_DPS - 10))
        gap = 16 * m * value**2 - 1
        if abs(gap) <= 64 * m * value * err:
            raise ArithmeticError(f"pmf too close to the bound to decide at {PMF_DPS} digits")
        return PointMass(float(value), None, bound, bool(gap > 0), float(err))
