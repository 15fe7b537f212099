"""Talagrand and Janson tail bounds, and a Monte Carlo harness to check them.

The harness families model the two variables the sampler analysis needs:
the count of conflict vertices picked up by a random partial factor, and
the number of edge completions landing in one random transverse part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

import numpy as np

from .errors import InputError
from .shuffle import b_I, jl_set, trial_rng
from .switching import SwitchContext


@dataclass(frozen=True)
class TalagrandParams:
    c: float
    cert_r: float
    mean: float
    t: float

    def __post_init__(self):
        if self.c <= 0:
            raise InputError("Lipschitz constant c must be positive")
        if self.cert_r < 1:
            raise InputError("certifiability constant must be >= 1")
        if self.mean <= 0:
            raise InputError("mean must be positive")
        if not 0 <= self.t <= self.mean:
            raise InputError(f"need 0 <= t <= mean, got t={self.t}, mean={self.mean}")

    @property
    def exponent(self) -> float:
        return self.t**2 / (8 * self.c**2 * self.cert_r * self.mean)

    @property
    def radius(self) -> float:
        """Deviation beyond which the bound applies: ``t + 60 c sqrt(r E)``."""
        return self.t + 60 * self.c * math.sqrt(self.cert_r * self.mean)


def talagrand_bound(P: TalagrandParams) -> float:
    """Upper bound ``4 exp(-t^2 / (8 c^2 r E))`` on ``P[|X - E| > P.radius]``."""
    assert P.exponent >= 0
    return 4 * math.exp(-P.exponent)


@dataclass(frozen=True)
class JansonParams:
    mu: float
    delta: float
    Delta: float
    eta: float

    def __post_init__(self):
        if self.mu <= 0:
            raise InputError("mu must be positive")
        if self.delta < 0 or self.Delta < 0:
            raise InputError("delta and Delta must be non-negative")
        if not 0 < self.eta < 1:
            raise InputError("eta must lie in (0, 1)")

    @property
    def exponent(self) -> float:
        first = (self.eta * self.mu) ** 2 / (8 * self.Delta + 2 * self.mu)
        second = math.inf if self.delta == 0 else self.eta * self.mu / (6 * self.delta)
        return min(first, second)


def janson_bound(P: JansonParams) -> float:
    """Upper bound on ``P[S < (1 - eta) mu]``."""
    assert P.exponent >= 0
    return math.exp(-P.exponent)


# -- harness --------------------------------------------------------------


@dataclass
class TailReport:
    name: str
    parameters: dict
    bound: float
    frequency: float
    sigma: float
    trials: int
    hits: int

    @property
    def violated(self) -> bool:
        return self.frequency - 3 * self.sigma > self.bound

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "parameters": self.parameters,
            "bound": self.bound,
            "frequency": self.frequency,
            "sigma": self.sigma,
            "trials": self.trials,
            "verdict": "violation" if self.violated else "ok",
        }


@dataclass
class TailFamily:
    """A seeded random variable, the tail event to watch and its bound."""

    name: str
    draw: Callable[[np.random.Generator], float]
    in_tail: Callable[[float], bool]
    bound: float
    parameters: dict = field(default_factory=dict)


def empirical_tail_check(family: TailFamily, trials: int, seed: int) -> TailReport:
    """Frequency of the tail event over ``trials`` independent draws.

    A violation is reported only when the frequency exceeds the bound by
    more than three binomial standard errors.
    """
    if trials <= 0:
        raise InputError("trials must be positive")
    hits = sum(bool(family.in_tail(family.draw(trial_rng(seed, t)))) for t in range(trials))
    f = hits / trials
    sigma = math.sqrt(f * (1 - f) / trials)
    return TailReport(family.name, family.parameters, family.bound, f, sigma, trials, hits)


def constant_family(value: float = 1.0) -> TailFamily:
    return TailFamily(
        "constant",
        draw=lambda rng: value,
        in_tail=lambda x: x != value,
        bound=0.0,
        parameters={"value": value},
    )


def conflict_count_family(ctx: SwitchContext, I, p, t: float | None = None, shift: float = 0.0) -> TailFamily:
    """``|V(X) & B_I| + shift`` for the random partial factor ``X``.

    Copies join independently with probability ``p``; one copy moves the
    count by at most ``h`` and ``s`` joined copies certify a count of ``s``,
    so ``c = h`` and ``cert_r = 1``. The mean is exact.
    """
    h = ctx.H.n
    B = b_I(ctx, I)
    others = [c for c in ctx.F0 if c != ctx.H0]
    weights = np.array([len(c.vertices & B) for c in others], dtype=float)
    p = float(Fraction(p))
    mean = float(p * weights.sum() + shift)
    if mean <= 0:
        raise InputError("the conflict count has zero mean; pick another I or a positive shift")
    params = TalagrandParams(c=h, cert_r=1, mean=mean, t=mean if t is None else t)
    radius = params.radius

    def draw(rng: np.random.Generator) -> float:
        return float(weights @ (rng.random(len(others)) < p)) + shift

    return TailFamily(
        "conflict-count",
        draw=draw,
        in_tail=lambda x: abs(x - mean) > radius,
        bound=talagrand_bound(params),
        parameters={"I": sorted(I), "p": p, "c": h, "cert_r": 1, "mean": mean, "t": params.t,
                    "shift": shift, "B_I": sorted(B)},
    )


def part_completion_family(ctx: SwitchContext, L, p, eta: float = 0.5, part: int = 0) -> TailFamily:
    """Number of ``J`` in the completion set of ``L`` that land inside part ``part``.

    Each indicator depends only on the copies meeting ``J``; indicators whose
    copy sets are disjoint are independent, so copy-sharing is a strong
    dependency graph. ``mu``, ``delta`` and ``Delta`` are computed exactly.
    """
    h = ctx.H.n
    p = Fraction(p)
    owner = {v: c for c in ctx.F0 for v in c.vertices}
    Js = jl_set(ctx, L)
    if not Js:
        raise InputError("empty completion set")
    copies_of = [frozenset(owner[v] for v in J) for J in Js]
    singles = [(p / h) ** len(J) for J in Js]
    mu = sum(singles)

    def joint(a: int, b: int) -> Fraction:
        union = set(Js[a]) | set(Js[b])
        prob = Fraction(1)
        for c in copies_of[a] | copies_of[b]:
            if len(c.vertices & union) > 1:
                return Fraction(0)
            prob *= p / h
        return prob

    nbr_sum = [Fraction(0)] * len(Js)
    Delta = Fraction(0)
    for a, b in combinations(range(len(Js)), 2):
        if copies_of[a] & copies_of[b]:
            nbr_sum[a] += singles[b]
            nbr_sum[b] += singles[a]
            Delta += joint(a, b)
    delta = max(nbr_sum)
    params = JansonParams(float(mu), float(delta), float(Delta), eta)
    threshold = (1 - eta) * float(mu)

    others = [c for c in ctx.F0 if c != ctx.H0]
    position = {c: i for i, c in enumerate(others)}
    order = [sorted(c.vertices) for c in others]
    # J avoids V(H0), so only non-H0 copies matter
    targets = [[(position[owner[v]], order[position[owner[v]]].index(v)) for v in J] for J in Js]

    def draw(rng: np.random.Generator) -> float:
        joined = rng.random(len(others)) < float(p)
        slot = np.array([rng.permutation(h) for _ in others]) if others else np.zeros((0, h), int)
        count = 0
        for tgt in targets:
            if all(joined[i] and slot[i][k] == part for i, k in tgt):
                count += 1
        return float(count)

    return TailFamily(
        "part-completions",
        draw=draw,
        in_tail=lambda x: x < threshold,
        bound=janson_bound(params),
        parameters={"L": sorted(L), "p": float(p), "part": part, "mu": float(mu), "delta": float(delta),
                    "Delta": float(Delta), "eta": eta, "size": len(Js)},
    )
