"""Bad events of a random factor, their dependency graph, and switching repair.

An ``A`` event is a copy carrying two same-coloured edges; a ``B`` event is
a pair of vertex-disjoint copies with a same-coloured cross pair of edges.
A factor is rainbow iff it contains none of them. Two events are adjacent
when their supports (the vertex sets of their copies) meet.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial, log
from typing import Sequence

from .colouring import Colouring, colour_clash, is_rainbow
from .errors import InputError, ResourceLimitError
from .factors import (
    Copy,
    PartialFactor,
    enumerate_copies,
    enumerate_factors,
    find_factor,
    is_factor,
)
from .hypergraph import Edge, Hypergraph
from .switching import SwitchContext, _switchings_on, apply_switching, is_feasible_switching, iter_feasible_switchings

DEFAULT_EVENT_CAP = 500_000


@dataclass(frozen=True)
class BadEvent:
    kind: str
    edges: tuple[Edge, Edge]
    copies: tuple[Copy, ...]
    support: frozenset[int]

    def is_consistent(self, C: Colouring) -> bool:
        """Re-derive the event's defining facts from its fields."""
        e, f = self.edges
        if e == f or C[e] != C[f]:
            return False
        if self.kind == "A":
            (H0,) = self.copies
            return e in H0.edges and f in H0.edges and self.support == H0.vertices
        H1, H2 = self.copies
        return (
            H1.vertices.isdisjoint(H2.vertices)
            and e in H1.edges
            and f in H2.edges
            and set(e).isdisjoint(f)
            and self.support == H1.vertices | H2.vertices
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "edges": [list(e) for e in self.edges],
            "copies": [sorted(c.vertices) for c in self.copies],
            "support": sorted(self.support),
        }


def build_events(
    G: Hypergraph,
    H: Hypergraph,
    C: Colouring,
    positive_only: bool = False,
    cap: int = DEFAULT_EVENT_CAP,
) -> list[BadEvent]:
    """All A and B events; with ``positive_only`` keep those some factor realises."""
    copies = enumerate_copies(G, H)
    events: list[BadEvent] = []

    def push(ev: BadEvent) -> None:
        if len(events) >= cap:
            raise ResourceLimitError(f"more than {cap} bad events", partial=len(events))
        events.append(ev)

    for c in copies:
        for e, f in combinations(sorted(c.edges), 2):
            if C[e] == C[f]:
                push(BadEvent("A", (e, f), (c,), c.vertices))
    by_colour: list[dict[int, list[Edge]]] = []
    for c in copies:
        groups: dict[int, list[Edge]] = {}
        for e in sorted(c.edges):
            groups.setdefault(C[e], []).append(e)
        by_colour.append(groups)
    pairs_seen = 0
    for i, j in combinations(range(len(copies)), 2):
        H1, H2 = copies[i], copies[j]
        if not H1.vertices.isdisjoint(H2.vertices):
            continue
        pairs_seen += 1
        if pairs_seen > cap:
            raise ResourceLimitError(f"more than {cap} disjoint copy pairs", partial=len(events))
        for colour in sorted(by_colour[i].keys() & by_colour[j].keys()):
            for e in by_colour[i][colour]:
                for f in by_colour[j][colour]:
                    push(BadEvent("B", (e, f), (H1, H2), H1.vertices | H2.vertices))

    for ev in events:
        assert ev.is_consistent(C), ev
    if positive_only:
        factors = [set(F.copies) for F in enumerate_factors(G, H)]
        events = [ev for ev in events if any(all(c in F for c in ev.copies) for F in factors)]
    return events


@dataclass
class DependencyGraph:
    events: list[BadEvent]
    adjacency: list[set[int]]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in sorted(nbrs) if i < j]

    def to_dot(self) -> str:
        lines = ["graph dependency {"]
        for i, ev in enumerate(self.events):
            label = f"{ev.kind} {' '.join(''.join(map(str, e)) for e in ev.edges)}"
            lines.append(f'  {i} [label="{label}"];')
        lines.extend(f"  {i} -- {j};" for i, j in self.edges())
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_dependency_graph(events: Sequence[BadEvent]) -> DependencyGraph:
    by_vertex: dict[int, list[int]] = {}
    for i, ev in enumerate(events):
        for v in ev.support:
            by_vertex.setdefault(v, []).append(i)
    adjacency: list[set[int]] = [set() for _ in events]
    for members in by_vertex.values():
        for i in members:
            adjacency[i].update(members)
    for i, nbrs in enumerate(adjacency):
        nbrs.discard(i)
    return DependencyGraph(list(events), adjacency)


@dataclass
class EventDegrees:
    d_A: int
    d_B: int
    bound_A: float | None = None
    bound_B: float | None = None


def envelope_constant(r: int, h: int) -> int:
    """Reporting constant covering both per-vertex event counts."""
    return 2 ** (r + 2) * factorial(h) ** 2


def event_degrees(gamma: DependencyGraph, n: int | None = None, h: int | None = None, r: int | None = None,
                  mu=None, constant=None) -> EventDegrees:
    """Largest number of A- and B-neighbours over all events.

    With ``n, h, r, mu`` supplied, also reports ``C mu n^(h-1)`` and
    ``C mu n^(2h-2)`` for comparison; nothing is asserted about them.
    """
    d_A = d_B = 0
    for nbrs in gamma.adjacency:
        kinds = Counter(gamma.events[j].kind for j in nbrs)
        d_A = max(d_A, kinds["A"])
        d_B = max(d_B, kinds["B"])
    out = EventDegrees(d_A, d_B)
    if None not in (n, h, r, mu):
        c = envelope_constant(r, h) if constant is None else constant
        out.bound_A = float(c * Fraction(mu) * n ** (h - 1))
        out.bound_B = float(c * Fraction(mu) * n ** (2 * h - 2))
    return out


@dataclass
class LLLParameters:
    p_A: Fraction
    p_B: Fraction
    gamma: Fraction
    condition: Fraction
    holds: bool

    def log_values(self) -> dict[str, float]:
        return {"log_p_A": _log_fraction(self.p_A), "log_p_B": _log_fraction(self.p_B)}


def _log_fraction(x: Fraction) -> float:
    # exact integers may overflow float; take logs of numerator and denominator separately
    return log(x.numerator) - log(x.denominator) if x > 0 else float("-inf")


def default_gamma(m: int, h: int) -> Fraction:
    return Fraction(1, (m * h) ** m)


def lll_parameters(n: int, h: int, m: int, gamma=None, d_A: int = 0, d_B: int = 0) -> LLLParameters:
    """Event probability bounds from switching counts, and the local lemma condition.

    ``p_A = (hm)! / gamma * n^(1-h)``, ``p_B = 2 (hm)!^2 / gamma^2 * n^(2-2h)``,
    condition ``p_A d_A + p_B d_B <= 1/4``. All exact rationals.
    """
    if min(n, h, m) <= 0:
        raise InputError("n, h, m must be positive")
    gamma = default_gamma(m, h) if gamma is None else Fraction(gamma)
    if gamma <= 0:
        raise InputError("gamma must be positive")
    f = factorial(h * m)
    p_A = f / gamma * Fraction(1, n ** (h - 1))
    p_B = 2 * f**2 / gamma**2 * Fraction(1, n ** (2 * h - 2))
    condition = p_A * d_A + p_B * d_B
    return LLLParameters(p_A, p_B, gamma, condition, condition <= Fraction(1, 4))


@dataclass
class SwitchingMultigraph:
    """Bipartite multigraph from factors containing ``H0`` to factors avoiding it."""

    left: list[PartialFactor]
    right: list[PartialFactor]
    edges: list[tuple[int, int]]
    escaped: int = 0

    def left_degrees(self) -> list[int]:
        deg = [0] * len(self.left)
        for i, _ in self.edges:
            deg[i] += 1
        return deg

    def right_degrees(self) -> list[int]:
        deg = [0] * len(self.right)
        for _, j in self.edges:
            deg[j] += 1
        return deg

    @property
    def min_left(self) -> int:
        return min(self.left_degrees(), default=0)

    @property
    def max_right(self) -> int:
        return max(self.right_degrees(), default=0)

    @property
    def ratio(self) -> Fraction:
        total = len(self.left) + len(self.right)
        return Fraction(len(self.left), total) if total else Fraction(0)

    def ratio_bound(self) -> Fraction | None:
        if self.min_left == 0:
            return None
        return Fraction(self.max_right, self.min_left)


def switching_multigraph_A(
    G: Hypergraph, H: Hypergraph, C: Colouring, H0: Copy, factors: Sequence[PartialFactor], m: int
) -> SwitchingMultigraph:
    """Join each factor containing ``H0`` to the results of its feasible size-``m`` switchings.

    Landings outside ``factors`` are not added; they are tallied in ``escaped``.
    """
    left = [F for F in factors if H0 in F]
    right = [F for F in factors if H0 not in F]
    index = {F: j for j, F in enumerate(right)}
    graph = SwitchingMultigraph(left, right, [])
    for i, F0 in enumerate(left):
        ctx = SwitchContext(G, H, C, F0, H0)
        for Y in iter_feasible_switchings(ctx, m):
            F = apply_switching(ctx, Y)
            assert H0 not in F and is_factor(G, H, F)
            if F in index:
                graph.edges.append((i, index[F]))
            else:
                graph.escaped += 1
    deg_l, deg_r = graph.left_degrees(), graph.right_degrees()
    assert sum(deg_l) == sum(deg_r) == len(graph.edges)
    bound = graph.ratio_bound()
    if bound is not None and graph.escaped == 0:
        assert graph.ratio <= bound, (graph.ratio, bound)
    return graph


# -- repair heuristic -----------------------------------------------------


@dataclass
class RepairResult:
    status: str  # "rainbow", "no-initial-factor" or "budget-exhausted"
    factor: PartialFactor | None
    steps: int
    history: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "rainbow"


def clashing_copies(F: PartialFactor, C: Colouring) -> list[Copy]:
    counts = Counter(C[e] for e in F.edges)
    return [c for c in F if any(counts[C[e]] > 1 for e in c.edges)]


def rainbow_repair(
    G: Hypergraph,
    H: Hypergraph,
    C: Colouring,
    m: int,
    seed,
    max_steps: int = 200,
    candidate_cap: int = 2_000,
) -> RepairResult:
    """Switch away colour clashes until the factor is rainbow or the budget runs out.

    Each step picks a clashing copy uniformly, scans feasible switchings of
    size ``2..m`` around it in random order (at most ``candidate_cap``
    candidates) and applies the first one found.
    """
    F = find_factor(G, H)
    if F is None:
        return RepairResult("no-initial-factor", None, 0)
    rng = random.Random(seed)
    result = RepairResult("budget-exhausted", F, 0)
    for step in range(max_steps + 1):
        if is_rainbow(C, F.edges):
            assert is_factor(G, H, F) and colour_clash(C, F.edges) is None
            result.status, result.factor, result.steps = "rainbow", F, step
            return result
        if step == max_steps:
            break
        H0 = rng.choice(clashing_copies(F, C))
        ctx = SwitchContext(G, H, C, F, H0)
        Y = _first_feasible(ctx, m, rng, candidate_cap)
        result.history.append({"step": step, "copy": sorted(H0.vertices), "switched": Y is not None})
        if Y is not None:
            F = apply_switching(ctx, Y)
    result.factor, result.steps = F, max_steps
    return result


def _first_feasible(ctx: SwitchContext, m: int, rng: random.Random, cap: int) -> PartialFactor | None:
    others = [c for c in ctx.F0 if c != ctx.H0]
    blocks = [rest for size in range(1, m) for rest in combinations(others, size)]
    rng.shuffle(blocks)
    examined = 0
    for rest in blocks:
        for Y in _switchings_on(ctx, (ctx.H0, *rest), order_rng=rng):
            examined += 1
            if is_feasible_switching(ctx, Y):
                return Y
            if examined >= cap:
                return None
    return None
