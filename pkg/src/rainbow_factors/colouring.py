"""Edge colourings, rainbow checks and mu-boundedness.

Colours are opaque non-negative integers. Boundedness thresholds are
compared with exact rationals throughout.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Mapping

from . import hypergraph as hg
from .errors import InputError
from .hypergraph import Edge, Hypergraph, as_edge


@dataclass(frozen=True, eq=False)
class Colouring:
    host: Hypergraph
    assignment: Mapping[Edge, int]

    def __post_init__(self):
        assignment = {as_edge(e): c for e, c in self.assignment.items()}
        if set(assignment) != set(self.host.edges):
            missing = set(self.host.edges) - set(assignment)
            extra = set(assignment) - set(self.host.edges)
            raise InputError(
                f"colouring must cover exactly the host edges "
                f"(missing {sorted(missing)[:3]}, extra {sorted(extra)[:3]})"
            )
        for e, c in assignment.items():
            if not isinstance(c, int) or c < 0:
                raise InputError(f"colour of {e} must be a non-negative integer, got {c!r}")
        object.__setattr__(self, "assignment", assignment)

    def __getitem__(self, edge) -> int:
        try:
            return self.assignment[as_edge(edge)]
        except KeyError:
            raise InputError(f"{tuple(edge)} is not an edge of the host") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Colouring):
            return NotImplemented
        return self.host == other.host and self.assignment == other.assignment

    def colours(self, edges: Iterable[Edge] | None = None) -> set[int]:
        if edges is None:
            return set(self.assignment.values())
        return {self[e] for e in edges}

    def classes(self) -> dict[int, list[Edge]]:
        out: dict[int, list[Edge]] = {}
        for e in sorted(self.assignment):
            out.setdefault(self.assignment[e], []).append(e)
        return out

    @classmethod
    def from_classes(cls, host: Hypergraph, classes: Iterable[Iterable[Iterable[int]]]) -> Colouring:
        assignment = {}
        for c, members in enumerate(classes):
            for e in members:
                assignment[as_edge(e)] = c
        return cls(host, assignment)


def colour_clash(C: Colouring, edges: Iterable[Iterable[int]]) -> tuple[Edge, Edge] | None:
    """Return two distinct edges of the same colour, or None if rainbow."""
    seen: dict[int, Edge] = {}
    for raw in sorted({as_edge(e) for e in edges}):
        c = C[raw]
        if c in seen:
            return seen[c], raw
        seen[c] = raw
    return None


def is_rainbow(C: Colouring, edges: Iterable[Iterable[int]]) -> bool:
    return colour_clash(C, edges) is None


@dataclass
class Verdict:
    """Outcome of a check; ``condition`` and ``witness`` describe the first failure."""

    ok: bool
    condition: str | None = None
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _local_counts(C: Colouring) -> Counter:
    counts: Counter = Counter()
    r = C.host.r
    for e, c in C.assignment.items():
        for I in combinations(e, r - 1):
            counts[c, I] += 1
    return counts


def min_mu(C: Colouring) -> Fraction:
    """Smallest mu for which ``C`` is mu-bounded."""
    n, r = C.host.n, C.host.r
    global_counts = Counter(C.assignment.values())
    best = Fraction(0)
    if global_counts:
        best = Fraction(max(global_counts.values()), n ** (r - 1))
        best = max(best, Fraction(max(_local_counts(C).values()), n))
    return best


def is_mu_bounded(C: Colouring, mu) -> Verdict:
    """Check both boundedness conditions at ``mu`` (inclusive)."""
    mu = Fraction(mu)
    if mu <= 0:
        raise InputError("mu must be positive")
    n, r = C.host.n, C.host.r
    global_limit = mu * n ** (r - 1)
    for c, size in sorted(Counter(C.assignment.values()).items()):
        if size > global_limit:
            return Verdict(False, "global", {"colour": c, "count": size, "limit": global_limit})
    local_limit = mu * n
    for (c, I), size in sorted(_local_counts(C).items()):
        if size > local_limit:
            return Verdict(
                False, "local", {"colour": c, "subset": list(I), "count": size, "limit": local_limit}
            )
    return Verdict(True)


# -- generators -----------------------------------------------------------


def subset_rank(subset: Iterable[int]) -> int:
    """Colexicographic rank of a sorted vertex set; a bijection onto 0..C(n,k)-1."""
    return sum(comb(v, i + 1) for i, v in enumerate(sorted(subset)))


def gen_prefix_colouring(n: int, r: int) -> Colouring:
    """Colour each edge of the complete r-graph by its r-1 smallest vertices."""
    if not n > r >= 2:
        raise InputError(f"need n > r >= 2, got n={n}, r={r}")
    G = hg.complete(n, r)
    return Colouring(G, {e: subset_rank(e[: r - 1]) for e in G.edges})


def rainbow_colouring(G: Hypergraph) -> Colouring:
    return Colouring(G, {e: i for i, e in enumerate(G.sorted_edges())})


def monochromatic_colouring(G: Hypergraph, colour: int = 0) -> Colouring:
    return Colouring(G, dict.fromkeys(G.edges, colour))


def gen_random_bounded(G: Hypergraph, mu, seed) -> Colouring:
    """Greedy random colouring that respects floored mu-budgets.

    Edges are visited in a seeded random order and each takes the lowest
    colour whose global class size and every local (r-1)-set count would
    stay within budget; a fresh colour opens when none fits.
    """
    mu = Fraction(mu)
    n, r = G.n, G.r
    global_budget = int(mu * n ** (r - 1))
    local_budget = int(mu * n)
    if global_budget < 1 or local_budget < 1:
        raise InputError(f"mu={mu} is infeasible on n={n}: every budget floors to 0")
    order = G.sorted_edges()
    random.Random(seed).shuffle(order)

    class_size: list[int] = []
    local: Counter = Counter()
    assignment = {}
    for e in order:
        subsets = list(combinations(e, r - 1))
        for c, size in enumerate(class_size):
            if size < global_budget and all(local[c, I] < local_budget for I in subsets):
                break
        else:
            c = len(class_size)
            class_size.append(0)
        class_size[c] += 1
        for I in subsets:
            local[c, I] += 1
        assignment[e] = c
    return Colouring(G, assignment)


# -- text format ----------------------------------------------------------


def dumps(C: Colouring, graph_ref: str) -> str:
    lines = [f"hypergraph {graph_ref}"]
    lines.extend(" ".join(map(str, (*e, C.assignment[e]))) for e in C.host.sorted_edges())
    return "\n".join(lines) + "\n"


def loads(text: str, host: Hypergraph) -> Colouring:
    """Parse the edge lines of a colouring file against an already loaded host."""
    assignment = {}
    for line in hg._content_lines(text):
        if line.startswith("hypergraph "):
            continue
        try:
            *vs, c = (int(tok) for tok in line.split())
        except ValueError as exc:
            raise InputError(f"malformed colouring line {line!r}") from exc
        if len(vs) != host.r:
            raise InputError(f"colouring line {line!r} needs {host.r} vertices and a colour")
        e = as_edge(vs)
        if e in assignment:
            raise InputError(f"edge {e} coloured twice")
        assignment[e] = c
    return Colouring(host, assignment)


def graph_reference(text: str) -> str:
    for line in hg._content_lines(text):
        if line.startswith("hypergraph "):
            return line.split(None, 1)[1].strip()
        break
    raise InputError("colouring file must start with 'hypergraph <path>'")


def load(path: str | Path) -> Colouring:
    """Load a colouring file together with the hypergraph file it references."""
    path = Path(path)
    text = path.read_text()
    graph_path = Path(graph_reference(text))
    if not graph_path.is_absolute():
        graph_path = path.parent / graph_path
    return loads(text, hg.load(graph_path))


def save(C: Colouring, path: str | Path, graph_ref: str) -> None:
    Path(path).write_text(dumps(C, graph_ref))
