"""Uniform hypergraphs on vertex sets ``0..n-1``.

Edges are stored as sorted tuples in a frozenset so membership tests are
hash lookups; everything downstream leans on that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError

Edge = tuple[int, ...]


def as_edge(vertices: Iterable[int]) -> Edge:
    return tuple(sorted(vertices))


@dataclass(frozen=True)
class Hypergraph:
    """An r-uniform hypergraph with vertices ``0..n-1``."""

    n: int
    r: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __init__(self, n: int, r: int, edges: Iterable[Iterable[int]] = ()):
        if r < 1:
            raise InputError(f"uniformity must be >= 1, got {r}")
        if n < r:
            raise InputError(f"need n >= r, got n={n}, r={r}")
        normalised = set()
        for raw in edges:
            e = as_edge(raw)
            if len(e) != r or len(set(e)) != r:
                raise InputError(f"edge {raw!r} does not have {r} distinct vertices")
            if e[0] < 0 or e[-1] >= n:
                raise InputError(f"edge {raw!r} has a vertex outside 0..{n - 1}")
            if e in normalised:
                raise InputError(f"duplicate edge {e}")
            normalised.add(e)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "edges", frozenset(normalised))

    def __contains__(self, edge) -> bool:
        return as_edge(edge) in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    def check_vertices(self, vertices: Iterable[int]) -> tuple[int, ...]:
        vs = tuple(sorted(set(vertices)))
        if vs and (vs[0] < 0 or vs[-1] >= self.n):
            raise InputError(f"vertex set {vs} not within 0..{self.n - 1}")
        return vs

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, r={self.r}, edges={len(self.edges)})"


def complete(n: int, r: int) -> Hypergraph:
    return Hypergraph(n, r, combinations(range(n), r))


def cycle(n: int) -> Hypergraph:
    return Hypergraph(n, 2, ((i, (i + 1) % n) for i in range(n)))


def path(k: int) -> Hypergraph:
    """Graph path with ``k`` edges on ``k + 1`` vertices."""
    return Hypergraph(k + 1, 2, ((i, i + 1) for i in range(k)))


def single_edge(r: int) -> Hypergraph:
    return Hypergraph(r, r, [range(r)])


def degree(G: Hypergraph, L: Iterable[int]) -> int:
    """Number of edges of ``G`` containing every vertex of ``L``."""
    L = set(G.check_vertices(L))
    if len(L) > G.r:
        return 0
    return sum(1 for e in G.edges if L.issubset(e))


def min_ell_degree(G: Hypergraph, ell: int) -> int:
    """Minimum ``ell``-degree over all ``ell``-subsets of the vertex set."""
    if not 1 <= ell < G.r:
        raise InputError(f"ell must satisfy 1 <= ell < r={G.r}, got {ell}")
    counts = dict.fromkeys(combinations(range(G.n), ell), 0)
    for e in G.edges:
        for L in combinations(e, ell):
            counts[L] += 1
    return min(counts.values())


def part_min_degree(G: Hypergraph, part: Sequence[int], ell: int) -> int | None:
    """``min_ell_degree(G[part], ell)`` without building the induced graph.

    Works for parts smaller than ``r`` (degrees are then 0) and returns None
    when the part has fewer than ``ell`` vertices, where the minimum ranges
    over nothing.
    """
    part = sorted(part)
    if len(part) < ell:
        return None
    inside = set(part)
    counts = dict.fromkeys(combinations(part, ell), 0)
    if len(part) >= G.r:
        for e in G.edges:
            if inside.issuperset(e):
                for L in combinations(e, ell):
                    counts[L] += 1
    return min(counts.values())


def induced(G: Hypergraph, S: Iterable[int]) -> tuple[Hypergraph, list[int]]:
    """Subgraph induced on ``S``, relabelled to ``0..|S|-1``.

    Returns the graph and ``labels`` with ``labels[new] == old``.
    """
    labels = list(G.check_vertices(S))
    index = {v: i for i, v in enumerate(labels)}
    edges = [tuple(index[v] for v in e) for e in G.edges if all(v in index for v in e)]
    return Hypergraph(len(labels), G.r, edges), labels


def complete_min_degree(n: int, r: int, ell: int) -> int:
    return comb(n - ell, r - ell)


# -- text format ----------------------------------------------------------


def dumps(G: Hypergraph) -> str:
    lines = [f"{G.n} {G.r}"]
    lines.extend(" ".join(map(str, e)) for e in G.sorted_edges())
    return "\n".join(lines) + "\n"


def _content_lines(text: str):
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line


def loads(text: str) -> Hypergraph:
    lines = _content_lines(text)
    try:
        header = next(lines).split()
        n, r = int(header[0]), int(header[1])
        edges = [[int(tok) for tok in line.split()] for line in lines]
    except (StopIteration, IndexError, ValueError) as exc:
        raise InputError(f"malformed hypergraph text: {exc}") from exc
    return Hypergraph(n, r, edges)


def load(path: str | Path) -> Hypergraph:
    return loads(Path(path).read_text())


def save(G: Hypergraph, path: str | Path) -> None:
    Path(path).write_text(dumps(G))
