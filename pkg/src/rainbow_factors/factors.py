"""Copies of a pattern, partial factors and exact factor search.

Factor search is an exact cover problem: vertices are the items and copies
are the options. ``_exact_covers`` is a dict-of-sets Algorithm X that
branches on the vertex with fewest covering copies (ties to the smallest
vertex), so every search here is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import hypergraph as hg
from .colouring import Colouring, colour_clash
from .errors import InputError, ResourceLimitError
from .hypergraph import Edge, Hypergraph, as_edge

DEFAULT_COPY_CAP = 200_000


@dataclass(frozen=True, order=False)
class Copy:
    """An embedded copy of a pattern.

    Two embeddings with the same vertex set and edge image are the same
    copy; ``vertex_image`` keeps the lexicographically smallest embedding
    and is ignored by equality.
    """

    vertices: frozenset[int]
    edges: frozenset[Edge]
    vertex_image: tuple[int, ...] = field(compare=False, default=())

    @classmethod
    def from_image(cls, H: Hypergraph, image: Sequence[int]) -> Copy:
        image = tuple(image)
        edges = frozenset(as_edge(image[v] for v in e) for e in H.edges)
        return cls(frozenset(image), edges, image)

    @property
    def key(self) -> tuple:
        return tuple(sorted(self.vertices)), tuple(sorted(self.edges))

    def relabel(self, labels: Sequence[int]) -> Copy:
        return Copy(
            frozenset(labels[v] for v in self.vertices),
            frozenset(as_edge(labels[v] for v in e) for e in self.edges),
            tuple(labels[v] for v in self.vertex_image),
        )

    def to_json(self) -> dict:
        return {"vertices": sorted(self.vertices), "edges": [list(e) for e in sorted(self.edges)]}

    def __repr__(self) -> str:
        return f"Copy({sorted(self.vertices)})"


@dataclass(frozen=True)
class PartialFactor:
    """Vertex-disjoint copies, held in canonical order."""

    copies: tuple[Copy, ...]

    def __init__(self, copies: Iterable[Copy] = ()):
        ordered = tuple(sorted(set(copies), key=lambda c: c.key))
        seen: set[int] = set()
        for c in ordered:
            if seen & c.vertices:
                raise InputError(f"copies overlap at {sorted(seen & c.vertices)}")
            seen |= c.vertices
        object.__setattr__(self, "copies", ordered)

    def __len__(self) -> int:
        return len(self.copies)

    def __iter__(self) -> Iterator[Copy]:
        return iter(self.copies)

    def __contains__(self, copy) -> bool:
        return copy in self.copies

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset().union(*(c.vertices for c in self.copies))

    @property
    def edges(self) -> list[Edge]:
        return sorted(e for c in self.copies for e in c.edges)

    def copy_of(self, v: int) -> Copy | None:
        for c in self.copies:
            if v in c.vertices:
                return c
        return None

    def to_json(self) -> dict:
        return {"copies": [c.to_json() for c in self.copies]}

    @classmethod
    def from_json(cls, data: dict, H: Hypergraph | None = None) -> PartialFactor:
        copies = []
        for raw in data["copies"]:
            edges = frozenset(as_edge(e) for e in raw["edges"])
            copies.append(Copy(frozenset(raw["vertices"]), edges, tuple(sorted(raw["vertices"]))))
        return cls(copies)

    def __repr__(self) -> str:
        return f"PartialFactor({[sorted(c.vertices) for c in self.copies]})"


def is_valid_copy(G: Hypergraph, H: Hypergraph, copy: Copy) -> bool:
    """Independent check that ``copy`` really embeds ``H`` into ``G``."""
    image = copy.vertex_image
    if len(image) != H.n or len(set(image)) != H.n or set(image) != set(copy.vertices):
        return False
    if any(not 0 <= v < G.n for v in image):
        return False
    mapped = {as_edge(image[v] for v in e) for e in H.edges}
    return mapped == set(copy.edges) and all(e in G.edges for e in mapped)


def is_factor(G: Hypergraph, H: Hypergraph, F: PartialFactor) -> bool:
    return (
        len(F) * H.n == G.n
        and F.vertices == frozenset(range(G.n))
        and all(is_valid_copy(G, H, c) for c in F)
    )


def _check_pattern(G: Hypergraph, H: Hypergraph) -> None:
    if G.r != H.r:
        raise InputError(f"uniformity mismatch: host r={G.r}, pattern r={H.r}")


def enumerate_copies(G: Hypergraph, H: Hypergraph, cap: int | None = DEFAULT_COPY_CAP) -> list[Copy]:
    """All copies of ``H`` in ``G`` in canonical order."""
    _check_pattern(G, H)
    if H.n > G.n:
        return []
    h = H.n
    # edges of H grouped by their largest vertex: checkable once that vertex is placed
    closing: list[list[Edge]] = [[] for _ in range(h)]
    for e in H.edges:
        closing[max(e)].append(e)
    image = [0] * h
    used = [False] * G.n
    found: dict[tuple, Copy] = {}

    def extend(k: int) -> None:
        if k == h:
            c = Copy.from_image(H, image)
            prev = found.get(c.key)
            if prev is None or c.vertex_image < prev.vertex_image:
                if prev is None and cap is not None and len(found) >= cap:
                    raise ResourceLimitError(f"more than {cap} copies", partial=len(found))
                found[c.key] = c
            return
        for v in range(G.n):
            if used[v]:
                continue
            image[k] = v
            if all(as_edge(image[u] for u in e) in G.edges for e in closing[k]):
                used[v] = True
                extend(k + 1)
                used[v] = False

    extend(0)
    return [found[k] for k in sorted(found)]


def _exact_covers(items: Iterable[int], options: Sequence[frozenset[int]]) -> Iterator[list[int]]:
    """Yield index lists of options that partition ``items`` exactly."""
    cols: dict[int, set[int]] = {v: set() for v in items}
    for i, opt in enumerate(options):
        if not opt <= cols.keys():
            continue
        for v in opt:
            cols[v].add(i)
    chosen: list[int] = []

    def select(i: int) -> list[set[int]]:
        removed = []
        for v in options[i]:
            for j in cols[v]:
                for w in options[j]:
                    if w != v:
                        cols[w].discard(j)
            removed.append(cols.pop(v))
        return removed

    def deselect(i: int, removed: list[set[int]]) -> None:
        for v in reversed(list(options[i])):
            cols[v] = removed.pop()
            for j in cols[v]:
                for w in options[j]:
                    if w != v:
                        cols[w].add(j)

    def search() -> Iterator[list[int]]:
        if not cols:
            yield list(chosen)
            return
        v = min(cols, key=lambda u: (len(cols[u]), u))
        for i in sorted(cols[v]):
            chosen.append(i)
            removed = select(i)
            yield from search()
            deselect(i, removed)
            chosen.pop()

    yield from search()


def iter_factors(
    G: Hypergraph, H: Hypergraph, copies: Sequence[Copy] | None = None, cap: int | None = DEFAULT_COPY_CAP
) -> Iterator[PartialFactor]:
    """Lazily yield H-factors of ``G`` in search order.

    ``copies`` may restrict the candidate copies (they must be copies in ``G``).
    """
    _check_pattern(G, H)
    if G.n % H.n:
        raise InputError(f"pattern order h={H.n} does not divide n={G.n}")
    if copies is None:
        copies = enumerate_copies(G, H, cap)
    options = [c.vertices for c in copies]
    for chosen in _exact_covers(range(G.n), options):
        yield PartialFactor(copies[i] for i in chosen)


def find_factor(G: Hypergraph, H: Hypergraph, cap: int | None = DEFAULT_COPY_CAP) -> PartialFactor | None:
    return next(iter_factors(G, H, cap=cap), None)


def enumerate_factors(
    G: Hypergraph, H: Hypergraph, limit: int | None = None, cap: int | None = DEFAULT_COPY_CAP
) -> list[PartialFactor]:
    """All H-factors of ``G`` (at most ``limit``), canonically sorted."""
    out = []
    for F in iter_factors(G, H, cap=cap):
        out.append(F)
        if limit is not None and len(out) >= limit:
            break
    return sorted(out, key=lambda F: [c.key for c in F])


def find_rainbow_factor_bruteforce(
    G: Hypergraph, H: Hypergraph, C: Colouring, cap: int | None = DEFAULT_COPY_CAP
) -> PartialFactor | None:
    """Exhaust every H-factor and return the first whose edges are rainbow."""
    for F in iter_factors(G, H, cap=cap):
        if colour_clash(C, F.edges) is None:
            return F
    return None


MAX_THRESHOLD_EDGES = 21


def delta_threshold(H: Hypergraph, n: int, ell: int) -> int:
    """Largest minimum ell-degree of an r-graph on ``n`` vertices with no H-factor.

    Every r-graph ``G`` on ``n`` vertices with ``min_ell_degree(G, ell)``
    above the returned value has an H-factor. Returns -1 when every graph
    (including the empty one) has a factor. Exhaustive over all
    ``2**C(n, r)`` graphs, encoded as bitmasks over the edges of the
    complete r-graph.
    """
    r = H.r
    if not 1 <= ell < r:
        raise InputError(f"ell must satisfy 1 <= ell < r={r}, got {ell}")
    if n % H.n:
        raise InputError(f"pattern order h={H.n} does not divide n={n}")
    K = hg.complete(n, r)
    slots = K.sorted_edges()
    if len(slots) > MAX_THRESHOLD_EDGES:
        raise ResourceLimitError(
            f"{2 ** len(slots)} graphs on n={n}, r={r} exceed the exhaustive cap 2**{MAX_THRESHOLD_EDGES}"
        )
    bit = {e: 1 << i for i, e in enumerate(slots)}
    masks = np.arange(1 << len(slots), dtype=np.int64)

    factor_free = np.ones(masks.shape, dtype=bool)
    for F in iter_factors(K, H, cap=None):
        fm = sum(bit[e] for e in set(F.edges))
        factor_free &= (masks & fm) != fm
    if not factor_free.any():
        return -1
    candidates = masks[factor_free]

    min_deg = np.full(candidates.shape, np.iinfo(np.int64).max, dtype=np.int64)
    for L in combinations(range(n), ell):
        lm = sum(bit[e] for e in slots if set(L).issubset(e))
        min_deg = np.minimum(min_deg, np.bitwise_count(candidates & lm).astype(np.int64))
    return int(min_deg.max())
