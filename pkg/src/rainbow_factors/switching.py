"""Switchings of a factor around a distinguished copy.

A switching ``Y`` for ``(H0, F0)`` re-tiles a union of ``F0``-copies that
contains ``H0`` with new copies, each touching ``H0`` at most once. It is
feasible when its edges away from ``H0`` are rainbow and avoid every colour
on the ``F0``-copies it leaves alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from . import hypergraph as hg
from .colouring import Colouring, Verdict, colour_clash
from .errors import InputError, ResourceLimitError
from .factors import Copy, PartialFactor, enumerate_copies, is_factor, is_valid_copy, iter_factors
from .hypergraph import Edge, Hypergraph


@dataclass(frozen=True, eq=False)
class SwitchContext:
    G: Hypergraph
    H: Hypergraph
    C: Colouring
    F0: PartialFactor
    H0: Copy

    def __post_init__(self):
        if self.C.host != self.G:
            raise InputError("colouring host differs from G")
        if self.H0 not in self.F0:
            raise InputError("H0 must be a copy of F0")
        if not is_factor(self.G, self.H, self.F0):
            raise InputError("F0 must be an H-factor of G")

    @property
    def h0_vertices(self) -> frozenset[int]:
        return self.H0.vertices

    def factor_colours(self) -> set[int]:
        return self.C.colours(self.F0.edges)


@dataclass(frozen=True)
class TransversePartition:
    parts: tuple[tuple[int, ...], ...]

    def __init__(self, parts: Iterable[Iterable[int]]):
        object.__setattr__(self, "parts", tuple(tuple(sorted(p)) for p in parts))

    def __iter__(self):
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def is_valid_for(self, X: PartialFactor) -> bool:
        """Each part meets each copy of ``X`` exactly once."""
        if len(self.parts) == 0:
            return False
        if any(len(c.vertices) != len(self.parts) for c in X):
            return False
        for part in self.parts:
            if len(part) != len(X):
                return False
            if any(len(c.vertices.intersection(part)) != 1 for c in X):
                return False
        return True

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.parts]


def is_transverse(X: PartialFactor, S: Iterable[int]) -> bool:
    S = set(S)
    if not S <= X.vertices:
        raise InputError(f"{sorted(S - X.vertices)} not covered by X")
    return all(len(c.vertices & S) <= 1 for c in X)


def x_ef(X: PartialFactor, e: Iterable[int], f: Iterable[int]) -> list[Copy]:
    """Copies of ``X`` meeting ``e | f`` in at least two vertices."""
    union = set(e) | set(f)
    return [c for c in X if len(c.vertices & union) >= 2]


def _check_subfactor(ctx: SwitchContext, X: PartialFactor) -> None:
    if ctx.H0 not in X:
        raise InputError("H0 must belong to X")
    if any(c not in ctx.F0 for c in X):
        raise InputError("X must be a subset of F0")


def is_suitable(ctx: SwitchContext, X: PartialFactor, epsilon, conditions=("sparse", "pairs")) -> Verdict:
    """Check the colour-conflict sparsity and same-colour pair conditions on ``X``.

    Condition ``"sparse"`` (``I`` ranges over transverse (r-1)-sets of
    ``V(X) - V(H0)``) counts vertices ``v`` in ``V(X)`` with ``I + v`` an
    edge whose colour appears on ``F0``; at most ``epsilon*|X|/4`` allowed.
    Condition ``"pairs"`` ranges over distinct same-coloured edges inside
    ``V(X)``, both transverse and disjoint from ``V(H0)``.
    ``conditions`` selects which of the two are checked.
    """
    _check_subfactor(ctx, X)
    epsilon = Fraction(epsilon)
    G, C, r = ctx.G, ctx.C, ctx.G.r
    VX = X.vertices
    h0 = ctx.h0_vertices
    owner = {v: c for c in X for v in c.vertices}
    f0_colours = ctx.factor_colours()
    limit = epsilon * len(X) / 4

    def transverse(vs) -> bool:
        return len({owner[v] for v in vs}) == len(vs)

    pool = sorted(VX - h0) if "sparse" in conditions else []
    for I in combinations(pool, r - 1):
        if not transverse(I):
            continue
        conflicts = [
            v for v in sorted(VX - set(I))
            if (e := hg.as_edge((*I, v))) in G.edges and C[e] in f0_colours
        ]
        if len(conflicts) > limit:
            return Verdict(False, "sparse", {"I": list(I), "vertices": conflicts, "limit": limit})

    if "pairs" not in conditions:
        return Verdict(True)
    by_colour: dict[int, list[Edge]] = {}
    for e in sorted(G.edges):
        if VX.issuperset(e) and h0.isdisjoint(e) and transverse(e):
            by_colour.setdefault(C[e], []).append(e)
    for colour, group in sorted(by_colour.items()):
        for e, f in combinations(group, 2):
            touched = x_ef(X, e, f)
            disjoint = set(e).isdisjoint(f)
            if not touched or (disjoint and len(touched) < 2):
                return Verdict(
                    False,
                    "pairs",
                    {"e": list(e), "f": list(f), "colour": colour, "touched": [sorted(c.vertices) for c in touched]},
                )
    return Verdict(True)


def reduced_edges(ctx: SwitchContext, Y: PartialFactor) -> list[Edge]:
    """Edges of ``Y`` that avoid ``V(H0)``."""
    return [e for e in Y.edges if ctx.h0_vertices.isdisjoint(e)]


def is_feasible_switching(ctx: SwitchContext, Y: PartialFactor) -> Verdict:
    """Check that ``Y`` is a feasible ``(H0, F0)``-switching.

    Conditions, in order: ``"aligned"`` (each F0-copy inside or outside
    ``V(Y)``), ``"touch"`` (each Y-copy meets ``V(H0)`` at most once),
    ``"rainbow"`` and ``"fresh"`` (no reduced edge reuses a colour of an
    untouched F0-copy).
    """
    VY = Y.vertices
    if not ctx.h0_vertices <= VY:
        raise InputError("V(H0) must be contained in V(Y)")
    for c in Y:
        if not is_valid_copy(ctx.G, ctx.H, c):
            raise InputError(f"{c!r} is not a copy of H in G")
    for c in ctx.F0:
        if not (c.vertices <= VY or c.vertices.isdisjoint(VY)):
            return Verdict(False, "aligned", {"copy": sorted(c.vertices)})
    for c in Y:
        if len(c.vertices & ctx.h0_vertices) > 1:
            return Verdict(False, "touch", {"copy": sorted(c.vertices)})
    reduced = reduced_edges(ctx, Y)
    clash = colour_clash(ctx.C, reduced)
    if clash is not None:
        return Verdict(False, "rainbow", {"edges": [list(e) for e in clash]})
    untouched = {ctx.C[e] for c in ctx.F0 if c.vertices.isdisjoint(VY) for e in c.edges}
    for e in reduced:
        if ctx.C[e] in untouched:
            return Verdict(False, "fresh", {"edge": list(e), "colour": ctx.C[e]})
    return Verdict(True)


def _switchings_on(
    ctx: SwitchContext, block: Sequence[Copy], order_rng: random.Random | None = None
) -> Iterator[PartialFactor]:
    """Candidate switchings covering exactly the union of ``block``.

    Yields partial factors of ``G[V(block)]`` whose copies each touch
    ``V(H0)`` at most once; feasibility is left to the caller.
    """
    U = frozenset().union(*(c.vertices for c in block))
    sub, labels = hg.induced(ctx.G, U)
    h0_local = {i for i, v in enumerate(labels) if v in ctx.h0_vertices}
    copies = [c for c in enumerate_copies(sub, ctx.H, cap=None) if len(c.vertices & h0_local) <= 1]
    if order_rng is not None:
        order_rng.shuffle(copies)
    for Y in iter_factors(sub, ctx.H, copies=copies, cap=None):
        yield PartialFactor(c.relabel(labels) for c in Y)


def iter_feasible_switchings(ctx: SwitchContext, m: int, cap: int | None = None) -> Iterator[PartialFactor]:
    """All feasible switchings with ``m`` copies, in canonical block order."""
    if m < 1:
        raise InputError("switching size must be >= 1")
    others = [c for c in ctx.F0 if c != ctx.H0]
    examined = 0
    for rest in combinations(others, m - 1):
        for Y in _switchings_on(ctx, (ctx.H0, *rest)):
            examined += 1
            if cap is not None and examined > cap:
                raise ResourceLimitError(f"examined more than {cap} candidate switchings")
            if is_feasible_switching(ctx, Y):
                yield Y


def count_feasible_switchings(ctx: SwitchContext, m: int, cap: int | None = 1_000_000) -> int:
    """Exact number of feasible ``(H0, F0)``-switchings of size ``m``."""
    count = 0
    try:
        for _ in iter_feasible_switchings(ctx, m, cap):
            count += 1
    except ResourceLimitError as exc:
        raise ResourceLimitError(str(exc), partial=count) from None
    return count


@dataclass
class Construction:
    """Result of :func:`construct_switching`.

    On failure ``switching`` is None and ``failed_part`` is the 1-based
    index of the part whose pruned graph had no usable factor.
    """

    switching: PartialFactor | None
    failed_part: int | None = None
    part_edges: list[int] = field(default_factory=list)
    deleted_edges: list[int] = field(default_factory=list)
    part_degrees: list[int | None] = field(default_factory=list)
    degree_target: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.switching is not None

    @property
    def degree_condition(self) -> bool | None:
        if self.degree_target is None:
            return None
        return all(d is not None and d >= self.degree_target for d in self.part_degrees)


def construct_switching(
    ctx: SwitchContext,
    X: PartialFactor,
    P: TransversePartition,
    epsilon=0,
    delta_hat=None,
    ell: int = 1,
    check_suitable: bool = False,
) -> Construction:
    """Build a switching on ``V(X)`` one transverse part at a time.

    For part ``i`` the induced graph loses every edge disjoint from
    ``V(H0)`` whose colour appears on ``F0`` or on an earlier part's
    factor; a factor of what remains is then searched for exhaustively,
    keeping the first whose ``H0``-avoiding edges are rainbow. When
    ``delta_hat`` is given the per-part minimum ``ell``-degree of ``G[V_i]``
    is compared with ``(delta_hat + epsilon/2) * m**(r - ell)``.
    """
    G, H, C = ctx.G, ctx.H, ctx.C
    h, r = H.n, H.r
    if r < 2 or h < r:
        raise InputError(f"need h >= r >= 2, got h={h}, r={r}")
    _check_subfactor(ctx, X)
    m = len(X)
    if not P.is_valid_for(X):
        raise InputError("P is not a transverse partition of V(X)")
    epsilon = Fraction(epsilon)
    if check_suitable:
        verdict = is_suitable(ctx, X, epsilon)
        if not verdict:
            raise InputError(f"X is not suitable: {verdict.condition} {verdict.witness}")

    result = Construction(switching=None)
    if delta_hat is not None:
        result.degree_target = (Fraction(delta_hat) + epsilon / 2) * m ** (r - ell)
        result.part_degrees = [hg.part_min_degree(G, part, ell) for part in P]

    h0 = ctx.h0_vertices
    banned = set(ctx.factor_colours())
    chosen: list[Copy] = []
    for i, part in enumerate(P, start=1):
        if len(part) < r:
            result.part_edges.append(0)
            result.deleted_edges.append(0)
            result.failed_part = i
            return result
        sub, labels = hg.induced(G, part)
        keep = [
            e for e in sub.edges
            if not (h0.isdisjoint(labels[v] for v in e) and C[tuple(labels[v] for v in e)] in banned)
        ]
        Gi = Hypergraph(sub.n, sub.r, keep)
        result.part_edges.append(len(keep))
        result.deleted_edges.append(len(sub.edges) - len(keep))
        if len(part) % h:
            # a part of m vertices has no H-factor unless h divides m
            result.failed_part = i
            return result
        Yi = None
        for F in iter_factors(Gi, H, cap=None):
            mapped = [c.relabel(labels) for c in F]
            away = [e for c in mapped for e in c.edges if h0.isdisjoint(e)]
            if colour_clash(C, away) is None:
                Yi = mapped
                break
        if Yi is None:
            result.failed_part = i
            return result
        chosen.extend(Yi)
        banned |= C.colours(e for c in Yi for e in c.edges)

    Y = PartialFactor(chosen)
    verdict = is_feasible_switching(ctx, Y)
    assert verdict, f"constructed switching is infeasible: {verdict}"
    result.switching = Y
    return result


def apply_switching(ctx: SwitchContext, Y: PartialFactor) -> PartialFactor:
    """Replace the F0-copies inside ``V(Y)`` by ``Y``."""
    verdict = is_feasible_switching(ctx, Y)
    if not verdict:
        raise InputError(f"switching is infeasible ({verdict.condition}: {verdict.witness})")
    VY = Y.vertices
    return PartialFactor([c for c in ctx.F0 if c.vertices.isdisjoint(VY)] + list(Y))
