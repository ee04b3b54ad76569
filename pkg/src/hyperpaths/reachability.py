"""Hypergraph reachability and the two-phase reduction to useful vertices.

``reach_from`` marks every vertex derivable from a source set: a vertex is
reachable if it is a source, or if some arc pointing at it has all of its
tail vertices reachable. ``reach_to`` marks, by a backward traversal from the
target over the projected ordinary graph, the vertices that can participate
in reaching it. ``reduce`` composes them, forward pass first; that order is
essential, since the backward pass counts a tail as useful only under the
assumption that every sibling tail is derivable.

Both passes use explicit worklists instead of recursion so that deep graphs
cannot overflow the interpreter stack; their boolean outputs do not depend on
traversal order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import Hypergraph, Query, RestrictResult, ValidationError, restrict


@dataclass(frozen=True, slots=True)
class ReachResult:
    """Per-vertex reachability flags plus a tail-slot touch counter.

    ``touches`` counts adjacency visits in the marking loop; it is bounded by
    the total input size, which is the linear-time claim in checkable form.
    """

    reached: tuple[bool, ...]
    touches: int

    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v, r in enumerate(self.reached) if r)


def reach_from(g: Hypergraph, sources: Iterable[int]) -> ReachResult:
    """Mark all vertices derivable from ``sources``.

    Each arc keeps a countdown of distinct tail vertices not yet reached and
    fires when it hits zero, so every (arc, distinct tail) slot is handled
    once: O(t) in the total input size.
    """
    src = set(sources)
    if not src:
        raise ValidationError("source set must be nonempty")
    for v in src:
        if not 0 <= v < g.n:
            raise ValidationError(f"source vertex {v} out of range (n={g.n})")

    reached = [False] * g.n
    remaining = [len(d) for d in g._dtails]
    heads = g._heads
    forward = g.forward
    stack = []
    for v in src:
        reached[v] = True
        stack.append(v)
    touches = 0
    while stack:
        y = stack.pop()
        for i in forward[y]:
            touches += 1
            h = heads[i]
            if not reached[h]:
                remaining[i] -= 1
                if remaining[i] == 0:
                    reached[h] = True
                    stack.append(h)
    return ReachResult(tuple(reached), touches)


def reach_to(g: Hypergraph, target: int) -> ReachResult:
    """Mark vertices that can help reach ``target``, heads to tails.

    Depth-first traversal on the projected ordinary graph: every tail of an
    arc whose head is marked gets marked. This is sound only when every
    vertex of ``g`` is already derivable from the sources (run
    :func:`reach_from` and restrict first); the pass itself does not check.
    """
    if not 0 <= target < g.n:
        raise ValidationError(f"target vertex {target} out of range (n={g.n})")
    reached = [False] * g.n
    reached[target] = True
    stack = [target]
    dtails = g._dtails
    backward = g.backward
    touches = 0
    while stack:
        v = stack.pop()
        for i in backward[v]:
            for t, _ in dtails[i]:
                touches += 1
                if not reached[t]:
                    reached[t] = True
                    stack.append(t)
    return ReachResult(tuple(reached), touches)


@dataclass(frozen=True, slots=True)
class ReduceResult:
    """Result of the two-phase reduction.

    Index maps are old id -> new id over the composed restriction. The
    remapped query drops sources that turned out useless for the target.
    ``pass1_vertices`` / ``pass2_vertices`` expose, in original ids, the
    vertex sets surviving each phase (pass2 is the final set).
    """

    graph: Hypergraph
    vertex_map: dict[int, int]
    arc_map: dict[int, int]
    sources: tuple[tuple[int, float], ...]
    target: int | None
    target_reachable: bool
    pass1_vertices: frozenset[int]
    pass2_vertices: frozenset[int]


def _compose(first: RestrictResult, second: RestrictResult) -> tuple[dict[int, int], dict[int, int]]:
    vmap = {
        old: second.vertex_map[mid]
        for old, mid in first.vertex_map.items()
        if mid in second.vertex_map
    }
    amap = {
        old: second.arc_map[mid]
        for old, mid in first.arc_map.items()
        if mid in second.arc_map
    }
    return vmap, amap


def reduce(g: Hypergraph, query: Query, *, backward_first: bool = False) -> ReduceResult:
    """Drop every vertex and arc not derivable from the sources or not able
    to participate in reaching the target.

    The forward pass runs first, then the backward pass on the forward
    restriction; the resulting graph has exactly the same hyperpath-trees
    from the sources to the target as ``g``. If the target is not derivable
    the result is the empty hypergraph, flagged via ``target_reachable``.

    ``backward_first=True`` swaps the phases (backward pass on the raw
    graph). That order is unsound, it can mark vertices as useful whose
    supporting arcs need underivable tails, and exists only so tests and
    demos can exhibit the difference.
    """
    g.check_query(query)

    if backward_first:
        first_pass = reach_to(g, query.target)
    else:
        first_pass = reach_from(g, query.source_vertices())
        if not first_pass.reached[query.target]:
            empty = restrict(g, ())
            return ReduceResult(
                graph=empty.graph,
                vertex_map={},
                arc_map={},
                sources=(),
                target=None,
                target_reachable=False,
                pass1_vertices=frozenset(first_pass.vertices()),
                pass2_vertices=frozenset(),
            )
    r1 = restrict(g, first_pass.vertices())
    g1 = r1.graph

    if backward_first:
        mid_sources = [r1.vertex_map[v] for v, _ in query.sources if v in r1.vertex_map]
        if mid_sources:
            second_pass = reach_from(g1, mid_sources)
        else:
            second_pass = ReachResult((False,) * g1.n, 0)
    else:
        second_pass = reach_to(g1, r1.vertex_map[query.target])
    r2 = restrict(g1, second_pass.vertices())

    vmap, amap = _compose(r1, r2)
    sources = tuple((vmap[v], c) for v, c in query.sources if v in vmap)
    target = vmap.get(query.target)
    inv1 = {mid: old for old, mid in r1.vertex_map.items()}
    return ReduceResult(
        graph=r2.graph,
        vertex_map=vmap,
        arc_map=amap,
        sources=sources,
        target=target,
        target_reachable=target is not None,
        pass1_vertices=frozenset(first_pass.vertices()),
        pass2_vertices=frozenset(inv1[v] for v in second_pass.vertices()),
    )
