"""Viterbi outside costs and relative-uselessness beam pruning.

The outside cost of a vertex is the cheapest way to complete a hyperpath-tree
reaching it into one reaching the target, charging every omitted sibling tail
its best inside cost. Computed as ordinary Dijkstra on the implicitly
reversed "monadic" graph: each (arc, tail) pair is one reversed edge whose
weight is the arc's full default cost minus one inside contribution of that
tail. This separation requires the additive cost family; no other family is
supported here.

Note that ``outside[v] + inside[v] >= inside[target]`` always, with equality
exactly for vertices on some cheapest tree; vertices off every best tree get
strictly larger completions.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .core import (
    INF,
    Hypergraph,
    InternalInvariantError,
    RestrictResult,
    UnreachableTargetError,
    ValidationError,
    restrict,
)
from .inside import InsideResult

# Absorbs float jitter between the inside, outside, and utility summations so
# that beam boundaries never drop elements of the best tree itself.
_BEAM_RELATIVE_SLACK = 1e-12


@dataclass(frozen=True, slots=True)
class OutsideResult:
    """Minimum completion cost and parent arc per vertex.

    ``outside[v]`` is ``inf`` when no hyperpath-tree through ``v`` reaches
    the target. ``psi[v]`` is the arc through which the cheapest completion
    leaves ``v`` upward, 0 for the target and for incompletable vertices.
    """

    outside: tuple[float, ...]
    psi: tuple[int, ...]
    target: int


def viterbi_outside(g: Hypergraph, ins: InsideResult, target: int) -> OutsideResult:
    """Cheapest completion cost toward ``target`` for every vertex.

    ``ins`` must come from the same graph and reach the target. Arcs with an
    unreached tail are never relaxed, so vertices that are not derivable
    from the sources simply keep infinite outside cost; for meaningful
    per-vertex values run this on a graph restricted to derivable vertices.
    O(m log n + t) with the lazy binary heap.
    """
    if not 0 <= target < g.n:
        raise ValidationError(f"target vertex {target} out of range (n={g.n})")
    if len(ins.inside) != g.n:
        raise ValidationError("inside result does not match this hypergraph")
    if ins.inside[target] == INF:
        raise UnreachableTargetError(f"target '{g.name_of(target)}' is unreachable")

    n = g.n
    inside = ins.inside
    outside = [INF] * n
    psi = [0] * n
    outside[target] = 0.0
    heap: list[tuple[float, int]] = [(0.0, target)]
    settled = bytearray(n)
    backward = g.backward
    dtails = g._dtails
    push = heapq.heappush
    pop = heapq.heappop

    while heap:
        key, x = pop(heap)
        if settled[x] or key > outside[x]:
            continue
        settled[x] = 1
        ox = outside[x]
        for i in backward[x]:
            total = g.arc_total_cost(i, inside)
            if total == INF:
                continue
            c = ox + total
            for t, _ in dtails[i]:
                if settled[t]:
                    continue
                proposed = c - inside[t]
                if proposed < outside[t]:
                    outside[t] = proposed
                    psi[t] = i
                    push(heap, (proposed, t))

    return OutsideResult(tuple(outside), tuple(psi), target)


def utilities(
    g: Hypergraph, ins: InsideResult, outs: OutsideResult
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Per-vertex and per-arc utility: cost of the cheapest complete
    hyperpath-tree from the sources to the target using that element.

    A vertex's utility is ``inside + outside``; an arc's is its head's
    outside plus its full default cost. Any infinite operand yields ``inf``
    (the element is on no finite tree). The per-arc array is indexed 1..m
    with slot 0 unused (``inf``).
    """
    if len(ins.inside) != g.n or len(outs.outside) != g.n:
        raise ValidationError("results do not match this hypergraph")
    gamma_v = tuple(b + a for b, a in zip(ins.inside, outs.outside))
    gamma_e = [INF] * (g.num_arcs + 1)
    heads = g._heads
    for i in g.arc_indices:
        gamma_e[i] = outs.outside[heads[i]] + g.arc_total_cost(i, ins.inside)
    return gamma_v, tuple(gamma_e)


@dataclass(frozen=True, slots=True)
class PruneResult:
    """Utilities, keep flags, and the pruned hypergraph for a beam.

    ``keep`` flags are true exactly for elements whose utility is within the
    beam of the best cost (finite utility required). ``threshold`` is
    ``inside[target] + beam``. Index maps relate the input graph to
    ``graph``.
    """

    gamma_vertices: tuple[float, ...]
    gamma_arcs: tuple[float, ...]
    keep_vertices: tuple[bool, ...]
    keep_arcs: tuple[bool, ...]
    beam: float
    threshold: float
    graph: Hypergraph
    vertex_map: dict[int, int]
    arc_map: dict[int, int]


def prune_relatively_useless(
    g: Hypergraph, ins: InsideResult, outs: OutsideResult, beam: float
) -> PruneResult:
    """Keep only vertices and arcs used by some hyperpath-tree whose cost is
    within ``beam`` of the best; drop everything else.

    ``beam`` may be ``inf`` ("no beam"), which keeps exactly the elements
    lying on any finite-cost tree to the target. The best tree always
    survives, so re-running the inside pass on the pruned graph reproduces
    the best cost; kept sets grow monotonically with the beam. O(t) given
    the two prior passes.
    """
    beam = float(beam)
    if not beam >= 0:
        raise ValidationError(f"beam must be nonnegative, got {beam!r}")
    best = ins.inside[outs.target]
    if best == INF:
        raise UnreachableTargetError("target is unreachable; nothing to prune")

    gamma_v, gamma_e = utilities(g, ins, outs)
    threshold = best + beam
    if threshold == INF:
        cutoff = INF
    else:
        cutoff = threshold + _BEAM_RELATIVE_SLACK * max(1.0, abs(threshold))

    keep_v = tuple(math.isfinite(x) and x <= cutoff for x in gamma_v)
    keep_e = [False] * (g.num_arcs + 1)
    retained: list[int] = []
    loose = 1e-9 * max(1.0, abs(threshold) if threshold != INF else 1.0)
    for i in g.arc_indices:
        x = gamma_e[i]
        if not (math.isfinite(x) and x <= cutoff):
            continue
        keep_e[i] = True
        endpoints = [g._heads[i]] + [t for t, _ in g._dtails[i]]
        for v in endpoints:
            if not keep_v[v]:
                # A kept arc's endpoints have utility <= the arc's; only
                # rounding at the exact beam boundary may say otherwise.
                if not (math.isfinite(gamma_v[v]) and gamma_v[v] <= cutoff + loose):
                    raise InternalInvariantError(
                        f"arc {i} kept but endpoint vertex {v} is not"
                    )
        if all(keep_v[v] for v in endpoints):
            retained.append(i)

    kept_vertices = [v for v in range(g.n) if keep_v[v]]
    res: RestrictResult = restrict(g, kept_vertices, keep_arcs=retained)
    return PruneResult(
        gamma_vertices=gamma_v,
        gamma_arcs=gamma_e,
        keep_vertices=keep_v,
        keep_arcs=tuple(keep_e),
        beam=beam,
        threshold=threshold,
        graph=res.graph,
        vertex_map=res.vertex_map,
        arc_map=res.arc_map,
    )
