"""Viterbi inside costs: cheapest hyperpath-trees from a source set.

``viterbi_inside`` generalizes Dijkstra's algorithm to hypergraphs. Vertices
are settled in nondecreasing cost order; an arc accumulates the costs of its
distinct tails as they settle (one BIND per distinct tail) and fires once the
last one does, possibly improving its head. Correctness rests on the cost
functions being superior: an arc's cost is at least the cost of each bound
tail, so a fired arc can never improve an already settled vertex.

The priority queue is a binary heap with decrease-key done by lazy
re-insertion and a stale-entry skip on extraction, giving O(m log n + t);
a constant-time-decrease-key heap (Fibonacci) would give O(n log n + t) but
is not implemented.
"""

from __future__ import annotations

import heapq
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .core import (
    INF,
    Hypergraph,
    InternalInvariantError,
    UnreachableTargetError,
    ValidationError,
)


class CostFunction(ABC):
    """Per-arc cost state driven by BIND / INF operations.

    ``bind`` incorporates the final cost of one distinct tail vertex;
    ``inf`` returns a lower bound on the arc's cost that must be monotone
    nondecreasing under binds and exact once every tail is bound. Instances
    must be superior: the final value is >= every bound tail cost. Only the
    additive family ships; anything else is caller-supplied.
    """

    @abstractmethod
    def bind(self, tail: int, cost: float) -> None: ...

    @abstractmethod
    def inf(self) -> float: ...


class AdditiveCost(CostFunction):
    """Arc length plus multiplicity-weighted tail costs.

    Superior because lengths, multiplicities, and tail costs are all
    nonnegative.
    """

    __slots__ = ("value", "_mult")

    def __init__(self, g: Hypergraph, arc_index: int) -> None:
        self.value = g._lengths[arc_index]
        self._mult = dict(g._dtails[arc_index])

    def bind(self, tail: int, cost: float) -> None:
        self.value += self._mult[tail] * cost

    def inf(self) -> float:
        return self.value


CostFactory = Callable[[Hypergraph, int], CostFunction]


@dataclass(frozen=True, slots=True)
class InsideResult:
    """Minimum inside cost and predecessor arc per vertex.

    ``inside[v]`` is the cheapest hyperpath-tree cost from the sources to
    ``v`` (``inf`` if none). ``pi[v]`` is the arc of one cheapest tree, or 0
    for sources never improved and for unreached vertices. ``binds`` counts
    BIND operations (instrumentation; at most one per arc and distinct tail).
    """

    inside: tuple[float, ...]
    pi: tuple[int, ...]
    binds: int


def _checked_sources(g: Hypergraph, sources: Iterable[tuple[int, float]]) -> tuple[tuple[int, float], ...]:
    out: list[tuple[int, float]] = []
    seen: set[int] = set()
    for v, c in sources:
        if not 0 <= v < g.n:
            raise ValidationError(f"source vertex {v} out of range (n={g.n})")
        if v in seen:
            raise ValidationError(f"duplicate source vertex {v}")
        seen.add(v)
        c = float(c)
        if math.isnan(c) or c == INF or c < 0:
            raise ValidationError(f"source {v}: initial cost must be finite and nonnegative")
        out.append((v, c))
    if not out:
        raise ValidationError("source set must be nonempty")
    return tuple(out)


def viterbi_inside(
    g: Hypergraph,
    sources: Iterable[tuple[int, float]],
    *,
    cost_factory: CostFactory | None = None,
    use_guard: bool = True,
) -> InsideResult:
    """Cheapest hyperpath-tree cost from ``sources`` to every vertex.

    ``sources`` is an iterable of (vertex, initial cost) pairs with distinct
    vertices and finite nonnegative costs. Ties on extraction break toward
    the lower vertex id, and ``pi`` keeps the first arc reaching a vertex's
    minimum (improvements are strict), so outputs are deterministic.

    ``use_guard`` keeps the "skip arcs that already cannot improve their
    head" shortcut; with additive costs it never changes results and exists
    as a toggle so that can be verified. ``cost_factory`` switches to
    caller-supplied :class:`CostFunction` state per arc; the default is the
    additive family on a fast array path. Zero-length arcs, self-loops and
    cycles are fine: a settled vertex can never be improved again.
    """
    sources = _checked_sources(g, sources)
    n = g.n
    inside = [INF] * n
    pi = [0] * n
    for v, c in sources:
        inside[v] = c
    heap: list[tuple[float, int]] = [(c, v) for v, c in sources]
    heapq.heapify(heap)

    m = g.num_arcs
    remaining = [len(d) for d in g._dtails]
    acc: list[float] | None = None
    costs: list[CostFunction | None] | None = None
    if cost_factory is None:
        acc = list(g._lengths)
    else:
        costs = [None] * (m + 1)
        for i in range(1, m + 1):
            costs[i] = cost_factory(g, i)

    settled = bytearray(n)
    heads = g._heads
    dtails = g._dtails
    forward = g.forward
    push = heapq.heappush
    pop = heapq.heappop
    binds = 0
    last_key = -INF

    while heap:
        key, y = pop(heap)
        if key < last_key:
            raise InternalInvariantError("extraction keys decreased: cost function not superior")
        last_key = key
        if settled[y] or key > inside[y]:
            continue
        settled[y] = 1
        cy = inside[y]
        for i in forward[y]:
            h = heads[i]
            if acc is not None:
                a = acc[i]
                if use_guard and a >= inside[h]:
                    continue
                mult = 0
                for t, mm in dtails[i]:
                    if t == y:
                        mult = mm
                        break
                acc[i] = a + mult * cy
                binds += 1
                remaining[i] -= 1
                if remaining[i] == 0:
                    # All tails settled; recompute in canonical tail order so
                    # the value agrees bitwise with arc_total_cost elsewhere.
                    c = g.arc_total_cost(i, inside)
                    if c < inside[h]:
                        inside[h] = c
                        pi[h] = i
                        push(heap, (c, h))
            else:
                assert costs is not None
                fn = costs[i]
                assert fn is not None
                if use_guard and fn.inf() >= inside[h]:
                    continue
                fn.bind(y, cy)
                binds += 1
                remaining[i] -= 1
                if remaining[i] == 0:
                    c = fn.inf()
                    if c < inside[h]:
                        inside[h] = c
                        pi[h] = i
                        push(heap, (c, h))

    return InsideResult(tuple(inside), tuple(pi), binds)


@dataclass(frozen=True, slots=True)
class HyperpathTree:
    """A hyperpath-tree node.

    ``arc`` is the 1-based arc index, or 0 for a source leaf. An arc node has
    one child per tail occurrence of its arc (multiplicities expanded, pair
    order kept); a leaf's ``cost`` is the source's initial cost, an arc
    node's is its length plus the children's costs.
    """

    arc: int
    vertex: int
    children: tuple["HyperpathTree", ...]
    cost: float


def iter_nodes(tree: HyperpathTree) -> Iterator[HyperpathTree]:
    """All nodes of ``tree`` in preorder, iteratively."""
    stack = [tree]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def extract_best_tree(g: Hypergraph, result: InsideResult, vertex: int) -> HyperpathTree:
    """Expand the predecessor relation into one cheapest hyperpath-tree.

    Nodes are shared between repeated tail occurrences (the best subtree for
    a vertex is unique per ``pi``), so construction is linear even when the
    unfolded tree is not. The tree's cost equals ``inside[vertex]`` up to
    float rounding. Raises :class:`UnreachableTargetError` when the vertex
    has no tree, :class:`InternalInvariantError` on a cyclic predecessor
    chain (impossible for results produced by :func:`viterbi_inside`).
    """
    if not 0 <= vertex < g.n:
        raise ValidationError(f"vertex {vertex} out of range (n={g.n})")
    inside, pi = result.inside, result.pi
    if inside[vertex] == INF:
        raise UnreachableTargetError(f"vertex '{g.name_of(vertex)}' is unreachable")

    WHITE, GRAY, BLACK = 0, 1, 2
    state: dict[int, int] = {}
    order: list[int] = []
    stack: list[tuple[int, int]] = [(vertex, 0)]
    while stack:
        v, phase = stack.pop()
        if phase:
            state[v] = BLACK
            order.append(v)
            continue
        st = state.get(v, WHITE)
        if st == BLACK:
            continue
        if st == GRAY:
            raise InternalInvariantError("cycle in predecessor pointers")
        state[v] = GRAY
        stack.append((v, 1))
        if pi[v]:
            for t, _ in g._dtails[pi[v]]:
                ts = state.get(t, WHITE)
                if ts == GRAY:
                    raise InternalInvariantError("cycle in predecessor pointers")
                if ts == WHITE:
                    stack.append((t, 0))

    nodes: dict[int, HyperpathTree] = {}
    for v in order:
        i = pi[v]
        if i == 0:
            nodes[v] = HyperpathTree(0, v, (), inside[v])
        else:
            kids = tuple(nodes[t] for t in g.arc(i).occurrences())
            cost = g._lengths[i]
            for kid in kids:
                cost += kid.cost
            nodes[v] = HyperpathTree(i, v, kids, cost)
    return nodes[vertex]


def format_tree(tree: HyperpathTree, name_of: Callable[[int], str] | None = None) -> str:
    """Render a tree as an s-expression of arc indices.

    Source leaves are implicit except when the whole tree is a single leaf,
    which renders as the vertex name.
    """
    if tree.arc == 0:
        return name_of(tree.vertex) if name_of else f"v{tree.vertex}"
    out: list[str] = []
    stack: list[tuple[HyperpathTree, int]] = [(tree, 0)]
    while stack:
        node, phase = stack.pop()
        if phase:
            out.append(")")
            continue
        if out and out[-1] != "(":
            out.append(" ")
        out.append(f"({node.arc}")
        stack.append((node, 1))
        for child in reversed(node.children):
            if child.arc:
                stack.append((child, 0))
    return "".join(out)
