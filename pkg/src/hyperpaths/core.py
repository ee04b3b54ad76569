"""Hypergraph data model: vertices, weighted hyperarcs, restriction, validation.

Vertices are dense 0-based integer ids with optional display names. Hyperarcs
are indexed 1..m; index 0 is reserved as the "no arc" sentinel used by the
algorithm outputs (predecessor and parent pointers). Costs are 64-bit floats
with ``math.inf`` as the explicit "unreached" value; arc lengths must be
finite and nonnegative, and NaN is rejected everywhere.

A :class:`Hypergraph` is immutable after :func:`build` and safe to share
across threads; all algorithm state lives in per-call arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

INF = math.inf


class ValidationError(ValueError):
    """A hypergraph, arc, or query violates a structural invariant."""


class FormatError(ValidationError):
    """Malformed text input. Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnreachableTargetError(RuntimeError):
    """The requested vertex cannot be reached, so the operation has no result."""


class InternalInvariantError(RuntimeError):
    """An internal consistency check failed. This is a bug, not bad input."""


def _check_multiplicity(m: object) -> int:
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ValidationError(f"tail multiplicity must be a positive integer, got {m!r}")
    return m


def _check_vertex(v: object) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise ValidationError(f"vertex id must be a nonnegative integer, got {v!r}")
    return v


@dataclass(frozen=True, slots=True)
class Hyperarc:
    """One weighted hyperarc ``head <- tails`` with additive cost ``length``.

    ``tails`` is a nonempty sequence of ``(vertex, multiplicity)`` pairs. Pair
    order is significant: it fixes the child order of hyperpath-trees built
    over this arc. The same vertex may appear in more than one pair; for cost
    purposes multiplicities of a vertex are summed.
    """

    head: int
    tails: tuple[tuple[int, int], ...]
    length: float

    def __post_init__(self) -> None:
        _check_vertex(self.head)
        try:
            pairs = tuple((_check_vertex(v), _check_multiplicity(m)) for v, m in self.tails)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"tails must be (vertex, multiplicity) pairs, got {self.tails!r}")
        if not pairs:
            raise ValidationError("hyperarc must have at least one tail")
        object.__setattr__(self, "tails", pairs)
        length = float(self.length)
        if math.isnan(length):
            raise ValidationError("arc length may not be NaN")
        if length < 0:
            raise ValidationError(f"negative length {length!r}")
        if length == INF:
            raise ValidationError("arc length must be finite")
        object.__setattr__(self, "length", length)

    def occurrences(self) -> tuple[int, ...]:
        """Tail vertices expanded by multiplicity, in pair order."""
        out: list[int] = []
        for v, m in self.tails:
            out.extend([v] * m)
        return tuple(out)

    def distinct_tails(self) -> tuple[tuple[int, int], ...]:
        """One ``(vertex, total multiplicity)`` pair per distinct tail vertex.

        Order follows the first occurrence of each vertex in ``tails``.
        """
        total: dict[int, int] = {}
        for v, m in self.tails:
            total[v] = total.get(v, 0) + m
        return tuple(total.items())


@dataclass(frozen=True, slots=True)
class Query:
    """A source set with initial costs, plus a single target vertex."""

    sources: tuple[tuple[int, float], ...]
    target: int

    def __post_init__(self) -> None:
        src = []
        seen: set[int] = set()
        for v, c in self.sources:
            _check_vertex(v)
            if v in seen:
                raise ValidationError(f"duplicate source vertex {v}")
            seen.add(v)
            c = float(c)
            if math.isnan(c) or c == INF:
                raise ValidationError("source initial cost must be finite")
            if c < 0:
                raise ValidationError(f"negative initial cost {c!r} for source {v}")
            src.append((v, c))
        if not src:
            raise ValidationError("query needs at least one source")
        object.__setattr__(self, "sources", tuple(src))
        _check_vertex(self.target)

    def source_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.sources)


class Hypergraph:
    """Immutable directed multi-hypergraph with both adjacency directions.

    ``forward[v]`` lists the indices of arcs in which ``v`` occurs as a tail
    (each arc at most once), ``backward[v]`` the arcs whose head is ``v``.
    Construct through :func:`build`.
    """

    __slots__ = (
        "n",
        "names",
        "arcs",
        "forward",
        "backward",
        "input_size",
        "_display",
        "_name_to_id",
        "_heads",
        "_lengths",
        "_dtails",
    )

    def __init__(self, names: Sequence[str | None], arcs: Sequence[Hyperarc]) -> None:
        names = tuple(names)
        arcs = tuple(arcs)
        n = len(names)
        name_to_id: dict[str, int] = {}
        for v, name in enumerate(names):
            if name is None:
                continue
            if name in name_to_id:
                raise ValidationError(f"duplicate vertex name {name!r}")
            name_to_id[name] = v
        display = list(names)
        for v, name in enumerate(names):
            if name is None:
                candidate = f"v{v}"
                while candidate in name_to_id:
                    candidate = "_" + candidate
                name_to_id[candidate] = v
                display[v] = candidate

        heads = [0] * (len(arcs) + 1)
        lengths = [0.0] * (len(arcs) + 1)
        dtails: list[tuple[tuple[int, int], ...]] = [()] * (len(arcs) + 1)
        forward: list[list[int]] = [[] for _ in range(n)]
        backward: list[list[int]] = [[] for _ in range(n)]
        size = n
        for i, arc in enumerate(arcs, start=1):
            if not isinstance(arc, Hyperarc):
                raise ValidationError(f"arc {i}: expected a Hyperarc, got {type(arc).__name__}")
            if arc.head >= n:
                raise ValidationError(f"arc {i}: head vertex {arc.head} out of range (n={n})")
            for v, _ in arc.tails:
                if v >= n:
                    raise ValidationError(f"arc {i}: tail vertex {v} out of range (n={n})")
            heads[i] = arc.head
            lengths[i] = arc.length
            dt = arc.distinct_tails()
            dtails[i] = dt
            backward[arc.head].append(i)
            for v, _ in dt:
                forward[v].append(i)
            size += 1 + len(arc.tails)

        self.n = n
        self.names = names
        self.arcs = arcs
        self.forward = tuple(tuple(a) for a in forward)
        self.backward = tuple(tuple(a) for a in backward)
        self.input_size = size
        self._display = tuple(display)
        self._name_to_id = name_to_id
        self._heads = heads
        self._lengths = lengths
        self._dtails = dtails

    # -- basic accessors ---------------------------------------------------

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)

    @property
    def arc_indices(self) -> range:
        return range(1, len(self.arcs) + 1)

    def arc(self, i: int) -> Hyperarc:
        """The hyperarc at 1-based index ``i``."""
        if not 1 <= i <= len(self.arcs):
            raise ValidationError(f"arc index {i} out of range 1..{len(self.arcs)}")
        return self.arcs[i - 1]

    def name_of(self, v: int) -> str:
        """Display name of vertex ``v`` (synthesized ``v<i>`` if unnamed)."""
        return self._display[v]

    def id_of(self, name: str) -> int:
        try:
            return self._name_to_id[name]
        except KeyError:
            raise ValidationError(f"unknown vertex name {name!r}") from None

    def arc_total_cost(self, i: int, costs: Sequence[float]) -> float:
        """Arc length plus the multiplicity-weighted costs of its tails.

        Returns ``inf`` as soon as any tail cost is infinite. All call sites
        (inside relaxation, outside relaxation, utilities) share this exact
        summation order so their values agree bitwise.
        """
        c = self._lengths[i]
        for t, m in self._dtails[i]:
            ct = costs[t]
            if ct == INF:
                return INF
            c += m * ct
        return c

    # -- validation ----------------------------------------------------------

    def validate(self) -> None:
        """Re-derive adjacency and invariants from ``arcs`` and compare.

        Raises :class:`InternalInvariantError` if the stored indexes disagree
        with the arc list, :class:`ValidationError` for bad arc data.
        """
        fwd: list[list[int]] = [[] for _ in range(self.n)]
        bwd: list[list[int]] = [[] for _ in range(self.n)]
        for i, arc in enumerate(self.arcs, start=1):
            if arc.head >= self.n:
                raise ValidationError(f"arc {i}: head vertex {arc.head} out of range")
            bwd[arc.head].append(i)
            for v, _ in arc.distinct_tails():
                if v >= self.n:
                    raise ValidationError(f"arc {i}: tail vertex {v} out of range")
                fwd[v].append(i)
        if tuple(tuple(a) for a in fwd) != self.forward:
            raise InternalInvariantError("forward adjacency disagrees with arcs")
        if tuple(tuple(a) for a in bwd) != self.backward:
            raise InternalInvariantError("backward adjacency disagrees with arcs")
        seen: set[str] = set()
        for name in self.names:
            if name is None:
                continue
            if name in seen:
                raise ValidationError(f"duplicate vertex name {name!r}")
            seen.add(name)

    def check_query(self, query: Query) -> None:
        for v, _ in query.sources:
            if v >= self.n:
                raise ValidationError(f"source vertex {v} out of range (n={self.n})")
        if query.target >= self.n:
            raise ValidationError(f"target vertex {query.target} out of range (n={self.n})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.names == other.names and self.arcs == other.arcs

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, m={self.num_arcs})"


def build(vertices: int | Sequence[str | None], arcs: Iterable[Hyperarc]) -> Hypergraph:
    """Build and validate a hypergraph.

    ``vertices`` is either a vertex count (all unnamed) or a sequence of
    optional names; ids are assigned by position. Arc order is preserved and
    arcs keep their stable 1-based indices.
    """
    if isinstance(vertices, int):
        if vertices < 0:
            raise ValidationError("vertex count must be nonnegative")
        names: Sequence[str | None] = (None,) * vertices
    else:
        names = tuple(vertices)
    return Hypergraph(names, tuple(arcs))


@dataclass(frozen=True, slots=True)
class RestrictResult:
    """A restricted hypergraph plus old-to-new index maps.

    ``vertex_map`` and ``arc_map`` contain entries only for surviving
    vertices/arcs; both renumberings preserve relative order.
    """

    graph: Hypergraph
    vertex_map: dict[int, int]
    arc_map: dict[int, int]


def restrict(
    g: Hypergraph,
    keep: Iterable[int],
    *,
    keep_arcs: Iterable[int] | None = None,
) -> RestrictResult:
    """Restrict ``g`` to a vertex subset.

    The result keeps exactly the arcs whose head and all tail vertices lie in
    ``keep``. When ``keep_arcs`` is given, arcs are additionally filtered to
    that index set (used by beam pruning).
    """
    kept = set(keep)
    for v in kept:
        if not 0 <= v < g.n:
            raise ValidationError(f"vertex {v} out of range (n={g.n})")
    arc_filter = None if keep_arcs is None else set(keep_arcs)

    vertex_map: dict[int, int] = {}
    names: list[str | None] = []
    for v in range(g.n):
        if v in kept:
            vertex_map[v] = len(names)
            names.append(g.names[v])

    arc_map: dict[int, int] = {}
    new_arcs: list[Hyperarc] = []
    for i, arc in enumerate(g.arcs, start=1):
        if arc_filter is not None and i not in arc_filter:
            continue
        if arc.head not in kept:
            continue
        if any(v not in kept for v, _ in arc.tails):
            continue
        arc_map[i] = len(new_arcs) + 1
        new_arcs.append(
            Hyperarc(
                head=vertex_map[arc.head],
                tails=tuple((vertex_map[v], m) for v, m in arc.tails),
                length=arc.length,
            )
        )
    return RestrictResult(Hypergraph(tuple(names), tuple(new_arcs)), vertex_map, arc_map)
