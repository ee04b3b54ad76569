"""Command-line interface over the text formats.

One executable, subcommand per operation. Files are positional arguments;
``-`` reads standard input. Results go to stdout, diagnostics and the prune
report stream to stderr. Exit codes: 0 success, 1 usage or parse error,
2 unreachable target, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from .core import (
    INF,
    Hypergraph,
    InternalInvariantError,
    UnreachableTargetError,
    ValidationError,
    restrict,
)
from .grammar import (
    GrammarError,
    from_pruned,
    parse_grammar,
    serialize_grammar,
    to_hypergraph,
)
from .inside import InsideResult, extract_best_tree, format_tree, viterbi_inside
from .outside import PruneResult, prune_relatively_useless, viterbi_outside
from .reachability import reach_from, reach_to, reduce
from .textio import ParsedHypergraph, format_float, parse_hypergraph, serialize_hypergraph

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNREACHABLE = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc


def _load(path: str) -> ParsedHypergraph:
    return parse_hypergraph(_read_text(path))


def _require_sources(parsed: ParsedHypergraph) -> tuple[tuple[int, float], ...]:
    if not parsed.sources:
        raise ValidationError("input declares no source vertices")
    return parsed.sources


def _require_target(parsed: ParsedHypergraph) -> int:
    if parsed.target is None:
        raise ValidationError("input declares no target vertex")
    return parsed.target


def _fmt(x: float) -> str:
    return format_float(x)


def _json_value(x: float) -> float | str:
    return "inf" if x == INF else x


# -- subcommands -------------------------------------------------------------


def _cmd_validate(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    parsed.graph.validate()
    return EXIT_OK


def _cmd_reach_from(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    sources = _require_sources(parsed)
    result = reach_from(parsed.graph, [v for v, _ in sources])
    for v in result.vertices():
        print(parsed.graph.name_of(v))
    return EXIT_OK


def _cmd_reach_to(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    result = reach_to(parsed.graph, _require_target(parsed))
    for v in result.vertices():
        print(parsed.graph.name_of(v))
    return EXIT_OK


def _cmd_reduce(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    red = reduce(parsed.graph, parsed.query())
    sys.stdout.write(serialize_hypergraph(red.graph, red.sources, red.target))
    if not red.target_reachable:
        print("target unreachable; reduced hypergraph is empty", file=sys.stderr)
    return EXIT_OK


def _cmd_inside(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    g = parsed.graph
    result = viterbi_inside(g, _require_sources(parsed))
    for v in range(g.n):
        print(f"{g.name_of(v)} {_fmt(result.inside[v])} {result.pi[v]}")
    if parsed.target is not None and result.inside[parsed.target] == INF:
        print("target unreachable", file=sys.stderr)
        return EXIT_UNREACHABLE
    return EXIT_OK


def _cmd_best_tree(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    g = parsed.graph
    vertex = g.id_of(args.vertex)
    result = viterbi_inside(g, _require_sources(parsed))
    tree = extract_best_tree(g, result, vertex)
    print(format_tree(tree, g.name_of))
    print(_fmt(tree.cost))
    return EXIT_OK


def _forward_stage(
    parsed: ParsedHypergraph,
) -> tuple[Hypergraph, dict[int, int], dict[int, int], tuple[tuple[int, float], ...], int, InsideResult]:
    """Restrict to source-derivable vertices and run the inside pass.

    The restriction keeps inside costs intact for every surviving vertex and
    gives the outside pass the graph it is specified on.
    """
    g = parsed.graph
    sources = _require_sources(parsed)
    target = _require_target(parsed)
    rf = reach_from(g, [v for v, _ in sources])
    if not rf.reached[target]:
        raise UnreachableTargetError("target unreachable")
    rr = restrict(g, rf.vertices())
    sources1 = tuple((rr.vertex_map[v], c) for v, c in sources)
    target1 = rr.vertex_map[target]
    ins = viterbi_inside(rr.graph, sources1)
    return rr.graph, rr.vertex_map, rr.arc_map, sources1, target1, ins


def _cmd_outside(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    g = parsed.graph
    g1, vmap, amap, sources1, target1, ins = _forward_stage(parsed)
    outs = viterbi_outside(g1, ins, target1)
    arc_old = {new: old for old, new in amap.items()}
    for v in range(g.n):
        mapped = vmap.get(v)
        if mapped is None:
            print(f"{g.name_of(v)} inf 0")
        else:
            psi = outs.psi[mapped]
            print(f"{g.name_of(v)} {_fmt(outs.outside[mapped])} {arc_old[psi] if psi else 0}")
    return EXIT_OK


def _prune_report_rows(
    g: Hypergraph,
    vmap: dict[int, int],
    amap: dict[int, int],
    ins: InsideResult,
    outs,
    pr: PruneResult,
) -> tuple[list[dict], list[dict], float]:
    vertices = []
    for v in range(g.n):
        mapped = vmap.get(v)
        if mapped is None:
            inside = outside = gamma = INF
            keep = False
        else:
            inside = ins.inside[mapped]
            outside = outs.outside[mapped]
            gamma = pr.gamma_vertices[mapped]
            keep = pr.keep_vertices[mapped]
        vertices.append(
            {
                "name": g.name_of(v),
                "inside": _json_value(inside),
                "outside": _json_value(outside),
                "gamma": _json_value(gamma),
                "keep": keep,
            }
        )
    arcs = []
    for i in g.arc_indices:
        arc = g.arc(i)
        mapped = amap.get(i)
        gamma = pr.gamma_arcs[mapped] if mapped is not None else INF
        keep = pr.keep_arcs[mapped] if mapped is not None else False
        arcs.append(
            {
                "index": i,
                "head": g.name_of(arc.head),
                "tails": [[g.name_of(v), m] for v, m in arc.tails],
                "length": arc.length,
                "gamma": _json_value(gamma),
                "keep": keep,
            }
        )
    best = ins.inside[outs.target]
    return vertices, arcs, best


def _cmd_prune(args: argparse.Namespace) -> int:
    beam = _parse_beam(args.beam)
    parsed = _load(args.file)
    g1, vmap, amap, sources1, target1, ins = _forward_stage(parsed)
    outs = viterbi_outside(g1, ins, target1)
    pr = prune_relatively_useless(g1, ins, outs, beam)

    sources2 = tuple((pr.vertex_map[v], c) for v, c in sources1 if v in pr.vertex_map)
    target2 = pr.vertex_map[target1]
    sys.stdout.write(serialize_hypergraph(pr.graph, sources2, target2))

    vertices, arcs, best = _prune_report_rows(parsed.graph, vmap, amap, ins, outs, pr)
    if args.report == "json":
        report = {"vertices": vertices, "arcs": arcs, "best": _json_value(best)}
        print(json.dumps(report), file=sys.stderr)
    else:
        for row in vertices:
            print(
                f"vertex {row['name']} inside {_fmt(_unjson(row['inside']))} "
                f"outside {_fmt(_unjson(row['outside']))} gamma {_fmt(_unjson(row['gamma']))} "
                f"keep {int(row['keep'])}",
                file=sys.stderr,
            )
        for row in arcs:
            print(
                f"arc {row['index']} gamma {_fmt(_unjson(row['gamma']))} keep {int(row['keep'])}",
                file=sys.stderr,
            )
        print(f"best {_fmt(best)}", file=sys.stderr)
    return EXIT_OK


def _unjson(x: float | str) -> float:
    return INF if x == "inf" else float(x)


def _parse_beam(text: str) -> float:
    try:
        beam = float(text)
    except ValueError:
        raise _UsageError(f"bad beam {text!r}: expected a decimal or 'inf'") from None
    if math.isnan(beam) or beam < 0:
        raise _UsageError("beam must be a nonnegative number or 'inf'")
    return beam


def _cmd_from_grammar(args: argparse.Namespace) -> int:
    grammar = parse_grammar(_read_text(args.file))
    graph, query, gmap = to_hypergraph(grammar)
    map_path = args.map
    if map_path is None:
        if args.file == "-":
            raise _UsageError("--map is required when the grammar comes from stdin")
        map_path = args.file + ".map"
    sys.stdout.write(serialize_hypergraph(graph, query.sources, query.target))
    lines = "".join(
        f"{arc} {production}\n" for arc, production in sorted(gmap.production_for_arc.items())
    )
    Path(map_path).write_text(lines, encoding="utf-8")
    return EXIT_OK


def _cmd_prune_grammar(args: argparse.Namespace) -> int:
    beam = _parse_beam(args.beam)
    grammar = parse_grammar(_read_text(args.file))
    graph, query, gmap = to_hypergraph(grammar)

    rf = reach_from(graph, [v for v, _ in query.sources])
    if not rf.reached[query.target]:
        raise UnreachableTargetError("target unreachable: the grammar derives nothing")
    rr = restrict(graph, rf.vertices())
    sources1 = tuple((rr.vertex_map[v], c) for v, c in query.sources)
    target1 = rr.vertex_map[query.target]
    ins = viterbi_inside(rr.graph, sources1)
    outs = viterbi_outside(rr.graph, ins, target1)
    pr = prune_relatively_useless(rr.graph, ins, outs, beam)

    gmap1 = gmap.after_restriction(rr.vertex_map, rr.arc_map)
    gmap2 = gmap1.after_restriction(pr.vertex_map, pr.arc_map)
    reduced = from_pruned(grammar, gmap2, pr.graph)
    sys.stdout.write(serialize_grammar(reduced))
    return EXIT_OK


# -- driver -------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="hyperpaths",
        description="Shortest hyperpath-trees, reachability, and beam pruning "
        "over directed hypergraphs and weighted grammars.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str, needs_file: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if needs_file:
            p.add_argument("file", help="input file, or - for stdin")
        p.set_defaults(func=func)
        return p

    add("validate", _cmd_validate, "check a hypergraph file and exit")
    add("reach-from", _cmd_reach_from, "vertices derivable from the source set")
    add("reach-to", _cmd_reach_to, "vertices that can participate in reaching the target")
    add("reduce", _cmd_reduce, "drop vertices and arcs useless for the query")
    add("inside", _cmd_inside, "minimum inside cost and predecessor arc per vertex")
    p = add("best-tree", _cmd_best_tree, "print one cheapest hyperpath-tree")
    p.add_argument("--vertex", required=True, help="vertex whose best tree to print")
    add("outside", _cmd_outside, "minimum completion cost and parent arc per vertex")
    p = add("prune", _cmd_prune, "beam-prune relatively useless vertices and arcs")
    p.add_argument("--beam", required=True, help="cost slack above the best tree, or 'inf'")
    p.add_argument("--report", choices=["text", "json"], default="text",
                   help="report format on stderr (default: text)")
    p = add("from-grammar", _cmd_from_grammar, "convert a weighted grammar to a hypergraph")
    p.add_argument("--map", help="path for the arc-to-production sidecar map "
                   "(default: <file>.map)")
    p = add("prune-grammar", _cmd_prune_grammar,
            "beam-prune a grammar via its hypergraph form")
    p.add_argument("--beam", required=True, help="cost slack above the best derivation, or 'inf'")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, GrammarError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnreachableTargetError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_UNREACHABLE
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
