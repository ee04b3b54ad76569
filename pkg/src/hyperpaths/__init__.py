"""Shortest hyperpath-trees, reachability, and beam pruning on directed
hypergraphs, plus the reduction from weighted tree grammars / CFGs.

The package provides, over ordered multi-hypergraphs with additive costs:

* forward reachability from a source set and backward usefulness toward a
  target, composed into a two-phase reduction (:mod:`.reachability`);
* minimum-cost hyperpath-trees via a priority-queue generalization of
  Dijkstra's algorithm, with best-tree extraction (:mod:`.inside`);
* minimum completion ("outside") costs, element utilities, and beam pruning
  of relatively useless vertices and arcs (:mod:`.outside`);
* conversion of weighted regular tree grammars and CFGs to hypergraphs and
  back, mapping pruning results onto reduced grammars (:mod:`.grammar`);
* brute-force reference implementations for testing (:mod:`.oracle`);
* a text format (:mod:`.textio`) and a CLI (:mod:`.cli`).
"""

from .core import (
    INF,
    FormatError,
    Hyperarc,
    Hypergraph,
    InternalInvariantError,
    Query,
    RestrictResult,
    UnreachableTargetError,
    ValidationError,
    build,
    restrict,
)
from .grammar import (
    DerivationTree,
    GrammarError,
    GrammarHypergraphMap,
    Production,
    RhsTree,
    Wrtg,
    best_derivation,
    derivation_grammar,
    from_pruned,
    parse_grammar,
    serialize_grammar,
    to_hypergraph,
    yield_nonterminals,
)
from .inside import (
    AdditiveCost,
    CostFunction,
    HyperpathTree,
    InsideResult,
    extract_best_tree,
    format_tree,
    iter_nodes,
    viterbi_inside,
)
from .oracle import Enumeration, EnumerationBudget, enumerate_trees, fixpoint_reach
from .outside import (
    OutsideResult,
    PruneResult,
    prune_relatively_useless,
    utilities,
    viterbi_outside,
)
from .reachability import ReachResult, ReduceResult, reach_from, reach_to, reduce
from .textio import ParsedHypergraph, format_float, parse_hypergraph, serialize_hypergraph

__version__ = "0.1.0"

__all__ = [
    "INF",
    "AdditiveCost",
    "CostFunction",
    "DerivationTree",
    "Enumeration",
    "EnumerationBudget",
    "FormatError",
    "GrammarError",
    "GrammarHypergraphMap",
    "Hyperarc",
    "Hypergraph",
    "HyperpathTree",
    "InsideResult",
    "InternalInvariantError",
    "OutsideResult",
    "ParsedHypergraph",
    "Production",
    "PruneResult",
    "Query",
    "ReachResult",
    "ReduceResult",
    "RestrictResult",
    "RhsTree",
    "UnreachableTargetError",
    "ValidationError",
    "Wrtg",
    "best_derivation",
    "build",
    "derivation_grammar",
    "enumerate_trees",
    "extract_best_tree",
    "fixpoint_reach",
    "format_float",
    "format_tree",
    "from_pruned",
    "iter_nodes",
    "parse_grammar",
    "parse_hypergraph",
    "prune_relatively_useless",
    "reach_from",
    "reach_to",
    "reduce",
    "restrict",
    "serialize_grammar",
    "serialize_hypergraph",
    "to_hypergraph",
    "utilities",
    "viterbi_inside",
    "viterbi_outside",
    "yield_nonterminals",
]
