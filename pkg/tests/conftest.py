from __future__ import annotations

import pytest

from hyperpaths import Hyperarc, Query, build

F1_TEXT = """\
# two routes into S: a cheap two-tail arc and a pricier doubled-tail arc
vertex omega
vertex A
vertex B
vertex S
arc A <- omega @ 1
arc B <- omega @ 2
arc S <- A B @ 0.5
arc S <- A*2 @ 3
source omega 0
target S
"""

F1_GRAMMAR_TEXT = """\
# F1 as a grammar: weights are exp(-length) of the arcs above
start S
0.36787944117144233: A -> a
0.13533528323661270: B -> b
0.60653065971263342: S -> sigma(A, B)
0.049787068367863944: S -> tau(A, A)
"""


@pytest.fixture
def f1():
    """Four vertices; arcs e1: A<-omega@1, e2: B<-omega@2, e3: S<-A B@0.5,
    e4: S<-A*2@3. Query: source omega at 0, target S."""
    arcs = (
        Hyperarc(1, ((0, 1),), 1.0),
        Hyperarc(2, ((0, 1),), 2.0),
        Hyperarc(3, ((1, 1), (2, 1)), 0.5),
        Hyperarc(3, ((1, 2),), 3.0),
    )
    return build(("omega", "A", "B", "S"), arcs)


@pytest.fixture
def f1_query():
    return Query(((0, 0.0),), 3)


@pytest.fixture
def f2():
    """Self-loop fixture: arcs e1: S<-omega@1, e2: S<-S@1."""
    arcs = (
        Hyperarc(1, ((0, 1),), 1.0),
        Hyperarc(1, ((1, 1),), 1.0),
    )
    return build(("omega", "S"), arcs)


@pytest.fixture
def f3():
    """Order-sensitivity fixture: S <- U omega @ 1 with U underivable."""
    arcs = (Hyperarc(2, ((1, 1), (0, 1)), 1.0),)
    return build(("omega", "U", "S"), arcs)


@pytest.fixture
def f1_file(tmp_path):
    path = tmp_path / "f1.hg"
    path.write_text(F1_TEXT, encoding="utf-8")
    return str(path)


@pytest.fixture
def f1_grammar_file(tmp_path):
    path = tmp_path / "f1.gr"
    path.write_text(F1_GRAMMAR_TEXT, encoding="utf-8")
    return str(path)
