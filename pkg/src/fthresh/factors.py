"""Perfect template factors: copy enumeration, isolated vertices, and a
budgeted exact-cover search for a factor certificate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .fgraphs import FEdge, copies_in
from .graphs import DEFAULT_ENUMERATION_CAP, Graph
from .patterns import Pattern


def enumerate_copies(g: Graph, f: Pattern,
                     cap: int = DEFAULT_ENUMERATION_CAP) -> list[FEdge]:
    """All copies of the template in g, deterministically ordered."""
    return sorted(copies_in(g, f, cap=cap), key=lambda fe: fe.sort_key())


def f_isolated(g: Graph, f: Pattern,
               cap: int = DEFAULT_ENUMERATION_CAP
               ) -> tuple[dict[int, int], frozenset[int]]:
    """Per-vertex copy counts and the set of vertices in no copy."""
    deg = {u: 0 for u in g.vertices}
    for fe in copies_in(g, f, cap=cap):
        for u in fe.vertices:
            deg[u] += 1
    return deg, frozenset(u for u, d in deg.items() if d == 0)


@dataclass(frozen=True)
class FactorResult:
    """Outcome of a factor search.

    status is one of "found", "none", "divisibility", "budget"; only "found"
    carries a certificate. nodes_expanded counts search-tree expansions.
    """

    status: str
    certificate: Optional[tuple[FEdge, ...]]
    nodes_expanded: int
    budget: int
    n_copies: int


def verify_factor(g: Graph, f: Pattern, parts: tuple[FEdge, ...]) -> bool:
    """parts must be vertex-disjoint copies present in g covering V(g)."""
    covered: set[int] = set()
    for fe in parts:
        if covered & fe.vertices:
            return False
        if not all(g.has_edge(u, v) for u, v in fe.edge_set):
            return False
        if len(fe.vertices) != f.r:
            return False
        covered |= fe.vertices
    return covered == set(g.vertices)


def find_f_factor(g: Graph, f: Pattern, budget: int = 10 ** 6,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> FactorResult:
    """Search for vertex-disjoint copies covering every vertex.

    Exact cover over the distinct copy vertex sets, branching on the vertex
    with fewest remaining candidates; the copy chosen per set is arbitrary
    since a factor only constrains vertex sets. Stops with status "budget"
    once the expansion budget is spent, so a miss under budget is exhaustive.
    """
    if budget <= 0:
        raise DomainError("budget must be positive")
    copies = enumerate_copies(g, f, cap=cap)
    if g.v() % f.r != 0:
        return FactorResult(status="divisibility", certificate=None,
                            nodes_expanded=0, budget=budget,
                            n_copies=len(copies))
    rep: dict[frozenset[int], FEdge] = {}
    for fe in copies:
        rep.setdefault(fe.vertices, fe)
    sets = sorted(rep, key=lambda vs: tuple(sorted(vs)))
    by_vertex: dict[int, list[int]] = {u: [] for u in g.vertices}
    for i, vs in enumerate(sets):
        for u in vs:
            by_vertex[u].append(i)

    uncovered = set(g.vertices)
    chosen: list[int] = []
    expanded = 0

    def search() -> Optional[str]:
        nonlocal expanded
        if not uncovered:
            return "found"
        expanded += 1
        if expanded > budget:
            return "budget"
        pivot = min(uncovered,
                    key=lambda u: sum(1 for i in by_vertex[u]
                                      if sets[i] <= uncovered))
        cands = [i for i in by_vertex[pivot] if sets[i] <= uncovered]
        if not cands:
            return None
        for i in cands:
            uncovered.difference_update(sets[i])
            chosen.append(i)
            out = search()
            if out is not None:
                return out
            chosen.pop()
            uncovered.update(sets[i])
        return None

    out = search()
    if out == "found":
        cert = tuple(rep[sets[i]] for i in chosen)
        assert verify_factor(g, f, cert)
        return FactorResult(status="found", certificate=cert,
                            nodes_expanded=expanded, budget=budget,
                            n_copies=len(copies))
    status = "budget" if out == "budget" else "none"
    return FactorResult(status=status, certificate=None,
                        nodes_expanded=expanded, budget=budget,
                        n_copies=len(copies))
