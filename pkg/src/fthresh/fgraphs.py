"""F-graphs: shadow graphs, nullity, clean-cycle classification, induced
copies, avoidable configurations, and exact copy counting.

An F-edge is an embedded copy of the template; two embeddings that differ
by a template automorphism are the same copy, so copy identity is the pair
(vertex set, edge set).
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import ResourceLimitError, WitnessNotFoundError
from .graphs import (DEFAULT_ENUMERATION_CAP, Edge, Graph, _norm_edge,
                     automorphisms, enumerate_embeddings)
from .patterns import Pattern


@dataclass(frozen=True)
class FEdge:
    vertices: frozenset[int]
    edge_set: frozenset[Edge]
    embedding: tuple[int, ...] = field(compare=False, hash=False, default=())
    """Images of the template's sorted vertices; lexicographically minimal
    representative of the copy's embedding class."""

    @staticmethod
    def from_embedding(f: Pattern, mapping: dict[int, int]) -> "FEdge":
        pverts = sorted(f.graph.vertices)
        edge_set = frozenset(_norm_edge(mapping[u], mapping[v])
                             for u, v in f.graph.edges)
        verts = frozenset(mapping[u] for u in pverts)
        best = min(tuple(mapping[a[u]] for u in pverts)
                   for a in automorphisms(f.graph))
        return FEdge(verts, edge_set, best)

    def sort_key(self) -> tuple:
        return (tuple(sorted(self.vertices)), tuple(sorted(self.edge_set)))


@dataclass(frozen=True)
class FGraph:
    vertices: frozenset[int]
    fedges: frozenset[FEdge]

    def __post_init__(self):
        for h in self.fedges:
            if not h.vertices <= self.vertices:
                raise ValueError("F-edge vertex outside the vertex set")

    @staticmethod
    def from_fedges(fedges: Iterable[FEdge],
                    vertices: Optional[Iterable[int]] = None) -> "FGraph":
        fs = frozenset(fedges)
        vs = set()
        for h in fs:
            vs |= h.vertices
        if vertices is not None:
            vs |= set(vertices)
        return FGraph(frozenset(vs), fs)

    def e(self) -> int:
        return len(self.fedges)

    def v(self) -> int:
        return len(self.vertices)

    def with_fedge(self, h: FEdge) -> "FGraph":
        return FGraph(self.vertices | h.vertices, self.fedges | {h})

    def sub(self, fedges: Iterable[FEdge]) -> "FGraph":
        """Sub-F-graph spanned by the given F-edges (no isolated vertices)."""
        return FGraph.from_fedges(fedges)


@dataclass(frozen=True)
class CycleClass:
    kind: str  # "avoidable" | "clean_cycle" | "other"
    nullity: int
    length: Optional[int] = None
    sparsity: Optional[str] = None  # "sparse" | "dense" for clean cycles


def shadow(h: FGraph) -> Graph:
    edges: set[Edge] = set()
    for fe in h.fedges:
        edges |= fe.edge_set
    return Graph(h.vertices, frozenset(edges))


def nullity(h: FGraph) -> int:
    """(r-1)e + c - v, with isolated vertices counting toward v and c."""
    from .graphs import components
    if h.fedges:
        r = len(next(iter(h.fedges)).vertices)
    else:
        r = 0  # the (r-1)e term vanishes anyway
    c = components(shadow(h))[0]
    return (r - 1) * h.e() + c - h.v()


def _clean_cycle_order(h: FGraph) -> Optional[tuple[list[FEdge], list[int]]]:
    """Cyclic ordering with single-vertex consecutive overlaps, or None.

    Length 2 is the special two-overlap-vertices case and is handled by the
    caller; this only finds orderings for k >= 3.
    """
    fes = sorted(h.fedges, key=lambda x: x.sort_key())
    k = len(fes)
    if k < 3:
        return None
    inter = {}
    for a, b in itertools.combinations(range(k), 2):
        inter[(a, b)] = inter[(b, a)] = fes[a].vertices & fes[b].vertices
    first = 0
    for rest in itertools.permutations(range(1, k)):
        order = (first,) + rest
        ok = True
        overlaps: list[int] = []
        for i in range(k):
            a, b = order[i], order[(i + 1) % k]
            ov = inter[(a, b)]
            if len(ov) != 1:
                ok = False
                break
            overlaps.append(next(iter(ov)))
        if not ok:
            continue
        for i, j in itertools.combinations(range(k), 2):
            if (j - i) % k in (1, k - 1):
                continue
            if inter[(order[i], order[j])]:
                ok = False
                break
        if ok and len(set(overlaps)) == k:
            return [fes[i] for i in order], overlaps
    return None


def is_sparse_pair(h1: FEdge, h2: FEdge) -> bool:
    """Two copies overlapping in exactly two vertices that form an edge in both."""
    ov = h1.vertices & h2.vertices
    if len(ov) != 2:
        return False
    e = _norm_edge(*sorted(ov))
    return e in h1.edge_set and e in h2.edge_set


def classify(h: FGraph) -> CycleClass:
    """Avoidable configuration, clean cycle, or other.

    Clean-cycle recognition is by explicit overlap-pattern search; nullity 1
    alone does not imply cleanness.
    """
    nul = nullity(h)
    k = h.e()
    if k == 2:
        h1, h2 = sorted(h.fedges, key=lambda x: x.sort_key())
        ov = h1.vertices & h2.vertices
        if len(ov) == 2 and h.v() == len(h1.vertices | h2.vertices):
            sparsity = "sparse" if is_sparse_pair(h1, h2) else "dense"
            return CycleClass(kind="clean_cycle", nullity=nul, length=2,
                              sparsity=sparsity)
    elif k >= 3:
        found = _clean_cycle_order(h)
        if found is not None and h.v() == len(
                frozenset().union(*(fe.vertices for fe in h.fedges))):
            return CycleClass(kind="clean_cycle", nullity=nul, length=k,
                              sparsity="dense")
    from .graphs import components
    connected = h.v() > 0 and components(shadow(h))[0] == 1
    if connected and nul >= 2:
        return CycleClass(kind="avoidable", nullity=nul)
    return CycleClass(kind="other", nullity=nul)


def clean_cycle_order(h: FGraph) -> tuple[list[FEdge], list[int]]:
    """Ordered copies and overlap vertices of a clean cycle of length >= 3."""
    found = _clean_cycle_order(h)
    if found is None:
        raise ValueError("not a clean cycle of length >= 3")
    return found


def copies_in(g: Graph, f: Pattern,
              cap: int = DEFAULT_ENUMERATION_CAP) -> set[FEdge]:
    """All copies of the template in g, as F-edges."""
    out: dict[tuple[frozenset, frozenset], FEdge] = {}
    for m in enumerate_embeddings(f.graph, g, cap=cap):
        fe = FEdge.from_embedding(f, m)
        out[(fe.vertices, fe.edge_set)] = fe
    return set(out.values())


def induced_f_edges(h: FGraph, f: Pattern) -> set[FEdge]:
    """Copies of the template present in the shadow but absent from h."""
    return copies_in(shadow(h), f) - set(h.fedges)


def inducing_witness(h: FGraph, f: Pattern, target: FEdge) -> FGraph:
    """Smallest sub-F-graph with <= e(F) F-edges inducing the target copy.

    The witness is always classified avoidable or clean cycle; an empty
    search would falsify a structural guarantee and raises.
    """
    fes = sorted(h.fedges, key=lambda x: x.sort_key())
    for size in range(1, f.s + 1):
        for combo in itertools.combinations(fes, size):
            sub = FGraph.from_fedges(combo)
            if target in h.fedges or target in combo:
                continue
            if not target.edge_set <= frozenset(
                    e for fe in combo for e in fe.edge_set):
                continue
            if target not in induced_f_edges(sub, f):
                continue
            if classify(sub).kind in ("avoidable", "clean_cycle"):
                return sub
    raise WitnessNotFoundError(
        f"no inducing witness with <= {f.s} F-edges for {target}")


def find_avoidable(h: FGraph, max_fedges: int,
                   cap: int = DEFAULT_ENUMERATION_CAP) -> Optional[FGraph]:
    """A connected sub-F-graph with <= max_fedges F-edges and nullity >= 2."""
    if max_fedges < 2:
        raise ValueError("max_fedges must be >= 2")
    fes = sorted(h.fedges, key=lambda x: x.sort_key())
    k = len(fes)
    touch = [[bool(fes[a].vertices & fes[b].vertices) for b in range(k)]
             for a in range(k)]
    seen: set[frozenset[int]] = set()
    examined = 0

    def grow(current: frozenset[int]) -> Optional[FGraph]:
        nonlocal examined
        examined += 1
        if examined > cap:
            raise ResourceLimitError(f"avoidable search exceeded cap {cap}")
        sub = FGraph.from_fedges(fes[i] for i in current)
        if len(current) >= 2 and nullity(sub) >= 2:
            from .graphs import components
            if components(shadow(sub))[0] == 1:
                return sub
        if len(current) >= max_fedges:
            return None
        for j in range(k):
            if j in current:
                continue
            if current and not any(touch[i][j] for i in current):
                continue
            nxt = current | {j}
            if nxt in seen:
                continue
            seen.add(nxt)
            hit = grow(nxt)
            if hit is not None:
                return hit
        return None

    for i in range(k):
        start = frozenset([i])
        if start not in seen:
            seen.add(start)
            hit = grow(start)
            if hit is not None:
                return hit
    return None


def fgraph_automorphism_count(shape: FGraph) -> int:
    """Vertex permutations preserving the F-edge set (shadow auts filtered)."""
    copies = {(fe.vertices, fe.edge_set) for fe in shape.fedges}
    count = 0
    for a in automorphisms(shadow(shape)):
        mapped = {(frozenset(a[u] for u in vs),
                   frozenset(_norm_edge(a[u], a[v]) for u, v in es))
                  for vs, es in copies}
        if mapped == copies:
            count += 1
    return count


def count_copies(shape: FGraph, n: int) -> int:
    """Distinct copies of shape on vertex set [n], exactly."""
    v = shape.v()
    if n < v:
        raise ValueError(f"n={n} smaller than v(shape)={v}")
    return math.comb(n, v) * math.factorial(v) // fgraph_automorphism_count(shape)


def expected_copies(shape: FGraph, n: int, pi: float) -> float:
    return count_copies(shape, n) * pi ** shape.e()


def enumerate_clean_cycles(h: FGraph, f: Pattern, max_len: int,
                           cap: int = DEFAULT_ENUMERATION_CAP) -> set[FGraph]:
    """All clean-cycle sub-F-graphs of length <= max_len."""
    if max_len < 2:
        raise ValueError("max_len must be >= 2")
    fes = sorted(h.fedges, key=lambda x: x.sort_key())
    out: set[FGraph] = set()
    examined = 0
    for k in range(2, max_len + 1):
        for combo in itertools.combinations(fes, k):
            examined += 1
            if examined > cap:
                raise ResourceLimitError(f"clean-cycle enumeration exceeded cap {cap}")
            sub = FGraph.from_fedges(combo)
            if classify(sub).kind == "clean_cycle":
                out.add(sub)
    return out


def f_degrees(h: FGraph) -> dict[int, int]:
    deg = {u: 0 for u in h.vertices}
    for fe in h.fedges:
        for u in fe.vertices:
            deg[u] += 1
    return deg


def max_f_degree(h: FGraph) -> int:
    return max(f_degrees(h).values(), default=0)


# -- potential copies on [n], in the canonical order -------------------------

def copies_on_vertex_set(f: Pattern, vset: Iterable[int]) -> list[FEdge]:
    """The r!/aut distinct copies on one vertex set, canonically ordered."""
    vs = sorted(vset)
    pverts = sorted(f.graph.vertices)
    assert len(vs) == f.r
    seen: dict[tuple, FEdge] = {}
    for perm in itertools.permutations(vs):
        mapping = dict(zip(pverts, perm))
        fe = FEdge.from_embedding(f, mapping)
        seen[tuple(sorted(fe.edge_set))] = fe
    return [seen[k] for k in sorted(seen)]


def potential_copies_on(f: Pattern, labels: Iterable[int]) -> list[FEdge]:
    """Every potential copy on the given labels: lexicographic on the sorted
    vertex set, then canonical embedding order."""
    out: list[FEdge] = []
    for vset in itertools.combinations(sorted(labels), f.r):
        out.extend(copies_on_vertex_set(f, vset))
    return out


@functools.lru_cache(maxsize=64)
def _all_potential_copies_cached(f: Pattern, n: int) -> tuple[FEdge, ...]:
    return tuple(potential_copies_on(f, range(n)))


def all_potential_copies(f: Pattern, n: int) -> list[FEdge]:
    """Every potential copy on [n], in the fixed order the coupling replays."""
    return list(_all_potential_copies_cached(f, n))


# -- serialization -----------------------------------------------------------

def fgraph_to_json(h: FGraph, pattern_name: str, n: int) -> str:
    fedges = sorted((list(fe.embedding) for fe in h.fedges))
    return json.dumps({"n": n, "pattern_name": pattern_name, "fedges": fedges})


def fgraph_from_json(text: str, f: Pattern) -> FGraph:
    data = json.loads(text)
    pverts = sorted(f.graph.vertices)
    fes = [FEdge.from_embedding(f, dict(zip(pverts, images)))
           for images in data["fedges"]]
    return FGraph.from_fedges(fes, vertices=range(data["n"]))
