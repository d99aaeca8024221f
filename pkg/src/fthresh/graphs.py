"""Labeled simple graphs with exact density, balance, and symmetry analysis.

All density comparisons are carried out in exact rational arithmetic
(`fractions.Fraction`): strict inequalities between densities decide
correctness downstream, so floating point is not allowed here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import ResourceLimitError, UndefinedDensityError

Edge = tuple[int, int]

DEFAULT_ENUMERATION_CAP = 10**7


def _norm_edge(u: int, v: int) -> Edge:
    if u == v:
        raise ValueError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple graph on non-negative integer labels."""

    vertices: frozenset[int]
    edges: frozenset[Edge]

    def __post_init__(self):
        for u, v in self.edges:
            if u >= v:
                raise ValueError(f"edge {(u, v)} not normalized")
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge {(u, v)} has an unlisted endpoint")
        if any(u < 0 for u in self.vertices):
            raise ValueError("vertex labels must be non-negative")

    @staticmethod
    def from_edges(edges: Iterable[tuple[int, int]],
                   vertices: Optional[Iterable[int]] = None) -> "Graph":
        es = frozenset(_norm_edge(u, v) for u, v in edges)
        vs = set(itertools.chain.from_iterable(es))
        if vertices is not None:
            vs |= set(vertices)
        return Graph(frozenset(vs), es)

    @staticmethod
    def empty(n: int) -> "Graph":
        return Graph(frozenset(range(n)), frozenset())

    @staticmethod
    def complete(n: int) -> "Graph":
        return Graph.from_edges(itertools.combinations(range(n), 2),
                                vertices=range(n))

    @staticmethod
    def cycle(n: int) -> "Graph":
        return Graph.from_edges(((i, (i + 1) % n) for i in range(n)),
                                vertices=range(n))

    @staticmethod
    def path(n: int) -> "Graph":
        return Graph.from_edges(((i, i + 1) for i in range(n - 1)),
                                vertices=range(n))

    def v(self) -> int:
        return len(self.vertices)

    def e(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {u: set() for u in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def induced(self, vs: Iterable[int]) -> "Graph":
        keep = frozenset(vs)
        if not keep <= self.vertices:
            raise ValueError("induced subgraph on unknown vertices")
        return Graph(keep, frozenset((u, v) for u, v in self.edges
                                     if u in keep and v in keep))

    def relabel(self, mapping: dict[int, int]) -> "Graph":
        return Graph.from_edges(((mapping[u], mapping[v]) for u, v in self.edges),
                                vertices=(mapping[x] for x in self.vertices))

    def union(self, other: "Graph") -> "Graph":
        return Graph(self.vertices | other.vertices, self.edges | other.edges)

    def is_connected(self) -> bool:
        return components(self)[0] <= 1


def components(g: Graph) -> tuple[int, list[frozenset[int]]]:
    """Connected components; the empty graph has zero of them."""
    adj = g.adjacency()
    seen: set[int] = set()
    parts: list[frozenset[int]] = []
    for start in sorted(g.vertices):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        parts.append(frozenset(comp))
    return len(parts), parts


@dataclass(frozen=True)
class DensityReport:
    edge_density: Fraction
    one_density: Optional[Fraction]
    strictly_balanced: bool
    strictly_1_balanced: bool


def one_density(g: Graph) -> Fraction:
    if g.v() < 2:
        raise UndefinedDensityError("1-density needs at least two vertices")
    return Fraction(g.e(), g.v() - 1)


def _induced_edge_count(keep: frozenset[int], edges: frozenset[Edge]) -> int:
    return sum(1 for u, v in edges if u in keep and v in keep)


def density_report(g: Graph) -> DensityReport:
    """Exact strict-balance classification.

    For both notions it suffices to scan proper *induced* subgraphs: for a
    fixed vertex set the induced subgraph maximizes e (hence both densities),
    and spanning subgraphs with fewer edges are strictly sparser than g
    automatically.
    """
    n, m = g.v(), g.e()
    if n == 0:
        raise UndefinedDensityError("density of the empty graph is undefined")
    d = Fraction(m, n)
    d1 = Fraction(m, n - 1) if n >= 2 else None

    strictly_balanced = True
    strictly_1_balanced = n >= 2 and m >= 1
    verts = sorted(g.vertices)
    for k in range(1, n):
        for sub in itertools.combinations(verts, k):
            keep = frozenset(sub)
            e_sub = _induced_edge_count(keep, g.edges)
            # edge density: e_sub / k < m / n, exact cross-multiplication
            if e_sub * n >= m * k:
                strictly_balanced = False
            if k >= 2 and e_sub >= 1 and d1 is not None:
                if Fraction(e_sub, k - 1) >= d1:
                    strictly_1_balanced = False
        if not strictly_balanced and not strictly_1_balanced:
            break
    return DensityReport(edge_density=d, one_density=d1,
                         strictly_balanced=strictly_balanced,
                         strictly_1_balanced=strictly_1_balanced)


def strictly_1_balanced_violation(g: Graph) -> Optional[Graph]:
    """A non-trivial proper induced subgraph with d1 >= d1(g), if one exists."""
    if g.v() < 2:
        return None
    d1 = one_density(g)
    verts = sorted(g.vertices)
    for k in range(2, g.v()):
        for sub in itertools.combinations(verts, k):
            s = g.induced(sub)
            if s.e() >= 1 and one_density(s) >= d1:
                return s
    return None


def automorphisms(g: Graph) -> Iterator[dict[int, int]]:
    """All adjacency-preserving vertex permutations, by backtracking."""
    verts = sorted(g.vertices)
    n = len(verts)
    if n == 0:
        yield {}
        return
    idx = {u: i for i, u in enumerate(verts)}
    adj = [[False] * n for _ in range(n)]
    deg = [0] * n
    for u, v in g.edges:
        i, j = idx[u], idx[v]
        adj[i][j] = adj[j][i] = True
        deg[i] += 1
        deg[j] += 1
    # order by rarity of degree to prune early
    order = sorted(range(n), key=lambda i: (deg[i], i))
    image = [0] * n
    used = [False] * n

    def extend(pos: int) -> Iterator[dict[int, int]]:
        if pos == n:
            yield {verts[i]: verts[image[i]] for i in range(n)}
            return
        u = order[pos]
        for t in range(n):
            if used[t] or deg[t] != deg[u]:
                continue
            ok = True
            for q in range(pos):
                w = order[q]
                if adj[u][w] != adj[t][image[w]]:
                    ok = False
                    break
            if ok:
                image[u] = t
                used[t] = True
                yield from extend(pos + 1)
                used[t] = False

    yield from extend(0)


def automorphism_count(g: Graph) -> int:
    """Exact count of adjacency-preserving vertex permutations."""
    return sum(1 for _ in automorphisms(g))


def enumerate_connected_subgraphs(g: Graph, max_vertices: int,
                                  cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Graph]:
    """All connected subgraphs with at most max_vertices vertices.

    Yields every single vertex and every connected edge subset (as a graph on
    its support), each exactly once by identity of labels.
    """
    if max_vertices < 1:
        raise ValueError("max_vertices must be >= 1")
    emitted = 0
    for u in sorted(g.vertices):
        yield Graph(frozenset([u]), frozenset())
        emitted += 1
        if emitted > cap:
            raise ResourceLimitError(f"subgraph enumeration exceeded cap {cap}")
    edges = sorted(g.edges)
    adj_edges: dict[int, list[Edge]] = {u: [] for u in g.vertices}
    for e in edges:
        adj_edges[e[0]].append(e)
        adj_edges[e[1]].append(e)
    seen: set[frozenset[Edge]] = set()
    # grow connected edge sets breadth-first from every edge
    frontier: list[tuple[frozenset[Edge], frozenset[int]]] = []
    for e in edges:
        es = frozenset([e])
        frontier.append((es, frozenset(e)))
        seen.add(es)
    while frontier:
        es, support = frontier.pop()
        yield Graph(support, es)
        emitted += 1
        if emitted > cap:
            raise ResourceLimitError(f"subgraph enumeration exceeded cap {cap}")
        for u in support:
            for e in adj_edges[u]:
                if e in es:
                    continue
                new_support = support | frozenset(e)
                if len(new_support) > max_vertices:
                    continue
                new_es = es | {e}
                if new_es in seen:
                    continue
                seen.add(new_es)
                if len(seen) > cap:
                    raise ResourceLimitError(
                        f"subgraph enumeration exceeded cap {cap}")
                frontier.append((new_es, new_support))


# -- canonical labeling ------------------------------------------------------

def _refine(n: int, adj: list[set[int]], colors: list[int]) -> list[int]:
    """Equitable refinement; color ids are assigned canonically (sorted keys)."""
    while True:
        keys = [(colors[u], tuple(sorted(colors[w] for w in adj[u])))
                for u in range(n)]
        new_ids = {k: i for i, k in enumerate(sorted(set(keys)))}
        new_colors = [new_ids[k] for k in keys]
        if new_colors == colors:
            return colors
        colors = new_colors


def _canonical_encoding(g: Graph) -> tuple[int, tuple[Edge, ...]]:
    verts = sorted(g.vertices)
    n = len(verts)
    idx = {u: i for i, u in enumerate(verts)}
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in g.edges:
        adj[idx[u]].add(idx[v])
        adj[idx[v]].add(idx[u])

    best: Optional[tuple[Edge, ...]] = None

    def leaf(colors: list[int]) -> None:
        nonlocal best
        # colors are a discrete partition: position of vertex = its color
        enc = tuple(sorted(_norm_edge(colors[a], colors[b])
                           for a in range(n) for b in adj[a] if a < b))
        if best is None or enc < best:
            best = enc

    def descend(colors: list[int]) -> None:
        colors = _refine(n, adj, list(colors))
        cells: dict[int, list[int]] = {}
        for u, c in enumerate(colors):
            cells.setdefault(c, []).append(u)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                if target is None or len(cells[c]) < len(cells[target]):
                    target = c
        if target is None:
            leaf(colors)
            return
        for u in cells[target]:
            branched = list(colors)
            # individualize u: give it a fresh color just below its cell
            for w in range(n):
                if branched[w] >= branched[u] and w != u:
                    branched[w] += 1
            descend(branched)

    if n == 0:
        return 0, ()
    descend([0] * n)
    assert best is not None
    return n, best


def canonical_form(g: Graph) -> str:
    """Canonical label string: equal iff isomorphic, deterministic."""
    n, enc = _canonical_encoding(g)
    return f"n{n}:" + ",".join(f"{u}-{v}" for u, v in enc)


def are_isomorphic(g1: Graph, g2: Graph) -> bool:
    return canonical_form(g1) == canonical_form(g2)


# -- subgraph embeddings -----------------------------------------------------

def enumerate_embeddings(pattern: Graph, host: Graph,
                         cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[dict[int, int]]:
    """Injective maps of pattern into host preserving pattern edges.

    Copies are not required to be induced; host edges outside the image are
    ignored. Yields raw embeddings; callers collapse them to copies.
    """
    pverts = sorted(pattern.vertices)
    if not pverts:
        yield {}
        return
    padj = pattern.adjacency()
    hadj = host.adjacency()
    hdeg = {u: len(hadj[u]) for u in host.vertices}
    # order pattern vertices so each one after the first attaches to the
    # already-mapped part if possible (connected patterns: always)
    order = [pverts[0]]
    rest = set(pverts[1:])
    while rest:
        nxt = None
        for u in sorted(rest):
            if padj[u] & set(order):
                nxt = u
                break
        if nxt is None:
            nxt = min(rest)
        order.append(nxt)
        rest.remove(nxt)
    pdeg = {u: len(padj[u]) for u in pattern.vertices}
    emitted = 0
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def place(pos: int) -> Iterator[dict[int, int]]:
        nonlocal emitted
        if pos == len(order):
            emitted += 1
            if emitted > cap:
                raise ResourceLimitError(f"embedding enumeration exceeded cap {cap}")
            yield dict(mapping)
            return
        u = order[pos]
        anchors = [w for w in padj[u] if w in mapping]
        if anchors:
            cands = set(hadj[mapping[anchors[0]]])
            for w in anchors[1:]:
                cands &= hadj[mapping[w]]
            cands -= used
        else:
            cands = set(host.vertices) - used
        for t in sorted(cands):
            if hdeg[t] < pdeg[u]:
                continue
            mapping[u] = t
            used.add(t)
            yield from place(pos + 1)
            del mapping[u]
            used.discard(t)

    yield from place(0)


# -- edge-list text format ---------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse the "u v" per-line format; optional "n=<k>" header line."""
    n_declared: Optional[int] = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("n="):
            n_declared = int(line[2:])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    max_label = max((max(u, v) for u, v in edges), default=-1)
    n = n_declared if n_declared is not None else max_label + 1
    if max_label >= n:
        raise ValueError(f"edge label {max_label} exceeds declared n={n}")
    return Graph.from_edges(edges, vertices=range(n))


def format_edge_list(g: Graph) -> str:
    lines = [f"n={max(g.vertices) + 1 if g.vertices else 0}"]
    lines += [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"
