"""Counter-based sampling of the three random structures.

All randomness flows through Philox keyed by (seed, stream_id), so the i-th
uniform of a stream is a pure function of the key. Edge, copy, and dummy
indicators each draw from their own stream in a fixed enumeration order,
which lets a threshold scan reuse one batch of uniforms across a whole
p-grid monotonically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dgraphs import DGraph, sparse_cycle_placements
from .fgraphs import FEdge, FGraph, all_potential_copies
from .graphs import Graph
from .patterns import Pattern

# fixed stream roles; callers may override but must keep streams distinct
STREAM_EDGES = 0
STREAM_COPIES = 1
STREAM_DUMMIES = 2
STREAM_COUPLING = 3


@dataclass(frozen=True)
class Seed:
    value: int
    stream_id: int = 0


def rng_for(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed, stream_id)))


def uniforms(seed: int, stream_id: int, count: int) -> np.ndarray:
    return rng_for(seed, stream_id).random(count)


def edge_order(n: int) -> list[tuple[int, int]]:
    """Lexicographic order of the potential edges on [n]."""
    return list(itertools.combinations(range(n), 2))


def edge_uniforms(n: int, seed: int,
                  stream_id: int = STREAM_EDGES) -> np.ndarray:
    return uniforms(seed, stream_id, n * (n - 1) // 2)


def graph_from_uniforms(n: int, us: np.ndarray, p: float) -> Graph:
    """Threshold one batch of edge uniforms at p; monotone in p by design."""
    pairs = edge_order(n)
    if len(us) != len(pairs):
        raise ValueError(f"expected {len(pairs)} uniforms, got {len(us)}")
    return Graph.from_edges((pairs[i] for i in np.flatnonzero(us < p)),
                            vertices=range(n))


def sample_gnp(n: int, p: float, seed: int,
               stream_id: int = STREAM_EDGES) -> Graph:
    """Binomial random graph on [n]."""
    return graph_from_uniforms(n, edge_uniforms(n, seed, stream_id), p)


def sample_hf(f: Pattern, n: int, pi: float, seed: int,
              stream_id: int = STREAM_COPIES) -> FGraph:
    """Independent copy indicators over every potential copy on [n]."""
    copies = all_potential_copies(f, n)
    us = uniforms(seed, stream_id, len(copies))
    return FGraph.from_fedges((copies[i] for i in np.flatnonzero(us < pi)),
                              vertices=range(n))


def sample_gstar(f: Pattern, n: int, p: float, seed: int,
                 edge_stream: int = STREAM_EDGES,
                 dummy_stream: int = STREAM_DUMMIES) -> DGraph:
    """Auxiliary random graph: usual edges and dummy edges, all independent
    with probability p. Dummy slots follow the fixed sparse-cycle order."""
    base = sample_gnp(n, p, seed, edge_stream)
    slots = sparse_cycle_placements(f, range(n))
    us = uniforms(seed, dummy_stream, len(slots))
    dummies = frozenset(slots[i] for i in np.flatnonzero(us < p))
    return DGraph(base=base, dummies=dummies)


def merge_to_hr(h: FGraph) -> set[frozenset[int]]:
    """Vertex sets holding at least one copy: the merged hypergraph's edges."""
    return {fe.vertices for fe in h.fedges}
