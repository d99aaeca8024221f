"""Factor search against a brute-force oracle."""

import itertools
import random

import pytest

from fthresh.errors import DomainError
from fthresh.factors import (enumerate_copies, f_isolated, find_f_factor,
                             verify_factor)
from fthresh.fgraphs import FEdge
from fthresh.graphs import Graph
from fthresh.patterns import pattern_preset
from fthresh.sampling import sample_gnp

K3 = pattern_preset("k3")


def brute_triangle_factor(g: Graph) -> bool:
    verts = sorted(g.vertices)
    tris = [frozenset(c) for c in itertools.combinations(verts, 3)
            if all(g.has_edge(a, b)
                   for a, b in itertools.combinations(c, 2))]
    by_v: dict[int, list[frozenset]] = {}
    for t in tris:
        for u in t:
            by_v.setdefault(u, []).append(t)
    def rec(uncov: frozenset) -> bool:
        if not uncov:
            return True
        v = min(uncov)
        return any(t <= uncov and rec(uncov - t) for t in by_v.get(v, ()))
    return rec(frozenset(verts))


class TestSolver:
    def test_oracle_equivalence(self):
        for trial in range(200):
            rng = random.Random(trial)
            n = rng.choice([6, 9, 12])
            p = rng.uniform(0.2, 0.7)
            g = sample_gnp(n, p, trial)
            res = find_f_factor(g, K3, budget=10 ** 6)
            assert res.status in ("found", "none")
            assert (res.status == "found") == brute_triangle_factor(g)
            if res.certificate is not None:
                assert verify_factor(g, K3, res.certificate)

    def test_complete_graph(self):
        res = find_f_factor(Graph.complete(9), K3)
        assert res.status == "found"
        assert len(res.certificate) == 3

    def test_divisibility(self):
        res = find_f_factor(Graph.complete(7), K3)
        assert res.status == "divisibility"
        assert res.certificate is None

    def test_budget_exhaustion(self):
        g = sample_gnp(15, 0.5, 0)
        res = find_f_factor(g, K3, budget=1)
        assert res.status in ("budget", "found")
        if res.status == "budget":
            assert res.certificate is None

    def test_budget_must_be_positive(self):
        with pytest.raises(DomainError):
            find_f_factor(Graph.complete(6), K3, budget=0)


class TestHelpers:
    def test_enumerate_copies_sorted(self):
        copies = enumerate_copies(Graph.complete(5), K3)
        assert len(copies) == 10
        assert copies == sorted(copies, key=lambda fe: fe.sort_key())

    def test_f_isolated(self):
        g = Graph.from_edges([(0, 1), (1, 2), (0, 2), (3, 4)])
        deg, isolated = f_isolated(g, K3)
        assert deg[0] == 1
        assert isolated == frozenset({3, 4})

    def test_verify_factor_rejects_overlap(self):
        g = Graph.complete(6)
        copies = enumerate_copies(g, K3)
        overlapping = (copies[0], copies[1])
        if not set(copies[0].vertices) & set(copies[1].vertices):
            overlapping = (copies[0], copies[0])
        assert not verify_factor(g, K3, overlapping)

    def test_verify_factor_requires_cover(self):
        g = Graph.complete(6)
        one = enumerate_copies(g, K3)[:1]
        assert not verify_factor(g, K3, tuple(one))
