"""F-graph structure: cycles, nullity, induced copies, witnesses."""

import math
import random

import pytest

from fthresh.fgraphs import (FEdge, FGraph, all_potential_copies, classify,
                             copies_in, copies_on_vertex_set, count_copies,
                             f_degrees, fgraph_automorphism_count,
                             fgraph_from_json, fgraph_to_json,
                             induced_f_edges, inducing_witness, max_f_degree,
                             nullity, shadow)
from fthresh.graphs import Graph
from fthresh.patterns import pattern_preset

K3 = pattern_preset("k3")


def triangle(a, b, c):
    return FEdge.from_embedding(K3, {0: a, 1: b, 2: c})


def random_fgraph(rng, n, max_fedges):
    copies = all_potential_copies(K3, n)
    k = rng.randint(1, min(max_fedges, len(copies)))
    return FGraph.from_fedges(rng.sample(copies, k), vertices=range(n))


class TestBasics:
    def test_copy_identity_ignores_automorphism(self):
        assert triangle(0, 1, 2) == triangle(2, 0, 1)

    def test_shadow(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(2, 3, 4)])
        assert shadow(h).edges == Graph.from_edges(
            [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).edges

    def test_nullity_single_copy(self):
        assert nullity(FGraph.from_fedges([triangle(0, 1, 2)])) == 0

    def test_nullity_sparse_pair(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(0, 1, 3)])
        # (r-1)e + c - v = 2*2 + 1 - 4
        assert nullity(h) == 1

    def test_f_degrees(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(0, 1, 3)])
        assert f_degrees(h)[0] == 2
        assert f_degrees(h)[3] == 1
        assert max_f_degree(h) == 2


class TestClassify:
    def test_sparse_two_cycle(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(0, 1, 3)])
        cls = classify(h)
        assert (cls.kind, cls.length, cls.sparsity) == ("clean_cycle", 2,
                                                        "sparse")

    def test_three_cycle_dense(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(2, 3, 4),
                                triangle(4, 5, 0)])
        cls = classify(h)
        assert (cls.kind, cls.length, cls.sparsity) == ("clean_cycle", 3,
                                                        "dense")

    def test_disjoint_pair_is_other(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(3, 4, 5)])
        assert classify(h).kind == "other"

    def test_avoidable(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(0, 1, 3),
                                triangle(0, 2, 3)])
        cls = classify(h)
        assert cls.kind == "avoidable"
        assert cls.nullity >= 2


class TestCopies:
    def test_copies_in_k5(self):
        assert len(copies_in(Graph.complete(5), K3)) == 10

    def test_copies_per_vertex_set(self):
        k4me = pattern_preset("k4me")
        assert len(copies_on_vertex_set(k4me, [0, 1, 2, 3])) == 6
        assert len(all_potential_copies(k4me, 6)) == math.comb(6, 4) * 6

    def test_count_copies_matches_enumeration(self):
        sparse = FGraph.from_fedges([triangle(0, 1, 2), triangle(0, 1, 3)])
        n = 6
        from fthresh.dgraphs import cycle_placements
        explicit = sum(1 for cyc in cycle_placements(K3, range(n), 2)
                       if classify(cyc).sparsity == "sparse")
        assert count_copies(sparse, n) == explicit == 90

    def test_fgraph_automorphisms(self):
        sparse = FGraph.from_fedges([triangle(0, 1, 2), triangle(0, 1, 3)])
        # swap the two apexes, swap the shared pair, or both
        assert fgraph_automorphism_count(sparse) == 4


class TestInducedWitness:
    def test_sparse_pair_induces_nothing(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(0, 1, 3)])
        assert induced_f_edges(h, K3) == set()

    def test_avoidable_induces(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(0, 1, 3),
                                triangle(0, 2, 3)])
        induced = induced_f_edges(h, K3)
        assert triangle(1, 2, 3) in induced

    def test_witness_property_randomized(self):
        rng = random.Random(42)
        checked = 0
        for _ in range(200):
            n = rng.randint(4, 10)
            h = random_fgraph(rng, n, 5)
            for target in induced_f_edges(h, K3):
                w = inducing_witness(h, K3, target)
                assert w.e() <= K3.s
                assert classify(w).kind in ("avoidable", "clean_cycle")
                assert target in induced_f_edges(w, K3)
                checked += 1
        assert checked > 0


class TestSerialization:
    def test_json_roundtrip(self):
        h = FGraph.from_fedges([triangle(0, 1, 2), triangle(2, 3, 4)],
                               vertices=range(6))
        back = fgraph_from_json(fgraph_to_json(h, "k3", 6), K3)
        assert back.fedges == h.fedges
        assert back.vertices == h.vertices
