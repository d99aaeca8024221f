"""Counter-based samplers: determinism, monotone reuse, marginals."""

import math

import numpy as np
import pytest

from fthresh.fgraphs import FGraph, classify
from fthresh.patterns import pattern_preset, pi_prime
from fthresh.sampling import (STREAM_COPIES, STREAM_EDGES, edge_order,
                              edge_uniforms, graph_from_uniforms,
                              merge_to_hr, rng_for, sample_gnp, sample_gstar,
                              sample_hf, uniforms)

K3 = pattern_preset("k3")


class TestStreams:
    def test_deterministic(self):
        assert np.array_equal(uniforms(7, 0, 100), uniforms(7, 0, 100))

    def test_streams_differ(self):
        assert not np.array_equal(uniforms(7, STREAM_EDGES, 100),
                                  uniforms(7, STREAM_COPIES, 100))

    def test_seeds_differ(self):
        assert not np.array_equal(uniforms(7, 0, 100), uniforms(8, 0, 100))


class TestGnp:
    def test_monotone_in_p(self):
        us = edge_uniforms(10, 3)
        g1 = graph_from_uniforms(10, us, 0.2)
        g2 = graph_from_uniforms(10, us, 0.5)
        assert g1.edges <= g2.edges

    def test_extremes(self):
        us = edge_uniforms(8, 0)
        assert graph_from_uniforms(8, us, 1.0).e() == 28
        assert graph_from_uniforms(8, us, 0.0).e() == 0

    def test_edge_count_statistics(self):
        n, p, reps = 12, 0.3, 300
        m = n * (n - 1) // 2
        counts = [sample_gnp(n, p, s).e() for s in range(reps)]
        mean = sum(counts) / reps
        sd = math.sqrt(m * p * (1 - p) / reps)
        assert abs(mean - m * p) < 4 * sd


class TestCopyProcess:
    def test_deterministic(self):
        h1 = sample_hf(K3, 8, 0.1, 5)
        h2 = sample_hf(K3, 8, 0.1, 5)
        assert h1.fedges == h2.fedges

    def test_copy_count_statistics(self):
        n, pi, reps = 7, 0.15, 300
        m = math.comb(n, 3)
        counts = [sample_hf(K3, n, pi, s).e() for s in range(reps)]
        mean = sum(counts) / reps
        sd = math.sqrt(m * pi * (1 - pi) / reps)
        assert abs(mean - m * pi) < 4 * sd

    def test_merge_law(self):
        """Merged hyperedge frequency matches 1 - (1 - pi)^(r!/aut)."""
        f = pattern_preset("k4me")
        n, pi, reps = 6, 0.05, 4000
        target = frozenset({0, 1, 2, 3})
        hits = sum(target in merge_to_hr(sample_hf(f, n, pi, s))
                   for s in range(reps))
        expect = pi_prime(f, pi)
        assert expect == pytest.approx(1 - (1 - pi) ** 6, rel=1e-12)
        sd = math.sqrt(expect * (1 - expect) / reps)
        assert abs(hits / reps - expect) < 4 * sd


class TestAuxiliaryGraph:
    def test_deterministic(self):
        g1 = sample_gstar(K3, 7, 0.4, 9)
        g2 = sample_gstar(K3, 7, 0.4, 9)
        assert g1.base.edges == g2.base.edges
        assert g1.dummies == g2.dummies

    def test_dummy_keys_are_sparse_cycles(self):
        g = sample_gstar(K3, 7, 0.6, 1)
        for key in g.dummies:
            cls = classify(FGraph.from_fedges(key))
            assert cls.kind == "clean_cycle"
            assert cls.sparsity == "sparse"

    def test_dummy_count_statistics(self):
        n, p, reps = 6, 0.25, 300
        slots = 90
        counts = [len(sample_gstar(K3, n, p, s).dummies)
                  for s in range(reps)]
        mean = sum(counts) / reps
        sd = math.sqrt(slots * p * (1 - p) / reps)
        assert abs(mean - slots * p) < 4 * sd

    def test_base_matches_gnp_stream(self):
        assert sample_gstar(K3, 7, 0.4, 9).base.edges == \
            sample_gnp(7, 0.4, 9).edges


def test_edge_order_is_lexicographic():
    assert edge_order(4) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_rng_for_reproducible():
    assert rng_for(1, 2).random() == rng_for(1, 2).random()
