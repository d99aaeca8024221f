"""Exact enumeration backend for tiny instances.

Holds the full product spaces behind both random objects: one axis per
potential copy for the copy process, one axis per potential usual edge for
the auxiliary graph, with dummy edges marginalized analytically. Everything
downstream (cycle-set probabilities, maximal pre-coupling, per-step
conditional probabilities, final conditional sampling) reduces to masked
sums over these arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dgraphs import DGraph, cycle_placements
from .errors import InternalInconsistencyError, ResourceLimitError
from .fgraphs import FGraph, classify, shadow
from .graphs import Graph
from .patterns import Pattern
from .sampling import edge_order

DEFAULT_OUTCOME_CAP = 2 ** 24


@dataclass(frozen=True)
class CycleRec:
    cycle: FGraph
    copy_bits: int
    shadow_bits: int
    sparse: bool


class ExactEngine:
    """Shared per-(pattern, n) arrays; probabilities enter per call."""

    def __init__(self, f: Pattern, n: int,
                 outcome_cap: int = DEFAULT_OUTCOME_CAP):
        from .fgraphs import all_potential_copies
        self.f = f
        self.n = n
        copies = all_potential_copies(f, n)
        self.copies = copies
        self.M = len(copies)
        self.pairs = edge_order(n)
        self.E = len(self.pairs)
        if 2 ** self.M > outcome_cap or 2 ** self.E > outcome_cap:
            raise ResourceLimitError(
                f"exact enumeration needs 2^{max(self.M, self.E)} outcomes, "
                f"cap is {outcome_cap}")
        self.edge_index = {e: i for i, e in enumerate(self.pairs)}
        self.copy_index = {(fe.vertices, fe.edge_set): i
                           for i, fe in enumerate(copies)}
        self.copy_edge_bits = [
            sum(1 << self.edge_index[e] for e in fe.edge_set) for fe in copies]

        self.cycles: list[CycleRec] = []
        for cyc in cycle_placements(f, range(n), f.s):
            cls = classify(cyc)
            cb = 0
            for fe in cyc.fedges:
                cb |= 1 << self.copy_index[(fe.vertices, fe.edge_set)]
            sb = sum(1 << self.edge_index[e] for e in shadow(cyc).edges)
            self.cycles.append(CycleRec(cycle=cyc, copy_bits=cb,
                                        shadow_bits=sb,
                                        sparse=cls.sparsity == "sparse"))
        self.cycle_id = {rec.cycle: i for i, rec in enumerate(self.cycles)}
        self.sparse_ids = [i for i, rec in enumerate(self.cycles)
                           if rec.sparse]

        # copy-subset space
        hm = np.arange(2 ** self.M, dtype=np.uint32)
        self.h_masks = hm
        self.h_pc = np.bitwise_count(hm).astype(np.uint8)
        rng = np.random.Generator(np.random.Philox(key=(0xC0FFEE, 0)))
        # keys small enough that any subset sum stays below 2**64
        self._cycle_keys = rng.integers(1, 2 ** 48, size=len(self.cycles),
                                        dtype=np.uint64)
        hh = np.zeros(hm.shape, dtype=np.uint64)
        for i, rec in enumerate(self.cycles):
            cm = np.uint32(rec.copy_bits)
            hh += self._cycle_keys[i] * ((hm & cm) == cm)
        self.h_hash = hh

        # usual-edge space
        gm = np.arange(2 ** self.E, dtype=np.uint32)
        self.g_masks = gm
        self.g_pc = np.bitwise_count(gm).astype(np.uint8)
        dense_count = np.zeros(gm.shape, dtype=np.int32)
        s_all = np.zeros(gm.shape, dtype=np.int32)
        gh = np.zeros(gm.shape, dtype=np.uint64)
        for i, rec in enumerate(self.cycles):
            sm = np.uint32(rec.shadow_bits)
            comp = (gm & sm) == sm
            if rec.sparse:
                s_all += comp
            else:
                dense_count += comp
                gh += self._cycle_keys[i] * comp
        self.g_dense_count = dense_count
        self.g_s_all = s_all
        self.g_dense_hash = gh

        self._valid_h_cache: dict[frozenset[int], tuple] = {}
        self._mu_cache: dict[tuple, float] = {}
        self._nu_cache: dict[tuple, float] = {}

    # -- translation ---------------------------------------------------------

    def cycle_ids_of(self, cycles) -> frozenset[int]:
        return frozenset(self.cycle_id[c] for c in cycles)

    def cycles_from_ids(self, ids) -> set[FGraph]:
        return {self.cycles[i].cycle for i in ids}

    def hmask_of(self, h: FGraph) -> int:
        return sum(1 << self.copy_index[(fe.vertices, fe.edge_set)]
                   for fe in h.fedges)

    def h_cycle_ids(self, h: FGraph) -> frozenset[int]:
        m = self.hmask_of(h)
        return frozenset(i for i, rec in enumerate(self.cycles)
                         if m & rec.copy_bits == rec.copy_bits)

    def gstar_cycle_ids(self, g: DGraph) -> frozenset[int]:
        em = sum(1 << self.edge_index[e] for e in g.base.edges)
        dummy_cycles = {frozenset(key) for key in g.dummies}
        out = set()
        for i, rec in enumerate(self.cycles):
            if em & rec.shadow_bits != rec.shadow_bits:
                continue
            if rec.sparse and rec.cycle.fedges not in dummy_cycles:
                continue
            out.add(i)
        return frozenset(out)

    # -- copy-process side ---------------------------------------------------

    def valid_h(self, c1: frozenset[int]) -> tuple[np.ndarray, np.ndarray]:
        """(masks, popcounts) of copy subsets whose cycle set is exactly c1."""
        if c1 in self._valid_h_cache:
            return self._valid_h_cache[c1]
        target = np.uint64(0)
        for i in c1:
            target += self._cycle_keys[i]
        cand = np.flatnonzero(self.h_hash == target).astype(np.uint32)
        keep = np.ones(cand.shape, dtype=bool)
        for i, rec in enumerate(self.cycles):
            cm = np.uint32(rec.copy_bits)
            keep &= ((cand & cm) == cm) == (i in c1)
        masks = cand[keep]
        out = (masks, self.h_pc[masks])
        if len(self._valid_h_cache) > 512:
            self._valid_h_cache.clear()
        self._valid_h_cache[c1] = out
        return out

    def mu(self, c1: frozenset[int], pi: float) -> float:
        """Probability that the copy process has cycle set exactly c1."""
        key = (c1, pi)
        if key not in self._mu_cache:
            if pi >= 1.0 or pi <= 0.0:
                full = frozenset(range(len(self.cycles)))
                self._mu_cache[key] = float(
                    (c1 == full) if pi >= 1.0 else (not c1))
            else:
                _masks, pc = self.valid_h(c1)
                x = pi / (1.0 - pi)
                w = float(np.sum(x ** pc.astype(np.float64)))
                self._mu_cache[key] = w * (1.0 - pi) ** self.M
        return self._mu_cache[key]

    # -- auxiliary-graph side ------------------------------------------------

    def g_weights(self, p: float) -> np.ndarray:
        """Per-edge-mask weight including the free-dummy marginal factor."""
        if p <= 0.0 or p >= 1.0:
            w = np.zeros(2 ** self.E)
            w[-1 if p >= 1.0 else 0] = 1.0
            return w
        lp, lq = np.log(p), np.log1p(-p)
        pc = self.g_pc.astype(np.float64)
        return np.exp(pc * lp + (self.E - pc) * lq
                      + self.g_s_all.astype(np.float64) * lq)

    def valid_g_dense(self, c1: frozenset[int]) -> np.ndarray:
        """Edge masks whose complete dense cycles are exactly c1's dense part
        and whose complete sparse shadows cover c1's sparse part."""
        dense = [i for i in c1 if not self.cycles[i].sparse]
        target = np.uint64(0)
        for i in dense:
            target += self._cycle_keys[i]
        ok = self.g_dense_hash == target
        for i in dense:
            sm = np.uint32(self.cycles[i].shadow_bits)
            ok &= (self.g_masks & sm) == sm
        ok &= self.g_dense_count == len(dense)
        for i in c1:
            if self.cycles[i].sparse:
                sm = np.uint32(self.cycles[i].shadow_bits)
                ok &= (self.g_masks & sm) == sm
        return ok

    def nu(self, c1: frozenset[int], p: float) -> float:
        """Probability that the auxiliary graph has d-cycle set exactly c1."""
        key = (c1, p)
        if key in self._nu_cache:
            return self._nu_cache[key]
        if p <= 0.0 or p >= 1.0:
            full = frozenset(range(len(self.cycles)))
            val = float((c1 == full) if p >= 1.0 else (not c1))
        else:
            n_sparse = sum(1 for i in c1 if self.cycles[i].sparse)
            ok = self.valid_g_dense(c1)
            # sparse cycles off c1 with complete shadow: dummy forced absent;
            # the g_weights factor (1-p)^{s_all} overcounts the c1 ones
            w = self.g_weights(p)[ok]
            val = float(np.sum(w)) * (p / (1.0 - p)) ** n_sparse
        self._nu_cache[key] = val
        return val

    def sample_g(self, valid: np.ndarray, p: float, c1: frozenset[int],
                 rng: np.random.Generator) -> DGraph:
        """Draw the auxiliary graph from its conditional law: edge mask
        proportional to weight on the valid set, then dummies."""
        w = self.g_weights(p) * valid
        total = w.sum()
        if not total > 0:
            raise InternalInconsistencyError("empty conditional support")
        cdf = np.cumsum(w)
        mask = int(np.searchsorted(cdf, rng.random() * total, side="right"))
        mask = min(mask, 2 ** self.E - 1)
        edges = [self.pairs[i] for i in range(self.E) if mask >> i & 1]
        base = Graph.from_edges(edges, vertices=range(self.n))
        dummies = set()
        for i in self.sparse_ids:
            rec = self.cycles[i]
            if i in c1:
                dummies.add(frozenset(rec.cycle.fedges))
            elif mask & rec.shadow_bits == rec.shadow_bits:
                pass  # complete shadow off c1: dummy must be absent
            elif rng.random() < p:
                dummies.add(frozenset(rec.cycle.fedges))
        return DGraph(base=base, dummies=frozenset(dummies))


_ENGINES: dict[tuple, ExactEngine] = {}


def get_engine(f: Pattern, n: int,
               outcome_cap: int = DEFAULT_OUTCOME_CAP) -> ExactEngine:
    from .graphs import canonical_form
    key = (canonical_form(f.graph), n, outcome_cap)
    if key not in _ENGINES:
        _ENGINES[key] = ExactEngine(f, n, outcome_cap)
    return _ENGINES[key]
