"""Exhaustive ground-truth solvers.

Nothing here is meant to be fast; these exist so every other solver has
something trustworthy to be compared against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .errors import CapacityError, InstanceError
from .model import ConflictGraph, Instance, SolveReport, Stopwatch, bits, finish, mask_of


@dataclass(frozen=True)
class SbMwisInstance:
    """Independent set of size <= ``size_cap`` and weight >= ``target``?"""

    graph: ConflictGraph
    weights: tuple
    size_cap: int
    target: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        nv = self.graph.vertex_count
        if len(self.weights) != nv:
            raise InstanceError("DIM_MISMATCH", f"{len(self.weights)} weights for {nv} vertices",
                                "weights")
        if any(w < 0 for w in self.weights):
            raise InstanceError("UTILITY_RANGE", "weights must be non-negative", "weights")
        if not 1 <= self.size_cap <= max(nv, 1):
            raise InstanceError("BUNDLE_CAP_RANGE", f"size cap {self.size_cap} not in [1, {nv}]",
                                "k")
        if self.target < 0:
            raise InstanceError("ETA_RANGE", "target must be non-negative", "rho")

    def weight(self, vertices) -> int:
        return sum(self.weights[v] for v in vertices)


def brute_force_cffa(inst: Instance) -> SolveReport:
    """Try every map job -> (agent or unassigned) in lexicographic order.

    Subtrees whose partial assignment already puts a conflict edge inside
    a bundle, overflows a bundle cap, or leaves some agent unable to reach
    ``eta`` are skipped; they contain no feasible leaf, so the first
    feasible assignment found is the lexicographically first overall.
    """
    clock = Stopwatch()
    n, m = inst.n, inst.m
    adj = inst.conflict.adjacency
    util = inst.utilities
    cap = inst.bundle_cap if inst.bundle_cap is not None else m
    eta = inst.eta
    # suffix[a][j] = utility agent a could still collect from jobs j..m-1
    suffix = [[0] * (m + 1) for _ in range(n)]
    for a in range(n):
        for j in range(m - 1, -1, -1):
            suffix[a][j] = suffix[a][j + 1] + util[a][j]

    masks = [0] * n
    got = [0] * n
    leaves = 0

    def rec(j):
        nonlocal leaves
        for a in range(n):
            if got[a] + suffix[a][j] < eta:
                return False
        if j == m:
            leaves += 1
            return True
        for a in range(n + 1):
            if a == n:
                if rec(j + 1):
                    return True
                continue
            if adj[j] & masks[a] or masks[a].bit_count() >= cap:
                continue
            masks[a] |= 1 << j
            got[a] += util[a][j]
            if rec(j + 1):
                return True
            masks[a] ^= 1 << j
            got[a] -= util[a][j]
        return False

    found = rec(0)
    return finish(inst, "brute", list(masks) if found else None, clock, leaves=leaves)


def brute_force_sbmwis(inst: SbMwisInstance) -> tuple[bool, Optional[frozenset]]:
    """Scan independent sets of size <= k; the witness has maximum weight.

    Ties go to the lexicographically smallest sorted vertex tuple, so the
    empty set wins only when nothing has positive weight.
    """
    g, w, k = inst.graph, inst.weights, inst.size_cap
    adj = g.adjacency
    nv = g.vertex_count
    best_key = (0, ())  # (-weight, vertices)
    best = ()

    def rec(start, chosen, forbidden, weight):
        nonlocal best_key, best
        key = (-weight, tuple(chosen))
        if key < best_key:
            best_key, best = key, tuple(chosen)
        if len(chosen) == k:
            return
        for v in range(start, nv):
            if forbidden >> v & 1:
                continue
            chosen.append(v)
            rec(v + 1, chosen, forbidden | adj[v], weight + w[v])
            chosen.pop()

    rec(0, [], 0, 0)
    if -best_key[0] >= inst.target:
        return True, frozenset(best)
    return False, None


@njit(cache=True)
def _feasible_masks(adj, util, eta, cap):
    m = adj.size
    out = np.zeros(1 << m, dtype=np.bool_)
    for mask in range(1, 1 << m):
        size = 0
        total = 0
        ok = True
        for j in range(m):
            if mask >> j & 1:
                size += 1
                total += util[j]
                if adj[j] & mask:
                    ok = False
                    break
        out[mask] = ok and size <= cap and total >= eta
    return out


@njit(cache=True)
def _dp_round(feas, prev, cur, pred):
    # Full walk over every submask (3^m pairs in total), keeping the first hit.
    for full in range(prev.size):
        found = False
        sub = full
        while sub:
            if feas[sub] and prev[full ^ sub]:
                if not found:
                    found = True
                    pred[full] = sub
            sub = (sub - 1) & full
        cur[full] = found


def subset_dp_cffa(inst: Instance) -> SolveReport:
    """The simple 3^m dynamic program over (agent prefix, job mask).

    ``D[i][M]`` says agents ``0..i-1`` can be served from jobs inside ``M``;
    agent ``i`` takes a feasible submask ``S`` of ``M`` and the rest comes
    from ``D[i-1][M \\ S]``.
    """
    clock = Stopwatch()
    n, m = inst.n, inst.m
    if m > 62:
        raise CapacityError(f"subset DP needs m <= 62 for bitmasks, got {m}")
    if m > 28:
        raise CapacityError(f"subset DP table of 2^{m} cells is too large")
    if n == 0:
        return finish(inst, "subsetdp", [], clock, cells=0)
    if n > m:
        return finish(inst, "subsetdp", None, clock, cells=0)
    adj = np.array(inst.conflict.adjacency, dtype=np.int64)
    cap = inst.bundle_cap if inst.bundle_cap is not None else m
    size = 1 << m
    prev = np.ones(size, dtype=np.bool_)
    preds = []
    for a in range(n):
        feas = _feasible_masks(adj, np.array(inst.utilities[a], dtype=np.int64), inst.eta, cap)
        cur = np.zeros(size, dtype=np.bool_)
        pred = np.zeros(size, dtype=np.int64)
        _dp_round(feas, prev, cur, pred)
        preds.append(pred)
        prev = cur
    full = size - 1
    cells = n * size
    if not prev[full]:
        return finish(inst, "subsetdp", None, clock, cells=cells)
    masks = [0] * n
    rest = full
    for a in range(n - 1, -1, -1):
        masks[a] = int(preds[a][rest])
        rest ^= masks[a]
    return finish(inst, "subsetdp", masks, clock, cells=cells)


def independent_set_exists(g: ConflictGraph, k: int) -> bool:
    """Exhaustive check for an independent set of size ``k``."""
    adj = g.adjacency

    def rec(start, forbidden, need):
        if need == 0:
            return True
        for v in range(start, g.vertex_count):
            if not forbidden >> v & 1 and rec(v + 1, forbidden | adj[v] | 1 << v, need - 1):
                return True
        return False

    return rec(0, 0, k)


__all__ = ["SbMwisInstance", "brute_force_cffa", "brute_force_sbmwis", "subset_dp_cffa",
           "independent_set_exists", "bits", "mask_of"]
