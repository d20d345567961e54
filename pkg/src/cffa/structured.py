"""Polynomial-time solvers for structured conflict graphs, all via bipartite matching.

* complete graph: every bundle is a single job, so it is agent/job matching.
* two cliques, uniform utilities: bundles are a high-utility singleton
  or a cross-clique pair of low-utility jobs.
* every degree m-2, uniform utilities: the complement is a perfect
  matching, so the only pairs are its edges and they never overlap.

In both uniform cases a high-utility job sitting in a pair can be split
off as its own bundle without hurting anyone, so it is enough to serve
as many agents as possible with high singletons first and low pairs
after.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import RoutingError
from .model import Instance, SolveReport, Stopwatch, finish
from .sbmwis import cluster_partition


@dataclass(frozen=True)
class BipartiteGraphView:
    left: tuple
    right: tuple
    edges: tuple  # (left index, right index)

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edge in bipartite graph")
        for a, b in edges:
            if not (0 <= a < len(self.left) and 0 <= b < len(self.right)):
                raise ValueError(f"edge ({a}, {b}) out of range")
        object.__setattr__(self, "edges", edges)


def max_bipartite_matching(g: BipartiteGraphView) -> list:
    """Maximum-cardinality matching as a sorted list of (left, right) pairs."""
    nl, nr = len(g.left), len(g.right)
    if not g.edges or not nl or not nr:
        return []
    rows, cols = zip(*sorted(g.edges))
    adj = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(nl, nr))
    match = maximum_bipartite_matching(adj, perm_type="column")
    return [(a, int(b)) for a, b in enumerate(match.tolist()) if b >= 0]


def match_agents_to_items(inst: Instance, agents, items, value) -> dict:
    """Match ``agents`` to disjoint ``items`` with value(agent, item) >= eta.

    Returns agent -> item for a matching saturating ``agents``, or None.
    """
    agents, items = list(agents), list(items)
    if len(agents) > len(items):
        return None
    edges = [(i, k) for i, a in enumerate(agents) for k, x in enumerate(items)
             if value(a, x) >= inst.eta]
    pairs = max_bipartite_matching(BipartiteGraphView(agents, items, edges))
    if len(pairs) < len(agents):
        return None
    return {agents[i]: items[k] for i, k in pairs}


def solve_complete_graph(inst: Instance) -> SolveReport:
    clock = Stopwatch()
    m = inst.m
    if len(inst.conflict.edges) != m * (m - 1) // 2:
        raise RoutingError("conflict graph is not complete")
    util = inst.utilities
    got = match_agents_to_items(inst, range(inst.n), range(m), lambda a, j: util[a][j])
    if got is None:
        return finish(inst, "complete", None, clock)
    return finish(inst, "complete", [1 << got[a] for a in range(inst.n)], clock)


def _require_uniform(inst: Instance):
    if not inst.is_uniform():
        raise RoutingError("utilities are not uniform across agents")


def _assemble(inst: Instance, singles: list, doubles: list, algorithm: str, clock, **counters):
    """Serve agents with high singletons first, then pairs; None masks if short."""
    n = inst.n
    if len(singles) + len(doubles) < n:
        return finish(inst, algorithm, None, clock, **counters)
    masks = [1 << j for j in singles[:n]]
    for a, b in doubles[: n - len(masks)]:
        masks.append(1 << a | 1 << b)
    return finish(inst, algorithm, masks, clock, **counters)


def solve_cluster_two_cliques_uniform(inst: Instance) -> SolveReport:
    clock = Stopwatch()
    parts = cluster_partition(inst.conflict)
    if parts is None or len(parts) != 2:
        raise RoutingError("conflict graph is not a cluster graph with exactly two cliques")
    _require_uniform(inst)
    if inst.n == 0:
        return finish(inst, "cluster2u", [], clock)
    u = inst.utilities[0]
    high = [j for j in range(inst.m) if u[j] >= inst.eta]
    pairs = []
    if len(high) < inst.n and inst.bundle_cap != 1:
        left = [j for j in parts[0] if u[j] < inst.eta]
        right = [j for j in parts[1] if u[j] < inst.eta]
        edges = [(i, k) for i, a in enumerate(left) for k, b in enumerate(right)
                 if u[a] + u[b] >= inst.eta]
        matched = max_bipartite_matching(BipartiteGraphView(left, right, edges))
        pairs = sorted(tuple(sorted((left[i], right[k]))) for i, k in matched)
    return _assemble(inst, high, pairs, "cluster2u", clock, high_singletons=len(high),
                     pairs=len(pairs))


def solve_near_complete_uniform(inst: Instance) -> SolveReport:
    clock = Stopwatch()
    m, g = inst.m, inst.conflict
    if m < 2 or any(g.degree(v) != m - 2 for v in range(m)):
        raise RoutingError("not every vertex has degree m-2")
    _require_uniform(inst)
    if inst.n == 0:
        return finish(inst, "nearcomplete_u", [], clock)
    u = inst.utilities[0]
    high = [j for j in range(m) if u[j] >= inst.eta]
    pairs = []
    if len(high) < inst.n and inst.bundle_cap != 1:
        full = (1 << m) - 1
        for a in range(m):
            b = (full ^ g.adjacency[a] ^ 1 << a).bit_length() - 1  # the one non-neighbour
            if a < b and u[a] < inst.eta and u[b] < inst.eta and u[a] + u[b] >= inst.eta:
                pairs.append((a, b))
    return _assemble(inst, high, pairs, "nearcomplete_u", clock, high_singletons=len(high),
                     pairs=len(pairs))
