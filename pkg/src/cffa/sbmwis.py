"""Size-bounded maximum-weight independent set (Sb-MWIS) solvers.

* :func:`solve_ifc_branching` for hereditary classes where every n-vertex
  graph has an independent set of size f(n) (bipartite, planar,
  d-degenerate, ...), running in O(f^{-1}(k)^k) branching nodes.
* :func:`solve_sbmwis_cluster` for disjoint unions of cliques, greedy.
* :func:`detect_class` to decide which of these applies.

Solvers return ``(found, witness)`` where the witness is a frozenset of
vertex indices, or ``None`` when ``found`` is False.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import ClassViolationError, RoutingError
from .model import ConflictGraph, bits
from .oracle import SbMwisInstance, brute_force_sbmwis

SbMwisSolver = Callable[[SbMwisInstance], tuple]


@dataclass(frozen=True)
class IndependenceFriendlyProfile:
    """A hereditary class whose n-vertex members have an independent set of size f(n).

    ``f`` is chosen as the floor of the usual bound so that its least
    inverse is exactly the classical guarantee: 2k for bipartite graphs,
    4k^2 for triangle-free, 4k for planar, k(d+1) for d-degenerate and the
    Ramsey bound C(l+k-2, l-1) for graphs with no K_l.
    """

    class_name: str
    param: int = 0

    @classmethod
    def bipartite(cls):
        return cls("bipartite")

    @classmethod
    def triangle_free(cls):
        return cls("triangle_free")

    @classmethod
    def planar(cls):
        return cls("planar")

    @classmethod
    def degenerate(cls, d: int):
        return cls("degenerate", d)

    @classmethod
    def clique_free(cls, l: int):
        if l < 2:
            raise ValueError("clique_free needs l >= 2")
        return cls("clique_free", l)

    def f(self, n: int) -> int:
        c = self.class_name
        if c == "bipartite":
            return n // 2
        if c == "triangle_free":
            return math.isqrt(n) // 2
        if c == "planar":
            return n // 4
        if c == "degenerate":
            return n // (self.param + 1)
        if c == "clique_free":
            k = 0
            while self.f_inverse_at(k + 1) <= n:
                k += 1
            return k
        raise ValueError(f"unknown class {c!r}")

    def f_inverse_at(self, k: int) -> int:
        """Least n with f(n) >= k."""
        c = self.class_name
        if k <= 0:
            return 0
        if c == "bipartite":
            return 2 * k
        if c == "triangle_free":
            return 4 * k * k
        if c == "planar":
            return 4 * k
        if c == "degenerate":
            return k * (self.param + 1)
        if c == "clique_free":
            return math.comb(self.param + k - 2, self.param - 1)
        raise ValueError(f"unknown class {c!r}")

    def check(self, g: ConflictGraph) -> None:
        """Cheap membership sanity check; raises ClassViolationError."""
        c = self.class_name
        if c == "bipartite" and two_coloring(g) is None:
            raise ClassViolationError("graph has an odd cycle; not bipartite")
        if c == "degenerate" and degeneracy_order(g)[0] > self.param:
            raise ClassViolationError(f"graph is not {self.param}-degenerate")
        if c == "planar" and degeneracy_order(g)[0] > 5:
            raise ClassViolationError("graph has degeneracy > 5; cannot be planar")
        if c == "triangle_free":
            adj = g.adjacency
            if any(adj[u] & adj[v] for u, v in g.edges):
                raise ClassViolationError("graph has a triangle")


def solve_ifc_branching(inst: SbMwisInstance, profile: IndependenceFriendlyProfile,
                        counters: Optional[dict] = None):
    """Branch on heavy vertices until the heavy set is big enough to hold k independent ones.

    A vertex is heavy when its weight reaches ceil(rho / k); a solution has
    at most k vertices and weight >= rho, so it must contain a heavy one.
    If f(#heavy) >= k the heavy vertices alone contain an independent
    k-set, which is found among the first f^{-1}(k) of them. Otherwise
    each heavy vertex is tried as part of the solution.

    ``counters["nodes"]`` receives the number of recursion nodes.
    """
    profile.check(inst.graph)
    g, w = inst.graph, inst.weights
    adj = g.adjacency
    nodes = 0

    def independent_k_subset(cands, k):
        for combo in itertools.combinations(cands, k):
            mask = 0
            for v in combo:
                if adj[v] & mask:
                    break
                mask |= 1 << v
            else:
                return list(combo)
        return None

    def rec(alive, k, rho):
        nonlocal nodes
        nodes += 1
        if rho <= 0:
            return []
        if k == 0:
            return None
        threshold = -(-rho // k)
        heavy = [v for v in bits(alive) if w[v] >= threshold]
        if not heavy:
            return None
        if profile.f(len(heavy)) >= k:
            found = independent_k_subset(heavy[: profile.f_inverse_at(k)], k)
            if found is not None:
                return found
            # only reachable on a graph outside the declared class
        for v in heavy:
            sub = rec(alive & ~adj[v] & ~(1 << v), k - 1, rho - w[v])
            if sub is not None:
                return [v] + sub
        return None

    result = rec((1 << g.vertex_count) - 1, inst.size_cap, inst.target)
    if counters is not None:
        counters["nodes"] = counters.get("nodes", 0) + nodes
    if result is None:
        return False, None
    return True, frozenset(result)


def cluster_partition(g: ConflictGraph) -> Optional[list]:
    """Connected components if each is a clique, else None."""
    adj = g.adjacency
    seen = 0
    parts = []
    for v in range(g.vertex_count):
        if seen >> v & 1:
            continue
        comp = adj[v] | 1 << v
        for u in bits(comp):
            if adj[u] | 1 << u != comp:
                return None
        seen |= comp
        parts.append(bits(comp))
    return parts


def solve_sbmwis_cluster(inst: SbMwisInstance, cliques):
    """Heaviest vertex of every clique, then the k heaviest of those."""
    g, w = inst.graph, inst.weights
    owner = {}
    for p, part in enumerate(cliques):
        for v in part:
            if v in owner or not 0 <= v < g.vertex_count:
                raise RoutingError(f"vertex {v} repeated or out of range in clique partition")
            owner[v] = p
    if len(owner) != g.vertex_count:
        raise RoutingError("clique partition does not cover every vertex")
    if any(owner[u] != owner[v] for u, v in g.edges) or \
            len(g.edges) != sum(len(p) * (len(p) - 1) // 2 for p in cliques):
        raise RoutingError("edge set is not the union of the given cliques")
    tops = []
    for part in cliques:
        if part:
            tops.append(min(part, key=lambda v: (-w[v], v)))
    tops.sort(key=lambda v: (-w[v], v))
    chosen = tops[: inst.size_cap]
    if sum(w[v] for v in chosen) >= inst.target:
        return True, frozenset(chosen)
    return False, None


def two_coloring(g: ConflictGraph) -> Optional[list]:
    color = [-1] * g.vertex_count
    adj = g.adjacency
    for s in range(g.vertex_count):
        if color[s] >= 0:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for v in bits(adj[u]):
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return None
    return color


def degeneracy_order(g: ConflictGraph, vertices=None) -> tuple:
    """(degeneracy, elimination order) by repeatedly removing a min-degree vertex.

    Ties go to the lowest index. ``vertices`` restricts to an induced subgraph.
    """
    adj = g.adjacency
    alive = (1 << g.vertex_count) - 1 if vertices is None else sum(1 << v for v in vertices)
    order = []
    d = 0
    while alive:
        v = min(bits(alive), key=lambda x: ((adj[x] & alive).bit_count(), x))
        d = max(d, (adj[v] & alive).bit_count())
        order.append(v)
        alive &= ~(1 << v)
    return d, order


@dataclass
class GraphClasses:
    """Structural facts about a conflict graph, each with its witness."""

    edgeless: bool
    complete: bool
    cluster: Optional[list]
    bipartite: Optional[list]
    degeneracy: int
    degeneracy_order: list
    all_degrees_m_minus_2: bool
    tags: set = field(default_factory=set)


def detect_class(g: ConflictGraph) -> GraphClasses:
    m = g.vertex_count
    edgeless = not g.edges
    complete = len(g.edges) == m * (m - 1) // 2
    cluster = cluster_partition(g)
    bip = two_coloring(g)
    d, order = degeneracy_order(g)
    regular = m >= 2 and all(g.degree(v) == m - 2 for v in range(m))
    tags = {f"degenerate:{d}"}
    if edgeless:
        tags.add("edgeless")
    if complete:
        tags.add("complete")
    if cluster is not None:
        tags.add("cluster")
    if bip is not None:
        tags.add("bipartite")
    if regular:
        tags.add("regular_m_minus_2")
    return GraphClasses(edgeless, complete, cluster, bip, d, order, regular, tags)


def sbmwis_router(g: ConflictGraph, max_branching_degeneracy: int = 3) -> SbMwisSolver:
    """Pick an Sb-MWIS solver valid for ``g`` and every induced subgraph of it."""
    info = detect_class(g)
    if info.cluster is not None:
        return lambda inst: solve_sbmwis_cluster(inst, cluster_partition(inst.graph))
    if info.bipartite is not None:
        prof = IndependenceFriendlyProfile.bipartite()
        return lambda inst: solve_ifc_branching(inst, prof)
    if info.degeneracy <= max_branching_degeneracy:
        prof = IndependenceFriendlyProfile.degenerate(info.degeneracy)
        return lambda inst: solve_ifc_branching(inst, prof)
    return brute_force_sbmwis
