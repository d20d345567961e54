"""Encoders from classic hard problems into CFFA, plus seeded instance generators.

The encoders double as structured workloads. Each source problem has a
small exhaustive solver here so the encoders can be checked end to end.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InstanceError
from .model import ConflictGraph, Instance
from .oracle import SbMwisInstance, independent_set_exists  # noqa: F401  (IS source oracle)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThreePartitionInstance:
    """Split 3q numbers into q triples that each sum to B (with B/4 < s < B/2)."""

    element_sizes: tuple
    bound: int

    def __post_init__(self):
        sizes = tuple(self.element_sizes)
        object.__setattr__(self, "element_sizes", sizes)
        B = self.bound
        if not sizes or len(sizes) % 3:
            raise InstanceError("SCHEMA", "need a positive multiple of 3 elements", "sizes")
        for i, s in enumerate(sizes):
            if not 4 * s > B or not 2 * s < B:
                raise InstanceError("SCHEMA", f"size {s} not strictly between B/4 and B/2",
                                    f"sizes[{i}]")
        if sum(sizes) != len(sizes) // 3 * B:
            raise InstanceError("SCHEMA", f"sizes sum to {sum(sizes)}, expected q*B", "sizes")

    @property
    def q(self) -> int:
        return len(self.element_sizes) // 3


@dataclass(frozen=True)
class Numerical3DMInstance:
    """Pick q disjoint triples (x, y, z), one from each list, each summing to B."""

    sizes_x: tuple
    sizes_y: tuple
    sizes_z: tuple
    bound: int

    def __post_init__(self):
        for name in ("sizes_x", "sizes_y", "sizes_z"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        q = len(self.sizes_x)
        if not q or len(self.sizes_y) != q or len(self.sizes_z) != q:
            raise InstanceError("DIM_MISMATCH", "the three lists must have equal positive length")
        allv = self.sizes_x + self.sizes_y + self.sizes_z
        if any(v <= 0 for v in allv):
            raise InstanceError("SCHEMA", "sizes must be positive integers")
        if sum(allv) != q * self.bound:
            raise InstanceError("SCHEMA", f"sizes sum to {sum(allv)}, expected q*B")

    @property
    def q(self) -> int:
        return len(self.sizes_x)


def from_3partition(src: ThreePartitionInstance) -> Instance:
    """q identical agents valuing job x at B - s(x), eta = 2B, no conflicts.

    A bundle is worth |bundle| * B - s(bundle) >= 2B; the 3q jobs only
    stretch that far when every bundle is a triple summing to B.
    """
    B, sizes = src.bound, src.element_sizes
    row = [B - s for s in sizes]
    return Instance.build([row] * src.q, eta=2 * B)


def from_numerical_3dm(src: Numerical3DMInstance) -> Instance:
    """Jobs are X, Y and Z as three cliques; every agent values a job at its size."""
    q = src.q
    row = list(src.sizes_x + src.sizes_y + src.sizes_z)
    edges = [(base + i, base + j) for base in (0, q, 2 * q)
             for i in range(q) for j in range(i + 1, q)]
    return Instance.build([row] * q, edges, eta=src.bound)


def from_independent_set(g: ConflictGraph, k: int) -> Instance:
    if not 1 <= k <= g.vertex_count:
        raise InstanceError("BUNDLE_CAP_RANGE", f"k = {k} must lie in [1, {g.vertex_count}]", "k")
    return Instance(["a0"], [f"v{i}" for i in range(g.vertex_count)],
                    [[1] * g.vertex_count], g, k, k)


def from_sbmwis(src: SbMwisInstance, strict: bool = True) -> Instance:
    """One agent with u = w, conflict graph G, bundle cap k and eta = rho.

    eta must be >= 1, so rho = 0 is rejected unless ``strict`` is False,
    in which case it is raised to 1 (this changes the answer only when
    every weight is 0).
    """
    rho = src.target
    if rho < 1:
        if strict:
            raise InstanceError("ETA_RANGE", "rho = 0 has no CFFA image (eta must be >= 1)", "rho")
        log.warning("clamping rho = %d to eta = 1", rho)
        rho = 1
    g = src.graph
    return Instance(["a0"], [f"v{i}" for i in range(g.vertex_count)], [list(src.weights)],
                    g, rho, src.size_cap)


# exhaustive source solvers, used to check the encoders

def solve_3partition(src: ThreePartitionInstance):
    """Triples as index tuples, or None."""
    B = src.bound
    rest = list(range(len(src.element_sizes)))
    s = src.element_sizes

    def rec(rest):
        if not rest:
            return []
        first = rest[0]
        for j, k in itertools.combinations(rest[1:], 2):
            if s[first] + s[j] + s[k] == B:
                sub = rec([x for x in rest if x not in (first, j, k)])
                if sub is not None:
                    return [(first, j, k)] + sub
        return None

    return rec(rest)


def solve_numerical_3dm(src: Numerical3DMInstance):
    """Permutations (pi_y, pi_z) with x_i + y_pi_y(i) + z_pi_z(i) = B, or None."""
    q, B = src.q, src.bound
    for py in itertools.permutations(range(q)):
        for pz in itertools.permutations(range(q)):
            if all(src.sizes_x[i] + src.sizes_y[py[i]] + src.sizes_z[pz[i]] == B
                   for i in range(q)):
                return py, pz
    return None


def all_3partition_sources(q: int, max_bound: int):
    """Every 3-Partition instance with q triples and B <= max_bound (sizes sorted)."""
    for B in range(1, max_bound + 1):
        lo, hi = B // 4 + 1, (B - 1) // 2
        if lo > hi:
            continue
        for sizes in itertools.combinations_with_replacement(range(lo, hi + 1), 3 * q):
            if 4 * sizes[0] > B and sum(sizes) == q * B:
                yield ThreePartitionInstance(sizes, B)


def all_numerical_3dm_sources(q: int, max_entry: int):
    """Every Numerical 3DM instance with lists of length q and entries in [1, max_entry]."""
    vals = range(1, max_entry + 1)
    for xs in itertools.product(vals, repeat=q):
        for ys in itertools.product(vals, repeat=q):
            for zs in itertools.product(vals, repeat=q):
                total = sum(xs) + sum(ys) + sum(zs)
                if total % q == 0:
                    yield Numerical3DMInstance(xs, ys, zs, total // q)


# seeded generators

def _rng(seed):
    return np.random.default_rng(seed)


def _utilities(rng, n, m, u_max, uniform):
    if uniform:
        row = rng.integers(0, u_max + 1, m).tolist()
        return [list(row) for _ in range(n)]
    return rng.integers(0, u_max + 1, (n, m)).tolist()


def random_edges(rng, m: int, edge_prob: float) -> list:
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    keep = rng.random(len(pairs)) < edge_prob
    return [p for p, k in zip(pairs, keep.tolist()) if k]


def gen_random(m: int, n: int, edge_prob: float, u_max: int, eta: int, seed: int,
               bundle_cap=None, uniform: bool = False) -> Instance:
    rng = _rng(seed)
    edges = random_edges(rng, m, edge_prob)
    return Instance.build(_utilities(rng, n, m, u_max, uniform), edges, eta, bundle_cap, m=m)


def cluster_edges(clique_sizes) -> tuple:
    parts, edges, start = [], [], 0
    for size in clique_sizes:
        part = list(range(start, start + size))
        parts.append(part)
        edges += list(itertools.combinations(part, 2))
        start += size
    return parts, edges


def gen_cluster(clique_sizes, n: int, u_max: int, eta: int, seed: int, bundle_cap=None,
                uniform: bool = False):
    """Cluster-graph instance and its clique partition."""
    rng = _rng(seed)
    parts, edges = cluster_edges(clique_sizes)
    m = sum(clique_sizes)
    inst = Instance.build(_utilities(rng, n, m, u_max, uniform), edges, eta, bundle_cap, m=m)
    return inst, parts


def gen_near_complete(m: int, t: int, n: int, u_max: int, eta: int, seed: int,
                      bundle_cap=None, uniform: bool = False) -> Instance:
    """K_m with exactly t edges removed."""
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    if not 0 <= t <= len(pairs):
        raise InstanceError("SCHEMA", f"t = {t} must lie in [0, {len(pairs)}]", "t")
    rng = _rng(seed)
    drop = set(rng.choice(len(pairs), size=t, replace=False).tolist()) if t else set()
    edges = [p for k, p in enumerate(pairs) if k not in drop]
    return Instance.build(_utilities(rng, n, m, u_max, uniform), edges, eta, bundle_cap, m=m)


def gen_regular_m_minus_2(m: int, n: int, u_max: int, eta: int, seed: int,
                          bundle_cap=None, uniform: bool = True) -> Instance:
    """Every job conflicts with all but one partner (random perfect matching)."""
    if m < 2 or m % 2:
        raise InstanceError("SCHEMA", f"m = {m} must be even and >= 2", "m")
    rng = _rng(seed)
    perm = rng.permutation(m).tolist()
    partner = {}
    for i in range(0, m, 2):
        a, b = perm[i], perm[i + 1]
        partner[a], partner[b] = b, a
    edges = [(i, j) for i in range(m) for j in range(i + 1, m) if partner[i] != j]
    return Instance.build(_utilities(rng, n, m, u_max, uniform), edges, eta, bundle_cap, m=m)


def gen_bipartite_graph(nv: int, edge_prob: float, seed: int) -> ConflictGraph:
    rng = _rng(seed)
    side = rng.integers(0, 2, nv).tolist()
    pairs = [(i, j) for i in range(nv) for j in range(i + 1, nv) if side[i] != side[j]]
    keep = rng.random(len(pairs)) < edge_prob
    return ConflictGraph.from_edges(nv, [p for p, k in zip(pairs, keep.tolist()) if k])


def gen_degenerate_graph(nv: int, d: int, seed: int) -> ConflictGraph:
    """Each vertex links to at most d earlier vertices, so the graph is d-degenerate."""
    rng = _rng(seed)
    edges = []
    for v in range(1, nv):
        deg = int(rng.integers(0, min(d, v) + 1))
        for u in rng.choice(v, size=deg, replace=False).tolist():
            edges.append((u, v))
    return ConflictGraph.from_edges(nv, edges)


def gen_cluster_graph(nv: int, seed: int):
    """Random cluster graph on nv vertices and its partition."""
    rng = _rng(seed)
    sizes = []
    left = nv
    while left:
        size = int(rng.integers(1, left + 1))
        sizes.append(size)
        left -= size
    perm = rng.permutation(nv).tolist()
    parts, edges = cluster_edges(sizes)
    parts = [sorted(perm[v] for v in p) for p in parts]
    edges = [(perm[a], perm[b]) for a, b in edges]
    return ConflictGraph.from_edges(nv, edges), sorted(parts)


def gen_sbmwis(graph: ConflictGraph, w_max: int, seed: int, k=None, rho=None) -> SbMwisInstance:
    """Random weights; k and rho are drawn when not given."""
    rng = _rng(seed)
    nv = graph.vertex_count
    weights = rng.integers(0, w_max + 1, nv).tolist()
    if k is None:
        k = int(rng.integers(1, max(nv, 1) + 1))
    if rho is None:
        rho = int(rng.integers(0, max(1, math.ceil(sum(weights) * 0.6)) + 1))
    return SbMwisInstance(graph, weights, k, rho)
