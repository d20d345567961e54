"""Instance, certificate and report types, plus the feasibility verifier.

Jobs and agents are addressed by dense 0-based indices internally; the
string identifiers only matter at the boundary (certificates, JSON).
A set of jobs is frequently carried as an ``int`` bitmask with job ``j``
at bit ``j``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InstanceError, MalformedCertificateError


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class ConflictGraph:
    """Undirected simple graph on ``vertex_count`` jobs.

    Edges are stored canonically as ``(i, j)`` with ``i < j``.
    """

    vertex_count: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.vertex_count < 0:
            raise InstanceError("SCHEMA", "vertex count must be non-negative", "jobs")
        canon = set()
        for k, e in enumerate(self.edges):
            u, v = e
            if u == v:
                raise InstanceError("SELF_LOOP", f"self-loop on job {u}", f"edges[{k}]")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise InstanceError("EDGE_RANGE", f"edge {e} out of range", f"edges[{k}]")
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[Sequence[int]]) -> "ConflictGraph":
        return cls(m, frozenset((int(u), int(v)) for u, v in edges))

    @classmethod
    def complete(cls, m: int) -> "ConflictGraph":
        return cls(m, frozenset((i, j) for i in range(m) for j in range(i + 1, m)))

    @classmethod
    def edgeless(cls, m: int) -> "ConflictGraph":
        return cls(m)

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbourhood bitmask of every vertex."""
        adj = [0] * self.vertex_count
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return bits(self.adjacency[v])

    def is_independent_mask(self, mask: int) -> bool:
        rest = mask
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            if self.adjacency[v] & mask:
                return False
            rest ^= low
        return True

    def complement(self) -> "ConflictGraph":
        m = self.vertex_count
        return ConflictGraph(m, frozenset(
            (i, j) for i in range(m) for j in range(i + 1, m) if (i, j) not in self.edges))

    def induced(self, vertices: Sequence[int]) -> "ConflictGraph":
        """Induced subgraph, relabelled so ``vertices[k]`` becomes ``k``."""
        pos = {v: k for k, v in enumerate(vertices)}
        sub = set()
        for u, v in self.edges:
            if u in pos and v in pos:
                a, b = pos[u], pos[v]
                sub.add((min(a, b), max(a, b)))
        return ConflictGraph(len(vertices), frozenset(sub))

    def missing_edge_count(self) -> int:
        """The distance ``t`` from the complete graph on the same vertices."""
        m = self.vertex_count
        return m * (m - 1) // 2 - len(self.edges)


def is_independent(g: ConflictGraph, jobs: Iterable[int]) -> bool:
    """True iff no edge of ``g`` has both endpoints in ``jobs``."""
    mask = 0
    for j in jobs:
        if not 0 <= j < g.vertex_count:
            raise IndexError(f"job index {j} out of range [0, {g.vertex_count})")
        mask |= 1 << j
    return g.is_independent_mask(mask)


@dataclass(frozen=True)
class Instance:
    """A CFFA instance; ``bundle_cap`` set means the size-bounded variant."""

    agents: tuple
    jobs: tuple
    utilities: tuple
    conflict: ConflictGraph
    eta: int
    bundle_cap: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "utilities", tuple(tuple(r) for r in self.utilities))
        n, m = len(self.agents), len(self.jobs)
        for name, ids in (("agents", self.agents), ("jobs", self.jobs)):
            seen = set()
            for k, ident in enumerate(ids):
                if ident in seen:
                    raise InstanceError("DUPLICATE_ID", f"duplicate identifier {ident!r}",
                                        f"{name}[{k}]")
                seen.add(ident)
        if len(self.utilities) != n:
            raise InstanceError("DIM_MISMATCH",
                                f"{len(self.utilities)} utility rows for {n} agents", "utilities")
        for i, row in enumerate(self.utilities):
            if len(row) != m:
                raise InstanceError("DIM_MISMATCH", f"row has {len(row)} entries for {m} jobs",
                                    f"utilities[{i}]")
            for j, u in enumerate(row):
                if isinstance(u, bool) or not isinstance(u, int) or u < 0:
                    raise InstanceError("UTILITY_RANGE",
                                        f"utility must be a non-negative integer, got {u!r}",
                                        f"utilities[{i}][{j}]")
        if self.conflict.vertex_count != m:
            raise InstanceError("DIM_MISMATCH",
                                f"conflict graph has {self.conflict.vertex_count} vertices "
                                f"for {m} jobs", "edges")
        if isinstance(self.eta, bool) or not isinstance(self.eta, int) or self.eta < 1:
            raise InstanceError("ETA_RANGE", f"eta must be an integer >= 1, got {self.eta!r}",
                                "eta")
        s = self.bundle_cap
        if s is not None and (isinstance(s, bool) or not isinstance(s, int) or not 1 <= s <= m):
            raise InstanceError("BUNDLE_CAP_RANGE", f"bundle_cap must lie in [1, {m}], got {s!r}",
                                "bundle_cap")

    @classmethod
    def build(cls, utilities, edges=(), eta=1, bundle_cap=None, agents=None, jobs=None,
              m=None) -> "Instance":
        """Convenience constructor with generated identifiers ``a0.., x0..``."""
        utilities = [list(r) for r in utilities]
        if m is None:
            m = len(utilities[0]) if utilities else len(jobs or ())
        if agents is None:
            agents = [f"a{i}" for i in range(len(utilities))]
        if jobs is None:
            jobs = [f"x{j}" for j in range(m)]
        return cls(agents, jobs, utilities, ConflictGraph.from_edges(m, edges), eta, bundle_cap)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.jobs)

    @cached_property
    def agent_index(self) -> dict:
        return {a: i for i, a in enumerate(self.agents)}

    @cached_property
    def job_index(self) -> dict:
        return {x: j for j, x in enumerate(self.jobs)}

    def is_uniform(self) -> bool:
        """All agents share one utility row."""
        return all(row == self.utilities[0] for row in self.utilities)

    def utility_of_mask(self, agent: int, mask: int) -> int:
        row = self.utilities[agent]
        return sum(row[j] for j in bits(mask))

    def replace(self, **changes) -> "Instance":
        fields = dict(agents=self.agents, jobs=self.jobs, utilities=self.utilities,
                      conflict=self.conflict, eta=self.eta, bundle_cap=self.bundle_cap)
        fields.update(changes)
        return Instance(**fields)


@dataclass(frozen=True)
class Allocation:
    """Agent identifier -> frozenset of job identifiers."""

    bundles: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "bundles",
                           {a: frozenset(js) for a, js in dict(self.bundles).items()})

    @classmethod
    def from_masks(cls, inst: Instance, masks: Sequence[int]) -> "Allocation":
        """Build from one job bitmask per agent, in agent order."""
        return cls({inst.agents[i]: frozenset(inst.jobs[j] for j in bits(mk))
                    for i, mk in enumerate(masks)})

    def index_masks(self, inst: Instance) -> dict:
        """Agent index -> job bitmask; raises on unknown identifiers."""
        out = {}
        for a, js in self.bundles.items():
            if a not in inst.agent_index:
                raise MalformedCertificateError(f"unknown agent {a!r}")
            mask = 0
            for x in js:
                if x not in inst.job_index:
                    raise MalformedCertificateError(f"unknown job {x!r} in bundle of {a!r}")
                mask |= 1 << inst.job_index[x]
            out[inst.agent_index[a]] = mask
        return out

    def to_json(self, inst: Optional[Instance] = None) -> dict:
        """Bundles as sorted job lists; sorted by instance order when given."""
        if inst is None:
            return {a: sorted(js) for a, js in sorted(self.bundles.items())}
        order = inst.job_index
        return {a: sorted(self.bundles.get(a, ()), key=order.__getitem__)
                for a in inst.agents if a in self.bundles}


def bundle_utility(inst: Instance, agent, jobs: Iterable) -> int:
    """Sum of ``agent``'s utilities over ``jobs`` (identifiers or indices)."""
    a = agent if isinstance(agent, int) else inst.agent_index.get(agent)
    if a is None or not 0 <= a < inst.n:
        raise MalformedCertificateError(f"unknown agent {agent!r}")
    row = inst.utilities[a]
    total = 0
    for x in jobs:
        j = x if isinstance(x, int) else inst.job_index.get(x)
        if j is None or not 0 <= j < inst.m:
            raise MalformedCertificateError(f"unknown job {x!r}")
        total += row[j]
    return total


def verify_allocation(inst: Instance, alloc: Allocation) -> bool:
    """Check disjointness, independence, utility >= eta and the bundle cap.

    Agents missing from ``alloc`` hold the empty bundle, which never
    reaches ``eta >= 1``. Unknown identifiers raise
    :class:`MalformedCertificateError` rather than returning False.
    """
    masks = alloc.index_masks(inst)
    used = 0
    for a in range(inst.n):
        mask = masks.get(a, 0)
        if mask & used:
            return False
        used |= mask
        if not inst.conflict.is_independent_mask(mask):
            return False
        if inst.bundle_cap is not None and mask.bit_count() > inst.bundle_cap:
            return False
        if inst.utility_of_mask(a, mask) < inst.eta:
            return False
    return True


@dataclass
class SolveReport:
    verdict: bool
    certificate: Optional[Allocation]
    algorithm: str
    counters: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def to_json(self, inst: Optional[Instance] = None) -> dict:
        return {
            "feasible": self.verdict,
            "assignment": self.certificate.to_json(inst) if self.certificate else None,
            "algorithm": self.algorithm,
            "counters": dict(sorted(self.counters.items())),
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


class Stopwatch:
    def __init__(self):
        self.start = time.perf_counter()

    def ms(self) -> float:
        return (time.perf_counter() - self.start) * 1000.0


def finish(inst: Instance, algorithm: str, masks: Optional[Sequence[int]], clock: Stopwatch,
           **counters) -> SolveReport:
    """Wrap a solver outcome (``masks`` is None for a no-verdict) into a report."""
    cert = None if masks is None else Allocation.from_masks(inst, masks)
    return SolveReport(masks is not None, cert, algorithm, dict(counters), clock.ms())
