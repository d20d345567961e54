"""Solvers for conflict graphs that are complete up to t missing edges.

Every independent set of size >= 2 is a clique of the complement, and the
complement has only t edges. On its non-isolated vertices (at most 2t)
it is ceil(2 sqrt t)-degenerate, so it has at most 2t * 2^(2 ceil(sqrt t))
nontrivial cliques, and they can be listed by looking only forward in a
degeneracy order.

Two exact solvers build on this:

* :func:`solve_guess_per_agent` guesses, for every agent, either one of
  those sets or "at most a singleton" and finishes with a matching.
* :func:`solve_partition_contract` guesses how the non-isolated vertices
  group into multi-job bundles, contracts each group into one job and
  solves the resulting complete-graph instance by matching.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import CapacityError
from .model import ConflictGraph, Instance, SolveReport, Stopwatch, bits, finish
from .sbmwis import degeneracy_order
from .structured import match_agents_to_items, solve_complete_graph

ENUMERATION_T_CAP = 24
PARTITION_T_CAP = 10
GUESS_BUDGET = 10 ** 8


def ceil_sqrt(t: int) -> int:
    r = math.isqrt(t)
    return r if r * r == t else r + 1


def nontrivial_bound(t: int) -> int:
    """Ceiling-adjusted cap on the number of independent sets of size >= 2."""
    return 2 * t * 2 ** (2 * ceil_sqrt(t))


def degeneracy_bound(t: int) -> int:
    return ceil_sqrt(4 * t)  # ceil(2 sqrt t)


@dataclass(frozen=True)
class ComplementView:
    graph: ConflictGraph

    @cached_property
    def complement(self) -> ConflictGraph:
        return self.graph.complement()

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @cached_property
    def complement_edges(self) -> list:
        return sorted(self.complement.edges)

    @property
    def t(self) -> int:
        return self.graph.missing_edge_count()

    @cached_property
    def non_isolated(self) -> list:
        return sorted({v for e in self.complement_edges for v in e})

    @cached_property
    def _order(self) -> tuple:
        return degeneracy_order(self.complement, self.non_isolated)

    @property
    def degeneracy(self) -> int:
        return self._order[0]

    @property
    def degeneracy_order(self) -> list:
        return self._order[1]

    def forward_neighbors(self) -> dict:
        pos = {v: i for i, v in enumerate(self.degeneracy_order)}
        adj = self.complement.adjacency
        return {v: [u for u in bits(adj[v]) if pos[u] > pos[v]] for v in self.degeneracy_order}


def enumerate_nontrivial_independent_sets(g: ConflictGraph, t_cap: int = ENUMERATION_T_CAP):
    """All independent sets of size >= 2, sorted by (size, members)."""
    view = ComplementView(g)
    if view.t > t_cap:
        raise CapacityError(f"t = {view.t} missing edges exceeds the cap of {t_cap}")
    cadj = view.complement.adjacency
    out = []

    def extend(base, cands):
        # base is a complement clique; cands are forward vertices adjacent to all of base
        for i, u in enumerate(cands):
            grown = base | 1 << u
            out.append(grown)
            extend(grown, [w for w in cands[i + 1:] if cadj[u] >> w & 1])

    for v, fwd in view.forward_neighbors().items():
        extend(1 << v, fwd)
    sets = [tuple(bits(mk)) for mk in out]
    sets.sort(key=lambda s: (len(s), s))
    return [frozenset(s) for s in sets]


def _guess_budget_check(count: int, n: int, budget: int):
    if (count + 1) ** n > budget:
        raise CapacityError(
            f"({count}+1)^{n} guess vectors exceed budget {budget}; try partition_t instead")


def solve_guess_per_agent(inst: Instance, budget: int = GUESS_BUDGET) -> SolveReport:
    clock = Stopwatch()
    g = inst.conflict
    if g.missing_edge_count() == 0:
        rep = solve_complete_graph(inst)
        return finish(inst, "guess_tn", _masks(inst, rep), clock, guesses=1, sets=0)
    sets = enumerate_nontrivial_independent_sets(g)
    _guess_budget_check(len(sets), inst.n, budget)
    cap = inst.bundle_cap
    set_masks = [sum(1 << j for j in sorted(s)) for s in sets
                 if cap is None or len(s) <= cap]
    n = inst.n
    options = [[mk for mk in set_masks if inst.utility_of_mask(a, mk) >= inst.eta]
               for a in range(n)]
    util = inst.utilities
    choice = [0] * n
    guesses = 0

    def rec(a, used):
        nonlocal guesses
        if a == n:
            guesses += 1
            rest = [i for i in range(n) if not choice[i]]
            free = [j for j in range(inst.m) if not used >> j & 1]
            got = match_agents_to_items(inst, rest, free, lambda i, j: util[i][j])
            if got is None:
                return False
            for i in rest:
                choice[i] = 1 << got[i]
            return True
        choice[a] = 0  # the "singleton or nothing larger" choice
        if rec(a + 1, used):
            return True
        for mk in options[a]:
            if mk & used:
                continue
            choice[a] = mk
            if rec(a + 1, used | mk):
                return True
        choice[a] = 0
        return False

    found = rec(0, 0)
    return finish(inst, "guess_tn", list(choice) if found else None, clock,
                  guesses=guesses, sets=len(sets))


def _masks(inst: Instance, rep: SolveReport):
    if not rep.verdict:
        return None
    masks = rep.certificate.index_masks(inst)
    return [masks[a] for a in range(inst.n)]


def canonical_labelings(vertices, adjacency, max_classes: int, max_size=None):
    """Groupings of ``vertices`` into independent classes of size >= 2.

    Each vertex is left out, joins an existing class, or opens a new one;
    classes are opened in vertex order, so each grouping is produced once.
    Yields lists of class bitmasks.
    """
    classes = []
    limit = max_size if max_size is not None else len(vertices)

    def rec(i):
        if i == len(vertices):
            if all(c.bit_count() >= 2 for c in classes):
                yield list(classes)
            return
        # classes that cannot reach size 2 anymore are dead
        left = len(vertices) - i
        if sum(1 for c in classes if c.bit_count() < 2) > left:
            return
        v = vertices[i]
        yield from rec(i + 1)
        for k, c in enumerate(classes):
            if not adjacency[v] & c and c.bit_count() < limit:
                classes[k] = c | 1 << v
                yield from rec(i + 1)
                classes[k] = c
        if len(classes) < max_classes and limit >= 2:
            classes.append(1 << v)
            yield from rec(i + 1)
            classes.pop()

    yield from rec(0)


def solve_partition_contract(inst: Instance, t_cap: int = PARTITION_T_CAP) -> SolveReport:
    clock = Stopwatch()
    g = inst.conflict
    t = g.missing_edge_count()
    if t > t_cap:
        raise CapacityError(f"t = {t} missing edges exceeds the cap of {t_cap}")
    if t == 0:
        rep = solve_complete_graph(inst)
        return finish(inst, "partition_t", _masks(inst, rep), clock, labelings=1)
    view = ComplementView(g)
    labelings = 0
    # at most n classes can be used, and an unused class may as well be split up
    for classes in canonical_labelings(view.non_isolated, g.adjacency, min(t, inst.n),
                                       inst.bundle_cap):
        labelings += 1
        grouped = 0
        for c in classes:
            grouped |= c
        items = list(classes) + [1 << j for j in range(inst.m) if not grouped >> j & 1]
        got = match_agents_to_items(inst, range(inst.n), items, inst.utility_of_mask)
        if got is not None:
            return finish(inst, "partition_t", [got[a] for a in range(inst.n)], clock,
                          labelings=labelings)
    return finish(inst, "partition_t", None, clock, labelings=labelings)
