"""Color coding for the size-bounded variant, parameterized by n * s.

Jobs get one of n*s colors. An allocation is colorful when all the jobs
it uses have distinct colors. Colorful allocations are found with a DP
over color subsets:

    T[0][S] = agent 0 has a feasible bundle among jobs colored in S
    T[i][S] = OR over S' strictly inside S of T[i-1][S'] and agent i has
              a feasible bundle among jobs colored in S \\ S'

"agent a has a feasible bundle among jobs J" is an Sb-MWIS question on the
conflict graph induced by J, weighted by u_a, with k = s and rho = eta.
Bundles built from disjoint color sets are disjoint, so every yes is
sound. A fixed solution on at most n*s jobs is colorful with probability
at least e^{-ns}, which drives the default number of repetitions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import CapacityError, RoutingError
from .model import Allocation, Instance, SolveReport, Stopwatch, bits, finish
from .oracle import SbMwisInstance
from .sbmwis import sbmwis_router

MAX_COLORS = 20
EXHAUSTIVE_BUDGET = 10 ** 7
DEFAULT_BUDGET = 10 ** 6
FAILURE_EXPONENT = 40  # default repetitions give false-negative probability <= 2^-40


@dataclass(frozen=True)
class Coloring:
    colors: tuple
    palette: int

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if any(not 0 <= c < self.palette for c in self.colors):
            raise ValueError(f"colors must lie in [0, {self.palette})")


def default_repetitions(ns: int) -> int:
    return math.ceil(math.exp(ns) * FAILURE_EXPONENT * math.log(2))


class _BundleOracle:
    """Memoised "feasible bundle for agent a inside job mask J" queries."""

    def __init__(self, inst: Instance, solver):
        self.inst = inst
        self.solver = solver
        self.cache = {}
        self.calls = 0

    def __call__(self, agent: int, jobs_mask: int) -> Optional[int]:
        key = (agent, jobs_mask)
        if key in self.cache:
            return self.cache[key]
        witness = None
        if jobs_mask:
            inst = self.inst
            verts = bits(jobs_mask)
            row = inst.utilities[agent]
            sub = SbMwisInstance(inst.conflict.induced(verts), [row[v] for v in verts],
                                 min(inst.bundle_cap, len(verts)), inst.eta)
            self.calls += 1
            ok, found = self.solver(sub)
            if ok and found:
                witness = sum(1 << verts[v] for v in found)
        self.cache[key] = witness
        return witness


def _check(inst: Instance):
    if inst.bundle_cap is None:
        raise RoutingError("color coding needs a bundle cap s")
    ns = inst.n * inst.bundle_cap
    if ns > MAX_COLORS:
        raise CapacityError(f"n*s = {ns} colors exceeds the limit of {MAX_COLORS}")
    return ns


def _dp(inst: Instance, colors, ns: int, oracle: _BundleOracle) -> Optional[list]:
    n = inst.n
    full = 1 << ns
    jobs_in = [0] * full  # jobs whose color lies in S
    for j, c in enumerate(colors):
        jobs_in[1 << c] |= 1 << j
    for S in range(1, full):
        low = S & -S
        if S != low:
            jobs_in[S] = jobs_in[low] | jobs_in[S ^ low]

    prev = [False] * full
    for S in range(1, full):
        prev[S] = oracle(0, jobs_in[S]) is not None
    preds = []
    for i in range(1, n):
        cur = [False] * full
        pred = [0] * full
        for S in range(1, full):
            sub = (S - 1) & S
            while sub:
                if prev[sub] and oracle(i, jobs_in[S ^ sub]) is not None:
                    cur[S] = True
                    pred[S] = sub
                    break
                sub = (sub - 1) & S
        preds.append(pred)
        prev = cur

    S = next((S for S in range(1, full) if prev[S]), None)
    if S is None:
        return None
    masks = [0] * n
    for i in range(n - 1, 0, -1):
        sub = preds[i - 1][S]
        masks[i] = oracle(i, jobs_in[S ^ sub])
        S = sub
    masks[0] = oracle(0, jobs_in[S])
    return masks


def dp_colorful(inst: Instance, coloring: Coloring, sbmwis_solver=None):
    """Run the colorful DP for one coloring; returns (found, allocation or None)."""
    ns = _check(inst)
    if coloring.palette != ns or len(coloring.colors) != inst.m:
        raise ValueError(f"coloring must map {inst.m} jobs into {ns} colors")
    if inst.n == 0:
        return True, Allocation({})
    oracle = _BundleOracle(inst, sbmwis_solver or sbmwis_router(inst.conflict))
    masks = _dp(inst, coloring.colors, ns, oracle)
    if masks is None:
        return False, None
    return True, Allocation.from_masks(inst, masks)


def random_colorings(seed: int, m: int, ns: int):
    """Colorings drawn from a PCG64 stream: color = floor(raw64 * ns / 2^64)."""
    gen = np.random.PCG64(seed)
    while True:
        raw = gen.random_raw(m).tolist()
        yield [(r * ns) >> 64 for r in raw]


def solve_color_coding(inst: Instance, seed: int = 0, repetitions: Optional[int] = None,
                       sbmwis_solver: Optional[Callable] = None,
                       budget: int = DEFAULT_BUDGET) -> SolveReport:
    clock = Stopwatch()
    ns = _check(inst)
    if inst.n == 0:
        return finish(inst, "color", [], clock, colorings_tried=0)
    if inst.n > inst.m:
        return finish(inst, "color", None, clock, colorings_tried=0)
    planned = default_repetitions(ns) if repetitions is None else repetitions
    if planned < 1:
        raise ValueError("repetitions must be >= 1")
    planned = min(planned, budget)
    oracle = _BundleOracle(inst, sbmwis_solver or sbmwis_router(inst.conflict))
    tried = 0
    for colors in random_colorings(seed, inst.m, ns):
        if tried == planned:
            break
        tried += 1
        masks = _dp(inst, colors, ns, oracle)
        if masks is not None:
            return finish(inst, "color", masks, clock, colorings_tried=tried,
                          repetitions=planned, sbmwis_calls=oracle.calls)
    return finish(inst, "color", None, clock, colorings_tried=tried, repetitions=planned,
                  sbmwis_calls=oracle.calls)


def canonical_colorings(m: int, ns: int):
    """Colorings up to renaming of colors: each job uses at most one color past the max so far."""
    colors = [0] * m

    def rec(j, used):
        if j == m:
            yield list(colors)
            return
        for c in range(min(used + 1, ns)):
            colors[j] = c
            yield from rec(j + 1, max(used, c + 1))

    yield from rec(0, 0)


def solve_exhaustive_colorings(inst: Instance, sbmwis_solver: Optional[Callable] = None,
                               budget: int = EXHAUSTIVE_BUDGET) -> SolveReport:
    """Deterministic mode: try every coloring (up to color renaming).

    The DP only looks at which jobs share a color, so colorings that
    differ by a permutation of colors give identical answers and one
    representative per class suffices.
    """
    clock = Stopwatch()
    ns = _check(inst)
    if ns ** inst.m > budget:
        raise CapacityError(f"(n*s)^m = {ns}^{inst.m} colorings exceeds budget {budget}")
    if inst.n == 0:
        return finish(inst, "color_exhaustive", [], clock, colorings_tried=0)
    if inst.n > inst.m:
        return finish(inst, "color_exhaustive", None, clock, colorings_tried=0)
    oracle = _BundleOracle(inst, sbmwis_solver or sbmwis_router(inst.conflict))
    tried = 0
    for colors in canonical_colorings(inst.m, ns):
        tried += 1
        masks = _dp(inst, colors, ns, oracle)
        if masks is not None:
            return finish(inst, "color_exhaustive", masks, clock, colorings_tried=tried)
    return finish(inst, "color_exhaustive", None, clock, colorings_tried=tried)
