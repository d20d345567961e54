"""Solver selection: explicit choices and the ``auto`` router."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .color_coding import MAX_COLORS, solve_color_coding, solve_exhaustive_colorings
from .errors import CapacityError, RoutingError
from .model import Instance, SolveReport
from .near_complete import solve_guess_per_agent, solve_partition_contract
from .oracle import brute_force_cffa, subset_dp_cffa
from .sbmwis import detect_class
from .structured import (solve_cluster_two_cliques_uniform, solve_complete_graph,
                         solve_near_complete_uniform)
from .subset_convolution import solve_fpt_items

CHOICES = ("auto", "brute", "subsetdp", "subsetconv", "color", "color_exhaustive",
           "complete", "cluster2u", "nearcomplete_u", "guess_tn", "partition_t")

# auto-routing thresholds
AUTO_PARTITION_T = 6
AUTO_SUBSETCONV_M = 22
AUTO_COLOR_NS = 12


@dataclass(frozen=True)
class SolverChoice:
    name: str = "auto"
    seed: int = 0
    repetitions: Optional[int] = None
    budget: Optional[int] = None

    def __post_init__(self):
        if self.name not in CHOICES:
            raise RoutingError(f"unknown solver {self.name!r}; choose from {', '.join(CHOICES)}")
        if self.repetitions is not None and self.repetitions < 1:
            raise RoutingError("repetitions must be >= 1")
        if self.budget is not None and self.budget < 1:
            raise RoutingError("budget must be >= 1")


def route(inst: Instance) -> str:
    """Name of the solver ``auto`` would use."""
    info = detect_class(inst.conflict)
    uniform = inst.is_uniform()
    if info.complete:
        return "complete"
    if info.cluster is not None and len(info.cluster) == 2 and uniform:
        return "cluster2u"
    if info.all_degrees_m_minus_2 and uniform:
        return "nearcomplete_u"
    if inst.conflict.missing_edge_count() <= AUTO_PARTITION_T:
        return "partition_t"
    if inst.m <= AUTO_SUBSETCONV_M:
        return "subsetconv"
    if inst.bundle_cap is not None and inst.n * inst.bundle_cap <= AUTO_COLOR_NS:
        return "color"
    raise CapacityError(f"no exact solver in range for m={inst.m}, n={inst.n}")


def dispatch(inst: Instance, choice=None) -> SolveReport:
    if choice is None or isinstance(choice, str):
        choice = SolverChoice(choice or "auto")
    name = route(inst) if choice.name == "auto" else choice.name
    extra = {} if choice.budget is None else {"budget": choice.budget}
    if name == "brute":
        return brute_force_cffa(inst)
    if name == "subsetdp":
        return subset_dp_cffa(inst)
    if name == "subsetconv":
        return solve_fpt_items(inst)
    if name == "color":
        if inst.bundle_cap is None:
            raise RoutingError("color coding needs a bundle_cap")
        if inst.n * inst.bundle_cap > MAX_COLORS:
            raise CapacityError(f"n*s = {inst.n * inst.bundle_cap} exceeds {MAX_COLORS}")
        return solve_color_coding(inst, seed=choice.seed, repetitions=choice.repetitions,
                                  **extra)
    if name == "color_exhaustive":
        return solve_exhaustive_colorings(inst, **extra)
    if name == "complete":
        return solve_complete_graph(inst)
    if name == "cluster2u":
        return solve_cluster_two_cliques_uniform(inst)
    if name == "nearcomplete_u":
        return solve_near_complete_uniform(inst)
    if name == "guess_tn":
        return solve_guess_per_agent(inst, **extra)
    if name == "partition_t":
        return solve_partition_contract(inst, **({"t_cap": choice.budget} if choice.budget
                                                 else {}))
    raise RoutingError(f"unknown solver {name!r}")


def maximize_eta(inst: Instance, choice=None):
    """Largest eta with a yes verdict (binary search), with its report; (0, None) if none."""
    lo, hi = 0, max((sum(r) for r in inst.utilities), default=0)
    best = None
    while lo < hi:
        mid = (lo + hi + 1) // 2
        rep = dispatch(inst.replace(eta=mid), choice)
        if rep.verdict:
            lo, best = mid, rep
        else:
            hi = mid - 1
    if best is None and lo >= 1:
        best = dispatch(inst.replace(eta=lo), choice)
    return lo, best
