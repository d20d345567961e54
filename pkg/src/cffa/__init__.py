"""Exact solvers for conflict-free fair allocation."""
from .errors import (CapacityError, CFFAError, ClassViolationError, InstanceError,
                     InternalError, MalformedCertificateError, RoutingError)
from .model import (Allocation, ConflictGraph, Instance, SolveReport, bundle_utility,
                    is_independent, verify_allocation)
from .oracle import SbMwisInstance, brute_force_cffa, brute_force_sbmwis, subset_dp_cffa
from .dispatch import SolverChoice, dispatch

__all__ = [
    "Allocation", "CFFAError", "CapacityError", "ClassViolationError", "ConflictGraph",
    "Instance", "InstanceError", "InternalError", "MalformedCertificateError", "RoutingError",
    "SbMwisInstance", "SolveReport", "SolverChoice", "brute_force_cffa", "brute_force_sbmwis",
    "bundle_utility", "dispatch", "is_independent", "subset_dp_cffa", "verify_allocation",
]
