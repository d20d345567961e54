"""JSON formats for instances, certificates and reports.

Instance::

    {"agents": [str], "jobs": [str], "utilities": [[int]],
     "edges": [[int, int]], "eta": int, "bundle_cap": int | null}

Certificate::

    {"feasible": bool, "assignment": {agent: [job, ...]} | null}

Every parse failure raises :class:`InstanceError` with a stable code and a
pointer to the offending field.
"""
from __future__ import annotations

import json
from typing import Optional

from .errors import InstanceError, MalformedCertificateError
from .model import Allocation, ConflictGraph, Instance, SolveReport

INSTANCE_KEYS = ("agents", "jobs", "utilities", "edges", "eta", "bundle_cap")


def _load(data) -> object:
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceError("JSON_SYNTAX", f"not UTF-8 ({exc.reason})",
                                f"byte {exc.start}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceError("JSON_SYNTAX", exc.msg, f"line {exc.lineno} column {exc.colno}") \
            from None


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _ids(doc, key):
    ids = doc.get(key)
    if not isinstance(ids, list):
        raise InstanceError("SCHEMA", f"{key!r} must be a list of strings", key)
    for k, ident in enumerate(ids):
        if not isinstance(ident, str):
            raise InstanceError("SCHEMA", f"identifier must be a string, got {ident!r}",
                                f"{key}[{k}]")
    return ids


def parse_instance(data) -> Instance:
    doc = _load(data)
    if not isinstance(doc, dict):
        raise InstanceError("SCHEMA", "top level must be an object", "$")
    for key in INSTANCE_KEYS:
        if key not in doc and key != "bundle_cap":
            raise InstanceError("SCHEMA", f"missing key {key!r}", key)
    extra = sorted(set(doc) - set(INSTANCE_KEYS))
    if extra:
        raise InstanceError("SCHEMA", f"unknown key {extra[0]!r}", extra[0])
    agents, jobs = _ids(doc, "agents"), _ids(doc, "jobs")
    n, m = len(agents), len(jobs)

    util = doc["utilities"]
    if not isinstance(util, list):
        raise InstanceError("SCHEMA", "'utilities' must be a list of rows", "utilities")
    if len(util) != n:
        raise InstanceError("DIM_MISMATCH", f"{len(util)} utility rows for {n} agents",
                            "utilities")
    for i, row in enumerate(util):
        if not isinstance(row, list):
            raise InstanceError("SCHEMA", "utility row must be a list", f"utilities[{i}]")
        if len(row) != m:
            raise InstanceError("DIM_MISMATCH", f"row has {len(row)} entries for {m} jobs",
                                f"utilities[{i}]")

    edges = doc["edges"]
    if not isinstance(edges, list):
        raise InstanceError("SCHEMA", "'edges' must be a list of pairs", "edges")
    seen = set()
    for k, e in enumerate(edges):
        where = f"edges[{k}]"
        if not isinstance(e, list) or len(e) != 2 or not all(_is_int(v) for v in e):
            raise InstanceError("SCHEMA", f"edge must be a pair of integers, got {e!r}", where)
        u, v = e
        if u == v:
            raise InstanceError("SELF_LOOP", f"self-loop on job {u}", where)
        if not (0 <= u < m and 0 <= v < m):
            raise InstanceError("EDGE_RANGE", f"edge {e} outside [0, {m})", where)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InstanceError("DUPLICATE_EDGE", f"edge {list(key)} listed twice", where)
        seen.add(key)

    eta = doc["eta"]
    if not _is_int(eta) or eta < 1:
        raise InstanceError("ETA_RANGE", f"eta must be an integer >= 1, got {eta!r}", "eta")
    cap = doc.get("bundle_cap")
    if cap is not None and not _is_int(cap):
        raise InstanceError("BUNDLE_CAP_RANGE", "bundle_cap must be an integer or null",
                            "bundle_cap")
    return Instance(agents, jobs, util, ConflictGraph(m, frozenset(seen)), eta, cap)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "agents": list(inst.agents),
        "jobs": list(inst.jobs),
        "utilities": [list(r) for r in inst.utilities],
        "edges": [list(e) for e in sorted(inst.conflict.edges)],
        "eta": inst.eta,
        "bundle_cap": inst.bundle_cap,
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), separators=(",", ":")) + "\n"


def parse_certificate(data, inst: Instance) -> Optional[Allocation]:
    """The allocation a certificate claims, or None for a "feasible": false document."""
    try:
        doc = _load(data)
    except InstanceError as exc:
        raise MalformedCertificateError(str(exc)) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("feasible"), bool):
        raise MalformedCertificateError("certificate needs a boolean 'feasible' field")
    if not doc["feasible"]:
        return None
    assignment = doc.get("assignment")
    if not isinstance(assignment, dict):
        raise MalformedCertificateError("'assignment' must map agents to job lists")
    for a, js in assignment.items():
        if not isinstance(js, list) or not all(isinstance(x, str) for x in js):
            raise MalformedCertificateError(f"bundle of {a!r} must be a list of job ids")
        if len(set(js)) != len(js):
            raise MalformedCertificateError(f"bundle of {a!r} repeats a job")
    alloc = Allocation(assignment)
    alloc.index_masks(inst)  # unknown ids raise here
    return alloc


def report_to_json(report: SolveReport, inst: Instance, with_elapsed: bool = True) -> str:
    doc = report.to_json(inst)
    if not with_elapsed:
        doc.pop("elapsed_ms")
    return json.dumps(doc, indent=2) + "\n"
