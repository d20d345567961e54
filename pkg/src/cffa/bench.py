"""Benchmark runner producing a fixed-schema CSV.

A spec is a JSON object ``{"rows": [...]}``; each row names a generator,
its parameters, the solvers to run and how many timed repetitions::

    {"generator": "random", "params": {"m": 14, "n": 3, "edge_prob": 0.5,
     "u_max": 10, "eta": 10, "seed": 0}, "solvers": ["subsetconv"], "repetitions": 3}

Each (row, solver) pair yields one CSV line holding the median elapsed
time. A failing pair records its error and the run moves on.
"""
from __future__ import annotations

import csv
import io
import json
import statistics

from .dispatch import SolverChoice, dispatch
from .errors import CFFAError
from .reductions import gen_cluster, gen_near_complete, gen_random, gen_regular_m_minus_2

COLUMNS = ["generator", "params", "solver", "verdict", "counters", "elapsed_ms", "error"]

GENERATORS = {
    "random": gen_random,
    "cluster": lambda **kw: gen_cluster(**kw)[0],
    "near_complete": gen_near_complete,
    "regular": gen_regular_m_minus_2,
}


def _compact(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def run_bench(spec) -> str:
    if isinstance(spec, (str, bytes)):
        spec = json.loads(spec) if spec.strip() else {}
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in spec.get("rows", []):
        gen, params = row.get("generator"), row.get("params", {})
        reps = int(row.get("repetitions", 1))
        try:
            inst = GENERATORS[gen](**params)
        except (KeyError, TypeError, ValueError, CFFAError) as exc:
            for solver in row.get("solvers", ["auto"]):
                writer.writerow([gen, _compact(params), solver, "", "", "", _err(exc)])
            continue
        for solver in row.get("solvers", ["auto"]):
            try:
                choice = SolverChoice(solver, seed=int(row.get("seed", 0)))
                reports = [dispatch(inst, choice) for _ in range(reps)]
            except CFFAError as exc:
                writer.writerow([gen, _compact(params), solver, "", "", "", _err(exc)])
                continue
            rep = reports[0]
            elapsed = statistics.median(r.elapsed_ms for r in reports)
            writer.writerow([gen, _compact(params), rep.algorithm,
                             "yes" if rep.verdict else "no", _compact(rep.counters),
                             f"{elapsed:.3f}", ""])
    return out.getvalue()


def _err(exc) -> str:
    return f"{type(exc).__name__}: {exc}"
