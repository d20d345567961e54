"""Command line: ``cffa solve | verify | gen | reduce | bench``.

Exit codes: 0 yes (or a valid certificate), 1 no, 2 input error,
3 capacity or budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from .bench import run_bench
from .dispatch import CHOICES, SolverChoice, dispatch, maximize_eta
from .errors import (CapacityError, ClassViolationError, InstanceError,
                     MalformedCertificateError, RoutingError)
from .io import parse_certificate, parse_instance, report_to_json, serialize_instance
from .model import ConflictGraph, verify_allocation
from .oracle import SbMwisInstance
from . import reductions as red

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.inp))
    choice = SolverChoice(args.alg, seed=args.seed, repetitions=args.reps, budget=args.budget)
    if args.maximize_eta:
        eta, rep = maximize_eta(inst, choice)
        doc = {"max_eta": eta, "report": rep.to_json(inst) if rep else None}
        if rep and args.no_elapsed:
            doc["report"].pop("elapsed_ms")
        _write(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_YES if rep else EXIT_NO
    rep = dispatch(inst, choice)
    _write(report_to_json(rep, inst, with_elapsed=not args.no_elapsed), args.out)
    return EXIT_YES if rep.verdict else EXIT_NO


def cmd_verify(args) -> int:
    inst = parse_instance(_read(args.inp))
    alloc = parse_certificate(_read(args.cert), inst)
    ok = alloc is not None and verify_allocation(inst, alloc)
    _write(json.dumps({"valid": ok}) + "\n", None)
    return EXIT_YES if ok else EXIT_NO


def cmd_gen(args) -> int:
    common = dict(n=args.n, u_max=args.u_max, eta=args.eta, seed=args.seed,
                  bundle_cap=args.bundle_cap, uniform=args.uniform)
    if args.kind == "random":
        inst = red.gen_random(args.m, edge_prob=args.edge_prob, **common)
    elif args.kind == "cluster":
        sizes = [int(x) for x in args.cliques.split(",")]
        inst, _ = red.gen_cluster(sizes, **common)
    elif args.kind == "near_complete":
        inst = red.gen_near_complete(args.m, args.t, **common)
    else:
        inst = red.gen_regular_m_minus_2(args.m, **common)
    _write(serialize_instance(inst), args.out)
    return EXIT_YES


def _graph(doc) -> ConflictGraph:
    return ConflictGraph.from_edges(doc["vertex_count"], doc.get("edges", []))


def cmd_reduce(args) -> int:
    try:
        doc = json.loads(_read(args.inp))
        if args.source == "3partition":
            inst = red.from_3partition(red.ThreePartitionInstance(doc["sizes"], doc["B"]))
        elif args.source == "n3dm":
            inst = red.from_numerical_3dm(
                red.Numerical3DMInstance(doc["x"], doc["y"], doc["z"], doc["B"]))
        elif args.source == "independent_set":
            inst = red.from_independent_set(_graph(doc), doc["k"])
        else:
            src = SbMwisInstance(_graph(doc), doc["weights"], doc["k"], doc["rho"])
            inst = red.from_sbmwis(src, strict=not args.lenient)
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InstanceError("SCHEMA", f"bad {args.source} document ({exc})") from None
    _write(serialize_instance(inst), args.out)
    return EXIT_YES


def cmd_bench(args) -> int:
    _write(run_bench(_read(args.spec).decode("utf-8")), args.out)
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cffa", description="Exact conflict-free fair allocation.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide an instance")
    s.add_argument("--alg", choices=CHOICES, default="auto")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--reps", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--maximize-eta", action="store_true",
                   help="binary-search the largest feasible eta")
    s.add_argument("--no-elapsed", action="store_true", help="omit elapsed_ms from the report")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a certificate")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--cert", required=True)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("kind", choices=["random", "cluster", "near_complete", "regular"])
    g.add_argument("--m", type=int, default=8)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--edge-prob", type=float, default=0.3)
    g.add_argument("--u-max", type=int, default=10)
    g.add_argument("--eta", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--t", type=int, default=2)
    g.add_argument("--cliques", default="3,3")
    g.add_argument("--bundle-cap", type=int)
    g.add_argument("--uniform", action="store_true")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("reduce", help="encode a source problem as CFFA")
    r.add_argument("source", choices=["3partition", "n3dm", "independent_set", "sbmwis"])
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--lenient", action="store_true", help="clamp rho = 0 to 1 instead of failing")
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    b = sub.add_parser("bench", help="run a benchmark spec, CSV out")
    b.add_argument("--spec", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InstanceError, MalformedCertificateError, RoutingError, ClassViolationError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
