"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly as a
script (``python3 tests/test_acceptance.py``).
"""
import itertools
import json
import os
import random
import statistics
import sys
import time
from contextlib import redirect_stdout
from io import StringIO

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

from cffa.cli import main
from cffa.color_coding import solve_color_coding, solve_exhaustive_colorings
from cffa.model import verify_allocation
from cffa.near_complete import (ComplementView, degeneracy_bound,
                                enumerate_nontrivial_independent_sets, nontrivial_bound,
                                solve_guess_per_agent, solve_partition_contract)
from cffa.oracle import brute_force_cffa, brute_force_sbmwis, subset_dp_cffa
from cffa.reductions import (all_3partition_sources, all_numerical_3dm_sources, from_3partition,
                             from_independent_set, from_numerical_3dm, from_sbmwis, gen_cluster,
                             gen_near_complete, gen_random, gen_regular_m_minus_2,
                             independent_set_exists, solve_3partition, solve_numerical_3dm)
from cffa.sbmwis import IndependenceFriendlyProfile, solve_ifc_branching, solve_sbmwis_cluster
from cffa.structured import (solve_cluster_two_cliques_uniform, solve_complete_graph,
                             solve_near_complete_uniform)
from cffa.subset_convolution import solve_fpt_items

from corpora import (any_sbmwis, bipartite_sbmwis, capped, cluster_sbmwis, complete,
                     degenerate_sbmwis, general, near_complete, regular_uniform,
                     two_cliques_uniform)

SCALING_MS = (14, 16, 18, 20)
FPT_SEEDS, FPT_REPEATS = range(5), 3
SUBSETDP_SEEDS, SUBSETDP_REPEATS = range(3), 1  # multi-second runs, little jitter
FPT_EXPONENT = (0.8, 1.2)
SUBSETDP_EXPONENT = (1.4, 1.8)
COLOR_SEEDS = (0, 1, 2)


def emit(capsys, number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    assert ok, line


def timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def _verified(rep, inst):
    return not rep.verdict or verify_allocation(inst, rep.certificate)


def check_oracle_equivalence(capsys=None):
    start = time.perf_counter()
    bad = 0
    for inst in general(500):
        reps = [brute_force_cffa(inst), subset_dp_cffa(inst), solve_fpt_items(inst)]
        if len({r.verdict for r in reps}) != 1 or not all(_verified(r, inst) for r in reps):
            bad += 1
    elapsed = time.perf_counter() - start
    emit(capsys, 1, bad == 0 and elapsed < 60, f"{bad} disagreements / 500, {elapsed:.1f} s")


def _fit_exponent(ms, seconds):
    return float(np.polyfit(ms, np.log2(seconds), 1)[0])


def _median_runtime(solver, m, seeds, repeats):
    runs = []
    for seed in seeds:
        inst = gen_random(m, 3, 0.5, 10, 10, seed)
        runs += [timed(lambda: solver(inst)) for _ in range(repeats)]
    return statistics.median(runs)


def check_scaling(capsys=None):
    start = time.perf_counter()
    warm = gen_random(6, 3, 0.5, 10, 10, 0)
    solve_fpt_items(warm), subset_dp_cffa(warm)
    fpt = [_median_runtime(solve_fpt_items, m, FPT_SEEDS, FPT_REPEATS) for m in SCALING_MS]
    dp = [_median_runtime(subset_dp_cffa, m, SUBSETDP_SEEDS, SUBSETDP_REPEATS)
          for m in SCALING_MS]
    c_fpt, c_dp = _fit_exponent(SCALING_MS, fpt), _fit_exponent(SCALING_MS, dp)
    elapsed = time.perf_counter() - start
    ok = (FPT_EXPONENT[0] <= c_fpt <= FPT_EXPONENT[1]
          and SUBSETDP_EXPONENT[0] <= c_dp <= SUBSETDP_EXPONENT[1] and elapsed < 600)
    emit(capsys, 2, ok, f"c_fpt={c_fpt:.3f} c_subsetdp={c_dp:.3f}, {elapsed:.1f} s")


def check_color_coding(capsys=None):
    start = time.perf_counter()
    false_pos = false_neg = 0
    for inst in capped(200):
        truth = brute_force_cffa(inst).verdict
        reps = [solve_exhaustive_colorings(inst)]
        reps += [solve_color_coding(inst, seed=s) for s in COLOR_SEEDS]
        for rep in reps:
            false_pos += rep.verdict and not truth
            false_neg += truth and not rep.verdict
            false_pos += not _verified(rep, inst)
    elapsed = time.perf_counter() - start
    ok = false_pos == 0 and false_neg == 0 and elapsed < 300
    emit(capsys, 3, ok, f"false positives {false_pos}, false negatives {false_neg}, "
                        f"{elapsed:.1f} s")


def check_sbmwis_embedding(capsys=None):
    # rho = 0 sources have no image (eta >= 1), so draw until 200 encodable ones
    sources = itertools.islice((s for s in any_sbmwis(10 ** 4) if s.target >= 1), 200)
    bad = checked = 0
    for src in sources:
        bad += brute_force_cffa(from_sbmwis(src)).verdict != brute_force_sbmwis(src)[0]
        checked += 1
    emit(capsys, 4, bad == 0, f"{bad} mismatches / {checked}")


def check_ifc_branching(capsys=None):
    bad = over = 0
    runs = [(src, IndependenceFriendlyProfile.bipartite()) for src in bipartite_sbmwis(300)]
    runs += [(src, IndependenceFriendlyProfile.degenerate(3)) for src in degenerate_sbmwis(300)]
    for src, profile in runs:
        counters = {}
        got = solve_ifc_branching(src, profile, counters)
        bad += got[0] != brute_force_sbmwis(src)[0]
        if got[0]:
            bad += len(got[1]) > src.size_cap or src.weight(got[1]) < src.target
        over += counters["nodes"] > profile.f_inverse_at(src.size_cap) ** src.size_cap
    emit(capsys, 5, bad == 0 and over == 0,
         f"{bad} mismatches, {over} node-bound violations / {len(runs)}")


def check_cluster_sbmwis(capsys=None):
    bad = 0
    for src, parts in cluster_sbmwis(300):
        bad += solve_sbmwis_cluster(src, parts)[0] != brute_force_sbmwis(src)[0]
    emit(capsys, 6, bad == 0, f"{bad} mismatches / 300")


def check_structured(capsys=None):
    bad = 0
    for corpus, solver in ((complete(300), solve_complete_graph),
                           (two_cliques_uniform(300), solve_cluster_two_cliques_uniform),
                           (regular_uniform(200), solve_near_complete_uniform)):
        for inst in corpus:
            rep = solver(inst)
            bad += rep.verdict != brute_force_cffa(inst).verdict or not _verified(rep, inst)
    big = ((solve_complete_graph, gen_random(200, 60, 1.0, 10, 8, 0)),
           (solve_cluster_two_cliques_uniform,
            gen_cluster([100, 100], 60, 10, 12, 0, uniform=True)[0]),
           (solve_near_complete_uniform, gen_regular_m_minus_2(200, 60, 10, 12, 0)))
    slowest = max(timed(lambda: solver(inst)) for solver, inst in big)
    emit(capsys, 7, bad == 0 and slowest < 1.0,
         f"{bad} mismatches / 800, slowest at m=200 {slowest * 1000:.0f} ms")


def check_counting(capsys=None):
    bad = 0
    for seed in range(500):
        r = random.Random(seed)
        m = r.randint(2, 12)
        t = r.randint(0, min(12, m * (m - 1) // 2))
        g = gen_near_complete(m, t, 1, 1, 1, seed).conflict
        view = ComplementView(g)
        found = enumerate_nontrivial_independent_sets(g)
        exhaustive = {frozenset(j for j in range(m) if mk >> j & 1)
                      for mk in range(1 << m) if mk.bit_count() >= 2 and g.is_independent_mask(mk)}
        bad += len(found) > nontrivial_bound(t)
        bad += view.degeneracy > degeneracy_bound(t)
        bad += set(found) != exhaustive or len(found) != len(exhaustive)
    emit(capsys, 8, bad == 0, f"{bad} violations / 500")


def check_t_solvers(capsys=None):
    bad = 0
    for inst in near_complete(300, max_t=6):
        rep = solve_guess_per_agent(inst)
        bad += rep.verdict != brute_force_cffa(inst).verdict or not _verified(rep, inst)
    for inst in near_complete(300, max_t=5, seed0=1000):
        rep = solve_partition_contract(inst)
        bad += rep.verdict != brute_force_cffa(inst).verdict or not _verified(rep, inst)
    overlap = 0
    for inst in near_complete(200, max_t=5, seed0=5000):
        overlap += solve_guess_per_agent(inst).verdict != solve_partition_contract(inst).verdict
    emit(capsys, 9, bad == 0 and overlap == 0,
         f"{bad} mismatches / 600, {overlap} disagreements / 200")


def check_reductions(capsys=None):
    bad = total = 0
    for src in all_3partition_sources(2, 16):
        bad += (solve_3partition(src) is not None) != brute_force_cffa(from_3partition(src)).verdict
        total += 1
    for src in all_numerical_3dm_sources(2, 5):
        image = from_numerical_3dm(src)
        bad += (solve_numerical_3dm(src) is not None) != brute_force_cffa(image).verdict
        total += 1
    for seed in range(200):
        r = random.Random(seed)
        g = gen_random(r.randint(1, 10), 1, r.random(), 1, 1, seed).conflict
        k = r.randint(1, g.vertex_count)
        bad += brute_force_cffa(from_independent_set(g, k)).verdict != independent_set_exists(g, k)
        total += 1
    emit(capsys, 10, bad == 0, f"{bad} mismatches / {total}")


def _run_cli(argv):
    out = StringIO()
    with redirect_stdout(out):
        code = main(argv)
    return code, out.getvalue()


def _strip_elapsed_csv(text):
    return [line.rsplit(",", 2)[0] for line in text.splitlines()]


def check_determinism(tmp_dir, capsys=None):
    inst_path = os.path.join(tmp_dir, "inst.json")
    capped_path = os.path.join(tmp_dir, "capped.json")
    src_path = os.path.join(tmp_dir, "src.json")
    spec_path = os.path.join(tmp_dir, "bench.json")
    with open(src_path, "w") as fh:
        json.dump({"vertex_count": 5, "edges": [[0, 1], [1, 2]], "weights": [3, 1, 4, 1, 5],
                   "k": 2, "rho": 8}, fh)
    with open(spec_path, "w") as fh:
        json.dump({"rows": [{"generator": "near_complete", "solvers": ["auto", "guess_tn"],
                             "params": {"m": 8, "t": 3, "n": 2, "u_max": 9, "eta": 9,
                                        "seed": 1}, "repetitions": 2}]}, fh)
    code, text = _run_cli(["gen", "random", "--m", "8", "--n", "3", "--seed", "7"])
    with open(inst_path, "w") as fh:
        fh.write(text)
    _, text = _run_cli(["gen", "random", "--m", "6", "--n", "2", "--bundle-cap", "2",
                        "--seed", "3"])
    with open(capped_path, "w") as fh:
        fh.write(text)
    cert_path = os.path.join(tmp_dir, "cert.json")
    _run_cli(["solve", "--in", inst_path, "--out", cert_path, "--no-elapsed"])
    commands = [
        ["gen", "random", "--m", "8", "--n", "3", "--seed", "7"],
        ["gen", "cluster", "--cliques", "3,4", "--n", "2", "--uniform", "--seed", "2"],
        ["gen", "near_complete", "--m", "9", "--t", "4", "--seed", "5"],
        ["gen", "regular", "--m", "8", "--seed", "1"],
        ["reduce", "sbmwis", "--in", src_path],
        ["verify", "--in", inst_path, "--cert", cert_path],
    ]
    for alg in ("auto", "brute", "subsetdp", "subsetconv", "partition_t", "guess_tn"):
        commands.append(["solve", "--alg", alg, "--in", inst_path, "--no-elapsed"])
    for alg in ("color", "color_exhaustive"):
        commands.append(["solve", "--alg", alg, "--seed", "4", "--in", capped_path,
                         "--no-elapsed"])
    commands.append(["solve", "--maximize-eta", "--in", inst_path, "--no-elapsed"])
    differing = []
    for argv in commands:
        first, second = _run_cli(argv), _run_cli(argv)
        if first != second:
            differing.append(" ".join(argv[:2]))
    a, b = _run_cli(["bench", "--spec", spec_path]), _run_cli(["bench", "--spec", spec_path])
    if a[0] != b[0] or _strip_elapsed_csv(a[1]) != _strip_elapsed_csv(b[1]):
        differing.append("bench")
    emit(capsys, 11, not differing,
         f"{len(commands) + 1} commands rerun, differing: {differing or 'none'}")


def test_criterion_01_oracle_equivalence(capsys):
    check_oracle_equivalence(capsys)


def test_criterion_02_scaling(capsys):
    check_scaling(capsys)


def test_criterion_03_color_coding(capsys):
    check_color_coding(capsys)


def test_criterion_04_sbmwis_embedding(capsys):
    check_sbmwis_embedding(capsys)


def test_criterion_05_ifc_branching(capsys):
    check_ifc_branching(capsys)


def test_criterion_06_cluster_sbmwis(capsys):
    check_cluster_sbmwis(capsys)


def test_criterion_07_structured(capsys):
    check_structured(capsys)


def test_criterion_08_counting(capsys):
    check_counting(capsys)


def test_criterion_09_t_solvers(capsys):
    check_t_solvers(capsys)


def test_criterion_10_reductions(capsys):
    check_reductions(capsys)


def test_criterion_11_determinism(tmp_path, capsys):
    check_determinism(str(tmp_path), capsys)


if __name__ == "__main__":
    import tempfile

    failed = 0
    checks = [check_oracle_equivalence, check_scaling, check_color_coding, check_sbmwis_embedding,
              check_ifc_branching, check_cluster_sbmwis, check_structured, check_counting,
              check_t_solvers, check_reductions]
    with tempfile.TemporaryDirectory() as tmp:
        checks.append(lambda: check_determinism(tmp))
        for check in checks:
            try:
                check()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
