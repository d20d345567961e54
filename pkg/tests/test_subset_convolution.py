import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cffa.errors import CapacityError
from cffa.model import ConflictGraph, Instance, bits, verify_allocation
from cffa.oracle import brute_force_cffa, subset_dp_cffa
from cffa.reductions import gen_random
from cffa.subset_convolution import (build_bundle_families, extract_assignment,
                                     hamming_projection, poly_multiply, representative,
                                     round_polynomials, solve_fpt_items)

from corpora import agrees, general


def definitional_family(inst, a):
    out = set()
    for mask in range(1, 1 << inst.m):
        js = bits(mask)
        if any(u in js and v in js for u, v in inst.conflict.edges):
            continue
        if inst.bundle_cap is not None and len(js) > inst.bundle_cap:
            continue
        if sum(inst.utilities[a][j] for j in js) >= inst.eta:
            out.add(mask)
    return out


def test_families_match_definition():
    for inst in general(100, caps=(None, 2)):
        for fam in build_bundle_families(inst):
            assert set(np.flatnonzero(fam.indicator).tolist()) == definitional_family(inst, fam.agent)


def test_family_on_complete_graph_is_singletons():
    inst = gen_random(6, 2, 1.0, 10, 5, seed=3)
    for fam in build_bundle_families(inst):
        expected = {1 << j for j in range(6) if inst.utilities[fam.agent][j] >= 5}
        assert set(np.flatnonzero(fam.indicator).tolist()) == expected


def test_family_on_edgeless_unit_utilities_is_everything():
    inst = Instance.build([[1] * 5], eta=1)
    (fam,) = build_bundle_families(inst)
    assert fam.indicator[1:].all() and not fam.indicator[0]


def test_family_capacity():
    with pytest.raises(CapacityError):
        solve_fpt_items(Instance.build([[1] * 31], eta=1))


def test_hamming_projection():
    p = np.zeros(8, dtype=np.uint64)
    p[0b011] = 2
    p[0b111] = 3
    p[0] = 5
    q = hamming_projection(p, 2)
    assert np.flatnonzero(q).tolist() == [0b011] and q[0b011] == 2
    assert np.flatnonzero(hamming_projection(p, 0)).tolist() == [0]


def test_projections_partition_support():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.integers(0, 3, 64).astype(np.uint64)
        parts = [hamming_projection(p, h) for h in range(7)]
        assert (sum(parts) == p).all()
        for a in range(7):
            for b in range(a + 1, 7):
                assert not (parts[a] & parts[b]).any()


def test_representative():
    assert not representative(np.zeros(8, dtype=np.uint64)).any()
    p = np.zeros(8, dtype=np.uint64)
    p[5] = 17
    r = representative(p)
    assert r[5] == 1 and r.sum() == 1
    rng = np.random.default_rng(1)
    for _ in range(20):
        q = rng.integers(0, 9, 32).astype(np.uint64)
        assert (representative(representative(q)) == representative(q)).all()


def test_poly_multiply_basics():
    p = np.zeros(8, dtype=np.uint64)
    p[1] = 1
    one = np.zeros(8, dtype=np.uint64)
    one[0] = 1
    assert (poly_multiply(p, one) == p).all()
    q = np.zeros(8, dtype=np.uint64)
    q[2] = 1
    prod = poly_multiply(p, q)
    assert np.flatnonzero(prod).tolist() == [0b011]


def test_poly_multiply_matches_schoolbook():
    rng = np.random.default_rng(2)
    for m in range(1, 11):
        size = 1 << m
        p = np.where(rng.random(size) < 0.2, rng.integers(1, 5, size), 0).astype(np.uint64)
        q = np.where(rng.random(size) < 0.2, rng.integers(1, 5, size), 0).astype(np.uint64)
        ref = [0] * size
        for i in np.flatnonzero(p).tolist():
            for j in np.flatnonzero(q).tolist():
                if i + j < size:
                    ref[i + j] += int(p[i]) * int(q[j])
        assert poly_multiply(p, q).tolist() == ref


@settings(max_examples=300)
@given(st.integers(0, 2 ** 14 - 1), st.integers(0, 2 ** 14 - 1))
def test_popcount_additivity_iff_disjoint(s1, s2):
    additive = (s1 + s2).bit_count() == s1.bit_count() + s2.bit_count()
    assert additive == (s1 & s2 == 0)


def test_trivial_cases():
    inst = Instance([], ["x"], [], ConflictGraph(1), 1)
    assert solve_fpt_items(inst).verdict
    one = Instance.build([[3, 4]], [(0, 1)], eta=4)
    rep = solve_fpt_items(one)
    assert rep.verdict and rep.certificate.bundles == {"a0": frozenset({"x1"})}
    assert not solve_fpt_items(one.replace(eta=5)).verdict


def test_forced_pairing():
    inst = Instance.build([[5, 0], [0, 5]], eta=5)
    rep = solve_fpt_items(inst)
    assert rep.certificate.bundles == {"a0": frozenset({"x0"}), "a1": frozenset({"x1"})}


def test_n1_extraction_takes_smallest_mask():
    inst = Instance.build([[2, 3, 5, 1]], eta=5)
    families = build_bundle_families(inst)
    rounds = round_polynomials(inst, families)
    alloc = extract_assignment(inst, rounds, families)
    # the smallest popcount with a feasible bundle is 1 ({x2}); it is the only singleton
    assert alloc.bundles == {"a0": frozenset({"x2"})}


def test_matches_subset_dp_with_and_without_cap():
    for seed in range(500):
        r = random.Random(seed)
        m = r.randint(1, 10)
        cap = r.choice([None, r.randint(1, m)])
        inst = gen_random(m, r.randint(1, 4), r.choice([0.2, 0.5, 0.8]), 10,
                          r.randint(1, 20), seed, bundle_cap=cap)
        assert agrees(solve_fpt_items(inst), subset_dp_cffa(inst), inst)


def test_matches_brute_and_extractions_verify():
    for inst in general(300, seed0=5000, caps=(None, 2)):
        rep = solve_fpt_items(inst)
        assert agrees(rep, brute_force_cffa(inst), inst)


def test_representative_reduction_never_changes_verdict():
    for inst in general(150, seed0=9000, max_m=7):
        reduced = solve_fpt_items(inst, engine="schoolbook", reduce=True)
        raw = solve_fpt_items(inst, engine="schoolbook", reduce=False)
        fast = solve_fpt_items(inst)
        assert reduced.verdict == raw.verdict == fast.verdict
        if raw.verdict:
            assert verify_allocation(inst, raw.certificate)


def test_agent_order_does_not_matter():
    for inst in general(150, seed0=7000):
        order = list(range(inst.n))[::-1]
        flipped = Instance([inst.agents[i] for i in order], inst.jobs,
                           [inst.utilities[i] for i in order], inst.conflict, inst.eta,
                           inst.bundle_cap)
        assert solve_fpt_items(inst).verdict == solve_fpt_items(flipped).verdict
