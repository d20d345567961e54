"""CFFA in O*(2^m) time through characteristic-vector polynomials.

A job set S is the monomial y^chi(S), chi(S) being its bitmask read as an
integer. Multiplying two monomials adds exponents, and the sum keeps the
popcount |S1| + |S2| exactly when S1 and S2 are disjoint (any shared bit
produces a carry). So projecting a product onto popcount ``s`` keeps
precisely the disjoint unions of total size ``s``.

Polynomials are numpy arrays of length 2^m indexed by exponent.

Round ``i`` keeps, for every size ``s``, the 0/1 polynomial ``p[i][s]``
whose monomials are unions of disjoint feasible bundles for agents
``0..i``. Round ``i`` is built from round ``i-1`` and agent ``i``'s
feasible bundles stratified by size.

Two engines compute a round:

``"zeta"`` (default)
    ranked zeta / Moebius transforms, O(m^2 2^m) per round. Arithmetic is
    done in uint64 and wraps modulo 2^64, which is exact here: every
    coefficient of interest is a count below 2^m * (m + 1).
``"schoolbook"``
    literal :func:`poly_multiply` + :func:`hamming_projection`, only for
    small ``m``; supports turning off the 0/1 reduction between rounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit

from .errors import CapacityError, InternalError
from .model import Allocation, Instance, SolveReport, Stopwatch, bits, finish

MAX_M = 30
SATURATION = np.uint64(1 << 62)


def popcounts(m: int) -> np.ndarray:
    pc = np.zeros(1 << m, dtype=np.uint8)
    for b in range(m):
        pc[1 << b: 2 << b] = pc[: 1 << b] + 1
    return pc


@dataclass(frozen=True)
class BundleFamily:
    """Feasible bundles of one agent, as an indicator over all 2^m masks."""

    agent: int
    indicator: np.ndarray

    @cached_property
    def masks_by_size(self) -> dict:
        m = self.indicator.size.bit_length() - 1
        pc = popcounts(m)
        idx = np.flatnonzero(self.indicator)
        out = {}
        for mask, size in zip(idx.tolist(), pc[idx].tolist()):
            out.setdefault(size, []).append(mask)
        return out

    def stratum(self, size: int, pc: np.ndarray) -> np.ndarray:
        return self.indicator & (pc == size)


def build_bundle_families(inst: Instance) -> list[BundleFamily]:
    """For each agent, mark every independent mask of utility >= eta (and <= cap)."""
    m = inst.m
    if m > MAX_M:
        raise CapacityError(f"subset convolution supports m <= {MAX_M}, got {m}")
    size = 1 << m
    pc = popcounts(m)
    independent = np.ones(size, dtype=np.bool_)
    adj = inst.conflict.adjacency
    for b in range(m):
        lower_nbrs = adj[b] & ((1 << b) - 1)
        low = np.arange(1 << b, dtype=np.int64)
        independent[1 << b: 2 << b] = independent[: 1 << b] & ((low & lower_nbrs) == 0)
    base = independent.copy()
    base[0] = False
    if inst.bundle_cap is not None:
        base &= pc <= inst.bundle_cap
    families = []
    for a in range(inst.n):
        util = np.zeros(size, dtype=np.int64)
        row = inst.utilities[a]
        for b in range(m):
            util[1 << b: 2 << b] = util[: 1 << b] + row[b]
        families.append(BundleFamily(a, base & (util >= inst.eta)))
    return families


def hamming_projection(p: np.ndarray, h: int) -> np.ndarray:
    """Zero every coefficient whose exponent does not have popcount ``h``."""
    m = p.size.bit_length() - 1
    return np.where(popcounts(m) == h, p, 0).astype(p.dtype)


def representative(p: np.ndarray) -> np.ndarray:
    """Clamp coefficients to {0, 1}."""
    return (p != 0).astype(p.dtype)


def poly_multiply(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Integer product truncated to exponents below 2^m, saturating at 2^62.

    Schoolbook over the support of the sparser operand.
    """
    if p.size != q.size:
        raise ValueError("polynomials must have the same length")
    p = np.minimum(p.astype(np.uint64), SATURATION)
    q = np.minimum(q.astype(np.uint64), SATURATION)
    if np.count_nonzero(p) > np.count_nonzero(q):
        p, q = q, p
    size = p.size
    out = np.zeros(size, dtype=np.uint64)
    for i in np.flatnonzero(p).tolist():
        c = p[i]
        tail = q[: size - i]
        limit = SATURATION // c
        prod = np.where(tail > limit, SATURATION, tail * c)
        out[i:] = np.minimum(out[i:] + prod, SATURATION)
    return out


BLOCK_BITS = 13  # 64 KiB of uint64: low bits are transformed block by block in cache


@njit(cache=True)
def _butterfly(a, lo, hi, step, sign):
    for base in range(lo, hi, step << 1):
        if sign > 0:
            for t in range(base, base + step):
                a[t + step] += a[t]
        else:
            for t in range(base, base + step):
                a[t + step] -= a[t]


@njit(cache=True)
def _butterfly2(a, size, step, sign):
    """Bits j and j+1 (step = 2^j) in a single sweep."""
    for base in range(0, size, step << 2):
        for t in range(base, base + step):
            x0, x1, x2, x3 = a[t], a[t + step], a[t + 2 * step], a[t + 3 * step]
            if sign > 0:
                x1 += x0
                x3 += x2
                x2 += x0
                x3 += x1
            else:
                x1 -= x0
                x3 -= x2
                x2 -= x0
                x3 -= x1
            a[t + step], a[t + 2 * step], a[t + 3 * step] = x1, x2, x3


@njit(cache=True)
def _low_bits(a, lo, hi, bits_, sign):
    for j in range(bits_):
        _butterfly(a, lo, hi, 1 << j, sign)


@njit(cache=True)
def _high_bits(a, low, m, sign):
    j = low
    while j + 1 < m:
        _butterfly2(a, a.size, 1 << j, sign)
        j += 2
    if j < m:
        _butterfly(a, 0, a.size, 1 << j, sign)


@njit(cache=True)
def _transform(rows, m, sign):
    """In-place subset-sum (sign=1) or Moebius (sign=-1) transform of each row."""
    k, size = rows.shape
    low = min(m, BLOCK_BITS)
    block = 1 << low
    for r in range(k):
        a = rows[r]
        for lo in range(0, size, block):
            _low_bits(a, lo, lo + block, low, sign)
        _high_bits(a, low, m, sign)


@njit(cache=True)
def _ranked_round(zp, p_sizes, zf, f_sizes, pc, m, out_sizes, out):
    """Moebius of sum_{s'+s''=s} zp[s'] * zf[s''], kept where popcount == s."""
    size = zp.shape[1]
    low = min(m, BLOCK_BITS)
    block = 1 << low
    acc = np.empty(size, dtype=np.uint64)
    for o in range(out_sizes.size):
        s = out_sizes[o]
        # products and the low-bit Moebius steps are fused per cache block
        for lo in range(0, size, block):
            acc[lo: lo + block] = 0
            for a in range(p_sizes.size):
                for b in range(f_sizes.size):
                    if p_sizes[a] + f_sizes[b] == s:
                        for t in range(lo, lo + block):
                            acc[t] += zp[a, t] * zf[b, t]
            _low_bits(acc, lo, lo + block, low, -1)
        _high_bits(acc, low, m, -1)
        for t in range(size):
            out[o, t] = acc[t] != 0 and pc[t] == s


def _round_zeta(prev: dict, fam: dict, m: int, pc: np.ndarray) -> dict:
    """One round: for each size s, the disjoint unions prev[s'] (+) fam[s - s']."""
    if not prev or not fam:
        return {}
    p_sizes = np.array(sorted(prev), dtype=np.int64)
    f_sizes = np.array(sorted(fam), dtype=np.int64)
    zp = np.stack([prev[s] for s in p_sizes.tolist()]).astype(np.uint64)
    zf = np.stack([fam[s] for s in f_sizes.tolist()]).astype(np.uint64)
    _transform(zp, m, 1)
    _transform(zf, m, 1)
    reachable = {int(a + b) for a in p_sizes for b in f_sizes if a + b <= m}
    out_sizes = np.array(sorted(reachable), dtype=np.int64)
    out = np.zeros((out_sizes.size, 1 << m), dtype=np.bool_)
    _ranked_round(zp, p_sizes, zf, f_sizes, pc, m, out_sizes, out)
    return {int(s): out[k] for k, s in enumerate(out_sizes.tolist()) if out[k].any()}


def _round_schoolbook(prev: dict, fam: dict, m: int, reduce: bool) -> dict:
    out = {}
    for s in range(1, m + 1):
        acc = None
        for sp, p in prev.items():
            f = fam.get(s - sp)
            if f is None:
                continue
            term = hamming_projection(poly_multiply(p, f), s)
            acc = term if acc is None else np.minimum(acc + term, SATURATION)
        if acc is not None and acc.any():
            out[s] = representative(acc) if reduce else acc
    return out


def round_polynomials(inst: Instance, families, engine: str = "zeta", reduce: bool = True):
    """All round polynomials: ``rounds[i][s]`` for agent prefix ``0..i``."""
    m = inst.m
    pc = popcounts(m)
    rounds = []
    prev = None
    for fam in families:
        strata = {}
        for s in range(1, m + 1):
            f = fam.stratum(s, pc)
            if f.any():
                strata[s] = f.astype(np.uint64) if engine == "schoolbook" else f
        if prev is None:
            cur = strata
        elif engine == "zeta":
            cur = _round_zeta(prev, strata, m, pc)
        elif engine == "schoolbook":
            cur = _round_schoolbook(prev, strata, m, reduce)
        else:
            raise ValueError(f"unknown engine {engine!r}")
        rounds.append(cur)
        prev = cur
        if not cur:
            break
    return rounds


def _submasks(e: int) -> np.ndarray:
    subs = np.zeros(1, dtype=np.int64)
    for b in bits(e):
        subs = np.concatenate([subs, subs | (1 << b)])
    return subs


def extract_assignment(inst: Instance, rounds, families) -> Allocation:
    """Backtrack from the last round to round 0, smallest bundle mask first."""
    n = inst.n
    last = rounds[n - 1]
    sizes = sorted(s for s, p in last.items() if p.any())
    if not sizes:
        raise InternalError("extraction requested on an all-zero final round")
    s = sizes[0]
    e = int(np.flatnonzero(last[s])[0])
    pc = popcounts(inst.m)
    masks = [0] * n
    for i in range(n - 1, 0, -1):
        subs = _submasks(e)
        subs = subs[families[i].indicator[subs]]
        best = None
        for sub in np.sort(subs).tolist():
            rest = e ^ sub
            prev = rounds[i - 1].get(s - int(pc[sub]))
            if prev is not None and prev[rest]:
                best = sub
                break
        if best is None:
            raise InternalError(f"no backtrack step at round {i} for exponent {e:#x}")
        masks[i] = best
        e ^= best
        s -= int(pc[best])
    if not families[0].indicator[e] or int(pc[e]) != s:
        raise InternalError("round-0 exponent is not a feasible bundle")
    masks[0] = e
    return Allocation.from_masks(inst, masks)


def solve_fpt_items(inst: Instance, engine: str = "zeta", reduce: bool = True) -> SolveReport:
    clock = Stopwatch()
    if inst.m > MAX_M:
        raise CapacityError(f"subset convolution supports m <= {MAX_M}, got {inst.m}")
    if inst.n == 0:
        return finish(inst, "subsetconv", [], clock, rounds=0)
    if inst.n > inst.m:
        return finish(inst, "subsetconv", None, clock, rounds=0)
    families = build_bundle_families(inst)
    rounds = round_polynomials(inst, families, engine=engine, reduce=reduce)
    cells = sum(len(r) for r in rounds) << inst.m
    if len(rounds) < inst.n or not rounds[-1]:
        return finish(inst, "subsetconv", None, clock, rounds=len(rounds), cells=cells)
    if not reduce:
        rounds = [{s: p != 0 for s, p in r.items()} for r in rounds]
    alloc = extract_assignment(inst, rounds, families)
    masks = alloc.index_masks(inst)
    return finish(inst, "subsetconv", [masks[i] for i in range(inst.n)], clock,
                  rounds=len(rounds), cells=cells)
