"""Exhaustive sweeps over vertex-to-part assignments.

An assignment gives each vertex a label in ``0..base-1``. For disjoint-part
sweeps label 0 means "unused" and label ``i >= 1`` puts the vertex in part
``i``. States are numbered so that vertex 0 is the most significant digit;
numeric order of the state index is then the lexicographic order of the
assignment string, which is what witness tie-breaking uses.

All kernels are compiled with numba and release the GIL, so chunks of the
state range run on a thread pool. Every reduction is (max value, smallest
index) or an exact float min, so the outcome does not depend on how the range
is chunked or how many workers ran.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from itertools import permutations
from math import factorial

import numba as nb
import numpy as np

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceeded",
    "resolve_workers",
    "check_budget",
    "decode_state",
    "encode_labels",
    "sweep_disjoint",
    "sweep_overlapping",
    "sweep_pairs_matrix",
    "set_partitions",
    "MODE_HYPER_RHO",
    "MODE_SIMP_RHO",
    "MODE_SIMP_MARGIN",
    "MODE_HYPER_MARGIN",
]

DEFAULT_BUDGET = 10**8
NUM_CHUNKS = 64

MODE_HYPER_RHO = 0
MODE_SIMP_RHO = 1
MODE_SIMP_MARGIN = 2
MODE_HYPER_MARGIN = 3


class BudgetExceeded(RuntimeError):
    pass


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("SPECMIX_WORKERS", "1") or 1)
    return max(1, int(workers))


def check_budget(states: int, budget: int | None, force: bool) -> None:
    budget = DEFAULT_BUDGET if budget is None else budget
    if states > budget and not force:
        raise BudgetExceeded(f"{states} assignment states exceed the budget of {budget} (use force)")


def decode_state(idx: int, n: int, base: int) -> list[int]:
    labels = [0] * n
    for v in range(n - 1, -1, -1):
        labels[v] = idx % base
        idx //= base
    return labels


def encode_labels(labels, base: int) -> int:
    idx = 0
    for lab in labels:
        idx = idx * base + int(lab)
    return idx


def set_partitions(k: int):
    """All set partitions of ``range(k)`` as lists of blocks."""
    if k == 0:
        return [[]]
    out = []
    for part in set_partitions(k - 1):
        for i in range(len(part)):
            out.append(part[:i] + [part[i] + [k - 1]] + part[i + 1 :])
        out.append(part + [[k - 1]])
    return out


def _partition_tables(k: int):
    """Block bitmasks and Moebius coefficients for inclusion-exclusion over slots."""
    parts = set_partitions(k)
    blocks = np.full((len(parts), k), -1, dtype=np.int64)
    coef = np.zeros(len(parts))
    for p, part in enumerate(parts):
        c = 1
        for b, block in enumerate(part):
            blocks[p, b] = sum(1 << i for i in block)
            c *= (-1) ** (len(block) - 1) * factorial(len(block) - 1)
        coef[p] = c
    return blocks, coef


# ---------------------------------------------------------------- kernels


@nb.njit(cache=True, nogil=True)
def _edge_flag(labels, edges, e, full):
    mask = 0
    for j in range(edges.shape[1]):
        mask |= 1 << labels[edges[e, j]]
    return 1 if mask == full else 0


@nb.njit(cache=True, nogil=True)
def _disjoint_kernel(n, nparts, edges, inc_ptr, inc, lo, hi, alpha, mode, tail, lam, hist_lo, hist_hi, hist):
    base = nparts + 1
    labels = np.zeros(n, dtype=np.int64)
    rem = lo
    for v in range(n - 1, -1, -1):
        labels[v] = rem % base
        rem //= base
    sizes = np.zeros(base, dtype=np.int64)
    for v in range(n):
        sizes[labels[v]] += 1
    full = (1 << base) - 2
    m = edges.shape[0]
    flags = np.zeros(m, dtype=np.int64)
    cnt = 0
    for e in range(m):
        flags[e] = _edge_flag(labels, edges, e, full)
        cnt += flags[e]
    nbins = hist.shape[0]
    best = -1.0
    best_idx = -1
    min_margin = np.inf
    min_idx = -1
    max_margin = -np.inf
    admitted = 0
    for idx in range(lo, hi):
        nonempty = True
        for i in range(1, base):
            if sizes[i] == 0:
                nonempty = False
                break
        ok = True
        if mode == MODE_HYPER_RHO or mode == MODE_SIMP_RHO:
            ok = nonempty
            if ok and tail:
                for i in range(3, base):
                    if sizes[i] != 1:
                        ok = False
                        break
        if ok:
            admitted += 1
            prod = 1
            for i in range(1, base):
                prod *= sizes[i]
            P = float(prod)
            if mode == MODE_HYPER_RHO:
                val = abs(cnt - alpha * P) / np.sqrt(P)
                if val > best:
                    best = val
                    best_idx = idx
            elif mode == MODE_HYPER_MARGIN:
                lhs = abs(cnt - alpha * P)
                margin = lam * np.sqrt(P) - lhs
                if margin < min_margin:
                    min_margin = margin
                    min_idx = idx
                if margin > max_margin:
                    max_margin = margin
                if nonempty:
                    val = lhs / np.sqrt(P)
                    if val > best:
                        best = val
                        best_idx = idx
                if hist_hi > hist_lo:
                    b = int((margin - hist_lo) / (hist_hi - hist_lo) * nbins)
                    hist[min(max(b, 0), nbins - 1)] += 1
            else:
                tailp = 1
                for i in range(3, base):
                    tailp *= sizes[i]
                lhs = abs(cnt - (alpha / n) * P)
                norm = np.sqrt(float(sizes[1] * sizes[2])) * float(tailp)
                if mode == MODE_SIMP_RHO:
                    val = lhs / norm
                    if val > best:
                        best = val
                        best_idx = idx
                else:
                    margin = lam * norm - lhs
                    if margin < min_margin:
                        min_margin = margin
                        min_idx = idx
                    if margin > max_margin:
                        max_margin = margin
                    if nonempty:
                        val = lhs / norm
                        if val > best:
                            best = val
                            best_idx = idx
                    if hist_hi > hist_lo:
                        b = int((margin - hist_lo) / (hist_hi - hist_lo) * nbins)
                        hist[min(max(b, 0), nbins - 1)] += 1
        # odometer step; edges are refreshed after each changed vertex, the
        # lowest changed vertex comes last so every touched edge ends up current
        v = n - 1
        while v >= 0:
            sizes[labels[v]] -= 1
            labels[v] += 1
            carry = labels[v] == base
            if carry:
                labels[v] = 0
            sizes[labels[v]] += 1
            for t in range(inc_ptr[v], inc_ptr[v + 1]):
                e = inc[t]
                f = _edge_flag(labels, edges, e, full)
                cnt += f - flags[e]
                flags[e] = f
            if carry:
                v -= 1
            else:
                break
    return best, best_idx, min_margin, min_idx, max_margin, admitted


@nb.njit(cache=True, nogil=True)
def _edge_code(masks, edges, e, base):
    code = 0
    for j in range(edges.shape[1]):
        code = code * base + masks[edges[e, j]]
    return code


@nb.njit(cache=True, nogil=True)
def _overlap_kernel(n, k, edges, inc_ptr, inc, table, blocks, coef, use_product, lo, hi, alpha, lam,
                    hist_lo, hist_hi, hist):
    base = 1 << k
    masks = np.zeros(n, dtype=np.int64)
    rem = lo
    for v in range(n - 1, -1, -1):
        masks[v] = rem % base
        rem //= base
    m = edges.shape[0]
    contrib = np.zeros(m, dtype=np.int64)
    e_total = 0
    for ed in range(m):
        contrib[ed] = table[_edge_code(masks, edges, ed, base)]
        e_total += contrib[ed]
    cnt_super = np.zeros(base, dtype=np.int64)
    for v in range(n):
        for b in range(base):
            if (masks[v] & b) == b:
                cnt_super[b] += 1
    nbins = hist.shape[0]
    best = -1.0
    best_idx = -1
    min_margin = np.inf
    min_idx = -1
    max_margin = -np.inf
    for idx in range(lo, hi):
        prod = 1
        for i in range(k):
            prod *= cnt_super[1 << i]
        P = float(prod)
        if use_product:
            ek = P
        else:
            ek = 0.0
            for p in range(blocks.shape[0]):
                term = coef[p]
                for b in range(k):
                    if blocks[p, b] < 0:
                        break
                    term *= cnt_super[blocks[p, b]]
                ek += term
        lhs = abs(e_total - alpha * ek)
        margin = lam * np.sqrt(P) - lhs
        if margin < min_margin:
            min_margin = margin
            min_idx = idx
        if margin > max_margin:
            max_margin = margin
        if prod > 0:
            val = lhs / np.sqrt(P)
            if val > best:
                best = val
                best_idx = idx
        if hist_hi > hist_lo:
            bb = int((margin - hist_lo) / (hist_hi - hist_lo) * nbins)
            hist[min(max(bb, 0), nbins - 1)] += 1
        v = n - 1
        while v >= 0:
            old = masks[v]
            new = old + 1
            carry = new == base
            if carry:
                new = 0
            masks[v] = new
            for b in range(base):
                if (old & b) == b:
                    cnt_super[b] -= 1
                if (new & b) == b:
                    cnt_super[b] += 1
            for t in range(inc_ptr[v], inc_ptr[v + 1]):
                ed = inc[t]
                c = table[_edge_code(masks, edges, ed, base)]
                e_total += c - contrib[ed]
                contrib[ed] = c
            if carry:
                v -= 1
            else:
                break
    return best, best_idx, min_margin, min_idx, max_margin, hi - lo


@nb.njit(cache=True, nogil=True)
def _pairs_kernel(n, M, lo, hi):
    labels = np.zeros(n, dtype=np.int64)
    rem = lo
    for v in range(n - 1, -1, -1):
        labels[v] = rem % 3
        rem //= 3
    best = -1.0
    best_idx = -1
    for idx in range(lo, hi):
        s = 0
        t = 0
        for v in range(n):
            if labels[v] == 1:
                s += 1
            elif labels[v] == 2:
                t += 1
        if s > 0 and t > 0:
            acc = 0.0
            for i in range(n):
                if labels[i] == 1:
                    for j in range(n):
                        if labels[j] == 2:
                            acc += M[i, j]
            val = abs(acc) / np.sqrt(float(s * t))
            if val > best:
                best = val
                best_idx = idx
        v = n - 1
        while v >= 0:
            labels[v] += 1
            if labels[v] == 3:
                labels[v] = 0
                v -= 1
            else:
                break
    return best, best_idx


# ---------------------------------------------------------------- drivers


def _chunks(total: int):
    step = max(1, -(-total // NUM_CHUNKS))
    return [(lo, min(total, lo + step)) for lo in range(0, total, step)]


def _run(fn, total: int, workers: int | None):
    chunks = _chunks(total)
    w = resolve_workers(workers)
    if w == 1 or len(chunks) == 1:
        return [fn(lo, hi) for lo, hi in chunks]
    with ThreadPoolExecutor(max_workers=w) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))


def _reduce(results):
    best, best_idx = -1.0, -1
    min_margin, min_idx, max_margin = np.inf, -1, -np.inf
    admitted = 0
    for b, bi, mm, mi, mx, adm in results:
        if b > best or (b == best and bi >= 0 and (best_idx < 0 or bi < best_idx)):
            best, best_idx = b, bi
        if mm < min_margin or (mm == min_margin and mi >= 0 and (min_idx < 0 or mi < min_idx)):
            min_margin, min_idx = mm, mi
        max_margin = max(max_margin, mx)
        admitted += adm
    return {
        "best": float(best),
        "best_idx": int(best_idx),
        "min_margin": float(min_margin),
        "min_idx": int(min_idx),
        "max_margin": float(max_margin),
        "admitted": int(admitted),
    }


def incidence(n: int, edges: np.ndarray):
    """CSR lists of the edges through each vertex."""
    lists = [[] for _ in range(n)]
    for e, row in enumerate(edges):
        for v in row:
            lists[v].append(e)
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(li) for li in lists])
    flat = np.array([e for li in lists for e in li], dtype=np.int64)
    return ptr, flat


def permanent_table(k: int) -> np.ndarray:
    """For k vertex masks (k bits each), the number of slot bijections they admit.

    Entry at code sum(mask_j * 2^(k(k-1-j))) counts permutations p with bit i
    of mask_{p(i)} set for every slot i.
    """
    base = 1 << k
    perms = list(permutations(range(k)))
    codes = np.indices((base,) * k).reshape(k, -1).T
    table = np.zeros(base**k, dtype=np.int64)
    for c, masks in enumerate(codes):
        table[c] = sum(1 for p in perms if all((masks[p[i]] >> i) & 1 for i in range(k)))
    return table


def sweep_disjoint(n, nparts, edges, alpha, mode, *, tail=False, lam=0.0, bins=0, workers=None):
    """Sweep all (nparts+1)^n assignments; see the MODE_* constants.

    With ``bins > 0`` a second pass fills a histogram of margins between the
    observed min and max margin.
    """
    edges = np.ascontiguousarray(np.asarray(edges, dtype=np.int64).reshape(-1, nparts))
    inc_ptr, inc = incidence(n, edges)
    total = (nparts + 1) ** n
    empty_hist = np.zeros(1, dtype=np.int64)

    def job(lo, hi, hl=0.0, hh=0.0, hist=empty_hist):
        return _disjoint_kernel(
            n, nparts, edges, inc_ptr, inc, lo, hi, float(alpha), mode, tail, float(lam), hl, hh, hist
        )

    out = _reduce(_run(job, total, workers))
    if bins and mode in (MODE_SIMP_MARGIN, MODE_HYPER_MARGIN):
        out["histogram"] = _histogram(job, total, out, bins, workers)
    return out


_TABLES: dict = {}


def sweep_overlapping(n, k, edges, alpha, lam, *, product=False, bins=0, workers=None):
    """Sweep all 2^(nk) tuples of (not necessarily disjoint) vertex subsets.

    Compares e(V_1..V_k) with ``alpha * e_K(V_1..V_k)``, or with
    ``alpha * prod |V_i|`` when ``product`` is set.
    """
    edges = np.ascontiguousarray(np.asarray(edges, dtype=np.int64).reshape(-1, k))
    inc_ptr, inc = incidence(n, edges)
    if k not in _TABLES:
        _TABLES[k] = permanent_table(k)
    table = _TABLES[k]
    blocks, coef = _partition_tables(k)
    total = 1 << (n * k)
    empty_hist = np.zeros(1, dtype=np.int64)

    def job(lo, hi, hl=0.0, hh=0.0, hist=empty_hist):
        return _overlap_kernel(
            n, k, edges, inc_ptr, inc, table, blocks, coef, bool(product), lo, hi, float(alpha), float(lam),
            hl, hh, hist,
        )

    out = _reduce(_run(job, total, workers))
    if bins:
        out["histogram"] = _histogram(job, total, out, bins, workers)
    return out


def _histogram(job, total, out, bins, workers):
    lo_edge, hi_edge = out["min_margin"], out["max_margin"]
    if not hi_edge > lo_edge:
        hi_edge = lo_edge + 1.0

    def hjob(lo, hi):
        h = np.zeros(bins, dtype=np.int64)
        job(lo, hi, lo_edge, hi_edge, h)
        return h

    hists = _run(hjob, total, workers)
    counts = np.sum(hists, axis=0)
    return {"edges": np.linspace(lo_edge, hi_edge, bins + 1).tolist(), "counts": counts.tolist()}


def sweep_pairs_matrix(M, workers=None):
    """max |<x, M y>| / (|x||y|) over disjoint nonempty 0/1 supports."""
    M = np.ascontiguousarray(np.asarray(M, dtype=float))
    n = M.shape[0]
    total = 3**n

    def job(lo, hi):
        b, bi = _pairs_kernel(n, M, lo, hi)
        return b, bi, np.inf, -1, -np.inf, 0

    out = _reduce(_run(job, total, workers))
    return out["best"], out["best_idx"]
