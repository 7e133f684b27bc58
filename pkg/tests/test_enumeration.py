import math
from itertools import product

import numpy as np
import pytest

from specmix.complexes import gen_hypergraph
from specmix.enumeration import (
    MODE_HYPER_MARGIN,
    MODE_HYPER_RHO,
    decode_state,
    encode_labels,
    permanent_table,
    set_partitions,
    sweep_disjoint,
    sweep_overlapping,
    sweep_pairs_matrix,
)
from specmix.forms import count_e


def test_state_codec_roundtrip():
    for idx in range(0, 4**5, 37):
        assert encode_labels(decode_state(idx, 5, 4), 4) == idx
    assert decode_state(1, 3, 3) == [0, 0, 1]


def test_set_partition_counts():
    assert [len(set_partitions(k)) for k in range(1, 6)] == [1, 2, 5, 15, 52]


def test_permanent_table_small():
    t = permanent_table(2)
    # masks (3, 3): both vertices fit both slots -> 2 bijections
    assert t[3 * 4 + 3] == 2
    assert t[1 * 4 + 2] == 1 and t[2 * 4 + 1] == 1 and t[1 * 4 + 1] == 0


@pytest.mark.parametrize("k,n", [(2, 6), (3, 5)])
def test_sweeps_match_bruteforce(k, n):
    alpha, lam = 0.4, 1.3
    for seed in range(2):
        H = gen_hypergraph("gnp", n, k, alpha=0.5, seed=seed)
        best, margin = -1.0, np.inf
        for masks in product(range(1 << k), repeat=n):
            V = [[v for v in range(n) if masks[v] >> i & 1] for i in range(k)]
            e = count_e(H, *V)
            eK = sum(1 for t in product(*V) if len(set(t)) == k)
            P = math.prod(len(x) for x in V)
            lhs = abs(e - alpha * eK)
            margin = min(margin, lam * math.sqrt(P) - lhs)
            if P:
                best = max(best, lhs / math.sqrt(P))
        out = sweep_overlapping(n, k, H.edge_array(), alpha, lam)
        assert out["best"] == pytest.approx(best, abs=1e-12)
        assert out["min_margin"] == pytest.approx(margin, abs=1e-12)

        rho = -1.0
        for labels in product(range(k + 1), repeat=n):
            V = [[v for v in range(n) if labels[v] == i + 1] for i in range(k)]
            P = math.prod(len(x) for x in V)
            if P:
                rho = max(rho, abs(count_e(H, *V) - alpha * P) / math.sqrt(P))
        assert sweep_disjoint(n, k, H.edge_array(), alpha, MODE_HYPER_RHO)["best"] == pytest.approx(rho, abs=1e-12)


def test_sweep_independent_of_workers():
    H = gen_hypergraph("gnp", 9, 3, alpha=0.5, seed=5)
    outs = [sweep_disjoint(9, 3, H.edge_array(), 0.5, MODE_HYPER_MARGIN, lam=2.0, bins=10, workers=w)
            for w in (1, 3, 8)]
    assert outs[0] == outs[1] == outs[2]


def test_pairs_sweep_matches_bruteforce():
    rng = np.random.default_rng(3)
    n = 7
    M = rng.normal(size=(n, n))
    M = M + M.T
    np.fill_diagonal(M, 0)
    best = -1.0
    for labels in product(range(3), repeat=n):
        S = [v for v in range(n) if labels[v] == 1]
        T = [v for v in range(n) if labels[v] == 2]
        if S and T:
            best = max(best, abs(M[np.ix_(S, T)].sum()) / math.sqrt(len(S) * len(T)))
    got, idx = sweep_pairs_matrix(M)
    assert got == pytest.approx(best, abs=1e-12)
    labels = decode_state(idx, n, 3)
    S = [v for v in range(n) if labels[v] == 1]
    T = [v for v in range(n) if labels[v] == 2]
    assert abs(M[np.ix_(S, T)].sum()) / math.sqrt(len(S) * len(T)) == pytest.approx(got, abs=1e-12)
