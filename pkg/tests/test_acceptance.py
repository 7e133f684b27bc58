"""Acceptance criteria 1-11. Each test records PASS/FAIL in the terminal summary."""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from specmix.cli import main
from specmix.complexes import Hypergraph, SimplicialComplex, degree_profile, gen_complex, gen_hypergraph
from specmix.forms import d_norm_bounds, make_form, spectral_norm_estimate
from specmix.hypergraph_mixing import random_rho_experiment, rho_alpha, verify_fw_comparison, verify_inverse_hypergraph
from specmix.lemmas import (
    DyadicVector,
    partition_identity_check,
    random_dyadic_vector,
    random_subsets,
    rounding_statistics,
    sanity_bound_holds,
)
from specmix.simplicial import kernel_basis, operator_matrix, restricted_norm, row_l1_norms
from specmix.simplicial_mixing import count_F, rho_simplicial, verify_mixing_simplicial

pytestmark = pytest.mark.acceptance


def _regular_graph(n, offsets):
    edges = {tuple(sorted((i, (i + s) % n))) for i in range(n) for s in offsets}
    return SimplicialComplex(n, 1, sorted(edges))


def _petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return SimplicialComplex(10, 1, [tuple(sorted(e)) for e in outer + spokes + inner])


def _test_complexes():
    out = [gen_complex("complete", n, d) for n, d in [(5, 1), (6, 1), (5, 2), (6, 2), (7, 2), (6, 3), (7, 3)]]
    out += [gen_complex("lm", n, d, p=p, seed=s) for n, d in [(6, 2), (7, 2), (7, 3)] for p in (0.3, 0.6)
            for s in (1, 2)]
    out += [gen_complex("empty", 6, 2)]
    return out


@pytest.mark.criterion(1)
def test_c01_simplicial_mixing_exact(criterion):
    start = time.perf_counter()
    cases = [gen_complex("complete", n, d) for n, d in [(6, 2), (8, 2), (7, 3)]]
    cases += [gen_complex("lm", 7, 2, p=p, seed=s) for p in (0.3, 0.6) for s in range(1, 6)]
    worst = math.inf
    for X in cases:
        prof = degree_profile(X)
        for alpha in sorted({0.0, float(prof.max), X.n / 2}):
            rep = verify_mixing_simplicial(X, alpha, bins=0)
            worst = min(worst, rep.min_margin)
    elapsed = time.perf_counter() - start
    print(f"min margin {worst:.3e}, {elapsed:.1f}s")
    assert worst >= -1e-8
    assert elapsed < 120


@pytest.mark.criterion(2)
def test_c02_complete_complex_witness(criterion):
    for n in range(6, 11):
        for d in (1, 2):
            X = gen_complex("complete", n, d)
            rep = rho_simplicial(X, n - d, "singleton-tail")
            sizes = [len(p) for p in rep.witness]
            dev = Fraction(count_F(X, rep.witness)) - Fraction(n - d, n) * math.prod(sizes)
            # rho >= d(n-d)/(2n)  <=>  dev^2 >= (d(n-d)/(2n))^2 |S0||S1| |S2..Sd|^2
            tail = math.prod(sizes[2:])
            target = Fraction(d * (n - d), 2 * n)
            assert dev * dev >= target * target * sizes[0] * sizes[1] * tail * tail, (n, d, sizes)


@pytest.mark.criterion(3)
def test_c03_kernel_identities(criterion):
    for X in _test_complexes():
        Z = kernel_basis(X)
        if Z.dim:
            J = operator_matrix(X, "J").matrix
            assert np.abs(J @ Z.basis).max() <= 1e-8
        A = operator_matrix(X, "A").matrix
        D = operator_matrix(X, "D").matrix
        L = operator_matrix(X, "laplacian").matrix
        assert np.array_equal(L, D - A)
    empty = gen_complex("empty", 6, 2)
    assert restricted_norm(operator_matrix(empty, "A"), kernel_basis(empty)) == 0


@pytest.mark.criterion(4)
def test_c04_b_matrix_rows(criterion):
    regular = [gen_complex("complete", n, d) for n, d in [(5, 1), (8, 1), (5, 2), (6, 2), (7, 2), (6, 3), (7, 3)]]
    regular += [_regular_graph(n, offs) for n, offs in [(6, [1]), (9, [1, 2]), (10, [1, 3]), (12, [2, 5])]]
    regular += [_petersen()]
    for X in regular:
        prof = degree_profile(X)
        assert prof.regular
        rows = row_l1_norms(operator_matrix(X, "b_matrix"))
        assert np.all(rows <= 2 * X.d * prof.max), (X.n, X.d, rows.max())


@pytest.mark.criterion(5)
def test_c05_graph_regression(criterion):
    for n in range(5, 11):
        X = gen_complex("complete", n, 1)
        assert restricted_norm(operator_matrix(X, "A"), kernel_basis(X)) == pytest.approx(1.0, abs=1e-8)
    for seed in range(1, 21):
        n = 5 + (seed * 7) % 16
        p = 0.2 + 0.03 * seed
        H = gen_hypergraph("gnp", n, 2, alpha=p, seed=seed)
        phi = make_form("alpha_density", H=H, alpha=p)
        est = spectral_norm_estimate(phi)
        exact = float(np.abs(np.linalg.eigvalsh(phi.dense())).max())
        assert abs(est.value - exact) <= 1e-6, (seed, n, est.value, exact)
    for n, offs in [(6, [1]), (8, [1]), (9, [1, 2]), (10, [1, 3]), (12, [2, 5]), (7, [1, 2, 3])]:
        G = _regular_graph(n, offs)
        rep = verify_fw_comparison(Hypergraph(n, 2, G.facets))
        assert rep.details["checks"]["gap_within_limit"], rep.details
    rep = verify_fw_comparison(Hypergraph(10, 2, _petersen().facets))
    assert rep.details["checks"]["gap_within_limit"]


@pytest.mark.criterion(6)
def test_c06_d_norm_sandwich(criterion):
    for n, k in [(6, 2), (8, 3), (10, 3), (8, 4)]:
        lo, hi = d_norm_bounds(n, k)
        est = spectral_norm_estimate(make_form("diagonal_gap", n=n, k=k))
        assert lo - 1e-9 <= est.value <= hi + 1e-9, (n, k, lo, est.value, hi)
        if k == 2:
            assert est.value == pytest.approx(1.0, abs=1e-8)


def _criterion7_instances():
    out = [(n, 3, s) for n in (8, 10) for s in range(1, 11)]
    out += [(10, 4, s) for s in range(1, 4)]
    return out


_INVERSE = {}


def _inverse_reports():
    if not _INVERSE:
        for n, k, s in _criterion7_instances():
            H = gen_hypergraph("gnp", n, k, alpha=0.5, seed=s)
            _INVERSE[(n, k, s)] = verify_inverse_hypergraph(H, 0.5)
    return _INVERSE


@pytest.mark.criterion(7)
def test_c07_inverse_mixing_rigorous(criterion):
    failures = []
    for key, rep in _inverse_reports().items():
        b = rep.details["bound"]
        assert b["bound"] == pytest.approx(b["closed_form"], rel=1e-12)
        if not rep.passed:
            failures.append(key)
    assert failures == []


@pytest.mark.criterion(8)
def test_c08_estimate_covers_rho(criterion):
    bad = [key for key, rep in _inverse_reports().items()
           if rep.details["lambda_hat"] < rep.details["rho"]]
    assert bad == []


@pytest.mark.criterion(9)
def test_c09_random_rho(criterion):
    n, k, alpha = 10, 3, 0.5
    start = time.perf_counter()
    rep = random_rho_experiment(n, k, alpha, 100, estimate=False)
    elapsed = time.perf_counter() - start
    rows = rep.details["rows"]
    threshold = math.sqrt((n * math.log(4) + n) / 2)
    lower = alpha * (1 - alpha) / math.sqrt((1 - alpha) ** 2 + alpha**2) * math.sqrt(n - k + 1)
    below = sum(r["rho"] <= threshold for r in rows)
    above = sum(r["rho"] >= lower - 1e-12 for r in rows)
    print(f"{below}/100 below {threshold:.4f}, {above}/100 above {lower:.4f}, {elapsed:.0f}s")
    assert len(rows) == 100
    assert below >= 95
    assert above == 100
    assert elapsed < 600


@pytest.mark.criterion(10)
def test_c10_lemma_lab(criterion):
    for seed in range(1000):
        x = random_dyadic_vector(10, 16, seed)
        dv = DyadicVector.from_values(x)
        assert np.array_equal(dv.reconstruct(), x)
        assert dv.l1_from_layers() == np.abs(x).sum()
        assert dv.l2sq_from_layers() == np.sum(x * x)
    H = gen_hypergraph("gnp", 8, 3, alpha=0.5, seed=1)
    x = np.random.default_rng(10).uniform(-0.5, 0.5, 8)
    stats = rounding_statistics(x, 10_000, seed=1, phi=make_form("alpha_density", H=H, alpha=0.5))
    assert stats["norm_violations"] == 0
    assert stats["mean_within_tolerance"]
    for i in range(50):
        n = 5 + i % 3
        H = gen_hypergraph("gnp", n, 3, alpha=0.5, seed=100 + i)
        assert partition_identity_check(H, *random_subsets(n, 3, i)).passed
    generated = [gen_hypergraph("gnp", n, k, alpha=p, seed=s) for n, k in [(7, 2), (7, 3), (8, 3), (7, 4)]
                 for p in (0.3, 0.7) for s in (1, 2)]
    generated += [gen_hypergraph("complete", 6, 3), Hypergraph(6, 3, ())]
    for H in generated:
        for alpha in (0.0, 0.3, 0.5, 1.0):
            assert sanity_bound_holds(H, alpha, rho_alpha(H, alpha).rho)


def _strip(path):
    with open(path) as fh:
        doc = json.load(fh)
    doc.pop("runtime")
    return doc


@pytest.mark.criterion(11)
def test_c11_determinism(criterion, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["gen", "hypergraph", "--kind", "gnp", "--n", "8", "--k", "3", "--alpha", "0.5", "--seed", "1",
                 "--out", "h.json"]) == 0
    assert main(["gen", "complex", "--kind", "lm", "--n", "7", "--d", "2", "--p", "0.5", "--seed", "2",
                 "--out", "c.json"]) == 0
    runs = [
        ["verify", "mixing", "--in", "h.json", "--alpha", "0.5", "--starts", "8"],
        ["verify", "inverse", "--in", "h.json", "--alpha", "0.5", "--starts", "8"],
        ["verify", "lemmas", "--in", "h.json", "--alpha", "0.5", "--samples", "2000", "--instances", "5"],
        ["verify", "mixing", "--in", "c.json", "--alpha", "3"],
        ["discrepancy", "--in", "c.json", "--alpha", "3"],
        ["spectrum", "--in", "h.json", "--alpha", "0.5", "--starts", "8"],
        ["experiment", "random-rho", "--n", "7", "--k", "3", "--alpha", "0.5", "--seeds", "4", "--starts", "4"],
    ]
    for i, argv in enumerate(runs):
        assert main(argv + ["--workers", "2", "--out", f"r{i}.json"]) == 0
        for w in ("1", "8"):
            assert main(["rerun", f"r{i}.json", "--workers", w, "--out", f"r{i}_{w}.json"]) == 0
        ref = _strip(f"r{i}.json")
        assert _strip(f"r{i}_1.json") == ref, argv
        assert _strip(f"r{i}_8.json") == ref, argv
