from fractions import Fraction
from itertools import permutations, product

import numpy as np
import pytest

from specmix.complexes import SimplicialComplex, gen_complex
from specmix.simplicial import kernel_basis, operator_matrix, restricted_norm
from specmix.simplicial_mixing import (
    count_F,
    count_F_bruteforce,
    rho_simplicial,
    simplicial_ratio,
    verify_inverse_simplicial,
    verify_mixing_simplicial,
    witness_value,
)


def rho_oracle(X, alpha, tail=False):
    """Plain Python max over every disjoint nonempty tuple."""
    best = 0.0
    for labels in product(range(X.d + 2), repeat=X.n):
        parts = [[v for v in range(X.n) if labels[v] == i + 1] for i in range(X.d + 1)]
        if any(not p for p in parts):
            continue
        if tail and any(len(p) != 1 for p in parts[2:]):
            continue
        best = max(best, simplicial_ratio(count_F_bruteforce(X, parts), [len(p) for p in parts], alpha, X.n))
    return best


def test_count_F_examples():
    X = gen_complex("complete", 4, 2)
    assert count_F(X, [[0], [1], [2]]) == 1
    assert count_F(X, [[0, 1], [2], [3]]) == 2
    assert count_F(X, [[], [1], [2]]) == 0
    with pytest.raises(ValueError):
        count_F(X, [[0, 1], [1], [2]])


def test_count_F_matches_bruteforce_and_is_additive():
    rng = np.random.default_rng(0)
    for s in range(10):
        X = gen_complex("lm", 8, 2, p=0.5, seed=s)
        labels = rng.integers(0, 5, size=8)
        parts = [[v for v in range(8) if labels[v] == i] for i in (1, 2, 3)]
        extra = [v for v in range(8) if labels[v] == 4]
        assert count_F(X, parts) == count_F_bruteforce(X, parts)
        merged = [parts[0] + extra, parts[1], parts[2]]
        assert count_F(X, merged) == count_F(X, parts) + count_F(X, [extra, parts[1], parts[2]])


def test_count_F_symmetric_in_parts():
    X = gen_complex("lm", 6, 2, p=0.5, seed=3)
    for labels in product(range(4), repeat=6):
        parts = [[v for v in range(6) if labels[v] == i + 1] for i in range(3)]
        F = count_F(X, parts)
        for perm in permutations(range(3)):
            assert count_F(X, [parts[i] for i in perm]) == F
        if labels[0] == 3:
            break


@pytest.mark.parametrize("n,d,p,seed,alpha", [(5, 1, 0.5, 1, 2.0), (6, 2, 0.5, 2, 1.5), (5, 2, 0.7, 3, 2.0)])
def test_rho_matches_oracle(n, d, p, seed, alpha):
    X = gen_complex("lm", n, d, p=p, seed=seed)
    rep = rho_simplicial(X, alpha)
    assert rep.rho == pytest.approx(rho_oracle(X, alpha), abs=1e-12)
    assert witness_value(X, rep.witness, alpha) == rep.rho
    tail = rho_simplicial(X, alpha, "singleton-tail")
    assert tail.rho == pytest.approx(rho_oracle(X, alpha, tail=True), abs=1e-12)
    sample = rho_simplicial(X, alpha, ("sample", 500, 7))
    assert rep.rho >= tail.rho - 1e-15 or d == 1
    assert rep.rho >= sample.rho


def test_rho_examples():
    assert rho_simplicial(gen_complex("empty", 6, 2), 0.0).rho == 0
    # graph case: K_6 with coefficient alpha/n = 5/6 on |S||T|
    rep = rho_simplicial(gen_complex("complete", 6, 1), 5.0)
    assert rep.rho == pytest.approx(0.5, abs=1e-12)
    assert sorted(len(p) for p in rep.witness) == [3, 3]


def test_complete_complex_witness_bound_exact():
    for n in range(6, 10):
        for d in (1, 2):
            X = gen_complex("complete", n, d)
            rep = rho_simplicial(X, n - d, "singleton-tail")
            sizes = [len(p) for p in rep.witness]
            F = count_F(X, rep.witness)
            dev = Fraction(F) - Fraction(n - d, n) * np.prod(sizes)
            tail = int(np.prod(sizes[2:])) if d > 1 else 1
            target = Fraction(d * (n - d), 2 * n)
            assert dev * dev >= target * target * sizes[0] * sizes[1] * tail * tail


def test_verify_mixing_examples():
    rep = verify_mixing_simplicial(gen_complex("complete", 6, 2), 4.0)
    assert rep.passed and rep.min_margin >= -1e-8
    rep = verify_mixing_simplicial(gen_complex("empty", 5, 2), 0.0)
    assert rep.passed and rep.min_margin == 0
    rep = verify_mixing_simplicial(gen_complex("complete", 6, 1), 5.0)
    assert rep.details["rho_alpha"] == pytest.approx(1.0, abs=1e-10)
    assert rep.passed
    assert sum(rep.histogram["counts"]) == 3**6


def test_verify_mixing_random_complexes():
    for s in range(1, 4):
        X = gen_complex("lm", 7, 2, p=0.5, seed=s)
        rep = verify_mixing_simplicial(X, 2.5)
        assert rep.passed, rep.min_margin
        assert rep.details["max_discrepancy_ratio"] <= rep.details["rho_alpha"] + 1e-9


def test_verify_inverse_examples():
    for n in (6, 8):
        rep = verify_inverse_simplicial(gen_complex("complete", n, 2))
        assert rep.passed
        assert np.isfinite(rep.fitted_constant)
    rep = verify_inverse_simplicial(gen_complex("empty", 6, 2))
    assert rep.passed and rep.details["norm_A_on_cycles"] == 0
    cycle = SimplicialComplex(6, 1, [(i, (i + 1) % 6) for i in range(6)])
    rep = verify_inverse_simplicial(cycle)
    assert rep.passed and np.isfinite(rep.fitted_constant)
    Z = kernel_basis(cycle)
    assert rep.details["norm_A_on_cycles"] == pytest.approx(restricted_norm(operator_matrix(cycle, "A"), Z))
    assert rep.details["norm_A_on_cycles"] == pytest.approx(2.0)


def test_budget_guard():
    from specmix.enumeration import BudgetExceeded

    with pytest.raises(BudgetExceeded):
        rho_simplicial(gen_complex("complete", 8, 2), 6.0, budget=1000)
