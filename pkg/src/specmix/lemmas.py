"""Constructive pieces of the inverse-mixing argument, as testable functions.

Covers splitting {0, +-1} vectors by sign, dyadic layer decomposition and the
P/Q split of layer indices, randomized dyadic rounding, the partition
averaging identity, the composed rigorous bound on the norm of A - alpha A_K,
and a hypotheses checker for the matrix (k=2) version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from .complexes import Hypergraph, counter_uniforms, degree_profile
from .enumeration import check_budget, decode_state, sweep_pairs_matrix
from .reports import DEGENERATE_RHO, VerificationReport

__all__ = [
    "sign_split",
    "DyadicVector",
    "dyadic_decompose",
    "dyadic_reconstruct",
    "dyadic_index_split",
    "gamma_choice",
    "powers_of_two_bound",
    "expansion_factor",
    "zero_pm_one_factor",
    "continuum_factor",
    "inverse_mixing_bound",
    "randomized_round",
    "randomized_round_samples",
    "partition_identity_check",
    "bilu_linial_check",
    "random_dyadic_vector",
    "random_subsets",
    "rounding_statistics",
    "verify_lemmas",
]


def sign_split(x) -> tuple[np.ndarray, np.ndarray]:
    """x = x_plus - x_minus with both parts 0/1 and disjoint supports."""
    x = np.asarray(x)
    bad = ~np.isin(x, (-1, 0, 1))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"entry {i} is {x[i]!r}; expected 0 or +-1")
    return (x > 0).astype(np.int8), (x < 0).astype(np.int8)


# ---------------------------------------------------------------- dyadic vectors


def _dyadic_levels(x: np.ndarray) -> np.ndarray:
    """Level l with |x_i| = 2^-l, or -1 for zeros. Rejects anything else."""
    x = np.asarray(x, dtype=float)
    mant, expo = np.frexp(np.abs(x))
    nz = x != 0
    ok = ~nz | ((mant == 0.5) & (expo <= 1))
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        raise ValueError(f"entry {i} = {x[i]!r} is not 0 or +-2^-l with l >= 0")
    return np.where(nz, 1 - expo, -1)


def dyadic_decompose(x) -> list[np.ndarray]:
    """Layers x^0, x^1, ... in {0, +-1}^n with x = sum_i 2^-i x^i."""
    x = np.asarray(x, dtype=float)
    levels = _dyadic_levels(x)
    top = int(levels.max()) if levels.size else -1
    sgn = np.sign(x).astype(np.int8)
    return [np.where(levels == i, sgn, 0).astype(np.int8) for i in range(top + 1)]


def dyadic_reconstruct(layers, n: int | None = None) -> np.ndarray:
    if not layers:
        return np.zeros(n or 0)
    out = np.zeros(len(layers[0]))
    for i, layer in enumerate(layers):
        out += np.ldexp(np.asarray(layer, dtype=float), -i)
    return out


@dataclass(frozen=True)
class DyadicVector:
    values: np.ndarray
    layers: tuple

    @classmethod
    def from_values(cls, x) -> "DyadicVector":
        x = np.asarray(x, dtype=float)
        return cls(x.copy(), tuple(dyadic_decompose(x)))

    @property
    def sizes(self) -> list[int]:
        return [int(np.count_nonzero(layer)) for layer in self.layers]

    def reconstruct(self) -> np.ndarray:
        return dyadic_reconstruct(list(self.layers), len(self.values))

    def l1_from_layers(self) -> float:
        return float(sum(math.ldexp(s, -i) for i, s in enumerate(self.sizes)))

    def l2sq_from_layers(self) -> float:
        return float(sum(math.ldexp(s, -2 * i) for i, s in enumerate(self.sizes)))


def random_dyadic_vector(n: int, max_level: int, seed: int, stream: int = 3) -> np.ndarray:
    """Entries 0 or +-2^-l (l <= max_level); row depends only on (seed, stream)."""
    u = counter_uniforms(seed, 3 * n, stream=stream).reshape(3, n)
    level = np.minimum((u[0] * (max_level + 1)).astype(int), max_level)
    sign = np.where(u[1] < 0.5, -1.0, 1.0)
    keep = u[2] < 0.8
    return np.where(keep, sign * np.ldexp(1.0, -level), 0.0)


def dyadic_index_split(indices, gamma: float):
    """Split index tuples into P (spread max - min < gamma) and Q (the rest)."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    P, Q = [], []
    for idx in indices:
        idx = tuple(int(i) for i in idx)
        (P if max(idx) - min(idx) < gamma else Q).append(idx)
    return P, Q


# ---------------------------------------------------------------- the rigorous bound


def gamma_choice(a: float, b: float, m: float, n: int, k: int) -> float:
    return math.log2(a * m * n ** ((k - 2) / 2) / b)


def powers_of_two_bound(b: float, m: float, a: float, n: int, k: int) -> float:
    """b (lg^(k-1)(a^2 m^2 n^(k-2) / b^2) + k^2 / a).

    Valid for dyadic vectors when every row sum of |B| is <= m, B is bounded
    by b on {0, +-1} tuples and a >= b / (m n^((k-2)/2)); that last condition
    is checked here.
    """
    scale = m * n ** ((k - 2) / 2)
    if a * scale < b * (1 - 1e-12):
        raise ValueError(f"precondition a >= b/(m n^((k-2)/2)) fails: a={a}, b/(m n^((k-2)/2))={b / scale}")
    lg = max(math.log2(a * a * scale * scale / (b * b)), 0.0)
    return b * (lg ** (k - 1) + k * k / a)


def expansion_factor(k: int) -> float:
    """Disjoint 0/1 sets -> arbitrary 0/1 vectors."""
    return k ** (k / 2)


def zero_pm_one_factor(k: int) -> float:
    """0/1 vectors -> {0, +-1} vectors."""
    return 2 ** (k / 2)


def continuum_factor(k: int) -> float:
    """Dyadic vectors -> all real vectors."""
    return 2.0**k


def inverse_mixing_bound(rho: float, r: float, alpha: float, n: int, k: int) -> dict:
    """Compose the chain of factors into an upper bound on ||A - alpha A_K||.

    Equals 2^(3k/2) k^(k/2) rho (lg^(k-1)((r+alpha n)^2 n^(k-2) / rho^2) + k^2 (2k)^(-k/2)).
    For rho below the degeneracy threshold the bound is 0: the form then
    vanishes on disjoint indicator tuples and hence everywhere.
    """
    m = r + alpha * n
    a = (2 * k) ** (k / 2)
    if rho < DEGENERATE_RHO:
        return {"bound": 0.0, "degenerate": True, "m": m, "a": a, "b": 0.0, "gamma": None, "closed_form": 0.0}
    b = rho * expansion_factor(k) * zero_pm_one_factor(k)
    dyadic = powers_of_two_bound(b, m, a, n, k)
    bound = continuum_factor(k) * dyadic
    lg = max(math.log2(m * m * n ** (k - 2) / (rho * rho)), 0.0)
    closed = 2 ** (3 * k / 2) * k ** (k / 2) * rho * (lg ** (k - 1) + k * k * (2 * k) ** (-k / 2))
    return {
        "bound": bound,
        "degenerate": False,
        "m": m,
        "a": a,
        "b": b,
        "gamma": gamma_choice(a, b, m, n, k),
        "closed_form": closed,
    }


# ---------------------------------------------------------------- rounding


def _round_with(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    mant, expo = np.frexp(np.abs(x))
    # |x| = 2^(expo-1) * (2 mant) with 2 mant in [1, 2): exact split
    eps = 2 * mant - 1
    up = u < eps
    mag = np.ldexp(1.0, expo - 1 + up.astype(int))
    return np.where(x == 0, 0.0, np.sign(x) * mag)


def _check_round_input(x):
    x = np.asarray(x, dtype=float)
    if x.size and np.abs(x).max() > 0.5:
        raise ValueError(f"randomized rounding needs |x_i| <= 1/2, got max {np.abs(x).max()}")
    return x


def randomized_round(x, seed: int) -> np.ndarray:
    """Round each coordinate to one of the two neighbouring signed powers of two.

    The upper power is chosen with probability eps where |x_i| = 2^l (1 + eps),
    so E[z_i] = x_i and |z_i| <= 2|x_i|.
    """
    x = _check_round_input(x)
    return _round_with(x, counter_uniforms(seed, x.size, stream=2))


def randomized_round_samples(x, count: int, seed: int) -> np.ndarray:
    """``count`` independent roundings; row j uses draws j*n..(j+1)*n-1."""
    x = _check_round_input(x)
    u = counter_uniforms(seed, count * x.size, stream=2).reshape(count, x.size)
    return _round_with(x[None, :], u)


# ---------------------------------------------------------------- partition identity


def _surjective_labelings(n: int, k: int, budget: int | None, force: bool) -> np.ndarray:
    check_budget(k**n, budget, force)
    labs = np.array(list(product(range(k), repeat=n)), dtype=np.int8).reshape(-1, n)
    onto = np.ones(len(labs), dtype=bool)
    for j in range(k):
        onto &= (labs == j).any(axis=1)
    return labs[onto]


def partition_identity_check(
    H: Hypergraph, *parts, budget: int | None = None, force: bool = False
) -> VerificationReport:
    """Average edge counts over all ordered partitions of the vertex set.

    Each ordered edge (v_1..v_k) with v_j in V_j is counted once by every
    ordered partition (P_1..P_k) with v_j in P_j, i.e. k^(n-k) times. Checks
    k^(n-k) e(V_1..V_k) = sum_P e(P_1 & V_1, .., P_k & V_k) and the same with
    e_K, in exact integers.
    """
    n, k = H.n, H.k
    if len(parts) != k:
        raise ValueError(f"need {k} subsets, got {len(parts)}")
    sets = [sorted({int(v) for v in p}) for p in parts]
    member = np.zeros((k, n), dtype=bool)
    for j, s in enumerate(sets):
        member[j, s] = True
    labs = _surjective_labelings(n, k, budget, force)
    ordered = [p for e in H.edges for p in permutations(e) if all(member[j, p[j]] for j in range(k))]
    lhs_e = len(ordered)
    rhs_e = 0
    for t in ordered:
        hit = np.ones(len(labs), dtype=bool)
        for j in range(k):
            hit &= labs[:, t[j]] == j
        rhs_e += int(hit.sum())
    lhs_k = sum(1 for t in product(*sets) if len(set(t)) == k)
    counts = np.ones(len(labs), dtype=object)
    for j in range(k):
        counts = counts * ((labs == j) & member[j]).sum(axis=1).astype(object)
    rhs_k = int(counts.sum())
    mult = k ** (n - k)
    ok_e = mult * lhs_e == rhs_e
    ok_k = mult * lhs_k == rhs_k
    return VerificationReport(
        statement="partition-identity",
        params={"n": n, "k": k, "parts": sets},
        margins=[rhs_e - mult * lhs_e, rhs_k - mult * lhs_k],
        min_margin=0.0 if ok_e and ok_k else -1.0,
        passed=bool(ok_e and ok_k),
        details={
            "multiplicity": mult,
            "partitions": len(labs),
            "e": lhs_e,
            "partition_sum_e": rhs_e,
            "e_K": lhs_k,
            "partition_sum_e_K": rhs_k,
        },
    )


# ---------------------------------------------------------------- matrix version


def bilu_linial_check(M, m: float | None = None, report_constant: bool = True, workers: int | None = None,
                      budget: int | None = None, force: bool = False) -> VerificationReport:
    """Check the hypotheses of the matrix inverse-mixing lemma and fit its constant.

    ``M`` must be symmetric with zero diagonal. ``beta`` is the largest
    |<x, M y>| / (|x| |y|) over disjoint nonempty 0/1 supports, found by a full
    3^n sweep; ||M|| is exact. ``m`` defaults to the largest row l1 norm.
    """
    mat = M.matrix if hasattr(M, "matrix") else np.asarray(M, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"need a square matrix, got shape {mat.shape}")
    asym = np.abs(mat - mat.T)
    if asym.max(initial=0.0) > 1e-12:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise ValueError(f"matrix not symmetric: M[{i},{j}]={mat[i, j]!r} but M[{j},{i}]={mat[j, i]!r}")
    diag = np.abs(np.diag(mat))
    if diag.max(initial=0.0) > 1e-12:
        i = int(np.argmax(diag))
        raise ValueError(f"diagonal must be zero: M[{i},{i}]={mat[i, i]!r}")
    n = mat.shape[0]
    check_budget(3**n, budget, force)
    rows = np.abs(mat).sum(axis=1)
    max_row = float(rows.max(initial=0.0))
    m = max_row if m is None else float(m)
    beta, idx = sweep_pairs_matrix(mat, workers=workers)
    beta = max(beta, 0.0)
    norm = float(np.abs(np.linalg.eigvalsh(mat)).max()) if n else 0.0
    flags = []
    fitted = None
    witness = None
    if idx >= 0:
        labels = decode_state(idx, n, 3)
        witness = [[v for v in range(n) if labels[v] == 1], [v for v in range(n) if labels[v] == 2]]
    if beta < DEGENERATE_RHO:
        flags.append("beta-degenerate")
        passed = norm <= 1e-8
    else:
        passed = True
        if report_constant and m > 0:
            fitted = norm / (beta * (math.log2(m / beta) + 1))
    rows_ok = bool(np.all(rows <= m + 1e-9))
    if not rows_ok:
        flags.append("row-l1-exceeds-m")
    return VerificationReport(
        statement="bilu-linial",
        params={"n": n, "m": m},
        fitted_constant=fitted,
        passed=bool(passed and rows_ok),
        flags=flags,
        witness=witness,
        details={"beta": beta, "norm": norm, "max_row_l1": max_row, "rows_within_m": rows_ok},
    )


def sanity_bound_holds(H: Hypergraph, alpha: float, rho: float) -> bool:
    r = degree_profile(H).max
    return rho <= (r + alpha * H.n) * H.n ** ((H.k - 2) / 2) + 1e-12


# ---------------------------------------------------------------- aggregate check


def random_subsets(n: int, k: int, seed: int, stream: int = 5) -> list[list[int]]:
    """k random subsets, each vertex kept with probability 1/2."""
    u = counter_uniforms(seed, k * n, stream=stream).reshape(k, n)
    return [[v for v in range(n) if u[j, v] < 0.5] for j in range(k)]


def rounding_statistics(x, samples: int, seed: int, phi=None) -> dict:
    """Empirical checks of E[z] = x, |z| <= 2|x| and, given a form, E[phi(z..z)] = phi(x..x)."""
    x = np.asarray(x, dtype=float)
    Z = randomized_round_samples(x, samples, seed)
    limit = 2 * np.linalg.norm(x)
    norms = np.linalg.norm(Z, axis=1)
    violations = int(np.sum(norms > limit * (1 + 1e-15)))
    mean = Z.mean(axis=0)
    std = Z.std(axis=0, ddof=1)
    tol = 3 * std / math.sqrt(samples)
    mean_ok = bool(np.all(np.abs(mean - x) <= tol + 1e-15))
    out = {
        "samples": samples,
        "norm_violations": violations,
        "mean_abs_error": np.abs(mean - x).tolist(),
        "mean_tolerance": tol.tolist(),
        "mean_within_tolerance": mean_ok,
        "all_dyadic": bool(all(np.all(np.isfinite(_dyadic_levels(z))) for z in Z[: min(samples, 100)])),
    }
    if phi is not None:
        vals = np.array([phi.value(z) for z in Z])
        target = phi.value(x)
        se = vals.std(ddof=1) / math.sqrt(samples)
        out.update(
            form_target=target,
            form_mean=float(vals.mean()),
            form_standard_error=float(se),
            form_within_4se=bool(abs(vals.mean() - target) <= 4 * se + 1e-12),
        )
    return out


def verify_lemmas(
    H: Hypergraph,
    alpha: float,
    *,
    samples: int = 10_000,
    seed: int = 0,
    dyadic_vectors: int = 1000,
    instances: int = 50,
    budget: int | None = None,
    force: bool = False,
    workers: int | None = None,
) -> VerificationReport:
    """Run the lemma machinery on one hypergraph.

    Exact checks (dyadic reconstruction and layer identities, the rounding
    norm bound, the partition identity, the sanity bound on rho) decide
    ``passed``; the statistical mean checks only raise flags.
    """
    from .forms import make_form
    from .hypergraph_mixing import rho_alpha

    n, k = H.n, H.k
    flags = []
    bad_dyadic = 0
    for i in range(dyadic_vectors):
        x = random_dyadic_vector(n, 12, seed + i)
        dv = DyadicVector.from_values(x)
        ok = np.array_equal(dv.reconstruct(), x)
        ok &= dv.l1_from_layers() == float(np.abs(x).sum())
        ok &= dv.l2sq_from_layers() == float(np.sum(x * x))
        supports = [set(np.flatnonzero(layer)) for layer in dv.layers]
        ok &= sum(len(s) for s in supports) == len(set().union(*supports)) if supports else True
        bad_dyadic += not ok
    x = counter_uniforms(seed, n, stream=4) - 0.5
    stats = rounding_statistics(x, samples, seed, make_form("alpha_density", H=H, alpha=alpha))
    if not stats["mean_within_tolerance"]:
        flags.append("rounding-mean-outside-3se")
    if not stats["form_within_4se"]:
        flags.append("form-mean-outside-4se")
    part = {"skipped": True}
    if k ** n <= (budget or 10**6) or force:
        fails = 0
        for i in range(instances):
            rep = partition_identity_check(H, *random_subsets(n, k, seed + i), budget=budget, force=force)
            fails += not rep.passed
        part = {"skipped": False, "instances": instances, "failures": fails}
    else:
        flags.append("partition-identity-skipped")
    rho = rho_alpha(H, alpha, "exhaustive", budget=budget, force=force, workers=workers).rho
    r = degree_profile(H).max
    sanity = (r + alpha * n) * n ** ((k - 2) / 2)
    checks = {
        "dyadic_exact": bad_dyadic == 0,
        "rounding_norm_bound": stats["norm_violations"] == 0,
        "partition_identity": part.get("failures", 0) == 0,
        "sanity_bound": rho <= sanity + 1e-12,
    }
    return VerificationReport(
        statement="lemma-lab",
        params={"n": n, "k": k, "alpha": float(alpha), "samples": samples, "seed": seed},
        passed=all(checks.values()),
        flags=flags,
        details={
            "checks": checks,
            "dyadic_vectors": dyadic_vectors,
            "dyadic_failures": bad_dyadic,
            "rounding": stats,
            "partition_identity": part,
            "rho": rho,
            "sanity_upper": sanity,
        },
    )
