"""Partite facet counts, simplicial discrepancy and the two mixing checks."""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .complexes import SimplicialComplex, counter_uniforms, degree_profile
from .enumeration import (
    MODE_SIMP_MARGIN,
    MODE_SIMP_RHO,
    check_budget,
    decode_state,
    sweep_disjoint,
)
from .reports import DEGENERATE_RHO, MARGIN_TOL, DiscrepancyReport, VerificationReport
from .simplicial import (
    IrregularComplexError,
    kernel_basis,
    operator_matrix,
    restricted_norm,
    row_l1_norms,
)

__all__ = [
    "check_disjoint",
    "count_F",
    "count_F_bruteforce",
    "simplicial_ratio",
    "witness_value",
    "labels_to_parts",
    "rho_simplicial",
    "verify_mixing_simplicial",
    "verify_inverse_simplicial",
]


def check_disjoint(parts, n: int) -> list[list[int]]:
    parts = [sorted(int(v) for v in p) for p in parts]
    seen = {}
    for i, p in enumerate(parts):
        for v in p:
            if not 0 <= v < n:
                raise ValueError(f"part {i}: vertex {v} outside 0..{n - 1}")
            if v in seen:
                raise ValueError(f"vertex {v} appears in parts {seen[v]} and {i}")
            seen[v] = i
    return parts


def count_F(X: SimplicialComplex, parts) -> int:
    """Ordered tuples (s_0..s_d) in S_0 x .. x S_d spanning a facet.

    For disjoint parts a facet contributes exactly when each part holds one of
    its vertices.
    """
    if len(parts) != X.d + 1:
        raise ValueError(f"need {X.d + 1} parts, got {len(parts)}")
    parts = check_disjoint(parts, X.n)
    label = {v: i for i, p in enumerate(parts) for v in p}
    full = set(range(X.d + 1))
    return sum(1 for f in X.facets if all(v in label for v in f) and {label[v] for v in f} == full)


def count_F_bruteforce(X: SimplicialComplex, parts) -> int:
    return sum(1 for t in product(*parts) if len(set(t)) == len(t) and X.has_facet(t))


def simplicial_ratio(F: int, sizes, alpha: float, n: int) -> float:
    """|F - (alpha/n) prod|S_i|| / (sqrt(|S_0||S_1|) |S_2|...|S_d|)."""
    prod = 1
    for s in sizes:
        prod *= s
    tail = 1
    for s in sizes[2:]:
        tail *= s
    return abs(F - (alpha / n) * float(prod)) / (np.sqrt(float(sizes[0] * sizes[1])) * float(tail))


def labels_to_parts(labels, nparts: int) -> list[list[int]]:
    return [[v for v, lab in enumerate(labels) if lab == i + 1] for i in range(nparts)]


def _parse_mode(mode):
    if isinstance(mode, str):
        if mode in ("exhaustive", "singleton-tail", "singleton-witness"):
            return mode, None, None
        if mode.startswith("sample"):
            # "sample:COUNT:SEED"
            _, count, seed = mode.split(":")
            return "sample", int(count), int(seed)
    elif isinstance(mode, (tuple, list)) and mode and mode[0] == "sample":
        return "sample", int(mode[1]), int(mode[2])
    raise ValueError(f"unknown mode {mode!r}")


def sample_labels(n: int, base: int, count: int, seed: int) -> np.ndarray:
    """Uniform random assignments; row i depends only on (seed, i)."""
    u = counter_uniforms(seed, count * n, stream=1).reshape(count, n)
    return np.minimum((u * base).astype(np.int64), base - 1)


def _best_of_samples(values, labels):
    """Max value; ties broken by the lexicographically least label row."""
    if values.size == 0 or not np.isfinite(values).any():
        return -1.0, None
    best = np.max(values[np.isfinite(values)])
    rows = labels[values == best]
    order = np.lexsort(rows.T[::-1])
    return float(best), rows[order[0]].tolist()


def rho_simplicial(
    X: SimplicialComplex,
    alpha: float,
    mode="exhaustive",
    *,
    budget: int | None = None,
    force: bool = False,
    workers: int | None = None,
) -> DiscrepancyReport:
    """Largest normalized deviation of F over disjoint nonempty tuples.

    ``mode`` is ``"exhaustive"``, ``"singleton-tail"`` (S_2..S_d singletons)
    or ``("sample", count, seed)``.
    """
    kind, count, seed = _parse_mode(mode)
    n, d = X.n, X.d
    base = d + 2
    edges = np.asarray(X.facets, dtype=np.int64).reshape(-1, d + 1)
    if kind in ("exhaustive", "singleton-tail"):
        check_budget(base**n, budget, force)
        out = sweep_disjoint(n, d + 1, edges, alpha, MODE_SIMP_RHO, tail=(kind == "singleton-tail"), workers=workers)
        examined = out["admitted"]
        if out["best_idx"] < 0:
            rho, witness = 0.0, None
        else:
            rho = out["best"]
            witness = labels_to_parts(decode_state(out["best_idx"], n, base), d + 1)
        mode_out = kind
    elif kind == "sample":
        labels = sample_labels(n, base, count, seed)
        sizes = np.stack([(labels == i).sum(axis=1) for i in range(1, base)], axis=1)
        ok = (sizes > 0).all(axis=1)
        bits = (1 << labels[:, edges]).sum(axis=2) if len(edges) else np.zeros((count, 0), dtype=np.int64)
        # a sum of d+1 powers of two has d+1 set bits only without repeats
        F = (bits == (1 << base) - 2).sum(axis=1)
        values = np.full(count, -np.inf)
        for i in np.flatnonzero(ok):
            values[i] = simplicial_ratio(int(F[i]), sizes[i].tolist(), alpha, n)
        rho, row = _best_of_samples(values, labels)
        witness = labels_to_parts(row, d + 1) if row is not None else None
        rho = max(rho, 0.0)
        examined = int(ok.sum())
        mode_out = {"sample": count, "seed": seed}
    else:
        raise ValueError(f"mode {kind!r} does not apply to complexes")
    return DiscrepancyReport(float(rho), witness, float(alpha), mode_out, int(examined))


def witness_value(X: SimplicialComplex, witness, alpha: float) -> float:
    F = count_F(X, witness)
    return simplicial_ratio(F, [len(p) for p in witness], alpha, X.n)


def verify_mixing_simplicial(
    X: SimplicialComplex,
    alpha: float,
    *,
    bins: int = 20,
    budget: int | None = None,
    force: bool = False,
    workers: int | None = None,
) -> VerificationReport:
    """Check |F - (alpha/n)prod| <= rho_alpha sqrt(|S0||S1|)|S2|..|Sd| on every disjoint tuple.

    rho_alpha is the exact norm of (alpha I - upper Laplacian) on the cycle
    space. Empty parts are included; both sides vanish there.
    """
    n, d = X.n, X.d
    check_budget((d + 2) ** n, budget, force)
    Z = kernel_basis(X)
    rho_a = restricted_norm(operator_matrix(X, "alpha_shift", alpha), Z)
    edges = np.asarray(X.facets, dtype=np.int64).reshape(-1, d + 1)
    out = sweep_disjoint(n, d + 1, edges, alpha, MODE_SIMP_MARGIN, lam=rho_a, bins=bins, workers=workers)
    worst = labels_to_parts(decode_state(out["min_idx"], n, d + 2), d + 1)
    max_ratio = max(out["best"], 0.0)
    return VerificationReport(
        statement="simplicial-mixing",
        params={"n": n, "d": d, "alpha": float(alpha), "facets": len(X.facets)},
        margins=[out["min_margin"]],
        min_margin=out["min_margin"],
        passed=out["min_margin"] >= -MARGIN_TOL,
        witness=worst,
        histogram=out.get("histogram"),
        details={
            "rho_alpha": rho_a,
            "cycle_space_dim": Z.dim,
            "tuples_checked": out["admitted"],
            "max_discrepancy_ratio": max_ratio,
            "tightness": max_ratio / rho_a if rho_a > 0 else None,
        },
    )


def verify_inverse_simplicial(
    X: SimplicialComplex,
    *,
    budget: int | None = None,
    force: bool = False,
    workers: int | None = None,
) -> VerificationReport:
    """Relate the norm of A on cycles to the discrepancy rho (alpha = r).

    Reports the instance constant ||A|_Z|| / (rho d (lg(r/rho) + 1)) and
    checks the exact steps that hold for every regular complex: J vanishes on
    cycles, B rows have l1 norm <= 2dr and ||A|_Z|| <= ||B|| + rd/n.
    """
    prof = degree_profile(X)
    if not prof.regular:
        raise IrregularComplexError(f"inverse mixing needs a regular complex; degrees {prof.min}..{prof.max}", prof)
    n, d, r = X.n, X.d, prof.max
    rho_rep = rho_simplicial(X, r, "exhaustive", budget=budget, force=force, workers=workers)
    rho = rho_rep.rho
    Z = kernel_basis(X)
    A = operator_matrix(X, "A")
    norm_a = restricted_norm(A, Z)
    J = operator_matrix(X, "J").matrix
    j_on_z = float(np.abs(J @ Z.basis).max()) if Z.dim else 0.0
    B = operator_matrix(X, "b_matrix").matrix
    rows = row_l1_norms(B)
    norm_b = float(np.linalg.norm(B, 2)) if B.size else 0.0
    flags = []
    if rho < DEGENERATE_RHO:
        flags.append("rho-degenerate")
        fitted = None
        fitted_d = None
    else:
        shape = rho * d * (math.log2(r / rho) + 1) if r > 0 else None
        fitted = norm_a / shape if shape else None
        fitted_d = norm_a / (shape + d) if shape is not None else None
    checks = {
        "j_vanishes_on_cycles": j_on_z <= 1e-8,
        "b_row_l1_le_2dr": bool(np.all(rows <= 2 * d * r + 1e-12)),
        "norm_a_le_norm_b_plus_rd_over_n": norm_a <= norm_b + r * d / n + 1e-9,
    }
    if "rho-degenerate" in flags:
        checks["degenerate_consistent"] = norm_a <= 1e-8
    margin = norm_b + r * d / n - norm_a
    return VerificationReport(
        statement="simplicial-inverse-mixing",
        params={"n": n, "d": d, "r": r, "alpha": float(r), "facets": len(X.facets)},
        margins=[margin],
        min_margin=margin,
        fitted_constant=fitted,
        passed=all(checks.values()),
        flags=flags,
        witness=rho_rep.witness,
        details={
            "rho": rho,
            "norm_A_on_cycles": norm_a,
            "norm_B": norm_b,
            "max_B_row_l1": float(rows.max()) if rows.size else 0.0,
            "j_on_cycles_max": j_on_z,
            "fitted_constant_with_d_term": fitted_d,
            "checks": checks,
        },
    )
