"""Hypergraph discrepancy rho_alpha, its closed-form envelopes, and mixing checks."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from .complexes import Hypergraph, degree_profile, gen_hypergraph
from .enumeration import (
    DEFAULT_BUDGET,
    MODE_HYPER_MARGIN,
    MODE_HYPER_RHO,
    check_budget,
    decode_state,
    encode_labels,
    sweep_disjoint,
    sweep_overlapping,
)
from .forms import d_norm_bounds, make_form, spectral_norm_estimate
from .lemmas import inverse_mixing_bound
from .reports import MARGIN_TOL, DiscrepancyReport, VerificationReport
from .simplicial_mixing import _best_of_samples, _parse_mode, labels_to_parts, sample_labels

__all__ = [
    "hyper_ratio",
    "rho_alpha",
    "RhoEnvelope",
    "rho_envelope",
    "lambda_estimate",
    "verify_mixing_hypergraph",
    "verify_inverse_hypergraph",
    "verify_fw_comparison",
    "random_rho_experiment",
    "write_experiment_csv",
]


def hyper_ratio(e: int, sizes, alpha: float) -> float:
    """|e - alpha prod|V_i|| / sqrt(prod|V_i|), same float steps as the sweep kernel."""
    prod = 1
    for s in sizes:
        prod *= s
    P = float(prod)
    return abs(e - alpha * P) / np.sqrt(P)


def _edge_counts_for_labels(H: Hypergraph, labels: np.ndarray) -> np.ndarray:
    """Partite edge counts for a batch of disjoint assignments (rows of labels)."""
    edges = H.edge_array()
    if len(edges) == 0:
        return np.zeros(len(labels), dtype=np.int64)
    bits = (1 << labels[:, edges]).sum(axis=2)
    return (bits == (1 << (H.k + 1)) - 2).sum(axis=1)


def _singleton_witness(H: Hypergraph, alpha: float):
    """Best of the link / co-link tuples around every (k-1)-set of singletons.

    For each (k-1)-set the last part is either its link S (vertices completing
    an edge) or the complement T, giving ratios (1-alpha)sqrt|S| and
    alpha sqrt|T|. Ties go to the lexicographically least assignment.
    """
    n, k = H.n, H.k
    best, best_labels, examined = -1.0, None, 0
    for core in combinations(range(n), k - 1):
        rest = [v for v in range(n) if v not in core]
        S = [v for v in rest if H.has_edge(core + (v,))]
        T = [v for v in rest if not H.has_edge(core + (v,))]
        for last in (S, T):
            if not last:
                continue
            examined += 1
            labels = [0] * n
            for i, v in enumerate(core):
                labels[v] = i + 1
            for v in last:
                labels[v] = k
            e = len(S) if last is S else 0
            val = hyper_ratio(e, [1] * (k - 1) + [len(last)], alpha)
            if val > best or (val == best and encode_labels(labels, k + 1) < encode_labels(best_labels, k + 1)):
                best, best_labels = val, labels
    return best, best_labels, examined


def rho_alpha(
    H: Hypergraph,
    alpha: float,
    mode="exhaustive",
    *,
    budget: int | None = None,
    force: bool = False,
    workers: int | None = None,
) -> DiscrepancyReport:
    """max |e(V_1..V_k) - alpha prod|V_i|| / sqrt(prod|V_i|) over disjoint nonempty tuples.

    ``mode``: ``"exhaustive"`` (all (k+1)^n assignments),
    ``"singleton-witness"`` (k-1 singletons plus a link or co-link set) or
    ``("sample", count, seed)`` / ``"sample:COUNT:SEED"``.
    """
    kind, count, seed = _parse_mode(mode)
    n, k = H.n, H.k
    base = k + 1
    if kind == "exhaustive":
        check_budget(base**n, budget, force)
        out = sweep_disjoint(n, k, H.edge_array(), alpha, MODE_HYPER_RHO, workers=workers)
        rho = out["best"]
        witness = labels_to_parts(decode_state(out["best_idx"], n, base), k)
        return DiscrepancyReport(float(rho), witness, float(alpha), "exhaustive", out["admitted"])
    if kind == "singleton-witness":
        rho, labels, examined = _singleton_witness(H, alpha)
        witness = labels_to_parts(labels, k) if labels is not None else None
        return DiscrepancyReport(float(max(rho, 0.0)), witness, float(alpha), "singleton-witness", examined)
    if kind == "sample":
        labels = sample_labels(n, base, count, seed)
        sizes = np.stack([(labels == i).sum(axis=1) for i in range(1, base)], axis=1)
        ok = (sizes > 0).all(axis=1)
        e = _edge_counts_for_labels(H, labels)
        values = np.full(count, -np.inf)
        for i in np.flatnonzero(ok):
            values[i] = hyper_ratio(int(e[i]), sizes[i].tolist(), alpha)
        rho, row = _best_of_samples(values, labels)
        witness = labels_to_parts(row, k) if row is not None else None
        return DiscrepancyReport(float(max(rho, 0.0)), witness, float(alpha), {"sample": count, "seed": seed},
                                 int(ok.sum()))
    raise ValueError(f"mode {kind!r} does not apply to hypergraphs")


@dataclass(frozen=True)
class RhoEnvelope:
    sanity_upper: float
    witness_lower: float
    witness_lower_printed: float
    hoeffding_threshold: float
    n: int
    k: int
    r: float
    alpha: float
    delta: float

    def to_dict(self) -> dict:
        return asdict(self)


def rho_envelope(n: int, k: int, r: float, alpha: float, delta: float | None = None) -> RhoEnvelope:
    """Closed-form bounds on rho_alpha.

    ``witness_lower`` uses the denominator sqrt((1-a)^2 + a^2) that the
    link/co-link argument produces; ``witness_lower_printed`` keeps the
    alternative sqrt(a^2 + (1 - a^2)) for comparison. ``delta`` defaults to
    e^-n; the threshold uses natural logs.
    """
    sanity = (r + alpha * n) * n ** ((k - 2) / 2)
    root = math.sqrt(n - k + 1)
    num = alpha * (1 - alpha)
    den = math.sqrt((1 - alpha) ** 2 + alpha**2)
    den_printed = math.sqrt(alpha**2 + (1 - alpha**2))
    lower = num / den * root if den > 0 else 0.0
    lower_printed = num / den_printed * root if den_printed > 0 else 0.0
    if delta is None:
        delta = math.exp(-n)
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    # ln(2/delta) written to survive tiny delta
    threshold = math.sqrt((n * math.log(k + 1) + math.log(2) - math.log(delta)) / 2)
    return RhoEnvelope(sanity, max(lower, 0.0), max(lower_printed, 0.0), threshold, n, k, float(r), float(alpha),
                       delta)


# ---------------------------------------------------------------- norm estimates


def _witness_vectors(witness, n):
    vecs = []
    for part in witness or []:
        v = np.zeros(n)
        v[list(part)] = 1.0
        vecs.append(v)
    return vecs


def lambda_estimate(H: Hypergraph, alpha: float, witness=None, *, kind: str = "alpha_density", starts: int = 32,
                    max_iters: int = 5000, tol: float = 1e-9, seed: int = 0, workers: int | None = None):
    """Lower bound on ||A - alpha A_K|| (or ||A - alpha J|| for ``kind="fw_r"``).

    The discrepancy witness, if given, seeds the search with its normalized
    indicator sum and contributes its multilinear ratio directly, so the
    result is at least the witness ratio. At k = 2 the exact dense norm is
    returned alongside as ``exact``.
    """
    phi = make_form(kind, H=H, alpha=alpha)
    vecs = _witness_vectors(witness, H.n)
    seeds = []
    tuples = []
    if vecs and all(v.any() for v in vecs):
        s = np.sum(vecs, axis=0)
        seeds.append(s / np.linalg.norm(s))
        tuples.append(vecs)
    est = spectral_norm_estimate(phi, starts=starts, max_iters=max_iters, tol=tol, seed=seed, witness_seeds=seeds,
                                 witness_tuples=tuples, workers=workers)
    exact = None
    if H.k == 2:
        exact = float(np.abs(np.linalg.eigvalsh(phi.dense())).max())
    return est, exact


def _lam_value(est, exact):
    return exact if exact is not None else est.value


# ---------------------------------------------------------------- verification


def verify_mixing_hypergraph(
    H: Hypergraph,
    alpha: float,
    *,
    fw: bool = False,
    bins: int = 20,
    starts: int = 32,
    seed: int = 0,
    budget: int | None = None,
    force: bool = False,
    overlap: bool | None = None,
    workers: int | None = None,
) -> VerificationReport:
    """Compare |e - alpha e_K| with lam sqrt(prod|V_i|) for the estimated lam.

    The disjoint sweep covers every (k+1)^n assignment. The overlapping sweep
    (all 2^(nk) subset tuples, e_K on the right) runs when within budget or
    when ``overlap`` is set. With ``fw`` the form is A - (k!|E|/n^k) J and the
    right side uses prod|V_i|. A violated inequality means the lower-bound
    estimate of lam is short of the true norm; it is flagged
    ``estimator-gap`` rather than failing. The asserted check is lam >= rho.
    """
    n, k = H.n, H.k
    budget = DEFAULT_BUDGET if budget is None else budget
    check_budget((k + 1) ** n, budget, force)
    coef = math.factorial(k) * len(H.edges) / n**k if fw else float(alpha)
    rho_rep = rho_alpha(H, coef, "exhaustive", budget=budget, force=force, workers=workers)
    est, exact = lambda_estimate(H, coef, rho_rep.witness, kind="fw_r" if fw else "alpha_density", starts=starts,
                                 seed=seed, workers=workers)
    lam = _lam_value(est, exact)
    disj = sweep_disjoint(n, k, H.edge_array(), coef, MODE_HYPER_MARGIN, lam=lam, bins=bins, workers=workers)
    margins = {"disjoint": disj["min_margin"]}
    flags = []
    details = {
        "lambda_hat": lam,
        "lambda_source": "dense" if exact is not None else est.source,
        "estimate": est,
        "exact_norm": exact,
        "rho": rho_rep.rho,
        "rho_witness": rho_rep.witness,
        "coefficient": coef,
        "form": "A - cJ" if fw else "A - alpha A_K",
        "disjoint_tuples": disj["admitted"],
    }
    worst = labels_to_parts(decode_state(disj["min_idx"], n, k + 1), k)
    states = 1 << (n * k)
    run_overlap = overlap if overlap is not None else states <= budget
    if run_overlap:
        check_budget(states, budget, force or bool(overlap))
        over = sweep_overlapping(n, k, H.edge_array(), coef, lam, product=fw, workers=workers)
        margins["overlapping"] = over["min_margin"]
        details["overlapping_tuples"] = over["admitted"]
        details["overlapping_max_ratio"] = over["best"]
        if over["min_margin"] < disj["min_margin"]:
            idx = over["min_idx"]
            worst = [[v for v in range(n) if (idx >> (k * (n - 1 - v) + i)) & 1] for i in range(k)]
    else:
        flags.append("overlapping-sweep-skipped")
    min_margin = min(margins.values())
    holds = min_margin >= -MARGIN_TOL
    if not holds:
        flags.append("estimator-gap")
    covers = lam >= rho_rep.rho - 1e-12
    details["inequality_holds"] = holds
    details["lambda_covers_rho"] = covers
    return VerificationReport(
        statement="hypergraph-mixing-fw" if fw else "hypergraph-mixing",
        params={"n": n, "k": k, "alpha": float(alpha), "edges": len(H.edges)},
        margins=[margins[key] for key in sorted(margins)],
        min_margin=min_margin,
        passed=bool(covers),
        flags=flags,
        witness=worst,
        histogram=disj.get("histogram"),
        details=details,
    )


def verify_inverse_hypergraph(
    H: Hypergraph,
    alpha: float,
    *,
    starts: int = 32,
    seed: int = 0,
    budget: int | None = None,
    force: bool = False,
    workers: int | None = None,
) -> VerificationReport:
    """Check lam_hat <= 2^(3k/2) k^(k/2) rho (lg^(k-1)((r+alpha n)^2 n^(k-2)/rho^2) + k^2 (2k)^(-k/2)).

    lam_hat is a lower bound on ||A - alpha A_K|| and the right side an upper
    bound, so a violation is a bug. Also reports the fitted constant
    lam_hat / (rho (lg^(k-1)((r+alpha n) n^(k-2)/rho) + 1)).
    """
    n, k = H.n, H.k
    r = degree_profile(H).max
    rho_rep = rho_alpha(H, alpha, "exhaustive", budget=budget, force=force, workers=workers)
    rho = rho_rep.rho
    est, exact = lambda_estimate(H, alpha, rho_rep.witness, starts=starts, seed=seed, workers=workers)
    lam = _lam_value(est, exact)
    env = rho_envelope(n, k, r, alpha)
    flags = ["degree-term-read-as-r"]
    if rho > env.sanity_upper + 1e-9:
        raise AssertionError(f"rho={rho} exceeds the sanity bound {env.sanity_upper}")
    bound = inverse_mixing_bound(rho, r, alpha, n, k)
    fitted = None
    if bound["degenerate"]:
        flags.append("rho-degenerate")
        passed = lam <= 1e-8
        margin = -lam
    else:
        margin = bound["bound"] - lam
        passed = margin >= -MARGIN_TOL
        shape = rho * (max(math.log2((r + alpha * n) * n ** (k - 2) / rho), 0.0) ** (k - 1) + 1)
        fitted = lam / shape
        if bound["gamma"] is not None and bound["gamma"] < 0.5:
            flags.append("gamma-below-half")
    return VerificationReport(
        statement="hypergraph-inverse-mixing",
        params={"n": n, "k": k, "alpha": float(alpha), "r": r, "edges": len(H.edges)},
        margins=[margin],
        min_margin=margin,
        fitted_constant=fitted,
        passed=bool(passed),
        flags=flags,
        witness=rho_rep.witness,
        details={
            "rho": rho,
            "lambda_hat": lam,
            "lambda_source": "dense" if exact is not None else est.source,
            "lambda_covers_rho": lam >= rho - 1e-12,
            "estimate": est,
            "bound": bound,
            "sanity_upper": env.sanity_upper,
        },
    )


def verify_fw_comparison(
    H: Hypergraph,
    *,
    starts: int = 32,
    seed: int = 0,
    budget: int | None = None,
    force: bool = False,
    workers: int | None = None,
) -> VerificationReport:
    """Relate ||A - (r/n)J|| to ||A - (r/n)A_K|| and rho at alpha = r/n.

    Asserts lam2_hat <= (r/n) k^2 n^((k-2)/2) + bound(||A - (r/n)A_K||), which
    splits J = A_K + D. The band (r/n) D_lower - that bound is informational.
    For k = 2 on a regular graph it also checks that the exact norms of
    A - (r/n)J and A - (r/(n-1))A_K differ by at most r/(n-1).
    """
    n, k = H.n, H.k
    prof = degree_profile(H)
    r = prof.max
    alpha = r / n
    rho_rep = rho_alpha(H, alpha, "exhaustive", budget=budget, force=force, workers=workers)
    est2, exact2 = lambda_estimate(H, alpha, None, kind="fw_r", starts=starts, seed=seed, workers=workers)
    esta, exacta = lambda_estimate(H, alpha, rho_rep.witness, starts=starts, seed=seed, workers=workers)
    lam2 = _lam_value(est2, exact2)
    lama = _lam_value(esta, exacta)
    d_lo, d_hi = d_norm_bounds(n, k)
    inv = inverse_mixing_bound(rho_rep.rho, r, alpha, n, k)
    upper = alpha * d_hi + inv["bound"]
    band_lower = alpha * d_lo - inv["bound"]
    margin = upper - lam2
    checks = {"upper_sandwich": margin >= -MARGIN_TOL}
    details = {
        "rho": rho_rep.rho,
        "lambda2_hat": lam2,
        "lambda2_alpha_hat": lama,
        "estimate_fw": est2,
        "estimate_alpha": esta,
        "upper_sandwich": upper,
        "band_lower": band_lower,
        "d_norm_bounds": [d_lo, d_hi],
        "inverse_bound": inv,
    }
    if k == 2 and prof.regular:
        alt = make_form("alpha_density", H=H, alpha=r / (n - 1)).dense()
        lam_density = float(np.abs(np.linalg.eigvalsh(alt)).max())
        gap = abs(lam2 - lam_density)
        details["lambda_density_alpha"] = lam_density
        details["fw_density_gap"] = gap
        details["gap_limit"] = r / (n - 1)
        checks["gap_within_limit"] = gap <= r / (n - 1) + 1e-9
    details["checks"] = checks
    return VerificationReport(
        statement="fw-comparison",
        params={"n": n, "k": k, "r": r, "alpha": alpha, "edges": len(H.edges)},
        margins=[margin],
        min_margin=margin,
        passed=all(checks.values()),
        witness=rho_rep.witness,
        details=details,
    )


def random_rho_experiment(
    n: int,
    k: int,
    alpha: float,
    seeds: int,
    *,
    delta: float | None = None,
    estimate: bool = True,
    starts: int = 32,
    budget: int | None = None,
    force: bool = False,
    workers: int | None = None,
    first_seed: int = 1,
) -> VerificationReport:
    """Exact rho_alpha of G(n, alpha, k) for seeds first_seed.. and its envelopes.

    The lower envelope holds for every hypergraph, so any seed below it fails
    the report. The Hoeffding threshold only holds with high probability; the
    fraction of seeds under it is reported and flagged below 95%.
    """
    check_budget((k + 1) ** n, budget, force)
    rows = []
    for s in range(first_seed, first_seed + seeds):
        H = gen_hypergraph("gnp", n, k, alpha=alpha, seed=s)
        r = degree_profile(H).max
        env = rho_envelope(n, k, r, alpha, delta)
        rep = rho_alpha(H, alpha, "exhaustive", budget=budget, force=force, workers=workers)
        row = {
            "seed": s,
            "edges": len(H.edges),
            "r": r,
            "rho": rep.rho,
            "rho_over_sqrt_n": rep.rho / math.sqrt(n),
            "hoeffding_threshold": env.hoeffding_threshold,
            "witness_lower": env.witness_lower,
            "sanity_upper": env.sanity_upper,
            "below_threshold": rep.rho <= env.hoeffding_threshold,
            "above_lower": rep.rho >= env.witness_lower - 1e-12,
            "within_sanity": rep.rho <= env.sanity_upper + 1e-12,
        }
        if estimate:
            est2, ex2 = lambda_estimate(H, r / n, None, kind="fw_r", starts=starts, seed=s, workers=workers)
            esta, exa = lambda_estimate(H, alpha, rep.witness, starts=starts, seed=s, workers=workers)
            row["lambda2_hat"] = _lam_value(est2, ex2)
            row["lambda2_alpha_hat"] = _lam_value(esta, exa)
        rows.append(row)
    frac_below = sum(r["below_threshold"] for r in rows) / len(rows) if rows else 1.0
    frac_lower = sum(r["above_lower"] for r in rows) / len(rows) if rows else 1.0
    ratios = np.array([r["rho_over_sqrt_n"] for r in rows]) if rows else np.zeros(0)
    flags = []
    if frac_below < 0.95:
        flags.append("threshold-fraction-below-0.95")
    passed = frac_lower == 1.0 and all(r["within_sanity"] for r in rows)
    return VerificationReport(
        statement="random-rho",
        params={"n": n, "k": k, "alpha": float(alpha), "seeds": seeds, "first_seed": first_seed,
                "delta": delta if delta is not None else math.exp(-n)},
        margins=[r["hoeffding_threshold"] - r["rho"] for r in rows],
        min_margin=min((r["rho"] - r["witness_lower"] for r in rows), default=None),
        passed=bool(passed),
        flags=flags,
        details={
            "fraction_below_threshold": frac_below,
            "fraction_above_lower": frac_lower,
            "rho_over_sqrt_n": {
                "min": float(ratios.min()) if ratios.size else None,
                "mean": float(ratios.mean()) if ratios.size else None,
                "max": float(ratios.max()) if ratios.size else None,
            },
            "rows": rows,
        },
    )


def write_experiment_csv(report: VerificationReport, path) -> None:
    rows = report.details["rows"]
    if not rows:
        open(path, "w").close()
        return
    cols = ["seed", "rho", "lambda2_hat", "lambda2_alpha_hat", "hoeffding_threshold", "witness_lower",
            "sanity_upper", "below_threshold", "above_lower", "within_sanity", "edges", "r"]
    cols = [c for c in cols if c in rows[0]]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([f"{row[c]:.12g}" if isinstance(row[c], float) else row[c] for c in cols])
