"""Symmetric k-linear forms on R^n and lower-bound estimates of their norms.

The building blocks are the adjacency form of a hypergraph (1 on edges), the
complete form ``A_K`` (1 on distinct indices), the all-ones form ``J`` and the
diagonal-gap form ``D = J - A_K``. Forms are affine combinations of these, or
an explicit dense symmetric tensor. Nothing for k >= 3 is ever stored densely:
adjacency terms run over the edge list, and ``A_K``/``J`` use closed forms
(inclusion-exclusion over set partitions of the k slots).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from math import factorial

import numpy as np

from .complexes import Hypergraph
from .enumeration import resolve_workers, set_partitions

__all__ = [
    "MultilinearForm",
    "SpectralEstimate",
    "make_form",
    "eval_form",
    "count_e",
    "spectral_norm_estimate",
    "d_norm_bounds",
]

BASE_KINDS = ("adjacency", "complete", "all_ones", "diagonal_gap", "tensor")


def _moebius(k: int):
    out = []
    for part in set_partitions(k):
        c = 1
        for block in part:
            c *= (-1) ** (len(block) - 1) * factorial(len(block) - 1)
        out.append((c, [tuple(b) for b in part]))
    return out


@dataclass(frozen=True)
class MultilinearForm:
    """``sum(coef * base_form)`` over ``terms``; each term is (coef, kind, payload).

    ``payload`` is the hypergraph for ``adjacency`` and the tensor for
    ``tensor``; otherwise ``None``.
    """

    n: int
    k: int
    terms: tuple
    label: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("forms need k >= 2")
        for coef, kind, payload in self.terms:
            if kind not in BASE_KINDS:
                raise ValueError(f"unknown form kind {kind!r}")
            if kind == "adjacency" and (payload.n != self.n or payload.k != self.k):
                raise ValueError("hypergraph does not match the form's (n, k)")
            if kind == "tensor":
                if payload.shape != (self.n,) * self.k:
                    raise ValueError(f"tensor shape {payload.shape} != {(self.n,) * self.k}")

    # -- structure

    @property
    def is_symmetric(self) -> bool:
        for _, kind, T in self.terms:
            if kind == "tensor":
                for p in permutations(range(self.k)):
                    if not np.array_equal(T, np.transpose(T, p)):
                        return False
        return True

    def coefficient_bound(self) -> float:
        """Sum of |coef| times the largest |entry| of each base form."""
        total = 0.0
        for coef, kind, payload in self.terms:
            entry = float(np.abs(payload).max()) if kind == "tensor" and payload.size else 1.0
            total += abs(coef) * entry
        return total

    def _perms(self):
        if "perms" not in self._cache:
            self._cache["perms"] = np.array(list(permutations(range(self.k))), dtype=np.int64)
            self._cache["moebius"] = _moebius(self.k)
        return self._cache["perms"]

    # -- evaluation

    def __call__(self, *xs) -> float:
        return eval_form(self, *xs)

    def value(self, x) -> float:
        """phi(x, ..., x), using power sums instead of the general evaluator."""
        x = np.asarray(x, dtype=float)
        k = self.k
        self._perms()
        total = 0.0
        for coef, kind, payload in self.terms:
            if coef == 0:
                continue
            if kind == "adjacency":
                E = payload.edge_array()
                if len(E):
                    total += coef * factorial(k) * float(np.prod(x[E], axis=1).sum())
            elif kind == "tensor":
                t = payload
                for _ in range(k):
                    t = np.tensordot(x, t, axes=(0, 0))
                total += coef * float(t)
            else:
                J = float(x.sum()) ** k
                if kind == "all_ones":
                    total += coef * J
                    continue
                K = self._complete_value(x)
                total += coef * (K if kind == "complete" else J - K)
        return float(total)

    def _complete_value(self, x):
        sums = [0.0] + [float(np.sum(x**j)) for j in range(1, self.k + 1)]
        K = 0.0
        for c, blocks in self._cache["moebius"]:
            term = float(c)
            for b in blocks:
                term *= sums[len(b)]
            K += term
        return K

    def partial(self, x) -> np.ndarray:
        """The vector phi(x, ..., x, e_v) for v = 0..n-1."""
        x = np.asarray(x, dtype=float)
        k = self.k
        self._perms()
        g = np.zeros(self.n)
        s = x.sum()
        for coef, kind, payload in self.terms:
            if coef == 0:
                continue
            if kind == "adjacency":
                E = payload.edge_array()
                if len(E) == 0:
                    continue
                xe = x[E]
                part = np.zeros(self.n)
                for j in range(k):
                    others = np.prod(np.delete(xe, j, axis=1), axis=1)
                    np.add.at(part, E[:, j], others)
                g += coef * factorial(k - 1) * part
            elif kind == "tensor":
                t = payload
                for _ in range(k - 1):
                    t = np.tensordot(x, t, axes=(0, 0))
                g += coef * t
            else:
                ones = s ** (k - 1) * np.ones(self.n)
                if kind == "all_ones":
                    g += coef * ones
                    continue
                comp = self._complete_partial(x)
                if kind == "complete":
                    g += coef * comp
                else:
                    g += coef * (ones - comp)
        return g

    def _complete_partial(self, x):
        # blocks avoiding the last slot contribute power sums; the block holding
        # it contributes x_v^(|B|-1)
        k = self.k
        sums = [0.0] + [float(np.sum(x**j)) for j in range(1, k + 1)]
        powers = [np.ones(self.n)] + [x**j for j in range(1, k)]
        out = np.zeros(self.n)
        for c, blocks in self._cache["moebius"]:
            scalar = float(c)
            vec = powers[0]
            for b in blocks:
                if k - 1 in b:
                    vec = powers[len(b) - 1]
                else:
                    scalar *= sums[len(b)]
            out += scalar * vec
        return out

    def dense(self, max_entries: int = 2_000_000) -> np.ndarray:
        """Full coefficient tensor; only for small oracle comparisons."""
        if self.n**self.k > max_entries:
            raise ValueError(f"dense tensor with {self.n ** self.k} entries refused")
        T = np.zeros((self.n,) * self.k)
        idx = np.indices(T.shape).reshape(self.k, -1).T
        distinct = np.array([len(set(row)) == self.k for row in idx]).reshape(T.shape)
        for coef, kind, payload in self.terms:
            if kind == "adjacency":
                A = np.zeros(T.shape)
                for e in payload.edges:
                    for p in permutations(e):
                        A[p] = 1.0
                T += coef * A
            elif kind == "complete":
                T += coef * distinct
            elif kind == "all_ones":
                T += coef
            elif kind == "diagonal_gap":
                T += coef * (~distinct)
            else:
                T += coef * payload
        return T


def _check_vectors(phi, xs):
    if len(xs) != phi.k:
        raise ValueError(f"form takes {phi.k} vectors, got {len(xs)}")
    out = []
    for x in xs:
        x = np.asarray(x, dtype=float)
        if x.shape != (phi.n,):
            raise ValueError(f"vector of shape {x.shape}, expected ({phi.n},)")
        out.append(x)
    return out


def eval_form(phi: MultilinearForm, *xs) -> float:
    """Multilinear evaluation phi(x_1, ..., x_k)."""
    xs = _check_vectors(phi, xs)
    k = phi.k
    perms = phi._perms()
    total = 0.0
    J = None
    for coef, kind, payload in phi.terms:
        if coef == 0:
            continue
        if kind == "adjacency":
            E = payload.edge_array()
            if len(E) == 0:
                continue
            acc = 0.0
            for p in perms:
                prod = np.ones(len(E))
                for i in range(k):
                    prod *= xs[i][E[:, p[i]]]
                acc += prod.sum()
            total += coef * acc
        elif kind == "tensor":
            t = payload
            for x in xs:
                t = np.tensordot(x, t, axes=(0, 0))
            total += coef * float(t)
        else:
            if J is None:
                J = float(np.prod([x.sum() for x in xs]))
                K = 0.0
                for c, blocks in phi._cache["moebius"]:
                    term = float(c)
                    for b in blocks:
                        term *= float(np.sum(np.prod([xs[i] for i in b], axis=0)))
                    K += term
            total += coef * {"all_ones": J, "complete": K, "diagonal_gap": J - K}[kind]
    return float(total)


def make_form(kind: str, *, H: Hypergraph | None = None, n: int | None = None, k: int | None = None,
              alpha: float | None = None, tensor=None) -> MultilinearForm:
    """Build a named form.

    ``kind``: ``adjacency`` (A_H), ``complete`` (A_K), ``all_ones`` (J),
    ``diagonal_gap`` (D), ``alpha_density`` (A_H - alpha A_K),
    ``fw`` (A_H - (k!|E|/n^k) J), ``fw_r`` (A_H - alpha J, alpha given) or
    ``tensor`` (dense symmetric array).
    """
    if H is not None:
        n, k = H.n, H.k
    if kind == "tensor":
        T = np.asarray(tensor, dtype=float)
        return MultilinearForm(T.shape[0], T.ndim, ((1.0, "tensor", T),), "tensor")
    if n is None or k is None:
        raise ValueError("need a hypergraph or (n, k)")
    if kind in ("complete", "all_ones", "diagonal_gap"):
        return MultilinearForm(n, k, ((1.0, kind, None),), kind)
    if H is None:
        raise ValueError(f"form {kind!r} needs a hypergraph")
    if kind == "adjacency":
        return MultilinearForm(n, k, ((1.0, "adjacency", H),), "A")
    if kind == "alpha_density":
        return MultilinearForm(n, k, ((1.0, "adjacency", H), (-float(alpha), "complete", None)), f"A-{alpha}A_K")
    if kind == "fw":
        c = factorial(k) * len(H.edges) / n**k
        return MultilinearForm(n, k, ((1.0, "adjacency", H), (-c, "all_ones", None)), f"A-{c}J")
    if kind == "fw_r":
        return MultilinearForm(n, k, ((1.0, "adjacency", H), (-float(alpha), "all_ones", None)), f"A-{alpha}J")
    raise ValueError(f"unknown form kind {kind!r}")


def count_e(H: Hypergraph, *parts) -> int:
    """Ordered tuples (v_1..v_k) in V_1 x .. x V_k whose vertex set is an edge."""
    if len(parts) != H.k:
        raise ValueError(f"need {H.k} subsets, got {len(parts)}")
    sets = [set(int(v) for v in p) for p in parts]
    total = 0
    for e in H.edges:
        for p in permutations(e):
            if all(p[i] in sets[i] for i in range(H.k)):
                total += 1
    return total


# ---------------------------------------------------------------- norm estimation


@dataclass
class SpectralEstimate:
    value: float
    witness: np.ndarray
    starts_used: int
    iterations: list
    converged: bool
    shift: float
    source: str = "symmetric"
    witness_tuple: list | None = None
    trace_length: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": [float(f"{w:.6g}") for w in self.witness],
            "starts_used": self.starts_used,
            "iterations": list(self.iterations),
            "converged": self.converged,
            "shift": self.shift,
            "source": self.source,
            "trace_length": self.trace_length,
        }


def _ascend(phi, x, sign, shift, max_iters, tol):
    """Shifted symmetric power iteration maximizing sign*phi(x..x) on the sphere.

    A step is kept only if it does not decrease the objective; otherwise the
    shift doubles and the step is retried, so the objective is monotone.
    """
    x = x / np.linalg.norm(x)
    f = sign * phi.value(x)
    it = 0
    converged = False
    while it < max_iters:
        it += 1
        g = sign * phi.partial(x)
        while True:
            y = g + shift * x
            ny = np.linalg.norm(y)
            if ny == 0:
                return x, f, it, True, shift
            x_new = y / ny
            f_new = sign * phi.value(x_new)
            if f_new >= f - 1e-14 * max(1.0, abs(f)):
                break
            shift *= 2.0
        change = abs(f_new - f)
        if f_new >= f:
            x, f = x_new, f_new
        if change <= tol * max(abs(f), 1e-300):
            converged = True
            break
    return x, f, it, converged, shift


def spectral_norm_estimate(
    phi: MultilinearForm,
    starts: int = 32,
    max_iters: int = 5000,
    tol: float = 1e-9,
    seed: int = 0,
    witness_seeds=(),
    witness_tuples=(),
    workers: int | None = None,
) -> SpectralEstimate:
    """Certified lower bound on the spectral norm of a symmetric form.

    Starts are the all-ones direction, each vector in ``witness_seeds`` and
    ``starts`` random unit vectors (start i uses the counter-based stream
    (seed, i)). Each start climbs phi and, for even k, -phi. The multilinear
    ratio of each tuple in ``witness_tuples`` is also a valid lower bound and
    competes for the result.
    """
    if not phi.is_symmetric:
        raise ValueError("spectral_norm_estimate needs a symmetric form")
    if starts < 1:
        raise ValueError("starts must be >= 1")
    n, k = phi.n, phi.k
    shift0 = k * phi.coefficient_bound()
    if shift0 == 0:
        shift0 = 1.0
    init = [np.ones(n)]
    for w in witness_seeds:
        w = np.asarray(w, dtype=float)
        if np.linalg.norm(w) > 0:
            init.append(w)
    for i in range(starts):
        key = np.array([seed, i], dtype=np.uint64)
        init.append(np.random.Generator(np.random.Philox(key=key)).standard_normal(n))
    signs = (1.0,) if k % 2 else (1.0, -1.0)

    def run(x0):
        best = None
        for s in signs:
            x, f, it, conv, sh = _ascend(phi, x0, s, shift0, max_iters, tol)
            val = abs(phi.value(x)) / np.linalg.norm(x) ** k
            if best is None or val > best[0]:
                best = (val, x / np.linalg.norm(x), it, conv, sh)
        return best

    w = resolve_workers(workers)
    if w > 1:
        with ThreadPoolExecutor(max_workers=w) as pool:
            results = list(pool.map(run, init))
    else:
        results = [run(x0) for x0 in init]
    best_i = 0
    for i, r in enumerate(results):
        if r[0] > results[best_i][0]:
            best_i = i
    val, x, it, conv, sh = results[best_i]
    est = SpectralEstimate(
        value=float(val),
        witness=x,
        starts_used=len(init),
        iterations=[r[2] for r in results],
        converged=bool(conv),
        shift=float(sh),
        trace_length=int(sum(r[2] for r in results)),
    )
    for tup in witness_tuples:
        vecs = [np.asarray(v, dtype=float) for v in tup]
        norms = np.prod([np.linalg.norm(v) for v in vecs])
        if norms == 0:
            continue
        ratio = abs(eval_form(phi, *vecs)) / norms
        if ratio > est.value:
            est.value = float(ratio)
            est.source = "tuple"
            est.witness_tuple = [v.tolist() for v in vecs]
    return est


def d_norm_bounds(n: int, k: int) -> tuple[float, float]:
    """Closed-form lower/upper bounds on the norm of D = J - A_K.

    lower = D(1..1)/|1|^k = (n^k - n!/(n-k)!)/n^(k/2); upper = k^2 n^((k-2)/2).
    """
    if not n >= k >= 2:
        raise ValueError(f"need n >= k >= 2, got n={n}, k={k}")
    falling = 1
    for i in range(k):
        falling *= n - i
    lower = (n**k - falling) / n ** (k / 2)
    upper = k * k * n ** ((k - 2) / 2)
    return float(lower), float(upper)
