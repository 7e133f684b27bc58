"""Simplicial complexes, uniform hypergraphs and their combinatorics.

Vertices are the integers ``0..n-1``. Every cell, facet and edge is stored as
an ascending tuple, and collections of them are kept lexicographically sorted,
so matrices indexed by cells and JSON dumps are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SimplicialComplex",
    "Hypergraph",
    "OrientedCell",
    "DegreeProfile",
    "permutation_parity",
    "orientation_sign",
    "gen_complex",
    "gen_hypergraph",
    "degree_profile",
    "counter_uniforms",
]


def _normalize_sets(sets: Iterable[Sequence[int]], size: int, n: int, what: str) -> tuple:
    out = []
    seen = set()
    for pos, s in enumerate(sets):
        t = tuple(int(v) for v in s)
        if len(t) != size:
            raise ValueError(f"{what}[{pos}]={list(t)}: expected {size} vertices, got {len(t)}")
        if len(set(t)) != size:
            raise ValueError(f"{what}[{pos}]={list(t)}: repeated vertex")
        if any(v < 0 or v >= n for v in t):
            raise ValueError(f"{what}[{pos}]={list(t)}: vertex outside 0..{n - 1}")
        t = tuple(sorted(t))
        if t in seen:
            raise ValueError(f"{what}[{pos}]={list(t)}: duplicate")
        seen.add(t)
        out.append(t)
    return tuple(sorted(out))


@dataclass(frozen=True)
class SimplicialComplex:
    """A d-dimensional complex on ``n`` vertices with a complete skeleton.

    Only the top-dimensional cells are stored; every smaller cell is present.
    """

    n: int
    d: int
    facets: tuple = ()
    skeleton: str = field(default="complete", compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d={self.d}: dimension must be >= 1")
        if self.n < self.d:
            raise ValueError(f"n={self.n} < d={self.d}: no (d-1)-cells to act on")
        object.__setattr__(self, "facets", _normalize_sets(self.facets, self.d + 1, self.n, "facets"))
        object.__setattr__(self, "_facet_set", frozenset(self.facets))

    def cells(self, dim: int | None = None) -> list[tuple[int, ...]]:
        """Canonical cells of dimension ``dim`` (default d-1), lexicographic."""
        dim = self.d - 1 if dim is None else dim
        if dim == self.d:
            return list(self.facets)
        return list(combinations(range(self.n), dim + 1))

    def has_facet(self, cell: Iterable[int]) -> bool:
        return tuple(sorted(cell)) in self._facet_set

    @property
    def num_cells(self) -> int:
        return comb(self.n, self.d)


@dataclass(frozen=True)
class Hypergraph:
    """A k-uniform hypergraph without loops or multiple edges."""

    n: int
    k: int
    edges: tuple = ()

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k={self.k}: uniformity must be >= 2")
        if self.n < self.k:
            raise ValueError(f"n={self.n} < k={self.k}")
        object.__setattr__(self, "edges", _normalize_sets(self.edges, self.k, self.n, "edges"))
        object.__setattr__(self, "_edge_set", frozenset(self.edges))
        arr = np.asarray(self.edges, dtype=np.int64).reshape(-1, self.k)
        arr.setflags(write=False)
        object.__setattr__(self, "_edge_array", arr)

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return tuple(sorted(vertices)) in self._edge_set

    def edge_array(self) -> np.ndarray:
        """Read-only (|E|, k) array of the edges."""
        return self._edge_array

    @property
    def density(self) -> float:
        return len(self.edges) / comb(self.n, self.k)


def permutation_parity(perm: Sequence[int]) -> int:
    """Sign (+1/-1) of a permutation given in one-line notation."""
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        j, length = start, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class OrientedCell:
    vertices: tuple

    def __post_init__(self):
        vs = tuple(int(v) for v in self.vertices)
        if len(set(vs)) != len(vs):
            raise ValueError(f"cell {vs} repeats a vertex")
        object.__setattr__(self, "vertices", vs)

    @property
    def canonical(self) -> tuple:
        return tuple(sorted(self.vertices))

    @property
    def parity(self) -> int:
        order = sorted(range(len(self.vertices)), key=lambda i: self.vertices[i])
        return permutation_parity(order)

    def reversed(self) -> "OrientedCell":
        """The opposite orientation (swap of the first two vertices)."""
        vs = self.vertices
        if len(vs) < 2:
            raise ValueError("cells with fewer than two vertices have a single orientation")
        return OrientedCell((vs[1], vs[0]) + vs[2:])


def orientation_sign(sigma, sigma_prime) -> int:
    """Sign of the permutation aligning two cells that differ in one vertex.

    ``pi`` sends position ``i`` of ``sigma_prime`` to the position of the same
    vertex in ``sigma``; the single unshared vertex maps to the single free
    slot. The result is symmetric in its arguments.
    """
    a = tuple(sigma.vertices if isinstance(sigma, OrientedCell) else sigma)
    b = tuple(sigma_prime.vertices if isinstance(sigma_prime, OrientedCell) else sigma_prime)
    if len(a) != len(b):
        raise ValueError(f"cells {a} and {b} have different sizes")
    shared = set(a) & set(b)
    if len(shared) < len(a) - 1:
        raise ValueError(f"cells {a} and {b} share fewer than {len(a) - 1} vertices")
    pos = {v: i for i, v in enumerate(a)}
    perm = [pos.get(v, -1) for v in b]
    if -1 in perm:
        free = (set(range(len(a))) - set(perm)).pop()
        perm[perm.index(-1)] = free
    return permutation_parity(perm)


# ---------------------------------------------------------------- random streams


def counter_uniforms(seed: int, count: int, stream: int = 0) -> np.ndarray:
    """Uniforms on [0, 1) where entry ``i`` depends only on (seed, stream, i).

    Backed by numpy's Philox counter-based generator keyed by the seed; the
    stream index selects a disjoint key so different consumers never overlap.
    """
    if seed < 0:
        raise ValueError("seed must be non-negative")
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random(count)


def gen_complex(kind: str, n: int, d: int, p: float | None = None, seed: int | None = None) -> SimplicialComplex:
    """Build a complete, empty or Linial-Meshulam random complex.

    The random model keeps every potential facet independently with
    probability ``p``; the decision for the facet of lexicographic rank ``i``
    uses the ``i``-th counter-based uniform for ``seed``.
    """
    if not (n > d >= 1):
        raise ValueError(f"need n > d >= 1, got n={n}, d={d}")
    candidates = list(combinations(range(n), d + 1))
    if kind == "complete":
        facets = candidates
    elif kind == "empty":
        facets = []
    elif kind in ("linial-meshulam", "lm"):
        if p is None or not (0.0 <= p <= 1.0):
            raise ValueError(f"p={p}: probability must lie in [0, 1]")
        if seed is None:
            raise ValueError("linial-meshulam complexes need a seed")
        u = counter_uniforms(seed, len(candidates))
        facets = [c for c, ui in zip(candidates, u) if ui < p]
    else:
        raise ValueError(f"unknown complex kind {kind!r}")
    return SimplicialComplex(n, d, tuple(facets))


def gen_hypergraph(kind: str, n: int, k: int, alpha: float | None = None, seed: int | None = None) -> Hypergraph:
    """Complete k-uniform hypergraph or a sample of G(n, alpha, k)."""
    if not (n >= k >= 2):
        raise ValueError(f"need n >= k >= 2, got n={n}, k={k}")
    candidates = list(combinations(range(n), k))
    if kind == "complete":
        edges = candidates
    elif kind == "gnp":
        if alpha is None or not (0.0 <= alpha <= 1.0):
            raise ValueError(f"alpha={alpha}: probability must lie in [0, 1]")
        if seed is None:
            raise ValueError("gnp hypergraphs need a seed")
        u = counter_uniforms(seed, len(candidates))
        edges = [c for c, ui in zip(candidates, u) if ui < alpha]
    else:
        raise ValueError(f"unknown hypergraph kind {kind!r}")
    return Hypergraph(n, k, tuple(edges))


# ---------------------------------------------------------------- degrees


@dataclass(frozen=True)
class DegreeProfile:
    degrees: dict
    min: int
    max: int
    mean: float
    regular: bool

    @property
    def r(self) -> int | None:
        """Common degree of a regular object, else ``None``."""
        return self.max if self.regular else None


def degree_profile(obj: SimplicialComplex | Hypergraph) -> DegreeProfile:
    """Exact degree of every (d-1)-cell of a complex / (k-1)-set of a hypergraph."""
    if isinstance(obj, SimplicialComplex):
        size, sets = obj.d, obj.facets
    elif isinstance(obj, Hypergraph):
        size, sets = obj.k - 1, obj.edges
    else:
        raise TypeError(f"expected SimplicialComplex or Hypergraph, got {type(obj).__name__}")
    degrees = {c: 0 for c in combinations(range(obj.n), size)}
    for s in sets:
        for c in combinations(s, size):
            degrees[c] += 1
    values = list(degrees.values())
    lo, hi = min(values), max(values)
    return DegreeProfile(degrees, lo, hi, sum(values) / len(values), lo == hi)
