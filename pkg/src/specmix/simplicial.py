"""Dense operators on skew-symmetric (d-1)-cochains of a complex.

Cochains are stored by their value on the canonical (ascending) orientation
of each (d-1)-cell, so every operator here is a plain square matrix indexed by
``X.cells()``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .complexes import OrientedCell, SimplicialComplex, degree_profile, orientation_sign

__all__ = [
    "Cochain",
    "DenseOperator",
    "KernelBasis",
    "IrregularComplexError",
    "cell_index",
    "boundary_matrix",
    "kernel_basis",
    "operator_matrix",
    "restricted_norm",
    "row_l1_norms",
    "tau_mask",
    "dump_matrix_csv",
]


class IrregularComplexError(ValueError):
    """Raised when an operation needs an r-regular complex."""

    def __init__(self, message, profile):
        super().__init__(message)
        self.profile = profile


@dataclass(frozen=True)
class Cochain:
    complex: SimplicialComplex
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.complex.num_cells,):
            raise ValueError(f"cochain needs {self.complex.num_cells} values, got {self.values.shape}")

    def __call__(self, cell) -> float:
        """Value on an oriented cell given in any vertex order."""
        oc = OrientedCell(tuple(cell))
        idx = cell_index(self.complex)[oc.canonical]
        return oc.parity * float(self.values[idx])

    def inner(self, other: "Cochain") -> float:
        return float(self.values @ other.values)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass(frozen=True)
class DenseOperator:
    kind: str
    matrix: np.ndarray
    complex: SimplicialComplex
    alpha: float | None = None

    @property
    def shape(self):
        return self.matrix.shape


@dataclass(frozen=True)
class KernelBasis:
    complex: SimplicialComplex
    basis: np.ndarray  # columns span Z_{d-1}
    tol: float

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def cell_index(X: SimplicialComplex, dim: int | None = None) -> dict:
    return {c: i for i, c in enumerate(X.cells(dim))}


def boundary_matrix(X: SimplicialComplex) -> DenseOperator:
    """Matrix of the boundary map from (d-1)-cochains to (d-2)-cochains.

    Entry (tau, sigma) with sigma = {v} u tau is the sign of the oriented cell
    (v, tau_0, ..., tau_{d-2}) relative to sigma's ascending order, i.e.
    (-1)^(number of vertices of tau below v). For d = 1 the single row is the
    empty cell and the matrix is the all-ones row.
    """
    rows = list(combinations(range(X.n), X.d - 1))
    cols = cell_index(X)
    M = np.zeros((len(rows), len(cols)))
    for i, tau in enumerate(rows):
        rest = set(tau)
        for v in range(X.n):
            if v in rest:
                continue
            below = sum(1 for t in tau if t < v)
            sigma = tuple(sorted(tau + (v,)))
            M[i, cols[sigma]] = -1.0 if below % 2 else 1.0
    return DenseOperator("boundary", M, X)


def kernel_basis(X: SimplicialComplex, tol: float = 1e-10) -> KernelBasis:
    """Orthonormal basis of the cycle space ker(boundary) via SVD."""
    M = boundary_matrix(X).matrix
    ncols = M.shape[1]
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol * s[0]))
    return KernelBasis(X, vt[rank:].T.copy().reshape(ncols, ncols - rank), tol)


def _adjacency_and_signed_pairs(X: SimplicialComplex):
    cells = X.cells()
    idx = {c: i for i, c in enumerate(cells)}
    m = len(cells)
    A = np.zeros((m, m))
    S = np.zeros((m, m))  # sgn(pi) for every pair differing in one vertex
    for eta in combinations(range(X.n), X.d + 1):
        in_x = X.has_facet(eta)
        faces = list(combinations(eta, X.d))
        for a in range(len(faces)):
            for b in range(a + 1, len(faces)):
                s = orientation_sign(faces[a], faces[b])
                i, j = idx[faces[a]], idx[faces[b]]
                S[i, j] = S[j, i] = s
                if in_x:
                    A[i, j] = A[j, i] = s
    return A, S


def operator_matrix(X: SimplicialComplex, kind: str, alpha: float | None = None) -> DenseOperator:
    """Assemble A, J, D, the upper Laplacian, ``alpha*I - Lap`` or the B matrix.

    ``kind`` is one of ``"A"``, ``"J"``, ``"D"``, ``"laplacian"``,
    ``"alpha_shift"`` (needs ``alpha``) and ``"b_matrix"``. For the B matrix
    ``alpha`` is the coefficient c in ``A - cJ + c*d*I`` and defaults to r/n;
    the complex must be regular.
    """
    m = X.num_cells
    if kind in ("D", "laplacian", "alpha_shift"):
        prof = degree_profile(X)
        deg = np.array([prof.degrees[c] for c in X.cells()], dtype=float)
    if kind == "D":
        return DenseOperator("D", np.diag(deg), X)
    if kind == "b_matrix":
        prof = degree_profile(X)
        if not prof.regular:
            raise IrregularComplexError(
                f"B matrix needs a regular complex; degrees range {prof.min}..{prof.max}", prof
            )
        coef = prof.max / X.n if alpha is None else float(alpha)
    A, S = _adjacency_and_signed_pairs(X)
    if kind == "A":
        return DenseOperator("A", A, X)
    if kind == "J":
        J = S + X.d * np.eye(m)
        return DenseOperator("J", J, X)
    if kind == "laplacian":
        return DenseOperator("laplacian", np.diag(deg) - A, X)
    if kind == "alpha_shift":
        if alpha is None:
            raise ValueError("alpha_shift needs alpha")
        return DenseOperator("alpha_shift", float(alpha) * np.eye(m) - (np.diag(deg) - A), X, float(alpha))
    if kind == "b_matrix":
        # off-diagonal: sgn*(1-c) on facets, -sgn*c on non-facets; diagonal cancels exactly
        B = A - coef * S
        np.fill_diagonal(B, 0.0)
        return DenseOperator("b_matrix", B, X, coef)
    raise ValueError(f"unknown operator kind {kind!r}")


def tau_mask(X: SimplicialComplex, tau) -> np.ndarray:
    """Boolean mask of the (d-1)-cells containing the (d-2)-cell ``tau``.

    ``A_tau`` is ``A`` restricted to the rows/columns where the mask holds and
    to pairs whose union contains ``tau`` (automatic for two such cells).
    """
    tau = set(tau)
    return np.array([tau <= set(c) for c in X.cells()])


def restricted_norm(M, basis: KernelBasis) -> float:
    """Operator norm of ``M`` on the cycle space: top singular value of M Q."""
    mat = M.matrix if isinstance(M, DenseOperator) else np.asarray(M)
    Q = basis.basis
    if mat.shape[1] != Q.shape[0]:
        raise ValueError(f"operator has {mat.shape[1]} columns, basis lives in R^{Q.shape[0]}")
    if Q.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(mat @ Q, 2))


def row_l1_norms(M) -> np.ndarray:
    mat = M.matrix if isinstance(M, DenseOperator) else np.asarray(M)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"row norms need a square matrix, got shape {mat.shape}")
    return np.abs(mat).sum(axis=1)


def _cell_label(cell) -> str:
    return "-".join(str(v) for v in cell) if cell else "()"


def dump_matrix_csv(op: DenseOperator, path) -> None:
    """Write the matrix with dash-joined canonical cells as headers."""
    X = op.complex
    cols = X.cells()
    rows = list(combinations(range(X.n), X.d - 1)) if op.kind == "boundary" else cols
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([""] + [_cell_label(c) for c in cols])
        for c, row in zip(rows, op.matrix):
            w.writerow([_cell_label(c)] + [f"{x:.12g}" for x in row])
