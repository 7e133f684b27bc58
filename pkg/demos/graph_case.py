"""Graph case: the simplicial machinery at d=1 against dense linear algebra."""

import numpy as np

from specmix import gen_complex, kernel_basis, operator_matrix, restricted_norm, rho_simplicial, verify_mixing_simplicial

for n in (6, 8, 10):
    X = gen_complex("complete", n, 1)
    Z = kernel_basis(X)
    norm = restricted_norm(operator_matrix(X, "A"), Z)
    rep = verify_mixing_simplicial(X, n - 1, bins=0)
    rho = rho_simplicial(X, n - 1).rho
    print(f"K_{n}: |A on cycles| = {norm:.6f}  rho = {rho:.4f}  min mixing margin = {rep.min_margin:.3e}")

X = gen_complex("lm", 9, 1, p=0.5, seed=4)
A = operator_matrix(X, "A").matrix
print("G(9, 0.5) seed 4: full spectrum of A:", np.round(np.linalg.eigvalsh(A), 3) + 0.0)
