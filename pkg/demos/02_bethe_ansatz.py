"""
Bethe ansatz on a two-site chain
================================

Solve the Bethe equations for n = 2, m = 1, build the eigenfunction from the
closed formula and check it against the transfer matrix.
"""
import numpy as np

from ellbethe.bethe import (BetheProblem, bae_solve, bethe_vector_oracle, closed_vector_on_chain,
                            eigen_relation_residual, transfer_eigenvalue)
from ellbethe.theta import ModularParams

p = ModularParams(0.9j, 0.11)
prob = BetheProblem((1, 1), (0.0, 0.4), 0.0, p)

sol = bae_solve(prob, [0.2 + 0.1j])
print("root", sol.t, "c", sol.c, "residual", sol.residual_norm, "iterations", sol.iterations)

# closed formula against b(t) applied to the highest weight vector
lam = 0.27 + 0.05j
a = closed_vector_on_chain(prob, sol.t, sol.c, lam)
b = bethe_vector_oracle(prob, sol.t, sol.c, lam)
print("closed vs oracle", np.max(np.abs(a - b)) / np.max(np.abs(b)))

# T(w) psi = eps(w) psi
for w in (0.3 + 0.1j, -0.2 + 0.05j, 0.45):
    eps = transfer_eigenvalue(prob, sol.t, sol.c, w)
    print(f"w={w}: eps={eps:.6f}, residual {eigen_relation_residual(prob, sol.t, sol.c, w, lam):.1e}")

# json round trip of the solution
print(sol.to_json(prob))
