"""
The q-deformed Lame operator
============================

Solve for eigenfunctions with m = 2, reflect them, follow a branch in c and
look at the classical limit eta -> 0.
"""
import numpy as np

from ellbethe.qlame import (QLameProblem, classical_limit_residual, continuation_csv,
                            eigen_residual, empirical_order, qlame_continue, qlame_solve,
                            reflect_point, wronskian, qlame_psi)
from ellbethe.theta import ModularParams, theta

p = ModularParams(0.9j, 0.1)
prob = QLameProblem(2, p)
t0 = [0.25 + 0.1j, 0.55 - 0.05j]

pt = qlame_solve(prob, 0.1, t0)
print("roots", pt.t, "eps", pt.eps)
lams = 0.3 * np.exp(2j * np.pi * np.arange(8) / 8) + 0.1
print("L psi - eps psi", eigen_residual(prob, pt.t, pt.c, lams))

# (t, c) -> (2 eta - t, -c) gives a second eigenfunction with the same eps
r = reflect_point(prob, pt)
print("reflected eps", r.eps, "residual", r.residual)
f = lambda x: qlame_psi(pt.t, pt.c, x, p)  # noqa: E731
g = lambda x: qlame_psi(r.t, r.c, x, p)  # noqa: E731
print("Wronskian at 0.27", wronskian(f, g, 0.27, p))

# a short branch in c, written as csv
cs = list(np.linspace(0.0, 0.3, 7))
print(continuation_csv(qlame_continue(prob, cs, t0), cs))

# (L - 2)/(4 eta^2) approaches the Lame differential operator at rate eta^2
etas = [0.08, 0.04, 0.02, 0.01]
res = classical_limit_residual(2, lambda x: theta(x + 0.3, p), 0.27 + 0.1j, p.tau, etas)
print("classical residuals", res, "order", empirical_order(etas, res))
