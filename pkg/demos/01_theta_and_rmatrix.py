"""
Theta function and the dynamical R-matrix
=========================================

Evaluate the odd theta function, check its quasi-periodicity, then build
the dynamical R-matrix and test the dynamical Yang-Baxter equation.
"""
import numpy as np

from ellbethe.rmatrix import dybe_residual, rmatrix_eval
from ellbethe.theta import ModularParams, theta

p = ModularParams(0.9j, 0.11)
z = 0.31 + 0.17j

# theta is odd, antiperiodic under z -> z + 1, and picks up an exponential under z -> z + tau
print("theta(z)          ", theta(z, p))
print("theta(z) + theta(-z)", abs(theta(z, p) + theta(-z, p)))
print("theta(z+1) + theta(z)", abs(theta(z + 1, p) + theta(z, p)))
mult = -np.exp(-1j * np.pi * (p.tau + 2 * z))
print("tau shift        ", abs(theta(z + p.tau, p) - mult * theta(z, p)))

# R(z, lam) is 4x4 and preserves the total weight
R = rmatrix_eval(0.3 + 0.05j, 0.23, p)
print(np.round(R, 4))

# dynamical YBE over a few random points
rng = np.random.default_rng(0)
pts = rng.uniform(-0.5, 0.5, (5, 3)) + 0.2j * rng.uniform(-1, 1, (5, 3))
print("max DYBE residual", max(dybe_residual(a, b, c, p) for a, b, c in pts))
