"""
IRF and eight-vertex models
===========================

Star-triangle relation for the face weights, the vertex-IRF intertwiner and
an eight-vertex eigenvector obtained from a Bethe eigenfunction at eta = 1/5.
"""
from fractions import Fraction

import numpy as np

from ellbethe.bethe import BetheProblem, bae_solve
from ellbethe.chain import FundamentalChain
from ellbethe.lattice import (r8v_eval, r8v_ybe_residual, t8v_bethe_eigenvector,
                              t8v_intertwine_residual, vertex_irf_residual)
from ellbethe.rmatrix import star_triangle_residual
from ellbethe.theta import ModularParams

p = ModularParams(0.9j, 0.11)

# one hexagon of heights around mu = 0.05
print("star-triangle", star_triangle_residual(0, 1, 0, 1, 0, -1, 0.3, 0.1 + 0.05j, p, mu=0.05))

# Baxter's matrix solves the ordinary Yang-Baxter equation
print(np.round(r8v_eval(0.3, p), 4))
print("R_8V YBE", r8v_ybe_residual(0.3 + 0.1j, 0.12 - 0.05j, p))

# the intertwiner S relates the two R-matrices, and S_n the transfer matrices
print("vertex-IRF", vertex_irf_residual(0.3, 0.1 + 0.05j, 0.23, p, relative=True))
print("S_n, n=4", t8v_intertwine_residual(FundamentalChain((0.0, 0.31, 0.55, 0.8), p), 0.27, 0.13))

# rational eta: sum the Bethe eigenfunction over mu + 2 eta j
q = ModularParams(0.9j, 0.2)
prob = BetheProblem((1, 1), (0.0, 0.37 + 0.05j), 0.0, q)
sol = bae_solve(prob, [0.2 + 0.1j])
zs = [0.3, 0.1 + 0.2j, 0.77]
v, res, eps = t8v_bethe_eigenvector(prob, sol, 0.13 + 0.07j, zs, Fraction(1, 5))
print("8V eigenvector", np.round(v / v[np.argmax(np.abs(v))], 6))
print("residuals", res)
