"""Algebraic Bethe ansatz for the elliptic quantum group E_{tau,eta}(sl2)."""

__version__ = "0.1.0"

from .bethe import (BetheProblem, BetheSolution, bae_residual, bae_solve, bethe_vector_closed,
                    bethe_vector_oracle, canonicalize, closed_vector_on_chain, continue_in_c,
                    eigen_relation_residual, transfer_eigenvalue)
from .chain import DifferenceOperator, FundamentalChain, l_operator, rank_independence_check
from .errors import AdjacencyError, ConvergenceError, DegenerateRootsError, PoleError
from .lattice import (EightVertexChain, PathState, r8v_eval, s_matrix, summation_functional,
                      t8v_bethe_eigenvector, t8v_matrix)
from .qlame import QLameProblem, SpectralPoint, qlame_apply, qlame_eigenvalue, qlame_psi, qlame_solve
from .rmatrix import boltzmann_weight, dybe_residual, rmatrix_eval, star_triangle_residual
from .theta import ModularParams, lattice_reduce, theta, theta_char, theta_deriv

__all__ = [
    "AdjacencyError", "BetheProblem", "BetheSolution", "ConvergenceError",
    "DegenerateRootsError", "DifferenceOperator", "EightVertexChain", "FundamentalChain",
    "ModularParams", "PathState", "PoleError", "QLameProblem", "SpectralPoint",
    "bae_residual", "bae_solve", "bethe_vector_closed", "bethe_vector_oracle",
    "boltzmann_weight", "canonicalize", "closed_vector_on_chain", "continue_in_c",
    "dybe_residual", "eigen_relation_residual", "l_operator", "lattice_reduce",
    "qlame_apply", "qlame_eigenvalue", "qlame_psi", "qlame_solve", "r8v_eval",
    "rank_independence_check", "rmatrix_eval", "s_matrix", "star_triangle_residual",
    "summation_functional", "t8v_bethe_eigenvector", "t8v_matrix", "theta", "theta_char",
    "theta_deriv", "transfer_eigenvalue",
]
