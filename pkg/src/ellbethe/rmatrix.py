"""Dynamical R-matrix, Boltzmann weights, and Yang-Baxter type residuals."""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .errors import AdjacencyError
from .tensor import basis_index, dyn_embed
from .theta import POLE_TOL, check_pole, theta


def rmatrix_coeffs(z, lam, p, pole_tol=POLE_TOL):
    """alpha(z, lam) and beta(z, lam) of the dynamical R-matrix."""
    eta = p.eta
    den = check_pole(theta(lam, p), "theta(lambda)", pole_tol) \
        * check_pole(theta(z - 2 * eta, p), "theta(z - 2 eta)", pole_tol)
    alpha = theta(lam + 2 * eta, p) * theta(z, p) / den
    beta = -theta(lam + z, p) * theta(2 * eta, p) / den
    return alpha, beta


def rmatrix_eval(z, lam, p, pole_tol=POLE_TOL):
    """4x4 matrix R(z, lam) on V (x) V in the basis ++, +-, -+, --."""
    a_p, b_p = rmatrix_coeffs(z, lam, p, pole_tol)
    a_m, b_m = rmatrix_coeffs(z, -lam, p, pole_tol)
    R = np.zeros((4, 4), dtype=complex)
    R[0, 0] = R[3, 3] = 1.0
    R[1, 1], R[1, 2] = a_p, b_p
    R[2, 1], R[2, 2] = b_m, a_m
    return R


def flip_matrix():
    P = np.zeros((4, 4))
    P[0, 0] = P[3, 3] = P[1, 2] = P[2, 1] = 1.0
    return P


def dybe_sides(z, w, lam, p, shift_sign=1):
    """Both sides of the dynamical Yang-Baxter equation on V x V x V.

    ``shift_sign=-1`` flips every dynamical shift; used to check that the
    residual actually discriminates.
    """
    eta = shift_sign * p.eta

    def R(x):
        return lambda l: rmatrix_eval(x, l, p)

    lhs = dyn_embed(R(z - w), (0, 1), 3, lam, eta, (2,)) \
        @ dyn_embed(R(z), (0, 2), 3, lam, eta) \
        @ dyn_embed(R(w), (1, 2), 3, lam, eta, (0,))
    rhs = dyn_embed(R(w), (1, 2), 3, lam, eta) \
        @ dyn_embed(R(z), (0, 2), 3, lam, eta, (1,)) \
        @ dyn_embed(R(z - w), (0, 1), 3, lam, eta)
    return lhs, rhs


def dybe_residual(z, w, lam, p, shift_sign=1):
    lhs, rhs = dybe_sides(z, w, lam, p, shift_sign)
    return float(np.max(np.abs(lhs - rhs)))


def rs_coeffs(t, lam, p, pole_tol=POLE_TOL):
    """Coefficients r(t, lam), s(t, lam) of the a-b and d-b exchange relations."""
    eta = p.eta
    den = check_pole(theta(t, p), "theta(t)", pole_tol) \
        * check_pole(theta(lam - 2 * eta, p), "theta(lambda - 2 eta)", pole_tol)
    r = theta(t - 2 * eta, p) * theta(lam, p) / den
    s = theta(t + lam, p) * theta(2 * eta, p) / den
    return r, s


# --- Boltzmann weights -----------------------------------------------------
# Heights are integers k standing for mu + k; adjacency is tested on the
# integers, the offset only enters through the dynamical argument -2 eta d.

def _adjacent(x, y):
    return x - y in (1, -1)


def boltzmann_weight(a, b, c, d, z, p, mu=0.0):
    """Face weight w(a, b, c, d; z).

    Defined by R(z, -2 eta d) e[c-d] (x) e[b-c] = sum_a w(a,b,c,d;z) e[b-a] (x) e[a-d].
    Returns 0 when ``a`` is a height that the sum does not reach.
    """
    for x, y in ((b, c), (c, d)):
        if not _adjacent(x, y):
            raise AdjacencyError(f"heights {x}, {y} not adjacent")
    if not (_adjacent(a, b) and _adjacent(a, d)):
        raise AdjacencyError(f"height a={a} not adjacent to b={b} and d={d}")
    R = _face_matrix(complex(z), complex(-2 * p.eta * (mu + d)), p)
    col = basis_index((c - d, b - c))
    row = basis_index((b - a, a - d))
    return complex(R[row, col])


@lru_cache(maxsize=4096)
def _face_matrix(z, lam, p):
    # star-triangle sums revisit the same (z, height) pairs many times
    R = rmatrix_eval(z, lam, p)
    R.setflags(write=False)
    return R


def _between(x, y):
    """Heights g with x - g and g - y both in {1, -1}."""
    return [g for g in (x - 1, x + 1) if _adjacent(g, y)]


def star_triangle_sides(a, b, c, d, e, f, z, w, p, mu=0.0):
    for x, y in ((a, b), (b, c), (c, d), (d, e), (e, f), (f, a)):
        if not _adjacent(x, y):
            raise AdjacencyError(f"hexagon heights {x}, {y} not adjacent")

    def W(*args):
        return boltzmann_weight(*args, p=p, mu=mu)

    lhs = sum(W(a, b, g, f, z - w) * W(f, g, d, e, z) * W(g, b, c, d, w)
              for g in set(_between(b, f)) & set(_between(b, d)))
    rhs = sum(W(f, a, g, e, w) * W(a, b, c, g, z) * W(g, c, d, e, z - w)
              for g in set(_between(a, e)) & set(_between(c, e)))
    return lhs, rhs


def star_triangle_residual(a, b, c, d, e, f, z, w, p, mu=0.0):
    lhs, rhs = star_triangle_sides(a, b, c, d, e, f, z, w, p, mu)
    return abs(lhs - rhs)


def hexagons(radius=4, base=range(-2, 3)):
    """All closed height hexagons (a..f) starting in ``base`` with |h| <= radius."""
    out = []
    for a in base:
        for steps in product((1, -1), repeat=5):
            hs = [a]
            for s in steps:
                hs.append(hs[-1] + s)
            if not _adjacent(hs[-1], a):
                continue
            if max(abs(h) for h in hs) <= radius:
                out.append(tuple(hs))
    return out
