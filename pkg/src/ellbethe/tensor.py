"""Tensor products of two-dimensional factors and the dynamical-shift embedding.

Basis convention: a state of N factors is a sign string (s_0, ..., s_{N-1}) with
s_i in {+1, -1}; index 0 of each factor is e[+1], index 1 is e[-1], and factor 0
is the most significant digit (lexicographic order with e[1] < e[-1]).
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np


@lru_cache(maxsize=None)
def site_weights(N):
    """(2**N, N) integer array of per-factor weights (+1 / -1)."""
    bits = np.array(list(product((0, 1), repeat=N)), dtype=int).reshape(2 ** N, N)
    return 1 - 2 * bits


def total_weights(N, sites=None):
    w = site_weights(N)
    if sites is not None:
        w = w[:, list(sites)]
    return w.sum(axis=1)


def basis_index(signs):
    """Index of the basis vector e[s_0] x ... x e[s_{N-1}]."""
    idx = 0
    for s in signs:
        idx = 2 * idx + (0 if s == 1 else 1)
    return idx


def zero_weight_indices(N):
    return np.flatnonzero(total_weights(N) == 0)


def embed(mat, sites, N):
    """Embed a matrix acting on ``sites`` (in that order) into N factors."""
    sites = list(sites)
    k = len(sites)
    rest = [s for s in range(N) if s not in sites]
    order = sites + rest
    T = np.kron(np.asarray(mat), np.eye(2 ** (N - k))).reshape([2] * (2 * N))
    inv = [order.index(i) for i in range(N)]
    T = np.transpose(T, inv + [N + x for x in inv])
    return T.reshape(2 ** N, 2 ** N)


def dyn_embed(fn, sites, N, lam, eta, spectators=()):
    """Embed ``fn(lam')`` on ``sites`` with lam' = lam - 2 eta * (weight of spectators).

    This is the meaning of operator arguments such as R^(12)(z, lam - 2 eta h^(3)):
    the spectator factors are untouched, so the operator is block diagonal over
    their weight and each block is evaluated at its own shifted argument.
    """
    spectators = list(spectators)
    if not spectators:
        return embed(fn(lam), sites, N)
    mu = total_weights(N, spectators)
    out = np.zeros((2 ** N, 2 ** N), dtype=complex)
    for val in np.unique(mu):
        cols = mu == val
        full = embed(fn(lam - 2 * eta * val), sites, N)
        out[:, cols] = full[:, cols]
    return out


def is_weight_conserving(mat, weights, tol=0.0):
    """True if mat[i, j] vanishes whenever weights[i] != weights[j]."""
    weights = np.asarray(weights)
    mask = weights[:, None] != weights[None, :]
    return bool(np.all(np.abs(np.asarray(mat)[mask]) <= tol))


def partial_trace_first(mat, N):
    """Trace over factor 0 of an operator on N factors."""
    T = np.asarray(mat).reshape(2, 2 ** (N - 1), 2, 2 ** (N - 1))
    return np.einsum("aiaj->ij", T)


def aux_blocks(mat, N):
    """Split an operator on V (x) W (factor 0 auxiliary) into its 2x2 blocks.

    Returns (A, B, C, D) with A = <e[1]|.|e[1]>, B = <e[1]|.|e[-1]>,
    C = <e[-1]|.|e[1]>, D = <e[-1]|.|e[-1]> as End(W) matrices.
    """
    d = 2 ** (N - 1)
    M = np.asarray(mat)
    return M[:d, :d], M[:d, d:], M[d:, :d], M[d:, d:]
