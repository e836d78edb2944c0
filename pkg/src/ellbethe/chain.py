"""Tensor products of fundamental representations and their operator algebra.

For W = V^{(x) n} with evaluation points z_1..z_n the L-operator is the ordered
product of R-matrices with dynamical shifts by the weights of the factors to the
right. Its auxiliary 2x2 blocks A, B, C, D act on functions of lambda as the
difference operators a, b, c, d:

    (a f)(lam) = A(lam) f(lam - 2 eta)      (c f)(lam) = C(lam) f(lam - 2 eta)
    (b f)(lam) = B(lam) f(lam + 2 eta)      (d f)(lam) = D(lam) f(lam + 2 eta)
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateRootsError
from .rmatrix import rmatrix_eval, rs_coeffs
from .tensor import aux_blocks, basis_index, dyn_embed, total_weights, zero_weight_indices
from .theta import ModularParams, lattice_reduce, theta


class DifferenceOperator:
    """Finite sum f(lam) -> sum_k M_k(lam) f(lam + 2 eta k).

    ``terms`` maps the integer shift k to a callable lam -> matrix (or scalar).
    """

    def __init__(self, terms, eta):
        self.terms = dict(terms)
        self.eta = eta

    def coeffs(self, lam):
        return {k: fn(lam) for k, fn in self.terms.items()}

    def apply(self, f, lam):
        return sum(fn(lam) @ f(lam + 2 * self.eta * k) for k, fn in self.terms.items())

    def __matmul__(self, other):
        """Composition self o other."""
        eta = self.eta
        pairs = {}
        for k1, f1 in self.terms.items():
            for k2, f2 in other.terms.items():
                pairs.setdefault(k1 + k2, []).append((k1, f1, f2))

        def make(plist):
            return lambda lam: sum(f1(lam) @ f2(lam + 2 * eta * k1) for k1, f1, f2 in plist)

        return DifferenceOperator({k: make(v) for k, v in pairs.items()}, eta)

    def __add__(self, other):
        terms = dict(self.terms)
        for k, fn in other.terms.items():
            if k in terms:
                terms[k] = (lambda f, g: lambda lam: f(lam) + g(lam))(terms[k], fn)
            else:
                terms[k] = fn
        return DifferenceOperator(terms, self.eta)

    def __neg__(self):
        return self.scale(lambda lam: -1.0)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, g):
        """Left multiplication by the scalar function g(lam)."""
        return DifferenceOperator(
            {k: (lambda fn: lambda lam: g(lam) * fn(lam))(fn) for k, fn in self.terms.items()},
            self.eta)

    def scale_weight(self, g, weights):
        """Left multiplication by g(lam - 2 eta h), h diagonal with ``weights``."""
        eta = self.eta
        weights = np.asarray(weights)

        def wrap(fn):
            return lambda lam: np.asarray(g(lam - 2 * eta * weights))[:, None] * fn(lam)

        return DifferenceOperator({k: wrap(fn) for k, fn in self.terms.items()}, eta)


@dataclass(frozen=True)
class FundamentalChain:
    """W = V(z_1) x ... x V(z_n) with the product-formula L-operator."""

    z_points: tuple
    p: ModularParams

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.z_points)
        object.__setattr__(self, "z_points", zs)
        for i in range(len(zs)):
            for j in range(i):
                z0, _, _ = lattice_reduce(zs[i] - zs[j], self.p.tau)
                if abs(z0) < 1e-6:
                    raise DegenerateRootsError(
                        f"evaluation points {i} and {j} coincide modulo the lattice")

    @property
    def n(self):
        return len(self.z_points)

    @property
    def dim(self):
        return 2 ** self.n

    def weights(self):
        return total_weights(self.n)

    def zero_weight(self):
        return zero_weight_indices(self.n)

    def highest_vector(self):
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def l_operator(self, z, lam):
        return _l_operator(self, complex(z), complex(lam))

    def blocks(self, z, lam):
        """(A, B, C, D) as End(W) matrices."""
        return aux_blocks(self.l_operator(z, lam), self.n + 1)

    def block(self, name, z, lam):
        return self.blocks(z, lam)["ABCD".index(name)]

    def op(self, name, z):
        """Difference operator a(z), b(z), c(z) or d(z) on Fun(W)."""
        shift = {"a": -1, "c": -1, "b": 1, "d": 1}[name]
        upper = name.upper()
        return DifferenceOperator({shift: lambda lam: self.block(upper, z, lam)}, self.p.eta)

    def transfer(self, z):
        """T(z) = a(z) + d(z) restricted to the zero-weight space."""
        idx = self.zero_weight()
        sub = np.ix_(idx, idx)
        return DifferenceOperator({
            -1: lambda lam: self.block("A", z, lam)[sub],
            1: lambda lam: self.block("D", z, lam)[sub],
        }, self.p.eta)

    def highest_weight_D(self, z, lam):
        """D(z, lam) on e[1]^n: theta(lam - 2 eta n)/theta(lam) prod theta(z - z_j)/theta(z - z_j - 2 eta)."""
        p, eta = self.p, self.p.eta
        out = theta(lam - 2 * eta * self.n, p) / theta(lam, p)
        for zj in self.z_points:
            out *= theta(z - zj, p) / theta(z - zj - 2 * eta, p)
        return out


@lru_cache(maxsize=4096)
def _l_operator(chain, z, lam):
    n, p = chain.n, chain.p
    N = n + 1
    L = np.eye(2 ** N, dtype=complex)
    for k, zk in enumerate(chain.z_points, start=1):
        factor = dyn_embed(lambda l, x=z - zk: rmatrix_eval(x, l, p), (0, k), N,
                           lam, p.eta, spectators=range(k + 1, N))
        L = L @ factor
    L.setflags(write=False)
    return L


def l_operator(chain, z, lam):
    return chain.l_operator(z, lam)


def abcd_blocks(chain, z, lam):
    return chain.blocks(z, lam)


def transfer_apply(chain, z, f, lam):
    """(T(z) f)(lam) for f: lam -> zero-weight vector."""
    return chain.transfer(z).apply(f, lam)


def rll_residual(chain, z, w, lam):
    """RLL relation on V x V x W, max-norm of the difference."""
    p, eta = chain.p, chain.p.eta
    N = chain.n + 2
    wsites = list(range(2, N))

    def R(x):
        return lambda l: rmatrix_eval(x, l, p)

    def L(x):
        return lambda l: chain.l_operator(x, l)

    lhs = dyn_embed(R(z - w), (0, 1), N, lam, eta, wsites) \
        @ dyn_embed(L(z), [0] + wsites, N, lam, eta) \
        @ dyn_embed(L(w), [1] + wsites, N, lam, eta, (0,))
    rhs = dyn_embed(L(w), [1] + wsites, N, lam, eta) \
        @ dyn_embed(L(z), [0] + wsites, N, lam, eta, (1,)) \
        @ dyn_embed(R(z - w), (0, 1), N, lam, eta)
    return float(np.max(np.abs(lhs - rhs)))


def ab_relation(chain, w, t):
    """a(w)b(t) - r(t-w, lam) b(t)a(w) - s(t-w, lam) b(w)a(t) as a difference operator."""
    p = chain.p
    a, b = chain.op("a", w), chain.op("b", t)
    lhs = a @ b
    term1 = (chain.op("b", t) @ chain.op("a", w)).scale(lambda lam: rs_coeffs(t - w, lam, p)[0])
    term2 = (chain.op("b", w) @ chain.op("a", t)).scale(lambda lam: rs_coeffs(t - w, lam, p)[1])
    return lhs - term1 - term2


def db_relation(chain, w, t):
    """d(w)b(t) - r(w-t, lam-2eta h) b(t)d(w) + s(t-w, lam-2eta h) b(w)d(t)."""
    p = chain.p
    wts = chain.weights()
    lhs = chain.op("d", w) @ chain.op("b", t)
    term1 = (chain.op("b", t) @ chain.op("d", w)).scale_weight(
        lambda l: rs_coeffs(w - t, l, p)[0], wts)
    term2 = (chain.op("b", w) @ chain.op("d", t)).scale_weight(
        lambda l: rs_coeffs(t - w, l, p)[1], wts)
    return lhs - term1 + term2


def commutation_residual(chain, w, t, lam, probe, which="a"):
    """Norm of the a-b (or d-b) exchange relation applied to ``probe`` at lam."""
    z0, _, _ = lattice_reduce(w - t, chain.p.tau)
    if abs(z0) < 1e-6:
        raise DegenerateRootsError("w and t coincide modulo the lattice")
    rel = ab_relation(chain, w, t) if which == "a" else db_relation(chain, w, t)
    return float(np.linalg.norm(rel.apply(probe, lam)))


def b_product_vector(chain, ts, lam, v=None):
    """(b(t_1) ... b(t_k) v)(lam) for a constant vector v (default e[1]^n)."""
    eta = chain.p.eta
    vec = chain.highest_vector() if v is None else np.asarray(v, dtype=complex)
    for j in reversed(range(len(ts))):
        vec = chain.block("B", ts[j], lam + 2 * eta * j) @ vec
    return vec


def rank_independence_check(chain, ts, lam, rtol=1e-10):
    """Rank of the 2^m vectors prod_{j in J} b(t_j) e[1]^m, J over all subsets."""
    m = len(ts)
    if chain.n != m:
        raise ValueError("chain length must equal the number of spectral parameters")
    for i in range(m):
        for j in range(i):
            z0, _, _ = lattice_reduce(ts[i] - ts[j], chain.p.tau)
            if abs(z0) < 1e-6:
                raise DegenerateRootsError(f"t[{i}] and t[{j}] coincide modulo the lattice")
    cols = []
    for mask in range(2 ** m):
        sub = [ts[j] for j in range(m) if mask >> j & 1]
        cols.append(b_product_vector(chain, sub, lam))
    M = np.array(cols).T
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * s[0]))


def basis_vector(chain, signs):
    v = np.zeros(chain.dim, dtype=complex)
    v[basis_index(signs)] = 1.0
    return v


def _expand_a(labels_w, labels_t, vals, lam, p):
    """Move a(w) right through b(t_1)...b(t_k) using the a-b exchange relation.

    Returns {(sorted b labels, a label): coefficient at lam}. Label 0 is w,
    label j >= 1 is t_j. The b's commute, so b strings are keyed as multisets.
    """
    if not labels_t:
        return {((), labels_w): 1.0}
    first, rest = labels_t[0], labels_t[1:]
    r, s = rs_coeffs(vals[first] - vals[labels_w], lam, p)
    out = {}
    for coef, b_label, a_label in ((r, first, labels_w), (s, labels_w, first)):
        inner = _expand_a(a_label, rest, vals, lam + 2 * p.eta, p)
        for (bs, al), c in inner.items():
            key = (tuple(sorted((b_label,) + bs)), al)
            out[key] = out.get(key, 0.0) + coef * c
    return out


def a_exchange_coeffs(w, ts, lam, p, order=None):
    """Coefficients A_0..A_m of a(w) b(t_1)...b(t_m) by recursive expansion.

    A_0 multiplies b(t_1)...b(t_m) a(w); A_j multiplies the string with t_j
    replaced by w, followed by a(t_j). ``order`` is the permutation in which the
    b's are written before expanding (identity by default).
    """
    m = len(ts)
    vals = [w] + list(ts)
    order = list(range(1, m + 1)) if order is None else [o + 1 for o in order]
    terms = _expand_a(0, order, vals, lam, p)
    coeffs = np.zeros(m + 1, dtype=complex)
    for (bs, al), c in terms.items():
        expected = tuple(sorted(x for x in range(m + 1) if x != al))
        if bs != expected:
            raise AssertionError("unexpected term in the exchange expansion")
        coeffs[al] += c
    return coeffs


def a_exchange_closed(w, ts, lam, p):
    """Closed forms of A_0 and A_1."""
    eta = p.eta
    A0 = np.prod([rs_coeffs(t - w, lam + 2 * eta * j, p)[0] for j, t in enumerate(ts)])
    A1 = rs_coeffs(ts[0] - w, lam, p)[1] * np.prod(
        [rs_coeffs(t - ts[0], lam + 2 * eta * j, p)[0] for j, t in enumerate(ts) if j > 0])
    return complex(A0), complex(A1)


def a_exchange_residual(chain, w, ts, lam, probe):
    """Check a(w) b(t_1)..b(t_m) = sum_j A_j (b-string) a(.) on ``probe`` at lam."""
    m = len(ts)
    vals = [w] + list(ts)

    def string(bs):
        op = None
        for x in bs:
            op = chain.op("b", vals[x]) if op is None else op @ chain.op("b", vals[x])
        return op

    lhs = chain.op("a", w)
    for t in ts:
        lhs = lhs @ chain.op("b", t)
    total = lhs
    for j in range(m + 1):
        # t_j is replaced in place by w (label 0); j = 0 is the wanted term
        bs = [0 if x == j else x for x in range(1, m + 1)]
        rhs = string(bs) @ chain.op("a", vals[j])
        total = total - rhs.scale(
            lambda l, j=j: a_exchange_coeffs(w, ts, l, chain.p)[j])
    return float(np.linalg.norm(total.apply(probe, lam)))
