"""IRF transfer matrices, Baxter's eight-vertex model and the vertex-IRF map."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .bethe import closed_vector_on_chain, transfer_eigenvalue
from .errors import AdjacencyError
from .rmatrix import boltzmann_weight, rmatrix_coeffs, rmatrix_eval
from .tensor import basis_index, dyn_embed, embed, partial_trace_first, zero_weight_indices
from .theta import POLE_TOL, ModularParams, check_pole, lattice_reduce, theta, theta_char


# --- eight-vertex R-matrix ---------------------------------------------------

def r8v_coeffs(z, p, pole_tol=POLE_TOL):
    eta = p.eta
    t00 = theta_char(0, 0.0, p)
    t0e, t1e = theta_char(0, 2 * eta, p), theta_char(1, 2 * eta, p)
    t0z, t1z = theta_char(0, z, p), theta_char(1, z, p)
    d0 = check_pole(theta_char(0, z - 2 * eta, p), "theta_0(z - 2 eta)", pole_tol)
    d1 = check_pole(theta_char(1, z - 2 * eta, p), "theta_1(z - 2 eta)", pole_tol)
    a = t0z * t0e / (d0 * t00)
    b = t1z * t0e / (d1 * t00)
    c = -t0z * t1e / (d1 * t00)
    d = -t1z * t1e / (d0 * t00)
    return a, b, c, d


def r8v_eval(z, p, pole_tol=POLE_TOL):
    """Baxter's matrix [[a,0,0,d],[0,b,c,0],[0,c,b,0],[d,0,0,a]] in the basis ++, +-, -+, --.

    b sits on the spin-preserving off-flip entries and d on the corners. Since
    b(0) = d(0) = 0, R_8V(0) = P holds for either placement; this one is
    singled out by the Yang-Baxter equation and by the residue at z = 2 eta
    being proportional to 1 - P.
    """
    a, b, c, d = r8v_coeffs(z, p, pole_tol)
    R = np.zeros((4, 4), dtype=complex)
    R[0, 0] = R[3, 3] = a
    R[1, 1] = R[2, 2] = b
    R[1, 2] = R[2, 1] = c
    R[0, 3] = R[3, 0] = d
    return R


SIGMA_A = np.diag([-1.0, 1.0])
SIGMA_B = np.array([[0.0, 1.0], [1.0, 0.0]])


def r8v_ybe_residual(z, w, p):
    R = lambda x: r8v_eval(x, p)  # noqa: E731
    lhs = embed(R(z - w), (0, 1), 3) @ embed(R(z), (0, 2), 3) @ embed(R(w), (1, 2), 3)
    rhs = embed(R(w), (1, 2), 3) @ embed(R(z), (0, 2), 3) @ embed(R(z - w), (0, 1), 3)
    return float(np.max(np.abs(lhs - rhs)))


def r8v_residue(p, delta=1e-5):
    """Symmetric estimate of the residue of R_8V at z = 2 eta (error O(delta^2))."""
    z0 = 2 * p.eta
    return delta * (r8v_eval(z0 + delta, p) - r8v_eval(z0 - delta, p)) / 2


# --- vertex-IRF intertwiner --------------------------------------------------

def phi(x, p):
    """phi(x) = (theta_1(x), theta_0(x))."""
    return np.array([theta_char(1, x, p), theta_char(0, x, p)])


def phi_pm(sign, z, lam, p):
    """phi^+(z, lam) = phi(-z - lam + 1/2), phi^-(z, lam) = phi(z - lam + 1/2)."""
    return phi(-sign * z - lam + 0.5, p)


def s_matrix(z, lam, p, pole_tol=POLE_TOL):
    th = check_pole(theta(lam, p), "theta(lambda)", pole_tol)
    u, v = z - lam + 0.5, -z - lam + 0.5
    return np.array([[theta_char(0, u, p), -theta_char(0, v, p)],
                     [-theta_char(1, u, p), theta_char(1, v, p)]]) / th


def s_hat(z, lam, p):
    """2x2 matrix with columns phi^+(z, lam), phi^-(z, lam)."""
    return np.column_stack([phi_pm(1, z, lam, p), phi_pm(-1, z, lam, p)])


def vertex_irf_sides(z, w, lam, p):
    eta = p.eta
    S = lambda x: (lambda l: s_matrix(x, l, p))  # noqa: E731
    lhs = dyn_embed(S(w), (1,), 2, lam, eta) @ dyn_embed(S(z), (0,), 2, lam, eta, (1,)) \
        @ rmatrix_eval(z - w, lam, p)
    rhs = r8v_eval(z - w, p) @ dyn_embed(S(z), (0,), 2, lam, eta) \
        @ dyn_embed(S(w), (1,), 2, lam, eta, (0,))
    return lhs, rhs


def vertex_irf_residual(z, w, lam, p, relative=False):
    lhs, rhs = vertex_irf_sides(z, w, lam, p)
    r = float(np.max(np.abs(lhs - rhs)))
    return r / float(np.max(np.abs(lhs))) if relative else r


def phi_identity_residuals(z, w, lam, p):
    """Residuals of the four phi^(+-) identities behind the vertex-IRF map.

    Returns (same_plus, same_minus, mixed_plus, mixed_minus), each relative to
    the size of the left-hand side.
    """
    eta = p.eta
    R = r8v_eval(z - w, p)
    out = []
    for s in (1, -1):
        lhs = R @ np.kron(phi_pm(s, z, lam - s * 2 * eta, p), phi_pm(s, w, lam, p))
        rhs = np.kron(phi_pm(s, z, lam, p), phi_pm(s, w, lam - s * 2 * eta, p))
        out.append(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))
    for s in (1, -1):
        al, be = rmatrix_coeffs(z - w, s * lam, p)
        lhs = R @ np.kron(phi_pm(s, z, lam + s * 2 * eta, p), phi_pm(-s, w, lam, p))
        rhs = al * np.kron(phi_pm(s, z, lam, p), phi_pm(-s, w, lam - s * 2 * eta, p)) \
            + be * np.kron(phi_pm(-s, z, lam, p), phi_pm(s, w, lam + s * 2 * eta, p))
        out.append(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))
    return tuple(float(x) for x in out)


# --- eight-vertex transfer matrix --------------------------------------------

@dataclass(frozen=True)
class EightVertexChain:
    z_points: tuple
    p: ModularParams

    def __post_init__(self):
        object.__setattr__(self, "z_points", tuple(complex(z) for z in self.z_points))

    @property
    def n(self):
        return len(self.z_points)


def t8v_matrix(chain, z):
    """tr_0 R_8V(z - z_1)^(01) ... R_8V(z - z_n)^(0n)."""
    n = chain.n
    N = n + 1
    L = np.eye(2 ** N, dtype=complex)
    for k, zk in enumerate(chain.z_points, start=1):
        L = L @ embed(r8v_eval(z - zk, chain.p), (0, k), N)
    return partial_trace_first(L, N)


def s_n_matrix(z_points, lam, p, dynamical=True):
    """S_n(lam) = S(z_n, lam)^(n) ... S(z_1, lam - 2 eta sum_{j>=2} h^(j))^(1).

    ``dynamical=False`` drops the weight shifts (mutation check only).
    """
    n = len(z_points)
    M = np.eye(2 ** n, dtype=complex)
    for k, zk in enumerate(z_points):
        spect = range(k + 1, n) if dynamical else ()
        M = dyn_embed(lambda l, x=zk: s_matrix(x, l, p), (k,), n, lam, p.eta, spect) @ M
    return M


def t8v_intertwine_residual(fchain, z, lam, dynamical=True):
    """T_8V(z) S_n(lam) - S_n(lam+2eta) a(z,lam+2eta) - S_n(lam-2eta) d(z,lam-2eta) on W[0].

    Relative max-norm; ``fchain`` is the FundamentalChain carrying a, d.
    """
    p, eta = fchain.p, fchain.p.eta
    zs = fchain.z_points
    idx = zero_weight_indices(fchain.n)
    sub = np.ix_(idx, idx)
    T8 = t8v_matrix(EightVertexChain(zs, p), z)
    lhs = T8 @ s_n_matrix(zs, lam, p, dynamical)[:, idx]
    A = fchain.block("A", z, lam + 2 * eta)[sub]
    D = fchain.block("D", z, lam - 2 * eta)[sub]
    rhs = s_n_matrix(zs, lam + 2 * eta, p, dynamical)[:, idx] @ A \
        + s_n_matrix(zs, lam - 2 * eta, p, dynamical)[:, idx] @ D
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))


def summation_functional(f, mu, eta_frac):
    """sum_{j=0}^{q-1} f(mu + 2 eta j) for eta = p/q."""
    eta_frac = Fraction(eta_frac)
    q = eta_frac.denominator
    eta = float(eta_frac)
    return sum(f(mu + 2 * eta * j) for j in range(q))


def t8v_bethe_eigenvector(prob, sol, mu, z_samples, eta_frac, max_q=12):
    """Eight-vertex eigenvector from a Bethe eigenfunction at rational eta.

    Returns (v, residuals, eigenvalues) with residual ||T_8V(z)v - eps(z)v||/||v||
    and eps(z) the Bethe eigenvalue at each sample z.
    """
    p = prob.p
    eta_frac = Fraction(eta_frac)
    if eta_frac.denominator > max_q:
        raise ValueError(f"denominator {eta_frac.denominator} exceeds {max_q}")
    if abs(p.eta - float(eta_frac)) > 1e-15:
        raise ValueError("ModularParams.eta does not equal the given rational value")
    c = complex(sol.c)
    k = c.imag / np.pi
    if abs(c.real) > 1e-12 or abs(k - round(k)) > 1e-9:
        raise ValueError("c must lie in pi i Z for a 2-periodic integrand")
    zs = prob.z
    idx = zero_weight_indices(prob.n)

    def integrand(lam):
        psi = closed_vector_on_chain(prob, sol.t, c, lam)[idx]
        return s_n_matrix(zs, lam, p)[:, idx] @ psi

    terms = [integrand(mu + 2 * p.eta * j) for j in range(eta_frac.denominator)]
    v = sum(terms)  # summation_functional(integrand, mu, eta_frac), reusing the terms
    nv = np.linalg.norm(v)
    scale = max(np.linalg.norm(x) for x in terms)
    if scale < 1e-300:
        raise ValueError("Bethe vector vanishes at these roots")
    if nv < 1e-8 * scale:
        # cancellation down to rounding: v carries no signal
        raise ValueError("summation functional annihilates the vector; try another mu")
    ch8 = EightVertexChain(zs, p)
    res, eps = [], []
    for z in z_samples:
        e = transfer_eigenvalue(prob, sol.t, c, z)
        res.append(float(np.linalg.norm(t8v_matrix(ch8, z) @ v - e * v) / nv))
        eps.append(e)
    return v, res, eps


# --- IRF path basis ------------------------------------------------------------

@dataclass(frozen=True)
class PathState:
    """Cyclic height sequence mu + a_1, ..., mu + a_n with integer a_i."""

    heights: tuple
    mu: complex = 0.0

    def __post_init__(self):
        hs = tuple(int(h) for h in self.heights)
        object.__setattr__(self, "heights", hs)
        n = len(hs)
        if n % 2:
            raise AdjacencyError("path states need an even number of heights")
        for i in range(n):
            if hs[i] - hs[(i + 1) % n] not in (1, -1):
                raise AdjacencyError(f"heights {hs[i]}, {hs[(i + 1) % n]} not adjacent")

    def signs(self):
        hs, n = self.heights, len(self.heights)
        return tuple(hs[i] - hs[(i + 1) % n] for i in range(n))

    def to_record(self):
        return {"heights": list(self.heights), "mu": [complex(self.mu).real, complex(self.mu).imag]}


def all_paths(n, a1_range=range(-2, 3), mu=0.0):
    out = []
    for a1 in a1_range:
        for steps in product((1, -1), repeat=n - 1):
            hs = [a1]
            for s in steps:
                hs.append(hs[-1] + s)
            if hs[-1] - a1 in (1, -1):
                out.append(PathState(tuple(hs), mu))
    return out


def irf_transfer_coeffs(state, z, chain):
    """T(z)|a> = sum_b prod_j w(b_j, a_j, a_{j+1}, b_{j+1}; z - z_j) |b>."""
    a = state.heights
    n = len(a)
    if chain.n != n:
        raise ValueError("chain length differs from path length")
    out = []
    for steps in product((1, -1), repeat=n):
        b = [a[j] + steps[j] for j in range(n)]
        if any(b[j] - b[(j + 1) % n] not in (1, -1) for j in range(n)):
            continue
        coef = 1.0 + 0j
        for j in range(n):
            coef *= boltzmann_weight(b[j], a[j], a[(j + 1) % n], b[(j + 1) % n],
                                     z - chain.z_points[j], chain.p, state.mu)
        out.append((PathState(tuple(b), state.mu), coef))
    return out


def irf_operator_coeffs(state, z, chain, tol=0.0):
    """Same coefficients from T(z) = a(z) + d(z) acting on delta-supported functions.

    |a>(lam) = delta(lam + 2 eta a_1) e[a_1 - a_2] x ... x e[a_n - a_1]; the
    output is read off at lam = -2 eta b_1 for b_1 = a_1 -+ 1.
    """
    eta = chain.p.eta
    a = state.heights
    n = len(a)
    col = basis_index(state.signs())
    out = []
    for shift, block in ((-1, "A"), (1, "D")):
        b1 = a[0] + shift
        M = chain.block(block, z, -2 * eta * (state.mu + b1))
        vec = M[:, col]
        for row in np.flatnonzero(np.abs(vec) > tol):
            bits = [(row >> (n - 1 - k)) & 1 for k in range(n)]
            signs = [1 - 2 * x for x in bits]
            if sum(signs) != 0:
                continue
            hs = [b1]
            for s in signs[:-1]:
                hs.append(hs[-1] - s)
            out.append((PathState(tuple(hs), state.mu), complex(vec[row])))
    return out


def irf_operator_residual(state, z, chain):
    """Max difference between the path-basis and operator-side coefficients."""
    irf = {s.heights: c for s, c in irf_transfer_coeffs(state, z, chain)}
    op = {s.heights: c for s, c in irf_operator_coeffs(state, z, chain)}
    keys = set(irf) | set(op)
    return max(abs(irf.get(k, 0.0) - op.get(k, 0.0)) for k in keys)


def det_s_hat_ratio(z, lam, p):
    """det S_hat(z, lam) / (theta(z) theta(lam)); constant in z and lam."""
    return complex(np.linalg.det(s_hat(z, lam, p)) / (theta(z, p) * theta(lam, p)))


def is_lattice_point(x, p, tol=1e-12):
    z0, _, _ = lattice_reduce(x, p.tau)
    return abs(z0) < tol
