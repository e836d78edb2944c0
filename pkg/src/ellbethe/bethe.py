"""Bethe ansatz equations, their Newton solver, eigenvalues and eigenvectors.

Highest weight data of a product of evaluation modules with weights Lambda_k
and evaluation points z_k enter through

    p_k = z_k + eta (1 - Lambda_k),    q_k = z_k + eta (1 + Lambda_k).

Shifting a root t_i by tau multiplies every left-hand side of the equations by
exp(8 pi i eta); this is absorbed by c -> c + 2 pi i. Canonical solutions keep
roots in the fundamental cell and carry the correspondingly adjusted c.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .chain import FundamentalChain
from .errors import ConvergenceError, DegenerateRootsError, PoleError
from .tensor import basis_index
from .theta import POLE_TOL, ModularParams, check_pole, lattice_reduce, theta, theta_logderiv

log = logging.getLogger(__name__)

ROOT_SEPARATION = 1e-6


@dataclass(frozen=True)
class BetheProblem:
    Lambda: tuple
    z: tuple
    c: complex
    p: ModularParams

    def __post_init__(self):
        Lam = tuple(int(x) for x in self.Lambda)
        if any(x <= 0 for x in Lam):
            raise ValueError("weights Lambda_k must be positive integers")
        if sum(Lam) % 2:
            raise ValueError("total weight must be even")
        if len(Lam) != len(self.z):
            raise ValueError("Lambda and z must have the same length")
        object.__setattr__(self, "Lambda", Lam)
        object.__setattr__(self, "z", tuple(complex(x) for x in self.z))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def m(self):
        return sum(self.Lambda) // 2

    @property
    def n(self):
        return len(self.Lambda)

    @property
    def p_pts(self):
        eta = self.p.eta
        return np.array([z + eta * (1 - L) for z, L in zip(self.z, self.Lambda)])

    @property
    def q_pts(self):
        eta = self.p.eta
        return np.array([z + eta * (1 + L) for z, L in zip(self.z, self.Lambda)])

    def with_c(self, c):
        return BetheProblem(self.Lambda, self.z, c, self.p)

    def chain(self):
        if any(L != 1 for L in self.Lambda):
            raise ValueError("a fundamental chain needs all Lambda_k = 1")
        return FundamentalChain(self.z, self.p)


@dataclass
class BetheSolution:
    t: np.ndarray
    c: complex
    residual_norm: float
    iterations: int = 0
    trace: list = field(default_factory=list, repr=False)

    def to_record(self, prob):
        return {
            "m": prob.m, "n": prob.n, "Lambda": list(prob.Lambda),
            "z": [_cplx(x) for x in prob.z],
            "tau": _cplx(prob.p.tau), "eta": _cplx(prob.p.eta),
            "c": _cplx(self.c), "t": [_cplx(x) for x in self.t],
            "residual": self.residual_norm,
        }

    def to_json(self, prob):
        return json.dumps(self.to_record(prob), sort_keys=True)

    @staticmethod
    def from_record(rec):
        p = ModularParams(_uncplx(rec["tau"]), _uncplx(rec["eta"]))
        c = _uncplx(rec["c"])
        prob = BetheProblem(rec["Lambda"], [_uncplx(x) for x in rec["z"]], c, p)
        sol = BetheSolution(np.array([_uncplx(x) for x in rec["t"]]), c, rec["residual"])
        return prob, sol


def _cplx(x):
    x = complex(x)
    return [x.real, x.imag]


def _uncplx(v):
    return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)


def min_root_separation(t, p):
    t = np.asarray(t)
    best = np.inf
    for i in range(len(t)):
        for j in range(i):
            z0, _, _ = lattice_reduce(t[i] - t[j], p.tau)
            best = min(best, abs(z0))
    return best


def _check_distinct(t, p):
    if len(t) > 1 and min_root_separation(t, p) < ROOT_SEPARATION:
        raise DegenerateRootsError("Bethe roots coincide modulo the period lattice")


def bae_lhs(prob, t, pole_tol=POLE_TOL):
    """Left-hand sides of the Bethe ansatz equations."""
    p, eta = prob.p, prob.p.eta
    t = np.asarray(t, dtype=complex)
    m = len(t)
    out = np.ones(m, dtype=complex)
    for i in range(m):
        for j in range(m):
            if j != i:
                d = t[j] - t[i]
                out[i] *= theta(d - 2 * eta, p) / check_pole(
                    theta(d + 2 * eta, p), "theta(t_j - t_i + 2 eta)", pole_tol)
        out[i] *= np.prod(theta(t[i] - prob.q_pts, p) / check_pole(
            theta(t[i] - prob.p_pts, p), "theta(t_i - p_k)", pole_tol))
    return out


def bae_residual(prob, t, c=None):
    """Component i: lhs_i(t) - exp(4 eta c)."""
    t = np.asarray(t, dtype=complex)
    if len(t) != prob.m:
        raise ValueError(f"expected {prob.m} roots, got {len(t)}")
    _check_distinct(t, prob.p)
    c = prob.c if c is None else c
    return bae_lhs(prob, t) - np.exp(4 * prob.p.eta * c)


def bae_jacobian(prob, t):
    """d(lhs_i)/d(t_l) from logarithmic derivatives theta'/theta."""
    p, eta = prob.p, prob.p.eta
    t = np.asarray(t, dtype=complex)
    m = len(t)
    P = bae_lhs(prob, t)
    J = np.zeros((m, m), dtype=complex)
    for i in range(m):
        J[i, i] = np.sum(theta_logderiv(t[i] - prob.q_pts, p)
                         - theta_logderiv(t[i] - prob.p_pts, p))
        for l in range(m):
            if l == i:
                continue
            d = t[l] - t[i]
            g = theta_logderiv(d - 2 * eta, p) - theta_logderiv(d + 2 * eta, p)
            J[i, l] = g
            J[i, i] -= g
        J[i] *= P[i]
    return J


def canonicalize(t, c, p):
    """Reduce roots into the fundamental cell, sort them, and adjust c."""
    t0, _, n = lattice_reduce(np.asarray(t, dtype=complex), p.tau)
    c = complex(c) - 2j * np.pi * int(np.sum(n))
    key = np.lexsort((np.round(t0.imag, 9), np.round(t0.real, 9)))
    return t0[key], c


def bae_solve(prob, t0, tol=1e-12, max_iter=100, max_halvings=30, form="plain"):
    """Damped Newton iteration for the roots at fixed c.

    form="log" iterates on log(lhs / exp(4 eta c)), which commutes with the
    reflection t -> 2 eta - t, c -> -c; it falls back to the plain form when
    the principal log jumps across its cut.

    Raises ConvergenceError (with the iteration trace) on failure and
    DegenerateRootsError for coincident starting roots.
    """
    if form not in ("plain", "log"):
        raise ValueError(f"unknown Newton form {form!r}")
    try:
        t, it, trace = _newton(prob, t0, tol, max_iter, max_halvings, log_form=form == "log")
    except ConvergenceError:
        if form == "plain":
            raise
        t, it, trace = _newton(prob, t0, tol, max_iter, max_halvings, log_form=False)
    tc, cc = canonicalize(t, prob.c, prob.p)
    res = float(np.max(np.abs(bae_residual(prob, tc, cc))))
    if res >= tol:
        # the lattice multiplier costs a few ulps; polish in the canonical frame
        t2, it2, trace2 = _newton(prob.with_c(cc), tc, tol, max_iter, max_halvings,
                                  log_form=False)
        tc, cc = canonicalize(t2, cc, prob.p)
        res = float(np.max(np.abs(bae_residual(prob, tc, cc))))
        it += it2
        trace += trace2
    return BetheSolution(tc, cc, res, it, trace)


def _residual_form(lhs, target, log_form):
    return np.log(lhs / target) if log_form else lhs - target


def _newton(prob, t0, tol, max_iter, max_halvings, log_form=False):
    """Damped Newton on log(lhs_i / exp(4 eta c)), or on lhs_i - exp(4 eta c).

    The log form is equivariant under t -> 2 eta - t, c -> -c (which inverts
    every left-hand side), so mirrored starts give mirrored iterates. The
    stopping rule always uses the plain residual.
    """
    p = prob.p
    target = np.exp(4 * p.eta * prob.c)
    t = np.asarray(t0, dtype=complex).copy()
    if len(t) != prob.m:
        raise ValueError(f"expected {prob.m} starting roots, got {len(t)}")
    _check_distinct(t, p)
    lhs = bae_lhs(prob, t)
    G = _residual_form(lhs, target, log_form)
    gnorm = np.max(np.abs(G))
    res = np.max(np.abs(lhs - target))
    trace = [(0, float(res))]
    it = 0
    while res >= tol:
        if it >= max_iter:
            raise ConvergenceError(f"no convergence after {max_iter} iterations", trace, t)
        it += 1
        J = bae_jacobian(prob, t)
        if log_form:
            J = J / lhs[:, None]
        try:
            step = np.linalg.solve(J, -G)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian", trace, t) from exc
        if not np.all(np.isfinite(step)):
            raise ConvergenceError("singular Jacobian", trace, t)
        s = 1.0
        for _ in range(max_halvings + 1):
            trial = t + s * step
            try:
                if len(trial) > 1 and min_root_separation(trial, p) < ROOT_SEPARATION:
                    raise DegenerateRootsError("collision")
                # far-off trials overflow the lattice multiplier; rejected below
                with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                    lt = bae_lhs(prob, trial)
                    Gt = _residual_form(lt, target, log_form)
                    nt = np.max(np.abs(Gt))
            except (PoleError, DegenerateRootsError):
                nt = np.inf
            if np.isfinite(nt) and nt < gnorm:
                break
            s /= 2
        else:
            if np.max(np.abs(lhs - target)) < 10 * tol:
                break  # stalled at rounding level just above tol
            raise ConvergenceError("damping exhausted without decrease", trace, t)
        t, lhs, G, gnorm = trial, lt, Gt, nt
        res = np.max(np.abs(lhs - target))
        trace.append((it, float(res)))
        log.debug("newton iter %d step %.3g residual %.3e", it, s, res)
    return t, it, trace


def continue_in_c(prob, t0, c_values, **kw):
    """Solve along a path of c values, seeding each solve with the last one.

    Returns the list of solutions; raises ConvergenceError with ``last`` set to
    the last good solution when a step fails.
    """
    out = []
    t = np.asarray(t0, dtype=complex)
    for c in c_values:
        try:
            sol = bae_solve(prob.with_c(c), t, **kw)
        except ConvergenceError as exc:
            exc.last = out[-1] if out else None
            raise
        # keep the path continuous: undo the lattice reduction before reseeding
        out.append(sol)
        t = _nearest_images(sol.t, t, prob.p)
    return out


def _nearest_images(t_new, t_old, p):
    """Re-order and lattice-shift new roots to sit next to the previous ones."""
    t_new = list(t_new)
    out = []
    for x in t_old:
        d = [abs(lattice_reduce(y - x, p.tau)[0]) for y in t_new]
        y = t_new.pop(int(np.argmin(d)))
        z0, m, n = lattice_reduce(y - x, p.tau)
        out.append(x + z0)
    return np.array(out)


def transfer_eigenvalue(prob, t, c, w, pole_tol=POLE_TOL):
    """Common eigenvalue epsilon(w) of the transfer matrices."""
    p, eta = prob.p, prob.p.eta
    t = np.asarray(t, dtype=complex)
    den = check_pole(theta(t - w, p), "theta(t_j - w)", pole_tol)
    first = np.exp(-2 * eta * c) * np.prod(theta(t - w - 2 * eta, p) / den)
    second = np.exp(2 * eta * c) * np.prod(theta(t - w + 2 * eta, p) / den) \
        * np.prod(theta(w - prob.p_pts, p)
                  / check_pole(theta(w - prob.q_pts, p), "theta(w - q_k)", pole_tol))
    return complex(first + second)


def bethe_vector_closed(prob, t, c, lam, pole_tol=POLE_TOL):
    """Closed-form b(t_1)...b(t_m) v as {(m_1..m_n): coefficient}.

    Keys index the basis vectors e_{m_1} x ... x e_{m_n} of the product of
    Verma modules. The sum runs over all assignments of the m roots to the n
    factors.
    """
    p, eta = prob.p, prob.p.eta
    t = np.asarray(t, dtype=complex)
    m, n = len(t), prob.n
    P, Q, Lam = prob.p_pts, prob.q_pts, prob.Lambda
    th_tq = check_pole(theta(t[:, None] - Q[None, :], p), "theta(t_j - q_k)", pole_tol)
    ratio_pq = theta(t[:, None] - P[None, :], p) / th_tq
    if m > 1:
        dt = t[:, None] - t[None, :]
        np.fill_diagonal(dt, 0.5)  # diagonal unused; keep it off the lattice
        pair = theta(dt - 2 * eta, p) / check_pole(theta(dt, p), "theta(t_i - t_j)", pole_tol)
    out = {}
    for assign in product(range(n), repeat=m):
        occ = [0] * n
        for k in assign:
            occ[k] += 1
        coef = 1.0 + 0j
        for i, l in enumerate(assign):
            for k in range(l + 1, n):
                coef *= ratio_pq[i, k]
            for j, lj in enumerate(assign):
                if l < lj:
                    coef *= pair[i, j]
            tail = sum(Lam[l2] - 2 * occ[l2] for l2 in range(l + 1, n))
            arg = lam + t[i] - Q[l] + 2 * eta * occ[l] - 2 * eta * tail
            coef *= theta(arg, p) / th_tq[i, l]
        key = tuple(occ)
        out[key] = out.get(key, 0.0) + coef
    pref = (-1) ** m * np.exp(c * (lam + 2 * eta * m))
    return {k: pref * v for k, v in out.items()}


def closed_vector_on_chain(prob, t, c, lam):
    """Closed-form vector for all Lambda_k = 1 as a 2^n array.

    e_0 <-> e[1] and e_1 <-> e[-1]; occupations above 1 lie in the submodule
    that the two-dimensional quotient discards.
    """
    if any(L != 1 for L in prob.Lambda):
        raise ValueError("chain vectors need all Lambda_k = 1")
    vec = np.zeros(2 ** prob.n, dtype=complex)
    for occ, val in bethe_vector_closed(prob, t, c, lam).items():
        if max(occ) <= 1:
            vec[basis_index([1 - 2 * o for o in occ])] += val
    return vec


def bethe_vector_oracle(prob, t, c, lam):
    """b(t_1)...b(t_m) g v_0 by composing B blocks of the L-operator.

    g(lam) = exp(c lam) prod_j theta(lam - 2 eta j)/theta(2 eta).
    """
    chain = prob.chain()
    p, eta = prob.p, prob.p.eta
    m = len(t)
    lm = lam + 2 * eta * m
    g = np.exp(c * lm) * np.prod([theta(lm - 2 * eta * j, p) / theta(2 * eta, p)
                                   for j in range(1, m + 1)])
    vec = g * chain.highest_vector()
    for j in reversed(range(m)):
        vec = chain.block("B", t[j], lam + 2 * eta * j) @ vec
    return vec


def eigen_relation_residual(prob, t, c, w, lam, psi=None):
    """||A00 psi(lam - 2 eta) + D00 psi(lam + 2 eta) - eps(w) psi(lam)|| / ||psi(lam)||."""
    chain = prob.chain()
    idx = chain.zero_weight()
    if psi is None:
        def psi(l):
            return closed_vector_on_chain(prob, t, c, l)[idx]
    val = psi(lam)
    nv = np.linalg.norm(val)
    if nv < 1e-12:
        raise ValueError("psi(lambda) vanishes; choose another lambda")
    Tpsi = chain.transfer(w).apply(psi, lam)
    eps = transfer_eigenvalue(prob, t, c, w)
    return float(np.linalg.norm(Tpsi - eps * val) / nv)
