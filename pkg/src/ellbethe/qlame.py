"""The q-deformed Lame operator and its Bethe ansatz eigenfunctions.

For the evaluation module of weight 2m at z = 0 the zero-weight space is one
dimensional and the transfer matrix is a scalar multiple of

    L psi(lam) = theta(lam + 2 eta m)/theta(lam) psi(lam - 2 eta)
               + theta(lam - 2 eta m)/theta(lam) psi(lam + 2 eta).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .bethe import BetheProblem, bae_residual, bae_solve, canonicalize, continue_in_c
from .theta import POLE_TOL, ModularParams, check_pole, theta, theta_deriv


@dataclass(frozen=True)
class QLameProblem:
    m: int
    p: ModularParams

    def __post_init__(self):
        if int(self.m) < 1:
            raise ValueError("m must be a positive integer")
        object.__setattr__(self, "m", int(self.m))

    def bethe_problem(self, c=0.0):
        """n = 1, Lambda = 2m, z = 0, so p_1 = eta(1 - 2m), q_1 = eta(1 + 2m)."""
        return BetheProblem((2 * self.m,), (0.0,), c, self.p)


@dataclass
class SpectralPoint:
    t: np.ndarray
    c: complex
    eps: complex
    residual: float = 0.0

    def to_record(self, prob):
        return {
            "m": prob.m,
            "tau": [prob.p.tau.real, prob.p.tau.imag],
            "eta": [prob.p.eta.real, prob.p.eta.imag],
            "t": [[complex(x).real, complex(x).imag] for x in self.t],
            "c": [complex(self.c).real, complex(self.c).imag],
            "eps": [complex(self.eps).real, complex(self.eps).imag],
            "residual": self.residual,
        }


def qlame_apply(prob, psi, lam, m=None, pole_tol=POLE_TOL):
    """(L psi)(lam); ``m`` overrides prob.m (m = 0 is allowed here)."""
    p, eta = prob.p, prob.p.eta
    m = prob.m if m is None else m
    th = check_pole(theta(lam, p), "theta(lambda)", pole_tol)
    return theta(lam + 2 * eta * m, p) / th * psi(lam - 2 * eta) \
        + theta(lam - 2 * eta * m, p) / th * psi(lam + 2 * eta)


def qlame_psi(t, c, lam, p):
    """exp(c lam) prod_j theta(lam + t_j - eta)."""
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    lam = np.asarray(lam, dtype=complex)
    out = np.exp(c * lam)
    for tj in t:
        out = out * theta(lam + tj - p.eta, p)
    return out[()] if np.ndim(out) == 0 else out


def qlame_eigenvalue(prob, t, c, pole_tol=POLE_TOL):
    p, eta, m = prob.p, prob.p.eta, prob.m
    t = np.asarray(t, dtype=complex)
    den = check_pole(theta(t + (2 * m - 1) * eta, p), "theta(t_j + (2m-1) eta)", pole_tol)
    val = np.exp(-2 * eta * c) * theta(4 * eta * m, p) / theta(2 * eta * m, p) \
        * np.prod(theta(t + (2 * m - 3) * eta, p) / den)
    return complex(val)


def eigen_residual(prob, t, c, lams):
    """max over lams of |L psi - eps psi| / |psi|."""
    eps = qlame_eigenvalue(prob, t, c)
    psi = lambda l: qlame_psi(t, c, l, prob.p)  # noqa: E731
    return max(abs(qlame_apply(prob, psi, l) - eps * psi(l)) / abs(psi(l)) for l in lams)


def closed_form_c(prob, t1):
    """For m = 1 any t_1 solves the equation with c = log(theta(t-3eta)/theta(t+eta)) / 4eta.

    Principal branch; other branches are the shifts c + 2 pi i k / (4 eta).
    """
    if prob.m != 1:
        raise ValueError("closed form only for m = 1")
    p, eta = prob.p, prob.p.eta
    return complex(np.log(theta(t1 - 3 * eta, p) / theta(t1 + eta, p)) / (4 * eta))


def qlame_solve(prob, c, t0, **kw):
    """Solve the Bethe equations at fixed c and attach the eigenvalue.

    Uses the log form of Newton so that a reflected start follows the
    reflected path.
    """
    kw.setdefault("form", "log")
    bp = prob.bethe_problem(c)
    sol = bae_solve(bp, t0, **kw)
    eps = qlame_eigenvalue(prob, sol.t, sol.c)
    return SpectralPoint(sol.t, sol.c, eps, sol.residual_norm)


def point_residual(prob, point):
    return float(np.max(np.abs(bae_residual(prob.bethe_problem(point.c), point.t, point.c))))


def reflect_point(prob, point):
    """(t, c) -> (2 eta - t, -c); same eigenvalue, psi(lam) -> psi(-lam)."""
    t, c = canonicalize(2 * prob.p.eta - np.asarray(point.t), -point.c, prob.p)
    sp = SpectralPoint(t, c, qlame_eigenvalue(prob, t, c))
    sp.residual = point_residual(prob, sp)
    return sp


def shifted_multiplier_psi(t, c, lam, p):
    """exp(pi i lam / 2 eta) psi(lam): an eigenfunction with eigenvalue -eps."""
    return np.exp(1j * np.pi * lam / (2 * p.eta)) * qlame_psi(t, c, lam, p)


def wronskian(f, g, lam, p):
    """f(lam + 2 eta) g(lam) - f(lam) g(lam + 2 eta)."""
    e2 = 2 * p.eta
    return f(lam + e2) * g(lam) - f(lam) * g(lam + e2)


def wronskian_coeffs(f, psi_p, psi_m, lam, p):
    """A_+, A_- with f = A_+ psi_+ + A_- psi_- (Cramer's rule)."""
    W = wronskian(psi_p, psi_m, lam, p)
    return wronskian(f, psi_m, lam, p) / W, -wronskian(f, psi_p, lam, p) / W


def bilinear_form(phi, psi, m, p, nodes=400):
    """Trapezoid rule on tau/2 -> 1 + tau/2 and -1 - tau/2 -> -tau/2.

    Integrand phi(lam) psi(-lam) / prod_j theta(lam - 2 eta j) theta(lam + 2 eta j),
    1-periodic for Bloch functions with a common multiplier, so the rule
    converges geometrically.
    """
    x = np.arange(nodes) / nodes
    total = 0.0
    for start in (p.tau / 2, -1 - p.tau / 2):
        lam = start + x
        den = np.ones_like(lam)
        for j in range(1, m + 1):
            den = den * theta(lam - 2 * p.eta * j, p) * theta(lam + 2 * p.eta * j, p)
        vals = np.array([phi(l) * psi(-l) for l in lam]) / den
        total = total + vals.mean()
    return complex(total)


def classical_limit_residual(m, psi, lam, tau, etas, dpsi=None, d2psi=None, h=1e-4):
    """|(L_eta psi - 2 psi)/(4 eta^2) - [psi'' - 2m (theta'/theta) psi' + m^2 (theta''/theta) psi]|.

    Derivatives of psi default to central differences with step h.
    """
    if dpsi is None:
        dpsi = lambda l: (psi(l + h) - psi(l - h)) / (2 * h)  # noqa: E731
    if d2psi is None:
        d2psi = lambda l: (psi(l + h) - 2 * psi(l) + psi(l - h)) / (h * h)  # noqa: E731
    out = []
    for eta in etas:
        p = ModularParams(tau, eta)
        th = theta(lam, p)
        target = d2psi(lam) - 2 * m * theta_deriv(lam, 1, p) / th * dpsi(lam) \
            + m * m * theta_deriv(lam, 2, p) / th * psi(lam)
        L = theta(lam + 2 * eta * m, p) / th * psi(lam - 2 * eta) \
            + theta(lam - 2 * eta * m, p) / th * psi(lam + 2 * eta)
        out.append(float(abs((L - 2 * psi(lam)) / (4 * eta * eta) - target)))
    return out


def empirical_order(etas, residuals):
    """Least-squares slope of log residual against log eta."""
    return float(np.polyfit(np.log(etas), np.log(residuals), 1)[0])


def qlame_continue(prob, c_values, t0, **kw):
    kw.setdefault("form", "log")
    sols = continue_in_c(prob.bethe_problem(c_values[0]), t0, c_values, **kw)
    return [SpectralPoint(s.t, s.c, qlame_eigenvalue(prob, s.t, s.c), s.residual_norm)
            for s in sols]


def continuation_csv(points, c_path):
    """CSV rows c_re, c_im, t1_re, t1_im, ..., eps_re, eps_im (c is the path value)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    m = len(points[0].t) if points else 0
    head = ["c_re", "c_im"]
    for j in range(m):
        head += [f"t{j + 1}_re", f"t{j + 1}_im"]
    w.writerow(head + ["eps_re", "eps_im", "residual"])
    for c, pt in zip(c_path, points):
        row = [complex(c).real, complex(c).imag]
        for x in pt.t:
            row += [complex(x).real, complex(x).imag]
        row += [complex(pt.eps).real, complex(pt.eps).imag, pt.residual]
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
