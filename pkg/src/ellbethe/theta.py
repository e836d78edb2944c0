"""Jacobi theta functions with lattice reduction.

The odd theta function used throughout the package is

    theta(z) = -sum_j exp(pi i (j+1/2)^2 tau + 2 pi i (j+1/2)(z+1/2)),

with zeros exactly on Z + tau Z. Every evaluation first reduces ``z`` into the
fundamental cell ``{x + y tau : x, y in [-1/2, 1/2)}`` and multiplies by the
exact quasi-periodicity factor, so the truncated series is uniformly accurate.

All functions accept scalars or numpy arrays and broadcast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PoleError

POLE_TOL = 1e-9
# C(tau) in theta0 * theta1 = C(tau) * theta is sampled here.
_C_PROBE = 0.23 + 0.11j


def _n_terms(im_tau, tol, order=2):
    """Smallest J with the tail beyond |j + 1/2| = J + 1/2 below ``tol``.

    On the reduced cell |Im z| <= Im(tau)/2, so a term of index k = j + 1/2 is
    bounded by exp(-pi Im(tau) (k^2 - |k|)). The derivative factor (2 pi k)^order
    is folded into the bound.
    """
    J = 0
    while True:
        k = J + 1.5
        bound = math.exp(-math.pi * im_tau * (k * k - k)) * (1 + (2 * math.pi * k) ** order)
        if bound < tol * 1e-2:
            return J + 1
        J += 1


@dataclass(frozen=True)
class ModularParams:
    """Modular parameter ``tau`` and deformation step ``eta``."""

    tau: complex
    eta: complex
    series_tol: float = 1e-14
    n_terms: int = field(init=False, repr=False, compare=False)
    n_terms2: int = field(init=False, repr=False, compare=False)
    c_tau: complex = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tau = complex(self.tau)
        eta = complex(self.eta)
        if not (np.isfinite(tau) and np.isfinite(eta)):
            raise ValueError("tau and eta must be finite")
        if tau.imag <= 0:
            raise ValueError(f"tau must have positive imaginary part, got {tau}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "n_terms", _n_terms(tau.imag, self.series_tol))
        object.__setattr__(self, "n_terms2", _n_terms(2 * tau.imag, self.series_tol))
        object.__setattr__(
            self, "c_tau",
            complex(theta_char(0, _C_PROBE, self) * theta_char(1, _C_PROBE, self)
                    / theta(_C_PROBE, self)))

    def replace(self, **kw):
        d = {"tau": self.tau, "eta": self.eta, "series_tol": self.series_tol}
        d.update(kw)
        return ModularParams(**d)


def lattice_reduce(z, tau):
    """Split ``z = z0 + m + n*tau`` with ``z0`` in the fundamental cell.

    ``tau`` may be a complex number or a ModularParams. Returns ``(z0, m, n)``;
    ``m`` and ``n`` are integer arrays (or ints for scalar input).
    """
    if isinstance(tau, ModularParams):
        tau = tau.tau
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("z must be finite")
    n = np.floor(z.imag / tau.imag + 0.5)
    w = z - n * tau
    m = np.floor(w.real + 0.5)
    z0 = w - m
    if z0.ndim == 0:
        return complex(z0), int(m), int(n)
    return z0, m.astype(int), n.astype(int)


def _series(z0, tau, J, order):
    k = np.arange(-J, J) + 0.5
    zz = np.asarray(z0)[..., None]
    terms = -np.exp(1j * np.pi * k * k * tau + 2j * np.pi * k * (zz + 0.5))
    out = [terms.sum(axis=-1)]
    for d in range(1, order + 1):
        out.append((terms * (2j * np.pi * k) ** d).sum(axis=-1))
    return out


def _theta_reduced(z, tau, J, order=0):
    """Theta at modular parameter ``tau`` and derivatives up to ``order``."""
    z0, m, n = lattice_reduce(z, tau)
    s = _series(z0, tau, J, order)
    # theta(z0 + m + n tau) = (-1)^(m+n) exp(-pi i (n^2 tau + 2 n z0)) theta(z0)
    sign = np.where((np.asarray(m) + np.asarray(n)) % 2 == 0, 1.0, -1.0)
    mult = sign * np.exp(-1j * np.pi * (n * n * tau + 2 * n * z0))
    kk = -2j * np.pi * n
    if order == 0:
        vals = [mult * s[0]]
    elif order == 1:
        vals = [mult * s[0], mult * (s[1] + kk * s[0])]
    else:
        vals = [mult * s[0], mult * (s[1] + kk * s[0]),
                mult * (s[2] + 2 * kk * s[1] + kk * kk * s[0])]
    return [v[()] if np.ndim(v) == 0 else v for v in vals]


def theta(z, p):
    """Odd Jacobi theta function; zeros on Z + tau Z."""
    return _theta_reduced(z, p.tau, p.n_terms)[0]


def theta_deriv(z, order, p):
    """First or second derivative of :func:`theta`."""
    if order not in (1, 2):
        raise ValueError(f"unsupported derivative order {order}")
    return _theta_reduced(z, p.tau, p.n_terms, order)[order]


def theta_logderiv(z, p):
    """theta'(z) / theta(z)."""
    t, dt = _theta_reduced(z, p.tau, p.n_terms, 1)
    return dt / t


def theta_char(alpha, z, p):
    """Theta functions with characteristics at modular parameter ``2 tau``.

    ``theta_1`` is the odd series with ``tau`` doubled; ``theta_0`` is defined
    through the translation law
    ``theta_1(z + tau) = i exp(-pi i (z + tau/2)) theta_0(z)``.
    """
    if alpha == 1:
        return _theta_reduced(z, 2 * p.tau, p.n_terms2)[0]
    if alpha == 0:
        z = np.asarray(z, dtype=complex)
        val = -1j * np.exp(1j * np.pi * (z + p.tau / 2)) \
            * _theta_reduced(z + p.tau, 2 * p.tau, p.n_terms2)[0]
        return val[()] if np.ndim(val) == 0 else val
    raise ValueError(f"characteristic must be 0 or 1, got {alpha}")


def theta_direct(z, p, extra=40):
    """Unreduced series with a widened window; reference for tests only."""
    z = complex(z)
    J = p.n_terms + extra + int(abs(z.imag) / p.tau.imag) + 2
    return complex(_series(np.asarray(z), p.tau, J, 0)[0])


def check_pole(value, what, tol=POLE_TOL):
    """Raise PoleError when ``|value| < tol`` (any element for arrays)."""
    if np.any(np.abs(value) < tol):
        raise PoleError(what, complex(np.min(np.abs(value))), tol)
    return value
