"""Seeded residual suites for the identities the library relies on.

Each suite returns a SuiteResult with the number of evaluations, the largest
residual and the tolerance it was judged against. Random spectral parameters
are drawn uniformly from the box |Re x| <= 1/2, |Im x| <= 0.3 Im(tau).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import (FundamentalChain, a_exchange_closed, a_exchange_coeffs,
                    commutation_residual, rll_residual)
from .lattice import (all_paths, det_s_hat_ratio, irf_operator_residual, phi_identity_residuals,
                      r8v_eval, r8v_residue, r8v_ybe_residual, t8v_intertwine_residual,
                      vertex_irf_residual)
from .rmatrix import dybe_residual, flip_matrix, hexagons, star_triangle_residual
from .theta import ModularParams, theta, theta_char, theta_deriv

DEFAULT_TOLS = {
    "theta": 1e-12,
    "dybe": 1e-10,
    "star_triangle": 1e-10,
    "rll": 1e-10,
    "highest_weight": 1e-10,
    "commutation": 1e-10,
    "a_exchange": 1e-10,
    "transfer_commute": 1e-10,
    "vertex_irf": 1e-10,
    "phi_lemma": 1e-10,
    "det_s_hat": 1e-9,
    "intertwining": 1e-9,
    "r8v": 1e-10,
    "r8v_residue": 1e-4,
    "irf_operator": 1e-10,
    "bae": 1e-12,
    "eigen": 1e-9,
    "qlame": 1e-10,
    "qlame_relative": 1e-9,
    "eight_vertex": 1e-8,
    "classical_order": 0.3,
}

# evaluation points for the chain suites; generic, mutually distinct mod lattice
CHAIN_POINTS = (0.0, 0.31, 0.55 + 0.1j, 0.8 - 0.05j)


@dataclass
class SuiteResult:
    name: str
    count: int
    max_residual: float
    tol: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(np.isfinite(self.max_residual) and self.max_residual < self.tol)

    def to_record(self):
        rec = {"suite": self.name, "count": self.count, "max_residual": self.max_residual,
               "tol": self.tol, "status": "pass" if self.passed else "fail"}
        if self.details:
            rec["details"] = self.details
        return rec


def draw(rng, size, p):
    return rng.uniform(-0.5, 0.5, size) + 0.3j * p.tau.imag * rng.uniform(-1, 1, size)


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))


def theta_suite(p, rng, tol, draws=100):
    """Oddness, the two quasi-periodicities and theta_0 theta_1 = C(tau) theta."""
    z = draw(rng, draws, p)
    th = theta(z, p)
    scale = np.abs(th)
    tau = p.tau
    res = {
        "odd": np.max(np.abs(theta(-z, p) + th) / scale),
        "period_1": np.max(np.abs(theta(z + 1, p) + th) / scale),
        "period_tau": np.max(np.abs(
            theta(z + tau, p) + np.exp(-1j * np.pi * (tau + 2 * z)) * th)
            / np.abs(theta(z + tau, p))),
        "product": np.max(np.abs(
            theta_char(0, z, p) * theta_char(1, z, p) - p.c_tau * th) / scale),
    }
    res = {k: float(v) for k, v in res.items()}
    return SuiteResult("theta", 4 * draws, max(res.values()), tol, res)


def dybe_suite(p, rng, tol, draws=50):
    z, w, lam = draw(rng, draws, p), draw(rng, draws, p), draw(rng, draws, p)
    r = [dybe_residual(z[i], w[i], lam[i], p) for i in range(draws)]
    return SuiteResult("dybe", draws, max(r), tol)


def star_triangle_suite(p, rng, tol, draws=10, mu=0.05 + 0.02j, radius=4):
    """All closed hexagons with heights in [-radius, radius] around mu."""
    hexes = hexagons(radius, range(-radius, radius + 1))
    z, w = draw(rng, draws, p), draw(rng, draws, p)
    worst = 0.0
    for i in range(draws):
        for h in hexes:
            worst = max(worst, star_triangle_residual(*h, z[i], w[i], p, mu))
    return SuiteResult("star_triangle", draws * len(hexes), float(worst), tol,
                       {"hexagons": len(hexes)})


def rll_suite(p, rng, tol, draws=20, n=2):
    chain = FundamentalChain(CHAIN_POINTS[:n], p)
    z, w, lam = draw(rng, draws, p), draw(rng, draws, p), draw(rng, draws, p)
    r = [rll_residual(chain, z[i], w[i], lam[i]) for i in range(draws)]
    return SuiteResult("rll", draws, max(r), tol, {"n": n})


def highest_weight_suite(p, rng, tol, draws=10, n=2):
    """a v0 = v0, c v0 = 0 and d v0 = D(z, lam) v0 on e[1]^n."""
    chain = FundamentalChain(CHAIN_POINTS[:n], p)
    v0 = chain.highest_vector()
    z, lam = draw(rng, draws, p), draw(rng, draws, p)
    worst = 0.0
    for i in range(draws):
        A, _, C, D = chain.blocks(z[i], lam[i])
        worst = max(worst, np.max(np.abs(A @ v0 - v0)), np.max(np.abs(C @ v0)),
                    _rel(D @ v0, chain.highest_weight_D(z[i], lam[i]) * v0))
    return SuiteResult("highest_weight", 3 * draws, float(worst), tol, {"n": n})


def _probe(rng, dim):
    M = rng.normal(size=(dim, 3)) + 1j * rng.normal(size=(dim, 3))
    return lambda lam: M @ np.array([1.0, lam, np.sin(lam)])


def commutation_suite(p, rng, tol, draws=10, n=2):
    chain = FundamentalChain(CHAIN_POINTS[:n], p)
    probe = _probe(rng, chain.dim)
    w, t, lam = draw(rng, draws, p), draw(rng, draws, p), draw(rng, draws, p)
    worst = {"a": 0.0, "d": 0.0}
    for i in range(draws):
        for which in worst:
            worst[which] = max(worst[which],
                               commutation_residual(chain, w[i], t[i], lam[i], probe, which))
    return SuiteResult("commutation", 2 * draws, max(worst.values()), tol,
                       {"a_b": worst["a"], "d_b": worst["d"]})


def a_exchange_suite(p, rng, tol, draws=10, m=2):
    """Closed A_0, A_1 against the recursive expansion."""
    worst = 0.0
    for _ in range(draws):
        w, lam = draw(rng, 1, p)[0], draw(rng, 1, p)[0]
        ts = list(draw(rng, m, p))
        rec = a_exchange_coeffs(w, ts, lam, p)
        A0, A1 = a_exchange_closed(w, ts, lam, p)
        worst = max(worst, abs(A0 - rec[0]) / abs(rec[0]), abs(A1 - rec[1]) / abs(rec[1]))
    return SuiteResult("a_exchange", 2 * draws, float(worst), tol, {"m": m})


def transfer_commute_suite(p, rng, tol, draws=5, n=2):
    chain = FundamentalChain(CHAIN_POINTS[:n], p)
    worst = 0.0
    for _ in range(draws):
        z, w, lam = draw(rng, 3, p)
        X = chain.transfer(z) @ chain.transfer(w) - chain.transfer(w) @ chain.transfer(z)
        worst = max(worst, max(float(np.max(np.abs(v))) for v in X.coeffs(lam).values()))
    return SuiteResult("transfer_commute", draws, worst, tol, {"n": n})


def vertex_irf_suite(p, rng, tol, draws=50):
    z, w, lam = draw(rng, draws, p), draw(rng, draws, p), draw(rng, draws, p)
    r = [vertex_irf_residual(z[i], w[i], lam[i], p, relative=True) for i in range(draws)]
    return SuiteResult("vertex_irf", draws, max(r), tol)


def phi_lemma_suite(p, rng, tol, draws=20):
    z, w, lam = draw(rng, draws, p), draw(rng, draws, p), draw(rng, draws, p)
    r = [max(phi_identity_residuals(z[i], w[i], lam[i], p)) for i in range(draws)]
    return SuiteResult("phi_lemma", 4 * draws, max(r), tol)


def det_s_hat_suite(p, rng, tol, draws=20):
    """det S_hat / (theta(z) theta(lam)) takes one value across draws."""
    z, lam = draw(rng, draws, p), draw(rng, draws, p)
    vals = np.array([det_s_hat_ratio(z[i], lam[i], p) for i in range(draws)])
    spread = float(np.max(np.abs(vals - vals[0])) / abs(vals[0]))
    return SuiteResult("det_s_hat", draws, spread, tol,
                       {"constant": [float(vals[0].real), float(vals[0].imag)]})


def intertwining_suite(p, rng, tol, draws=3, sizes=(2, 4)):
    worst, per = 0.0, {}
    for n in sizes:
        chain = FundamentalChain(CHAIN_POINTS[:n], p)
        r = max(t8v_intertwine_residual(chain, *draw(rng, 2, p)) for _ in range(draws))
        per[f"n={n}"] = r
        worst = max(worst, r)
    return SuiteResult("intertwining", draws * len(sizes), worst, tol, per)


def r8v_suite(p, rng, tol, draws=10):
    """Yang-Baxter, R(0) = P, symmetry under conjugation by sigma x sigma."""
    from .lattice import SIGMA_A, SIGMA_B

    worst = {"ybe": 0.0, "flip": 0.0, "symmetry": 0.0}
    worst["flip"] = float(np.max(np.abs(r8v_eval(0.0, p) - flip_matrix())))
    z, w = draw(rng, draws, p), draw(rng, draws, p)
    for i in range(draws):
        worst["ybe"] = max(worst["ybe"], r8v_ybe_residual(z[i], w[i], p))
        R = r8v_eval(z[i], p)
        for s in (SIGMA_A, SIGMA_B):
            ss = np.kron(s, s)
            worst["symmetry"] = max(worst["symmetry"], _rel(R, ss @ R @ ss))
    return SuiteResult("r8v", 2 * draws + 1, max(worst.values()), tol, worst)


def r8v_residue_suite(p, tol, delta=1e-5):
    """Residue at z = 2 eta against theta(2 eta)/theta'(0) (1 - P), entrywise."""
    exact = theta(2 * p.eta, p) / theta_deriv(0.0, 1, p) * (np.eye(4) - flip_matrix())
    est = r8v_residue(p, delta)
    err = float(np.max(np.abs(est - exact)))
    return SuiteResult("r8v_residue", 1, err, tol, {"delta": delta})


def irf_operator_suite(p, rng, tol, sizes=(2, 4), mu=0.05):
    worst, count, per = 0.0, 0, {}
    z = draw(rng, 1, p)[0]
    for n in sizes:
        chain = FundamentalChain(CHAIN_POINTS[:n], p)
        states = all_paths(n, mu=mu)
        r = max(irf_operator_residual(s, z, chain) for s in states)
        per[f"n={n}"] = float(r)
        worst = max(worst, r)
        count += len(states)
    return SuiteResult("irf_operator", count, float(worst), tol, per)


SUITES = {
    "theta": theta_suite,
    "dybe": dybe_suite,
    "star_triangle": star_triangle_suite,
    "rll": rll_suite,
    "highest_weight": highest_weight_suite,
    "commutation": commutation_suite,
    "a_exchange": a_exchange_suite,
    "transfer_commute": transfer_commute_suite,
    "vertex_irf": vertex_irf_suite,
    "phi_lemma": phi_lemma_suite,
    "det_s_hat": det_s_hat_suite,
    "intertwining": intertwining_suite,
    "r8v": r8v_suite,
    "irf_operator": irf_operator_suite,
}


def run_all(p, seed=42, tols=None):
    """Run every suite in a fixed order with one seeded generator."""
    tols = dict(DEFAULT_TOLS, **(tols or {}))
    rng = np.random.default_rng(seed)
    out = [fn(p, rng, tols[name]) for name, fn in SUITES.items()]
    out.append(r8v_residue_suite(p, tols["r8v_residue"]))
    return out


def theta_params_grid(eta):
    return [ModularParams(tau, eta) for tau in (0.6j, 0.9j, 0.4 + 0.8j)]
