import csv
import io

import numpy as np
import pytest

from ellbethe.bethe import bae_residual, transfer_eigenvalue
from ellbethe.qlame import (QLameProblem, SpectralPoint, bilinear_form, classical_limit_residual,
                            closed_form_c, continuation_csv, eigen_residual, empirical_order,
                            point_residual, qlame_apply, qlame_continue, qlame_eigenvalue,
                            qlame_psi, qlame_solve, reflect_point, shifted_multiplier_psi,
                            wronskian, wronskian_coeffs)
from ellbethe.theta import ModularParams, theta, theta_deriv

SEEDS = {1: [0.3 + 0.1j], 2: [0.25 + 0.1j, 0.55 - 0.05j], 3: [0.1 + 0.3j, 0.4 - 0.2j, 0.7 + 0.05j]}
ETAS = [0.08, 0.04, 0.02, 0.01]


@pytest.fixture(scope="module")
def points():
    p = ModularParams(0.9j, 0.1)
    out = {}
    for m, t0 in SEEDS.items():
        prob = QLameProblem(m, p)
        out[m] = (prob, qlame_solve(prob, 0.1 if m == 1 else 0.0, t0))
    return out


@pytest.fixture
def lams(rng):
    return rng.uniform(-0.5, 0.5, 20) + 0.25j * rng.uniform(-1, 1, 20)


def test_problem_guard(p10):
    with pytest.raises(ValueError):
        QLameProblem(0, p10)
    bp = QLameProblem(2, p10).bethe_problem()
    assert np.allclose([bp.p_pts[0], bp.q_pts[0]], [-3 * p10.eta, 5 * p10.eta])


def test_apply_to_constant(p10):
    prob = QLameProblem(2, p10)
    lam = 0.27 + 0.1j
    ref = (theta(lam + 0.4, p10) + theta(lam - 0.4, p10)) / theta(lam, p10)
    assert abs(qlame_apply(prob, lambda x: 1.0, lam) - ref) < 1e-13


def test_psi_basics(p10):
    assert abs(qlame_psi([0.3], 0.0, 0.2, p10) - theta(0.2 + 0.3 - p10.eta, p10)) < 1e-15
    t = [0.3 + 0.1j, -0.2]
    for tj in t:
        assert abs(qlame_psi(t, 0.4, p10.eta - tj + 1 + p10.tau, p10)) < 1e-10
    lam, c = 0.17 + 0.05j, 0.3 - 0.2j
    assert abs(qlame_psi(t, c, lam + 1, p10) - np.exp(c) * qlame_psi(t, c, lam, p10)) < 1e-12


@pytest.mark.parametrize("m", [1, 2, 3])
def test_eigenfunctions(points, lams, m):
    prob, pt = points[m]
    assert pt.residual < 1e-12
    assert eigen_residual(prob, pt.t, pt.c, lams) < 1e-10
    # multiplier shift gives the opposite eigenvalue
    psi2 = lambda x: shifted_multiplier_psi(pt.t, pt.c, x, prob.p)  # noqa: E731
    worst = max(abs(qlame_apply(prob, psi2, x) + pt.eps * psi2(x)) / abs(psi2(x)) for x in lams)
    assert worst < 1e-9


@pytest.mark.parametrize("m", [1, 2, 3])
def test_transfer_matrix_is_scaled_operator(points, rng, m):
    prob, pt = points[m]
    p, eta = prob.p, prob.p.eta
    bp = prob.bethe_problem(pt.c)
    ws = rng.uniform(-0.5, 0.5, 20) + 0.25j * rng.uniform(-1, 1, 20)
    vals = np.array([theta(w - (2 * m + 1) * eta, p) / theta(w - eta, p)
                     * transfer_eigenvalue(bp, pt.t, pt.c, w) for w in ws])
    assert np.max(np.abs(vals - vals[0])) / abs(vals[0]) < 1e-9
    assert abs(vals[0] - pt.eps) / abs(pt.eps) < 1e-9


@pytest.mark.parametrize("m", [1, 2, 3])
def test_reflection(points, rng, m):
    prob, pt = points[m]
    r = reflect_point(prob, pt)
    assert abs(r.eps - pt.eps) / abs(pt.eps) < 1e-9
    assert r.residual < 1e-12
    back = reflect_point(prob, r)
    assert np.max(np.abs(back.t - pt.t)) < 1e-12 and abs(back.c - pt.c) < 1e-12
    xs = rng.uniform(-0.5, 0.5, 10) + 0.2j * rng.uniform(-1, 1, 10)
    ratio = [qlame_psi(r.t, r.c, x, prob.p) / qlame_psi(pt.t, pt.c, -x, prob.p) for x in xs]
    assert max(abs(q - ratio[0]) for q in ratio) / abs(ratio[0]) < 1e-9


@pytest.mark.parametrize("c", [0.0, 0.1, 0.1 + 0.1j])
def test_reflected_start_converges_to_reflection(p10, c):
    prob = QLameProblem(2, p10)
    pt = qlame_solve(prob, c, SEEDS[2])
    want = reflect_point(prob, pt)
    r = qlame_solve(prob, -c, [2 * p10.eta - x for x in SEEDS[2]])
    assert abs(r.eps - pt.eps) / abs(pt.eps) < 1e-9
    assert np.max(np.abs(np.sort_complex(r.t) - np.sort_complex(want.t))) < 1e-9
    assert abs(r.c - want.c) < 1e-9


def test_m1_closed_form(points):
    prob, _ = points[1]
    p, eta = prob.p, prob.p.eta
    t1 = 0.21 + 0.13j
    c = closed_form_c(prob, t1)
    pt = SpectralPoint(np.array([t1]), c, qlame_eigenvalue(prob, [t1], c))
    assert point_residual(prob, pt) < 1e-13
    ref = np.exp(-2 * eta * c) * theta(4 * eta, p) / theta(2 * eta, p) \
        * theta(t1 - eta, p) / theta(t1 + eta, p)
    assert abs(pt.eps - ref) < 1e-13
    with pytest.raises(ValueError):
        closed_form_c(QLameProblem(2, p), t1)


def test_c_shift_degeneracy(points):
    prob, pt = points[2]
    bp = prob.bethe_problem()
    for k in (-1, 1, 2):
        c2 = pt.c + 2j * np.pi * k / (2 * prob.p.eta)
        assert np.max(np.abs(bae_residual(bp, pt.t, c2))) < 1e-12


def test_wronskian(p10):
    # the m = 2, c = 0 point is fixed by the reflection; use c = 0.1
    prob = QLameProblem(2, p10)
    pt = qlame_solve(prob, 0.1, SEEDS[2])
    p = prob.p
    r = reflect_point(prob, pt)
    f = lambda x: np.sin(x) + x  # noqa: E731
    g = lambda x: np.exp(x)  # noqa: E731
    lam = 0.27 + 0.1j
    assert wronskian(f, f, lam, p) == 0
    assert abs(wronskian(f, g, lam, p) + wronskian(g, f, lam, p)) < 1e-15
    psi_p = lambda x: qlame_psi(pt.t, pt.c, x, p)  # noqa: E731
    psi_m = lambda x: qlame_psi(r.t, r.c, x, p)  # noqa: E731
    assert abs(wronskian(psi_p, psi_m, lam, p)) > 1e-6
    # coefficients of a combination with a 2 eta periodic multiplier are 2 eta periodic
    per = lambda x: 1.5 + np.exp(1j * np.pi * x / p.eta)  # noqa: E731
    comb = lambda x: psi_p(x) + per(x) * psi_m(x)  # noqa: E731
    for h in (comb, lambda x: psi_p(x) + psi_m(x)):
        ap0, am0 = wronskian_coeffs(h, psi_p, psi_m, lam, p)
        ap1, am1 = wronskian_coeffs(h, psi_p, psi_m, lam + 2 * p.eta, p)
        assert abs(ap1 - ap0) < 1e-8 and abs(am1 - am0) < 1e-8
    ap, am = wronskian_coeffs(comb, psi_p, psi_m, lam, p)
    assert abs(ap - 1) < 1e-9 and abs(am - per(lam)) < 1e-9


def test_bilinear_symmetry(points):
    prob, pt = points[2]
    p, m = prob.p, prob.m
    phi = lambda x: qlame_psi(pt.t, pt.c, x, p)  # noqa: E731
    g = lambda x: np.exp(pt.c * x) * theta(x + 0.17, p) ** m  # noqa: E731
    Lphi = lambda x: qlame_apply(prob, phi, x)  # noqa: E731
    Lg = lambda x: qlame_apply(prob, g, x)  # noqa: E731
    a, b = bilinear_form(Lg, phi, m, p), bilinear_form(g, Lphi, m, p)
    assert abs(a - b) / abs(a) < 1e-6


@pytest.mark.parametrize("m", [0, 1, 2])
def test_classical_limit_order(m):
    res = classical_limit_residual(m, lambda x: theta(x + 0.3, ModularParams(0.9j, 0.1)),
                                   0.27 + 0.1j, 0.9j, ETAS)
    assert abs(empirical_order(ETAS, res) - 2.0) < 0.3
    scaled = [r / e ** 2 for r, e in zip(res, ETAS)]
    assert max(scaled) / min(scaled) < 2


def test_classical_limit_analytic_derivatives():
    p = ModularParams(0.9j, 0.1)
    psi = lambda x: theta(x + 0.3, p)  # noqa: E731
    d1 = lambda x: theta_deriv(x + 0.3, 1, p)  # noqa: E731
    d2 = lambda x: theta_deriv(x + 0.3, 2, p)  # noqa: E731
    res = classical_limit_residual(1, psi, 0.27 + 0.1j, 0.9j, ETAS, d1, d2)
    assert abs(empirical_order(ETAS, res) - 2.0) < 0.3


def test_classical_limit_constant():
    # constant psi: only the m^2 theta''/theta term survives
    res = classical_limit_residual(2, lambda x: 1.0, 0.27 + 0.1j, 0.9j, ETAS)
    assert abs(empirical_order(ETAS, res) - 2.0) < 0.3


def test_continuation_csv(points):
    prob, _ = points[2]
    cs = list(np.linspace(0, 0.3, 30))
    pts = qlame_continue(prob, cs, SEEDS[2])
    assert len(pts) == 30 and all(q.residual < 1e-10 for q in pts)
    rows = list(csv.reader(io.StringIO(continuation_csv(pts, cs))))
    assert rows[0][:2] == ["c_re", "c_im"] and "eps_re" in rows[0]
    assert len(rows) == 31
    c_col = [float(r[0]) for r in rows[1:]]
    assert all(b > a for a, b in zip(c_col, c_col[1:]))


def test_record(points):
    prob, pt = points[1]
    rec = pt.to_record(prob)
    assert set(rec) == {"m", "tau", "eta", "t", "c", "eps", "residual"}
