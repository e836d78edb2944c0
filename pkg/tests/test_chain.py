import numpy as np
import pytest

from ellbethe.chain import (DifferenceOperator, FundamentalChain, a_exchange_closed,
                            a_exchange_coeffs, a_exchange_residual, abcd_blocks,
                            commutation_residual, l_operator, rank_independence_check,
                            rll_residual, transfer_apply)
from ellbethe.errors import DegenerateRootsError
from ellbethe.rmatrix import rmatrix_eval
from ellbethe.tensor import (basis_index, dyn_embed, embed, is_weight_conserving,
                             partial_trace_first, total_weights, zero_weight_indices)
from ellbethe.theta import theta

ZS = (0.0, 0.4, 0.13 + 0.2j)


def test_basis_conventions():
    assert basis_index((1, 1)) == 0 and basis_index((-1, 1)) == 2
    assert list(total_weights(2)) == [2, 0, 0, -2]
    assert len(zero_weight_indices(4)) == 6
    assert len(zero_weight_indices(3)) == 0


def test_embed_orders_factors(rng):
    A = rng.normal(size=(2, 2))
    B = rng.normal(size=(2, 2))
    assert np.allclose(embed(np.kron(A, B), (0, 1), 2), np.kron(A, B))
    assert np.allclose(embed(np.kron(A, B), (1, 0), 2), np.kron(B, A))
    assert np.allclose(embed(A, (2,), 3), np.kron(np.eye(4), A))
    M = rng.normal(size=(8, 8))
    assert np.allclose(partial_trace_first(np.kron(A, M[:4, :4]), 3), np.trace(A) * M[:4, :4])


def test_dyn_embed_blocks(p):
    lam = 0.27
    got = dyn_embed(lambda l: np.diag([l, 1.0]), (0,), 2, lam, p.eta, (1,))
    # spectator e[1] shifts by -2 eta, e[-1] by +2 eta
    assert np.isclose(got[0, 0], lam - 2 * p.eta) and np.isclose(got[1, 1], lam + 2 * p.eta)


def test_difference_operator_associative(rng, p):
    mats = [rng.normal(size=(3, 2, 2)) for _ in range(3)]

    def op(m):
        return DifferenceOperator({-1: lambda l: m[0] * np.cos(l), 0: lambda l: m[1],
                                   2: lambda l: m[2] * l}, p.eta)

    O1, O2, O3 = (op(m) for m in mats)
    f = lambda l: np.array([np.sin(l), np.exp(l)])  # noqa: E731
    lam = 0.21 + 0.1j
    left = ((O1 @ O2) @ O3).apply(f, lam)
    right = (O1 @ (O2 @ O3)).apply(f, lam)
    assert np.max(np.abs(left - right)) < 1e-12
    assert np.allclose((O1 + O2).apply(f, lam), O1.apply(f, lam) + O2.apply(f, lam))
    assert np.allclose((O1 - O1).apply(f, lam), 0)


def test_l_operator_single_site(p):
    chain = FundamentalChain((0.2,), p)
    z, lam = 0.33 + 0.05j, 0.21
    assert np.max(np.abs(l_operator(chain, z, lam) - rmatrix_eval(z - 0.2, lam, p))) < 1e-15


def test_l_operator_conserves_weight(p):
    chain = FundamentalChain(ZS, p)
    L = l_operator(chain, 0.33 + 0.05j, 0.21)
    assert is_weight_conserving(L, total_weights(4))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rll(p, rng, n):
    chain = FundamentalChain(ZS[:n], p)
    for _ in range(5):
        z, w, lam = rng.uniform(-0.5, 0.5, 3) + 0.2j * rng.uniform(-1, 1, 3)
        assert rll_residual(chain, z, w, lam) < 1e-10


def test_degenerate_points_rejected(p):
    with pytest.raises(DegenerateRootsError):
        FundamentalChain((0.1, 1.1 + p.tau), p)


def test_highest_weight(p, rng):
    chain = FundamentalChain(ZS[:2], p)
    v0 = chain.highest_vector()
    for z, lam in rng.uniform(-0.5, 0.5, (5, 2)) + 0.2j:
        A, B, C, D = abcd_blocks(chain, z, lam)
        assert np.max(np.abs(C @ v0)) < 1e-12
        assert np.max(np.abs(A @ v0 - v0)) < 1e-12
        ref = theta(lam - 4 * p.eta, p) / theta(lam, p) * np.prod(
            [theta(z - zj, p) / theta(z - zj - 2 * p.eta, p) for zj in chain.z_points])
        assert np.max(np.abs(D @ v0 - ref * v0)) < 1e-12 * max(1, abs(ref))


def test_b_lowers_weight(p):
    chain = FundamentalChain(ZS, p)
    _, B, _, _ = abcd_blocks(chain, 0.3, 0.21)
    w = total_weights(3)
    mask = w[:, None] != w[None, :] - 2
    assert np.all(np.abs(B[mask]) == 0)


def test_transfer_commute(p):
    chain = FundamentalChain(ZS[:2], p)
    T1, T2 = chain.transfer(0.3), chain.transfer(0.17 + 0.1j)
    X = T1 @ T2 - T2 @ T1
    assert set(X.coeffs(0.27)) <= {-2, 0, 2}
    assert max(np.max(np.abs(v)) for v in X.coeffs(0.27).values()) < 1e-9
    f = lambda l: np.array([np.sin(l), 1.0 + l])  # noqa: E731
    assert transfer_apply(chain, 0.3, f, 0.27).shape == (2,)


def test_commutation_relations(p10, rng):
    chain = FundamentalChain((0.0, 0.4), p10)
    M = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
    probe = lambda l: M @ np.array([1, l, np.sin(l)])  # noqa: E731
    assert commutation_residual(chain, 0.3, 0.41, 0.27, probe, "a") < 1e-10
    assert commutation_residual(chain, 0.3, 0.41, 0.27, probe, "d") < 1e-10
    with pytest.raises(DegenerateRootsError):
        commutation_residual(chain, 0.3, 1.3, 0.27, probe)


def test_a_exchange(p):
    w, ts, lam = 0.3 + 0.05j, [0.41, 0.12 - 0.1j], 0.27
    rec = a_exchange_coeffs(w, ts, lam, p)
    A0, A1 = a_exchange_closed(w, ts, lam, p)
    assert abs(A0 - rec[0]) / abs(rec[0]) < 1e-10
    assert abs(A1 - rec[1]) / abs(rec[1]) < 1e-10
    # symmetry: the order of the b's does not matter
    swapped = a_exchange_coeffs(w, ts[::-1], lam, p)
    assert abs(swapped[0] - rec[0]) < 1e-10
    assert abs(swapped[1] - rec[2]) < 1e-10 and abs(swapped[2] - rec[1]) < 1e-10


def test_a_exchange_on_chain(p, rng):
    chain = FundamentalChain((0.0, 0.4), p)
    M = rng.normal(size=(4, 2))
    probe = lambda l: M @ np.array([1.0, np.cos(l)])  # noqa: E731
    assert a_exchange_residual(chain, 0.3, [0.41, 0.12 - 0.1j], 0.27, probe) < 1e-10


def test_rank(p):
    lam = 0.27 + 0.03j
    assert rank_independence_check(FundamentalChain((0.0,), p), [0.3], lam) == 2
    chain = FundamentalChain((0.0, 0.37 + 0.1j), p)
    assert rank_independence_check(chain, [0.3, 0.61], lam) == 4
    with pytest.raises(DegenerateRootsError):
        rank_independence_check(chain, [0.3, 0.3], lam)
