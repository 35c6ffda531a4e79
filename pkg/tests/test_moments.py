import math

import numpy as np
import pytest

from oracles import (brickwork_unitary, brute_relaxed_moment, mixture_block_moment, moment_of,
                     permutation_operator, random_unitary)
from relaxed_designs.errors import DimensionMismatch, TooLarge, TooLargeT
from relaxed_designs.layout import brickwork_layers, lift_pair, slots_per_block
from relaxed_designs.moments import (BlockMomentOperator, GateMoment, HaarProjector,
                                     block_moment_matvec, gate_moment, haar_moment_matvec,
                                     moment_decomposition_check, relaxed_gate_moment,
                                     spectral_norm_diff, tensor_power_tt, uniform_moment)
from relaxed_designs.moments.haar import count_cycles, gram_matrix
from relaxed_designs.seeds import Gate, Origin, Seed, default_seeds


def seed_from(rng, n_m_pairs, n_bm):
    u_m = []
    for i in range(n_m_pairs):
        u = random_unitary(rng, 4)
        u_m += [Gate(u, f"M{i}", Origin.INVERTIBLE), Gate(u.conj().T, f"M{i}dg", Origin.INVERTIBLE)]
    u_bm = [Gate(random_unitary(rng, 4), f"R{i}", Origin.RELAXED) for i in range(n_bm)]
    return Seed(u_m, u_bm)


def involution_seed(rng, n_bm):
    x = np.kron(np.eye(2), [[0, 1], [1, 0]])
    u_bm = [Gate(random_unitary(rng, 4), f"R{i}", Origin.RELAXED) for i in range(n_bm)]
    return Seed([Gate(x, "X", Origin.INVERTIBLE)], u_bm)


def test_layout():
    assert brickwork_layers(4) == [[(1, 2), (3, 4)], [(2, 3)]]
    assert brickwork_layers(2) == [[(1, 2)], []]
    assert brickwork_layers(5) == [[(1, 2), (3, 4)], [(2, 3), (4, 5)]]
    assert [slots_per_block(n) for n in range(2, 8)] == [1, 2, 3, 4, 5, 6]
    with pytest.raises(ValueError):
        brickwork_layers(1)
    u = random_unitary(np.random.default_rng(0), 4)
    np.testing.assert_allclose(lift_pair(u, 2, 4), np.kron(np.kron(np.eye(2), u), np.eye(2)))


def test_gate_moment_single_unitary():
    u = random_unitary(np.random.default_rng(1), 4)
    m = gate_moment([(1.0, u)], 1).matrix
    np.testing.assert_allclose(m, np.kron(u, u.conj()), atol=1e-14)
    assert gate_moment([(1.0, u)], 2).matrix.shape == (256, 256)


def test_gate_moment_checks():
    u = np.eye(4)
    with pytest.raises(ValueError):
        gate_moment([(0.5, u)], 1)
    with pytest.raises(TooLargeT):
        gate_moment([(1.0, u)], 5)
    # t=4 is inside the order cap but its dense moment is 64 GiB
    with pytest.raises(TooLarge):
        gate_moment([(1.0, u)], 4)


def test_tensor_power_leg_order():
    rng = np.random.default_rng(2)
    u = random_unitary(rng, 2)
    m = tensor_power_tt(u, 2)
    np.testing.assert_allclose(m, np.kron(np.kron(u, u), np.kron(u.conj(), u.conj())))


@pytest.mark.parametrize("t", [1, 2])
def test_relaxed_moment_vs_enumeration(t):
    seed = seed_from(np.random.default_rng(3), 1, 1)
    got = relaxed_gate_moment(seed, 3, t).matrix
    ref, count = brute_relaxed_moment(seed.matrices(), seed.n_invertible, 3, t)
    assert count == 19
    assert np.max(np.abs(got - ref)) <= 1e-10


def test_relaxed_moment_k1_is_relaxed_average():
    seed = seed_from(np.random.default_rng(4), 1, 2)
    got = relaxed_gate_moment(seed, 1, 1).matrix
    ref = uniform_moment(seed.u_bm, 1).matrix
    np.testing.assert_allclose(got, ref, atol=1e-13)


def test_relaxed_moment_tends_to_full_power():
    seed = default_seeds()[0]
    m_b = uniform_moment(seed.gates, 1).matrix
    got = relaxed_gate_moment(seed, 60, 1).matrix
    # a^k = (2/3)^60 ~ 2.7e-11 so the correction is negligible
    assert np.max(np.abs(got - np.linalg.matrix_power(m_b, 60))) < 1e-9


@pytest.mark.parametrize("n, t", [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2), (2, 3)])
def test_block_vs_mixture_oracle(n, t):
    rng = np.random.default_rng(10 * n + t)
    us = [random_unitary(rng, 4) for _ in range(2)]
    probs = [0.3, 0.7]
    op = BlockMomentOperator(n, t, gate_moment(list(zip(probs, us)), t))
    ref = mixture_block_moment(us, probs, n, t)
    v = rng.standard_normal((op.dim, 5)) + 1j * rng.standard_normal((op.dim, 5))
    assert np.max(np.abs(block_moment_matvec(op, v) - ref @ v)) <= 1e-11
    assert np.max(np.abs(op.rmatvec(v) - ref.conj().T @ v)) <= 1e-11
    if op.dim <= 2**10:
        assert np.max(np.abs(op.to_dense() - ref)) <= 1e-11


def test_block_single_gate_is_brickwork_unitary():
    rng = np.random.default_rng(5)
    u = random_unitary(rng, 4)
    op = BlockMomentOperator(4, 1, gate_moment([(1.0, u)], 1))
    w = brickwork_unitary([u, u, u], 4)
    np.testing.assert_allclose(op.to_dense(), moment_of(w, 1), atol=1e-12)


def test_block_identity_gate():
    op = BlockMomentOperator(3, 1, gate_moment([(1.0, np.eye(4))], 1))
    v = np.random.default_rng(6).standard_normal(op.dim)
    np.testing.assert_allclose(op.matvec(v), v)


def test_block_dimension_mismatch():
    op = BlockMomentOperator(2, 1, gate_moment([(1.0, np.eye(4))], 1))
    with pytest.raises(DimensionMismatch):
        op.matvec(np.zeros(17))
    with pytest.raises(TooLarge):
        BlockMomentOperator(7, 1, op.gate_moment).to_dense()


def test_count_cycles():
    assert count_cycles((0, 1, 2)) == 3
    assert count_cycles((1, 0, 2)) == 2
    assert count_cycles((1, 2, 0)) == 1


def test_gram_matrix():
    np.testing.assert_array_equal(gram_matrix(2, 2), [[4, 2], [2, 4]])
    proj = HaarProjector(1, 3)
    basis = [permutation_operator(p, 2) for p in proj.perms]
    explicit = np.array([[np.trace(a.T @ b) for b in basis] for a in basis])
    np.testing.assert_allclose(proj.gram, explicit)


@pytest.mark.parametrize("n, t", [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)])
def test_haar_projector_properties(n, t):
    proj = HaarProjector(n, t)
    p = proj.to_dense()
    assert np.max(np.abs(p @ p - p)) <= 1e-10
    assert np.max(np.abs(p - p.conj().T)) <= 1e-10
    # rank is t! when d >= t; at d=2, t=3 the antisymmetric sector drops out
    rank = math.factorial(t) if 2**n >= t else np.linalg.matrix_rank(proj.gram)
    assert np.trace(p).real == pytest.approx(rank, abs=1e-9)
    for perm in proj.perms:
        vec = permutation_operator(perm, 2**n).reshape(-1)
        np.testing.assert_allclose(proj.perm_vector(perm), vec)
        np.testing.assert_allclose(p @ vec, vec, atol=1e-10)


@pytest.mark.parametrize("n, t", [(1, 2), (2, 1), (2, 2)])
def test_haar_projector_invariance(n, t):
    rng = np.random.default_rng(7)
    p = HaarProjector(n, t).to_dense()
    v = moment_of(random_unitary(rng, 2**n), t)
    np.testing.assert_allclose(v @ p, p, atol=1e-10)
    np.testing.assert_allclose(p @ v, p, atol=1e-10)


def test_haar_matvec_batch():
    proj = HaarProjector(2, 2)
    rng = np.random.default_rng(8)
    v = rng.standard_normal((proj.dim, 3)) + 0j
    np.testing.assert_allclose(haar_moment_matvec(proj, v), proj.to_dense() @ v, atol=1e-12)


class _Dense:
    def __init__(self, m):
        self.m = m
        self.dim = m.shape[0]

    def matvec(self, v):
        return self.m @ v

    def rmatvec(self, v):
        return self.m.conj().T @ v


def test_spectral_zero_operator():
    m = np.random.default_rng(9).standard_normal((30, 30))
    est = spectral_norm_diff(_Dense(m), _Dense(m))
    assert est.eta_hat <= 1e-8 and est.converged


def test_spectral_identity_minus_rank_one():
    x = np.ones(40) / np.sqrt(40)
    est = spectral_norm_diff(_Dense(np.eye(40)), _Dense(np.outer(x, x)))
    assert est.eta_hat == pytest.approx(1.0, abs=1e-6)


def test_spectral_matches_svd():
    rng = np.random.default_rng(10)
    a = rng.standard_normal((50, 50))
    est = spectral_norm_diff(_Dense(a), _Dense(np.zeros((50, 50))), tol=1e-10, max_iters=5000)
    assert est.eta_hat == pytest.approx(np.linalg.norm(a, 2), rel=1e-4)


def test_spectral_block_bounded():
    seed = default_seeds()[0]
    for n, t in [(2, 1), (3, 1), (2, 2)]:
        op = BlockMomentOperator(n, t, relaxed_gate_moment(seed, 5, t))
        est = spectral_norm_diff(op, HaarProjector(n, t))
        assert est.eta_hat <= 1 + 1e-9
        dense = op.to_dense() - HaarProjector(n, t).to_dense()
        assert est.eta_hat == pytest.approx(np.linalg.norm(dense, 2), rel=1e-5)


def test_spectral_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        spectral_norm_diff(_Dense(np.eye(3)), _Dense(np.eye(4)))


def test_decomposition_identity():
    rng = np.random.default_rng(11)
    assert moment_decomposition_check(involution_seed(rng, 1), 2, 2, 1) <= 1e-10
    assert moment_decomposition_check(seed_from(rng, 1, 1), 2, 2, 1) <= 1e-10
    assert moment_decomposition_check(seed_from(rng, 1, 1), 1, 3, 1) <= 1e-10


def test_decomposition_too_large():
    with pytest.raises(TooLarge):
        moment_decomposition_check(default_seeds()[0], 8, 3, 1)


def test_gate_moment_type():
    m = uniform_moment(default_seeds()[0].gates, 1)
    assert isinstance(m, GateMoment) and m.dim == 16
