import math

import numpy as np
import pytest
import scipy.linalg

from coupon_embed import embedding, model, oracle
from coupon_embed.exceptions import SpectralRadiusTooLarge


def test_exp_oracle_basics():
    np.testing.assert_array_equal(oracle.exp_oracle(np.zeros((3, 3))), np.eye(3))
    np.testing.assert_allclose(oracle.exp_oracle([[2.0]]), [[math.e ** 2]], rtol=1e-14)
    A = np.random.default_rng(0).standard_normal((6, 6)) * 3
    np.testing.assert_allclose(oracle.exp_oracle(A), scipy.linalg.expm(A), rtol=1e-11, atol=1e-11)
    with pytest.raises(ValueError):
        oracle.exp_oracle(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        oracle.mat_mul(np.zeros((2, 3)), np.zeros((2, 3)))


def test_reconstruction_and_structure(p_a):
    R = model.cg_from_params(embedding.log_params(p_a))
    E = oracle.exp_oracle(R)
    np.testing.assert_allclose(E, model.cm_from_params(p_a), atol=1e-15)
    assert oracle.is_markov(E)
    assert np.all(np.tril(E, -1) == 0)


def test_exp_of_generator_is_markov():
    rng = np.random.default_rng(1)
    for _ in range(10):
        Q = rng.uniform(0, 2, (5, 5))
        np.fill_diagonal(Q, 0)
        np.fill_diagonal(Q, -Q.sum(axis=1))
        assert oracle.is_generator(Q)
        E = oracle.exp_oracle(Q)
        assert E.min() >= -1e-15 and oracle.is_markov(E)


def test_smt_diagonal():
    r = np.array([-1.0, 0.25, 0.5, 0.25])
    R = model.cg_from_params(r)
    lam = model.eigenvalues_cg(r)
    np.testing.assert_allclose(np.diag(oracle.exp_oracle(R)), np.exp(lam), atol=1e-15)


def test_commuting_generators():
    r1 = np.array([-1.0, 0.25, 0.5, 0.25])
    r2 = np.array([-0.7, 0.0, 0.2, 0.5])
    A, B = model.cg_from_params(r1), model.cg_from_params(r2)
    np.testing.assert_allclose(A @ B, B @ A, atol=1e-15)
    np.testing.assert_allclose(oracle.exp_oracle(A + B),
                               oracle.exp_oracle(A) @ oracle.exp_oracle(B), atol=1e-14)


def test_matlog_oracle(p_a):
    L = oracle.matlog_oracle(model.cm_from_params(p_a))
    np.testing.assert_allclose(L, model.cg_from_params(embedding.log_params(p_a)), atol=1e-13)
    np.testing.assert_allclose(oracle.exp_oracle(L), model.cm_from_params(p_a), atol=1e-13)
    with pytest.raises(SpectralRadiusTooLarge) as info:
        oracle.matlog_oracle(model.cm_from_params([0.0, 0.5, 0.5, 0.0]))
    assert info.value.bound == pytest.approx(1.0)
    with pytest.raises(ValueError):
        oracle.matlog_oracle(np.array([[1.0, 0.0], [0.1, 0.9]]))


def test_predicates(p_b):
    assert oracle.is_markov(np.eye(3))
    assert not oracle.is_markov([[0.5, 0.6], [0, 1]])
    assert not oracle.is_markov([[1.1, -0.1], [0, 1]])
    assert oracle.is_generator(np.zeros((2, 2)))
    assert not oracle.is_generator([[-1.0, 0.5], [0, 0]])
    R = model.cg_from_params(embedding.log_params(p_b))
    assert not oracle.is_generator(R)
    # still a real logarithm
    np.testing.assert_allclose(oracle.exp_oracle(R), model.cm_from_params(p_b), atol=1e-14)
