import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

import brute
from coupon_embed import algebra, embedding, lattice, model, oracle
from coupon_embed.embedding import Outcome
from coupon_embed.exceptions import (ConditionOnNullEvent, EmptySet, NotEmbeddable,
                                     SingularMatrix, TooLarge)


def random_p(n, seed, min_empty=0.05):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(1 << n)) * (1 - min_empty)
    p[0] += min_empty
    return p


def embeddable_p(n, seed):
    r = brute.random_generator_rates(n, np.random.default_rng(seed))
    return algebra.semigroup_params(r, 1.0), r


def test_avoidance(p_a):
    np.testing.assert_array_equal(embedding.avoidance_probs([1.0, 0, 0, 0]), np.ones(4))
    np.testing.assert_allclose(embedding.avoidance_probs(p_a), [1.0, 0.6, 0.6, 0.4], atol=1e-15)
    p = random_p(4, 1)
    q = embedding.avoidance_probs(p)
    brute_q = [sum(p[I] for I in range(16) if I & K == 0) for K in range(16)]
    np.testing.assert_allclose(q, brute_q, atol=1e-15)
    assert q[-1] == pytest.approx(p[0], abs=1e-16)
    for K, H in brute.powerset_pairs(4):
        if brute.is_subset(K, H):
            assert q[K] >= q[H] - 1e-16


def test_conditional_avoidance(p_a):
    q = embedding.avoidance_probs(p_a)
    assert embedding.conditional_avoidance(q, 1, 0) == q[1]
    assert embedding.conditional_avoidance(q, 1, 3) == 1.0
    assert embedding.conditional_avoidance(q, 1, 2) == pytest.approx(2 / 3, abs=1e-15)
    with pytest.raises(ConditionOnNullEvent):
        embedding.conditional_avoidance(embedding.avoidance_probs([0, 0.5, 0.5, 0]), 1, 3)


def test_log_params_examples(p_a):
    np.testing.assert_array_equal(embedding.log_params([1.0, 0, 0, 0]), np.zeros(4))
    expected = [math.log(0.4), math.log(1.5), math.log(1.5), math.log(10 / 9)]
    np.testing.assert_allclose(embedding.log_params(p_a), expected, atol=1e-15)
    assert expected[3] == pytest.approx(0.10536, abs=1e-5)
    ln2 = math.log(2)
    np.testing.assert_allclose(embedding.log_params([0.25] * 4), [-2 * ln2, ln2, ln2, 0], atol=1e-15)
    with pytest.raises(SingularMatrix):
        embedding.log_params([0.0, 0.5, 0.5, 0.0])


@pytest.mark.parametrize('n', [1, 2, 3, 4, 5])
def test_log_params_against_scipy_logm(n):
    p = random_p(n, 10 + n, min_empty=0.2)
    R = scipy.linalg.logm(model.cm_from_params(p)).real
    np.testing.assert_allclose(model.cg_from_params(embedding.log_params(p)), R, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_log_params_laws(n, seed):
    p = random_p(n, seed)
    r = embedding.log_params(p)
    assert abs(r.sum()) <= 1e-10
    assert r[0] == math.log(p[0])
    for i in range(n):
        # exact two-term expression, nonnegative by monotonicity
        assert r[1 << i] == pytest.approx(math.log((p[0] + p[1 << i]) / p[0]), abs=1e-12)
        assert r[1 << i] >= 0


def test_verdicts(p_a, p_b):
    v = embedding.embeddability_verdict(p_a)
    assert v.outcome is Outcome.EMBEDDABLE and v.embeddable
    assert v.r[3] == pytest.approx(0.10536, abs=1e-5)
    assert v.witnesses == [] and v.boundary_flags == []
    assert v.spectrum_simple is False  # lambda_{1} == lambda_{2}
    v = embedding.embeddability_verdict(p_b)
    assert v.outcome is Outcome.NOT_EMBEDDABLE
    assert v.witnesses == [3]
    assert v.r[3] == pytest.approx(math.log(25 / 36), abs=1e-15)
    assert v.r[3] == pytest.approx(-0.3646, abs=1e-4)
    v = embedding.embeddability_verdict([0.0, 0.3, 0.3, 0.4])
    assert v.outcome is Outcome.SINGULAR and v.r is None


def test_witness_order_and_boundary():
    # negative pair rates {1,2} and {1,3}, plus a negative triple in general
    p = np.zeros(8)
    p[0], p[1], p[2], p[4] = 0.1, 0.3, 0.3, 0.3
    v = embedding.embeddability_verdict(p)
    keys = [(bin(k).count('1'), k) for k in v.witnesses]
    assert keys == sorted(keys)
    assert {3, 5, 6} <= set(v.witnesses)
    v = embedding.embeddability_verdict([0.25] * 4)
    assert v.embeddable and v.boundary_flags == [3]


def test_spectrum_simple_flag():
    assert embedding.embeddability_verdict([0.4, 0.1, 0.2, 0.3]).spectrum_simple is True


def test_generator_from_cm(p_a, p_b):
    np.testing.assert_array_equal(embedding.generator_from_cm([1.0, 0, 0, 0]), np.zeros((4, 4)))
    Q = embedding.generator_from_cm(p_a)
    assert Q[0, 3] == pytest.approx(math.log(10 / 9), abs=1e-15)
    assert oracle.is_generator(Q)
    ln2 = math.log(2)
    Q = embedding.generator_from_cm([0.25] * 4)
    poisson = np.array([[-2 * ln2, ln2, ln2, 0], [0, -ln2, 0, ln2], [0, 0, -ln2, ln2], [0, 0, 0, 0]])
    np.testing.assert_allclose(Q, poisson, atol=1e-15)
    with pytest.raises(NotEmbeddable) as info:
        embedding.generator_from_cm(p_b)
    assert info.value.witnesses == [3]
    with pytest.raises(SingularMatrix):
        embedding.generator_from_cm([0.0, 0.5, 0.5, 0.0])


@pytest.mark.parametrize('n', range(1, 9))
def test_reconstruction(n):
    p, _ = embeddable_p(n, 100 + n)
    R = embedding.generator_from_cm(p)
    np.testing.assert_allclose(oracle.exp_oracle(R), model.cm_from_params(p), rtol=0, atol=1e-8)


@pytest.mark.parametrize('n', range(1, 7))
def test_matlog_agreement(n):
    p = random_p(n, 200 + n, min_empty=0.3)
    np.testing.assert_allclose(oracle.matlog_oracle(model.cm_from_params(p)),
                               model.cg_from_params(embedding.log_params(p)), rtol=0, atol=1e-7)


def test_uniqueness_within_cg():
    rng = np.random.default_rng(5)
    for n in (2, 3, 4):
        p, _ = embeddable_p(n, n)
        r = embedding.log_params(p)
        M = model.cm_from_params(p)
        for _ in range(10):
            delta = rng.standard_normal(1 << n)
            delta -= delta.mean()
            delta *= rng.uniform(1e-3, 0.1) / np.abs(delta).max()
            assert np.abs(oracle.exp_oracle(model.cg_from_params(r + delta)) - M).max() > 1e-6


def test_partition_log_param_examples(p_a):
    assert embedding.partition_log_param(p_a, 1) == pytest.approx(math.log(0.6 / 0.4), abs=1e-15)
    assert embedding.partition_log_param(p_a, 3) == pytest.approx(math.log(10 / 9), abs=1e-15)
    p = random_p(3, 3)
    p = p * 0.5 / (1 - p[0])
    p[0] = 0.5
    p /= p.sum()
    r = embedding.log_params(p)
    for K in range(1, 8):
        assert embedding.partition_log_param(p, K) == pytest.approx(r[K], abs=1e-12)
    with pytest.raises(EmptySet):
        embedding.partition_log_param(p, 0)
    with pytest.raises(SingularMatrix):
        embedding.partition_log_param([0, 0.5, 0.5, 0], 1)
    with pytest.raises(TooLarge):
        embedding.partition_log_param(random_p(11, 0), (1 << 11) - 1)


def test_partition_formula_explicit_triple():
    # r_{ijk} written out as a ratio of avoidance probabilities
    p = random_p(4, 44)
    q = embedding.avoidance_probs(p)
    S = 15
    i, j, k = 1, 2, 4
    num = q[S ^ (i | j | k)] * q[S ^ i] * q[S ^ j] * q[S ^ k]
    den = q[S] * q[S ^ (i | j)] * q[S ^ (i | k)] * q[S ^ (j | k)]
    assert embedding.partition_log_param(p, i | j | k) == pytest.approx(math.log(num / den), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_two_path_property(n, seed):
    p = random_p(n, seed)
    r = embedding.log_params(p)
    for K in range(1, 1 << n):
        assert abs(embedding.partition_log_param(p, K) - r[K]) <= 1e-10


def test_pair_condition(p_a, p_b):
    ok, margin = embedding.pair_condition(p_a, 1, 2)
    assert ok and margin == pytest.approx(0.04, abs=1e-15)
    ok, margin = embedding.pair_condition(p_b, 1, 2)
    assert not ok and margin == pytest.approx(-0.11, abs=1e-15)
    ok, margin = embedding.pair_condition(model.independent_params([0.3, 0.6]), 1, 2)
    assert margin == pytest.approx(0.0, abs=1e-17)
    with pytest.raises(ValueError):
        embedding.pair_condition(p_a, 1, 1)
    # sign agrees with the pair rate in larger ground sets
    for seed in range(20):
        p = random_p(4, seed)
        r = embedding.log_params(p)
        for i in range(1, 5):
            for j in range(i + 1, 5):
                holds, margin = embedding.pair_condition(p, i, j)
                rij = r[(1 << (i - 1)) | (1 << (j - 1))]
                if abs(margin) > 1e-12:
                    assert holds == (rij >= 0)


def test_correlation_function(p_a):
    assert embedding.correlation_function(p_a, 1) == pytest.approx(0.4, abs=1e-15)
    assert embedding.correlation_function(p_a, 3) == pytest.approx(0.04, abs=1e-15)
    p = model.independent_params([0.3, 0.8, 0.55, 0.1])
    for K in range(1, 16):
        c = embedding.correlation_function(p, K)
        if bin(K).count('1') >= 2:
            assert abs(c) <= 1e-14
        else:
            assert c == pytest.approx(lattice.zeta_supersets(p)[K], abs=1e-15)
    with pytest.raises(EmptySet):
        embedding.correlation_function(p, 0)


def test_correlation_report(p_a):
    rep = embedding.correlation_report(p_a)
    assert set(rep.values) == {1, 2, 3}
    assert rep.pair_margins[(1, 2)] == pytest.approx(0.04)


def test_two_element_criterion_grid():
    steps = 20
    checked = 0
    for a in range(1, steps + 1):
        for b in range(steps + 1 - a):
            for c in range(steps + 1 - a - b):
                e = steps - a - b - c
                p = np.array([a, b, c, e]) / steps
                v = embedding.embeddability_verdict(p)
                delta_q = p[0] * p[3] - p[1] * p[2]
                assert v.embeddable == (delta_q >= -1e-12)
                checked += 1
    assert checked > 1000
