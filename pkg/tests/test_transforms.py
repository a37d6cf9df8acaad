import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ginibre, lambdas, matrices, open_lambdas
from lambdamean.classify import classify
from lambdamean.harness.generate import random_unitary
from lambdamean.linalg import polar_decompose
from lambdamean.transforms import (
    TransformParams,
    aluthge,
    apply,
    duggal,
    generalized_mean,
    iterate_lambda_mean,
    lambda_mean,
    mean,
    q_lambda,
)


def _norm(a):
    return np.linalg.norm(a, 2)


def _quasinormal(rng, n):
    q = random_unitary(rng, n)
    p = np.diag(rng.uniform(0.5, 2, n))
    p[1, 1] = p[0, 0]
    u = np.diag(np.exp(2j * np.pi * rng.random(n)))
    u[:2, :2] = random_unitary(rng, 2)
    return q @ u @ p @ q.conj().T


def test_duggal_of_two_by_two():
    np.testing.assert_allclose(duggal([[0, 1], [0, 1]]), np.diag([0, 1]), atol=1e-15)


def test_jordan_block_transforms_vanish():
    j = np.array([[0, 1], [0, 0]])
    assert _norm(aluthge(j)) == 0.0
    assert _norm(duggal(j)) == 0.0
    assert _norm(lambda_mean(j, 0.0)) == 0.0
    assert _norm(lambda_mean(j, 0.3)) > 0


@given(matrices(), lambdas)
def test_lambda_mean_is_affine_in_lambda(t, lam):
    pp = polar_decompose(t)
    a, b = lambda_mean(t, 1.0, pp), lambda_mean(t, 0.0, pp)
    assert np.array_equal(a, t)
    np.testing.assert_allclose(lambda_mean(t, lam, pp), lam * a + (1 - lam) * b,
                               atol=1e-13 * max(_norm(t), 1e-14))


@given(st.integers(0, 2**32 - 1), st.integers(2, 6), lambdas)
def test_quasinormal_is_fixed(seed, n, lam):
    t = _quasinormal(np.random.default_rng(seed), n)
    assert classify(t, 1e-9).quasinormal
    np.testing.assert_allclose(lambda_mean(t, lam), t, atol=1e-10 * _norm(t))
    np.testing.assert_allclose(duggal(t), t, atol=1e-10 * _norm(t))


@given(matrices(rank_deficient=False), open_lambdas)
def test_generic_matrix_is_not_fixed(t, lam):
    if classify(t, 1e-7).quasinormal:
        return
    assert _norm(lambda_mean(t, lam) - t) > 1e-9 * _norm(t)


@given(matrices(max_n=5), open_lambdas, st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_iterates_commute_with_unitary_conjugation(t, lam, n_iter, seed):
    v = random_unitary(np.random.default_rng(seed), t.shape[0])
    lhs = iterate_lambda_mean(v @ t @ v.conj().T, lam, n_iter)
    rhs = v @ iterate_lambda_mean(t, lam, n_iter) @ v.conj().T
    assert _norm(lhs - rhs) <= 1e-7 * max(_norm(t), 1e-14)


def test_iteration_count_zero_is_identity(rng):
    t = ginibre(rng, 3)
    assert np.array_equal(iterate_lambda_mean(t, 0.4, 0), t)
    with pytest.raises(ValueError):
        iterate_lambda_mean(t, 0.4, -1)


@given(matrices(rank_deficient=False))
def test_generalized_mean_endpoints(t):
    np.testing.assert_allclose(generalized_mean(t, 0.5), aluthge(t), atol=1e-10 * _norm(t))
    # invertible T: |T|^0 is the identity and the s = 0 member is the mean transform
    np.testing.assert_allclose(generalized_mean(t, 0.0), mean(t), atol=1e-9 * _norm(t))


def test_generalized_mean_on_singular_input_uses_range_projection():
    t = np.array([[0, 1], [0, 1]], dtype=complex)
    # |T|^0 = diag(0, 1); the s = 0 member is (P U |T| + |T| U P) / 2 with P the range projection
    pp = polar_decompose(t)
    proj = np.diag([0.0, 1.0])
    want = 0.5 * (proj @ pp.u @ pp.p + pp.p @ pp.u @ proj)
    np.testing.assert_allclose(generalized_mean(t, 0.0), want, atol=1e-14)
    with pytest.raises(ValueError):
        generalized_mean(t, 0.6)


@given(matrices(), lambdas)
def test_q_lambda_is_positive(t, lam):
    q = q_lambda(t, lam)
    assert np.linalg.eigvalsh(q)[0] >= -1e-12 * max(_norm(t) ** 2, 1e-28)


@pytest.mark.parametrize("lam", [-0.1, 1.1, float("nan")])
def test_lambda_out_of_range(lam):
    with pytest.raises(ValueError):
        lambda_mean(np.eye(2), lam)


def test_apply_dispatch(rng):
    t = ginibre(rng, 3)
    p = TransformParams(lam=0.3, t=0.25, iterations=2)
    np.testing.assert_allclose(apply(t, "lambda-mean", p), iterate_lambda_mean(t, 0.3, 2))
    np.testing.assert_allclose(apply(t, "generalized", p), generalized_mean(t, 0.25))
    np.testing.assert_allclose(apply(t, "duggal", p), duggal(t))
    with pytest.raises(ValueError):
        apply(t, "nope", p)
