import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ginibre, matrices, open_lambdas
from lambdamean.classify import (
    FLAG_NAMES,
    classify,
    lambda_mean_cs_criterion,
    lambda_mean_hyponormal_criterion,
    lambda_mean_hyponormal_direct,
    residuals,
    shift_cs_criterion,
    shift_is_hyponormal,
    upper_lambda_mean_weights,
)
from lambdamean.harness.generate import random_unitary
from lambdamean.shifts import WeightSequence, build_shift
from lambdamean.transforms import lambda_mean

positive_weights = st.lists(st.floats(0.05, 5.0), min_size=3, max_size=10)


@given(matrices(), st.sampled_from([1e-12, 1e-9, 1e-6, 1e-2]))
def test_flags_are_monotone(t, tol):
    f = classify(t, tol).flags
    assert not f["normal"] or (f["quasinormal"] and f["hyponormal"])
    assert not f["quasinormal"] or f["hyponormal"]
    assert not f["unitary"] or (f["normal"] and f["isometry"])
    assert not f["isometry"] or f["partialIsometry"]


def test_known_classes(rng):
    u = random_unitary(rng, 4)
    r = classify(u)
    assert all(r.flags[k] for k in FLAG_NAMES)
    j = np.array([[0, 1], [0, 0]])
    r = classify(j)
    assert r.partialIsometry and not r.hyponormal and not r.normal
    a = ginibre(rng, 3)
    r = classify(a @ a.conj().T)
    assert r.normal and not r.partialIsometry
    # a weighted shift with increasing weights is hyponormal only in infinite
    # dimension; the truncated one is not
    assert not classify(build_shift([1, 2, 3], 4)).hyponormal


@given(matrices(rank_deficient=False), st.floats(0.1, 10.0))
def test_residuals_are_scale_invariant(t, c):
    a, b = residuals(t), residuals(c * t)
    for key in ("normal", "quasinormal", "hyponormal"):
        assert b[key] == pytest.approx(a[key], rel=1e-6, abs=1e-14)


def test_report_json_and_attribute_access(rng):
    r = classify(np.eye(2))
    assert r.to_json()["flags"]["unitary"] is True
    with pytest.raises(AttributeError):
        r.nonexistent
    with pytest.raises(ValueError):
        classify(np.eye(2), 0.0)


@given(positive_weights, st.floats(0.0, 1.0))
def test_hyponormal_criterion_matches_direct_test(w, lam):
    assert lambda_mean_hyponormal_criterion(w, lam) == lambda_mean_hyponormal_direct(w, lam)


@given(positive_weights, st.floats(0.0, 1.0))
def test_hyponormal_shift_stays_hyponormal(w, lam):
    w = sorted(w)
    assert shift_is_hyponormal(w)
    assert lambda_mean_hyponormal_criterion(w, lam)


def test_converse_fails_on_dip():
    beta = [1.0, 0.5] + [1.0] * 8
    assert lambda_mean_hyponormal_criterion(beta, 1 / 3)
    assert not shift_is_hyponormal(beta)


@given(st.lists(st.floats(0.05, 5.0), min_size=2, max_size=9), open_lambdas)
def test_cs_criterion_matches_palindrome_of_transformed_weights(w, lam):
    assert lambda_mean_cs_criterion(w, lam) == shift_cs_criterion(upper_lambda_mean_weights(w, lam))


@given(st.lists(st.floats(0.05, 5.0), min_size=2, max_size=9), open_lambdas)
def test_upper_weights_match_matrix_transform(w, lam):
    t = build_shift(WeightSequence.of(w, "upper"), len(w) + 1)
    got = np.abs(np.diag(lambda_mean(t, lam), 1))
    np.testing.assert_allclose(got, upper_lambda_mean_weights(w, lam), atol=1e-12 * max(w))


def test_cs_criterion_on_constructed_palindromes():
    # build weights solving the criterion: pick lam, choose a and solve the end condition
    lam = 0.5
    assert lambda_mean_cs_criterion([2.0, 1.0, 1.0], lam)   # moved weights (1, 1.5, 1)
    assert not lambda_mean_cs_criterion([1.0, 2.0, 2.0, 1.0], lam)


def test_criteria_validate_input():
    with pytest.raises(ValueError):
        shift_is_hyponormal([1.0, 0.0])
    with pytest.raises(ValueError):
        lambda_mean_cs_criterion([1.0], 0.5)
    with pytest.raises(ValueError):
        lambda_mean_cs_criterion([1.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        lambda_mean_hyponormal_criterion([1.0, 1.0], 0.5)
