import math

import numpy as np
import pytest

from rehabloop.errors import InputError, SpecificationError
from rehabloop.hrv.svm import (
    SvmModel,
    load_model,
    save_model,
    svm_predict,
    svm_train,
)


def _random_model(rng, n_sv, n_features):
    return SvmModel(
        gamma=float(rng.uniform(0.05, 2.0)),
        bias=float(rng.normal()),
        support_vectors=rng.normal(size=(n_sv, n_features)),
        dual_coefficients=rng.normal(size=n_sv),
        n_features=n_features,
    )


def _blobs(rng, n_per_class, sep=4.0, n_features=22):
    a = rng.normal(size=(n_per_class, n_features))
    b = rng.normal(size=(n_per_class, n_features))
    b[:, 0] += sep
    X = np.vstack([a, b])
    y = np.concatenate([np.zeros(n_per_class), np.ones(n_per_class)])
    return X, y


def test_predict_matches_kernel_sum_oracle():
    """50 random models x 100 inputs vs an explicit per-SV loop."""
    rng = np.random.default_rng(7)
    for _ in range(50):
        m = _random_model(rng, int(rng.integers(1, 40)), 22)
        for _ in range(100):
            x = rng.normal(size=22)
            oracle = m.bias
            for sv, c in zip(m.support_vectors, m.dual_coefficients):
                d2 = float(np.sum((sv - x) ** 2))
                oracle += c * math.exp(-m.gamma * d2)
            score, stressed = svm_predict(m, x)
            assert score == pytest.approx(oracle, abs=1e-9)
            assert stressed == (score > 0)


def test_single_support_vector_cases():
    sv = np.zeros((1, 3))
    m = SvmModel(gamma=1.0, bias=0.0, support_vectors=sv,
                 dual_coefficients=np.array([2.0]), n_features=3)
    score, stressed = svm_predict(m, np.zeros(3))
    assert score == pytest.approx(2.0)  # kernel at the SV itself is 1
    assert stressed
    far, stressed_far = svm_predict(m, np.full(3, 50.0))
    assert far == pytest.approx(0.0, abs=1e-12)
    assert not stressed_far


def test_train_two_point_minimal_case():
    X = np.array([[0.0, 0.0], [1.0, 0.0]])
    y = np.array([0, 1])
    m = svm_train(X, y, gamma=0.5, C=10.0)
    assert not svm_predict(m, X[0])[1]
    assert svm_predict(m, X[1])[1]


def test_train_separable_blobs_perfect():
    rng = np.random.default_rng(11)
    X, y = _blobs(rng, 100)
    m = svm_train(X, y, gamma=0.5, C=10.0)
    correct = sum(svm_predict(m, x)[1] == bool(lbl) for x, lbl in zip(X, y))
    assert correct == len(y)


def test_train_self_consistency():
    """Same data, same hyperparameters: identical model arrays."""
    rng = np.random.default_rng(13)
    X, y = _blobs(rng, 30, sep=3.0, n_features=6)
    a = svm_train(X, y)
    b = svm_train(X, y)
    assert a.bias == b.bias
    assert np.array_equal(a.support_vectors, b.support_vectors)
    assert np.array_equal(a.dual_coefficients, b.dual_coefficients)


def test_train_input_validation():
    with pytest.raises(InputError):
        svm_train(np.zeros((1, 2)), np.array([1]))
    with pytest.raises(InputError):
        svm_train(np.zeros((4, 2)), np.ones(4))  # single class


def test_model_validation():
    sv = np.zeros((2, 3))
    co = np.array([1.0, -1.0])
    with pytest.raises(SpecificationError):
        SvmModel(gamma=0.0, bias=0.0, support_vectors=sv,
                 dual_coefficients=co, n_features=3)
    with pytest.raises(SpecificationError):
        SvmModel(gamma=1.0, bias=0.0, support_vectors=sv,
                 dual_coefficients=np.array([1.0]), n_features=3)
    with pytest.raises(SpecificationError):
        SvmModel(gamma=1.0, bias=math.nan, support_vectors=sv,
                 dual_coefficients=co, n_features=3)


def test_predict_input_validation():
    m = SvmModel(gamma=1.0, bias=0.0, support_vectors=np.zeros((1, 3)),
                 dual_coefficients=np.array([1.0]), n_features=3)
    with pytest.raises(InputError):
        svm_predict(m, np.zeros(4))
    with pytest.raises(InputError):
        svm_predict(m, np.array([0.0, math.inf, 0.0]))


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(17)
    m = _random_model(rng, 12, 22)
    path = tmp_path / "model.json"
    save_model(m, path)
    q = load_model(path)
    assert q.gamma == m.gamma and q.bias == m.bias
    assert np.array_equal(q.support_vectors, m.support_vectors)
    assert np.array_equal(q.dual_coefficients, m.dual_coefficients)
    # round-tripped model scores identically
    x = rng.normal(size=22)
    assert svm_predict(q, x) == svm_predict(m, x)


def test_load_rejects_unknown_version(tmp_path):
    path = tmp_path / "model.json"
    path.write_text('{"version": 99}')
    with pytest.raises(InputError):
        load_model(path)
