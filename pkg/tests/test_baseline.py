import numpy as np
import pytest

from vnsolver.baseline import Prior, fit_prior, predict
from vnsolver.metrics import accuracy, auc


@pytest.mark.parametrize("labels,p", [([1, 1, 0, 0], 0.5), ([1, 1, 1], 1.0), ([1] * 55 + [0] * 45, 0.55)])
def test_fit_prior(labels, p):
    assert fit_prior(labels).p_positive == pytest.approx(p)


def test_fit_prior_empty():
    with pytest.raises(ValueError):
        fit_prior([])


def test_prior_range():
    with pytest.raises(ValueError):
        Prior(1.5)


def test_fair_coin():
    labels, scores = predict(Prior(0.5, seed=1), 10_000)
    assert abs(labels.mean() - 0.5) <= 0.02
    assert np.all(scores == 0.5)


def test_certain_prior():
    labels, _ = predict(Prior(1.0), 100)
    assert labels.all()


def test_seeded():
    a, _ = predict(Prior(0.3), 50, seed=4)
    b, _ = predict(Prior(0.3), 50, seed=4)
    np.testing.assert_array_equal(a, b)


def test_constant_scores_give_half_auc():
    y = np.array([1, 0] * 50)
    _, scores = predict(Prior(0.7), len(y))
    assert auc(y, scores) == 0.5


@pytest.mark.parametrize("p,q", [(0.5, 0.5), (0.55, 0.5), (0.8, 0.3)])
def test_expected_accuracy(p, q):
    n = 10_000
    y = np.zeros(n, dtype=int)
    y[: int(q * n)] = 1
    labels, _ = predict(Prior(p, seed=11), n)
    assert accuracy(y, labels) == pytest.approx(p * q + (1 - p) * (1 - q), abs=0.02)
