import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from psk_receiver.estimator import AdaptiveReceiver


def test_params_round_trip():
    est = AdaptiveReceiver(n_slices=6, strategy="sequential")
    params = est.get_params()
    assert params["n_slices"] == 6 and params["strategy"] == "sequential"
    other = clone(est).set_params(mean_photon=0.5)
    assert other.mean_photon == 0.5 and est.mean_photon == 1.0


def test_predict_requires_fit():
    with pytest.raises(NotFittedError):
        AdaptiveReceiver().predict(np.zeros((1, 10)))


def test_fit_predict_score():
    est = AdaptiveReceiver(n_slices=6, mean_photon=1.0, strategy="flat").fit()
    X, y = est.sample(50_000, random_state=1)
    assert X.shape == (50_000, 6)
    assert set(np.unique(y)) <= {1, 2, 3, 4}
    p = est.error_probability_
    se = np.sqrt(p * (1 - p) / len(y))
    assert abs((1 - est.score(X, y)) - p) < 4 * se
    proba = est.predict_proba(X[:100])
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    np.testing.assert_allclose(est.channel_.sum(axis=1), 1.0)


def test_all_no_click_record_decides_first_state():
    est = AdaptiveReceiver(n_slices=4, mean_photon=2.0, strategy="non-optimized").fit()
    assert est.predict(np.zeros((1, 4), dtype=int))[0] == 1


def test_input_validation():
    est = AdaptiveReceiver(n_slices=3).fit()
    with pytest.raises(ValueError):
        est.predict(np.zeros((2, 4)))
    with pytest.raises(ValueError):
        est.predict(np.full((2, 3), 2))
