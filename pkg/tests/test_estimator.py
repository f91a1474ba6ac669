import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from wiretap_dmt.estimator import SecrecyOutageEstimator
from wiretap_dmt.events import EVENTS
from wiretap_dmt.exceptions import FitUnavailableError, InvalidInputError


@pytest.fixture(scope="module")
def fitted():
    est = SecrecyOutageEstimator(m=2, n=1, k=1, scheme="zero_forcing", r_s=0.75, trials=20_000, master_seed=4)
    return est.fit(np.array([[50.0], [30.0], [40.0]]))


def test_params_and_clone():
    est = SecrecyOutageEstimator(m=3, n=2, k=1, trials=10)
    params = est.get_params()
    assert params["m"] == 3 and params["trials"] == 10
    twin = clone(est)
    assert twin.get_params() == params
    twin.set_params(trials=50)
    assert twin.trials == 50 and est.trials == 10


def test_fit_attributes(fitted):
    np.testing.assert_array_equal(fitted.curve_.snr_db, [30.0, 40.0, 50.0])
    assert fitted.n_features_in_ == 1
    assert fitted.predicted_diversity_ == pytest.approx(0.25)
    assert fitted.diversity_ == pytest.approx(0.25, abs=0.1)
    assert set(fitted.fits_) == set(EVENTS)
    assert fitted.fits_["secrecy_not_achieved"] is None
    assert "secrecy_not_achieved" in fitted.fit_errors_


def test_predict_follows_power_law(fitted):
    p = fitted.predict([30.0, 40.0, 50.0])
    assert np.all(np.diff(p) < 0)
    ratio = np.log10(p[0] / p[-1]) / 2.0
    assert ratio == pytest.approx(fitted.diversity_)


def test_transform_returns_grid_estimates(fitted):
    t = fitted.transform([[40.0], [30.0]])
    assert t.shape == (2, len(EVENTS))
    assert t[1, 0] == fitted.curve_.p_hat("secrecy_rate_outage")[0]
    with pytest.raises(InvalidInputError):
        fitted.transform([35.0])


def test_not_fitted():
    est = SecrecyOutageEstimator()
    with pytest.raises(NotFittedError):
        est.predict([30.0])
    with pytest.raises(NotFittedError):
        est.transform([30.0])


def test_predict_unavailable_event():
    est = SecrecyOutageEstimator(m=2, n=1, k=1, scheme="zero_forcing", event="secrecy_not_achieved", trials=500)
    est.fit([20.0, 30.0])
    assert np.isnan(est.diversity_)
    with pytest.raises(FitUnavailableError):
        est.predict([25.0])


def test_bad_inputs():
    with pytest.raises(InvalidInputError):
        SecrecyOutageEstimator(event="nope").fit([30.0])
    with pytest.raises(InvalidInputError):
        SecrecyOutageEstimator(trials=10).fit(np.ones((3, 2)))


def test_fit_is_deterministic():
    a = SecrecyOutageEstimator(m=2, n=2, k=1, trials=2000, master_seed=9).fit([20.0, 30.0])
    b = SecrecyOutageEstimator(m=2, n=2, k=1, trials=2000, master_seed=9, n_jobs=2).fit([20.0, 30.0])
    np.testing.assert_array_equal(a.transform([20.0, 30.0]), b.transform([20.0, 30.0]))
