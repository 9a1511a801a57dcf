import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from ttwalk.errors import InvalidRankError, MalformedInputError
from ttwalk.estimators import EnProbabilityEstimator, LyapunovEstimator, PropertyGTransformer
from ttwalk.spectral import estimate_lyapunov
from ttwalk.walk import WalkConfig, cyclic_flags, sample_index_matrix


def test_lyapunov_matches_library_estimate():
    est = LyapunovEstimator(rank=3, n=400, trials=12, seed=5).fit()
    ref = estimate_lyapunov(WalkConfig(3, 5, 400, 12))
    assert est.ell1_ == pytest.approx(ref.ell1_hat, rel=1e-12)
    assert est.ell1_ > 0
    assert clone(est).get_params() == est.get_params()


def test_lyapunov_on_given_trajectories():
    X = sample_index_matrix(WalkConfig(3, 1, 100, 4))
    est = LyapunovEstimator(rank=3).fit(X)
    assert est.n_trajectories_ == 4
    assert est.predict(X).shape == (4,)


def test_en_estimator():
    est = EnProbabilityEstimator(rank=3, n=50, trials=4000, seed=2).fit()
    assert str(est.theoretical_limit_) == "1/4"
    assert abs(est.estimate_ - 0.25) < 5 * est.stderr_
    X = sample_index_matrix(WalkConfig(3, 2, 30, 50))
    assert np.array_equal(est.predict(X), cyclic_flags(X, 3))


def test_property_g_transformer():
    X = sample_index_matrix(WalkConfig(3, 4, 60, 60))
    X = X[cyclic_flags(X, 3)]
    tr = PropertyGTransformer(rank=3)
    out = tr.fit(X).transform(X)
    assert out.shape == (len(X), len(tr.get_feature_names_out()))
    assert out.dtype == bool
    assert len(tr.reports_) == len(X)


def test_validation_errors():
    with pytest.raises(InvalidRankError):
        LyapunovEstimator(rank=2).fit()
    with pytest.raises(MalformedInputError):
        LyapunovEstimator(rank=3).fit(np.array([[0, 1000]]))
    with pytest.raises(MalformedInputError):
        EnProbabilityEstimator(rank=3).fit(np.zeros(5, dtype=int))
    with pytest.raises(MalformedInputError):
        EnProbabilityEstimator(rank=3, trials=0).fit()
