"""scikit-learn style wrappers around the walk, the Lyapunov estimate and the property-G check.

Inputs ``X`` are 2D arrays of state indices into ``enumerate_S(rank)``, one
trajectory per row. When ``fit`` gets no data, trajectories are sampled from
the walk with the estimator's own seed.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_index_matrix, check_positive, check_rank
from .invariants import Caps, check_property_G
from .nielsen import sequence_from_indices
from .spectral import log_norm_process
from .walk import WalkConfig, binomial_estimate, cyclic_flags, en_limit, sample_index_matrix


def _sample(rank, n, trials, seed):
    return sample_index_matrix(WalkConfig(rank, seed, n, trials))


class LyapunovEstimator(BaseEstimator):
    """Mean of (1/n) log ||M|| over trajectories; ``ell1_`` is the estimate."""

    def __init__(self, rank=3, n=2000, trials=50, seed=0):
        self.rank = rank
        self.n = n
        self.trials = trials
        self.seed = seed

    def fit(self, X=None, y=None):
        r = check_rank(self.rank)
        if X is None:
            X = _sample(r, check_positive("n", self.n), check_positive("trials", self.trials), self.seed)
        rates = self.predict_rates(check_index_matrix(X, r), r)
        self.rates_ = rates
        self.ell1_ = float(rates.mean())
        self.stderr_ = float(rates.std(ddof=1) / math.sqrt(len(rates))) if len(rates) > 1 else math.nan
        self.n_trajectories_ = len(rates)
        return self

    @staticmethod
    def predict_rates(X, rank):
        n = X.shape[1]
        return np.array([log_norm_process(sequence_from_indices(row, rank).items, n) / n for row in X])

    def predict(self, X):
        check_is_fitted(self, "ell1_")
        X = check_index_matrix(X, check_rank(self.rank))
        return self.predict_rates(X, self.rank)


class EnProbabilityEstimator(BaseEstimator):
    """Fraction of trajectories whose wrap-around pair is admissible."""

    def __init__(self, rank=3, n=200, trials=100_000, seed=0):
        self.rank = rank
        self.n = n
        self.trials = trials
        self.seed = seed

    def fit(self, X=None, y=None):
        r = check_rank(self.rank)
        if X is None:
            X = _sample(r, check_positive("n", self.n), check_positive("trials", self.trials), self.seed)
        flags = cyclic_flags(check_index_matrix(X, r), r)
        est = binomial_estimate(int(flags.sum()), len(flags), en_limit(r))
        self.estimate_ = est.estimate
        self.stderr_ = est.stderr
        self.theoretical_limit_ = est.theoretical_limit
        return self

    def predict(self, X):
        check_is_fitted(self, "estimate_")
        r = check_rank(self.rank)
        return cyclic_flags(check_index_matrix(X, r), r)


class PropertyGTransformer(TransformerMixin, BaseEstimator):
    """One row of certificate flags per cyclically admissible trajectory."""

    feature_names = (
        "fully_irreducible_certified",
        "ageometric_certified",
        "single_illegal_turn",
        "no_pinp",
        "iw_complete_2r_minus_1",
        "lone_axis",
        "property_g",
    )

    def __init__(self, rank=3, inp_cap=64, whitehead_cap=1000, power_k_cap=16):
        self.rank = rank
        self.inp_cap = inp_cap
        self.whitehead_cap = whitehead_cap
        self.power_k_cap = power_k_cap

    def fit(self, X=None, y=None):
        check_rank(self.rank)
        self.caps_ = Caps(self.inp_cap, self.whitehead_cap, self.power_k_cap)
        return self

    def transform(self, X):
        check_is_fitted(self, "caps_")
        r = check_rank(self.rank)
        X = check_index_matrix(X, r)
        out = np.zeros((len(X), len(self.feature_names)), dtype=bool)
        self.reports_ = []
        for i, row in enumerate(X):
            rep = check_property_G(sequence_from_indices(row, r), self.caps_)
            self.reports_.append(rep)
            d = rep.to_dict()
            d["no_pinp"] = rep.no_pinp in ("certified", "search-negative")
            out[i] = [d[k] for k in self.feature_names]
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(self.feature_names, dtype=object)
