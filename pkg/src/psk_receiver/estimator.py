"""scikit-learn style wrapper around schedule optimization and decoding.

``fit`` optimizes the displacement schedule for the configured ensemble and
system model; ``predict`` decodes detection records (one row of ``N`` on/off
outcomes per pulse) into state labels ``1..M``.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .ensemble import SystemModel, make_mpsk_ensemble
from .montecarlo import replay, sample_histories
from .optimizer import DEFAULT_SEED, optimize
from .receiver import DEFAULT_R_MAX, evaluate_strategy, tie_argmax


class AdaptiveReceiver(ClassifierMixin, BaseEstimator):
    """Adaptive displacement receiver for M-PSK coherent states.

    Parameters
    ----------
    n_states : int
        Constellation size ``M``.
    n_slices : int
        Number of adaptive measurements ``N`` per pulse.
    mean_photon : float
        Mean photon number per pulse.
    strategy : {"non-optimized", "flat", "sequential", "historical"}
    efficiency, visibility, dark_per_pulse : float
        System model; see :class:`~psk_receiver.ensemble.SystemModel`.
    r_max : float
        Upper bound on ``|beta| / |alpha|``.
    random_state : int
        Seed for optimizer restarts and :meth:`sample`.

    Attributes
    ----------
    strategy_ : Strategy
    error_probability_ : float
        Exact error probability of the fitted schedule.
    channel_ : ndarray of shape (M, M)
    classes_ : ndarray
        State labels ``1..M``.
    """

    def __init__(
        self,
        n_states=4,
        n_slices=10,
        mean_photon=1.0,
        strategy="flat",
        efficiency=1.0,
        visibility=1.0,
        dark_per_pulse=0.0,
        r_max=DEFAULT_R_MAX,
        random_state=DEFAULT_SEED,
    ):
        self.n_states = n_states
        self.n_slices = n_slices
        self.mean_photon = mean_photon
        self.strategy = strategy
        self.efficiency = efficiency
        self.visibility = visibility
        self.dark_per_pulse = dark_per_pulse
        self.r_max = r_max
        self.random_state = random_state

    def _build(self):
        ensemble = make_mpsk_ensemble(self.n_states, self.mean_photon)
        model = SystemModel(self.efficiency, self.visibility, self.dark_per_pulse, self.n_slices)
        return ensemble, model

    def fit(self, X=None, y=None):
        """Optimize the schedule. ``X`` and ``y`` are accepted and ignored."""
        ensemble, model = self._build()
        self.result_ = optimize(self.strategy, ensemble, model, self.r_max, self.random_state)
        self.strategy_ = self.result_.strategy
        report = evaluate_strategy(self.strategy_, ensemble, model)
        self.error_probability_ = report.p_error
        self.channel_ = report.channel
        self.classes_ = ensemble.labels
        self.n_features_in_ = model.slices
        return self

    def _records(self, X):
        check_is_fitted(self)
        X = check_array(X, dtype=None)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} slice outcomes per row, got {X.shape[1]}")
        if not np.isin(X, (0, 1)).all():
            raise ValueError("detection records must be binary (0 = no click, 1 = click)")
        return X.astype(bool)

    def predict_proba(self, X):
        """Terminal posterior over the ``M`` states for each detection record."""
        records = self._records(X)
        ensemble, model = self._build()
        _, belief = replay(self.strategy_, ensemble, model, records)
        return belief

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[tie_argmax(proba)]

    def sample(self, n_samples, random_state=None):
        """Simulate ``n_samples`` pulses; returns ``(X, y)`` records and true labels."""
        check_is_fitted(self)
        ensemble, model = self._build()
        seed = self.random_state if random_state is None else random_state
        rng = np.random.default_rng(seed)
        sent, record, _ = sample_histories(self.strategy_, ensemble, model, n_samples, rng)
        return record.astype(np.int8), self.classes_[sent]
