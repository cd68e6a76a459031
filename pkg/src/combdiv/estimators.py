"""scikit-learn style front ends for the divergence optimizers.

``fit(lhs, rhs)`` runs the search and stores the outcome in trailing
underscore attributes, so the objects work with ``get_params``/``set_params``
and ``clone`` like any other estimator::

    est = GeneralizedCombDivergence(measure="re", restarts=4).fit(t, v)
    est.value_
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .optimizer import (
    OptimizerConfig,
    classical_comb_divergence,
    generalized_channel_divergence,
    generalized_comb_divergence,
)
from .validation import (
    check_channel_pair,
    check_classical_measure,
    check_comb_pair,
    check_measure,
)


class _DivergenceSearch(BaseEstimator):
    def __init__(self, measure="re", restarts=8, max_iters=30, step_tolerance=1e-3,
                 value_tolerance=1e-10, initial_step=0.5, ancilla_dim=None, seed=0, n_jobs=None):
        self.measure = measure
        self.restarts = restarts
        self.max_iters = max_iters
        self.step_tolerance = step_tolerance
        self.value_tolerance = value_tolerance
        self.initial_step = initial_step
        self.ancilla_dim = ancilla_dim
        self.seed = seed
        self.n_jobs = n_jobs

    def _config(self, **extra) -> OptimizerConfig:
        return OptimizerConfig(
            restarts=self.restarts,
            max_iters=self.max_iters,
            step_tolerance=self.step_tolerance,
            value_tolerance=self.value_tolerance,
            initial_step=self.initial_step,
            ancilla_dim=self.ancilla_dim,
            seed=self.seed,
            n_jobs=self.n_jobs,
            **extra,
        )

    def _store(self, result):
        self.result_ = result
        self.value_ = result.value
        self.argmax_ = result.argmax
        self.trace_ = result.trace
        self.converged_ = result.converged
        self.choi_value_ = result.choi_value
        return self

    def score(self, X=None, y=None) -> float:
        """The fitted lower bound."""
        check_is_fitted(self, "value_")
        return self.value_


class GeneralizedChannelDivergence(_DivergenceSearch):
    """Lower bound on the generalized divergence of two channels, maximized over pure inputs."""

    def fit(self, X, y):
        m, n = check_channel_pair(X, y)
        return self._store(generalized_channel_divergence(check_measure(self.measure), m, n, self._config()))


class GeneralizedCombDivergence(_DivergenceSearch):
    """Lower bound on the generalized divergence of two process combs over control combs."""

    def fit(self, X, y):
        t, v = check_comb_pair(X, y)
        return self._store(generalized_comb_divergence(check_measure(self.measure), t, v, self._config()))


class ClassicalCombDivergence(_DivergenceSearch):
    """Lower bound on the classical divergence of tester outcome distributions.

    ``measure`` is ``"kl"`` or ``"td"``; ``outcomes`` fixes the POVM size
    (default d^2).
    """

    def __init__(self, measure="td", restarts=8, max_iters=30, step_tolerance=1e-3,
                 value_tolerance=1e-10, initial_step=0.5, ancilla_dim=None, seed=0, n_jobs=None,
                 outcomes=None):
        super().__init__(measure, restarts, max_iters, step_tolerance, value_tolerance,
                         initial_step, ancilla_dim, seed, n_jobs)
        self.outcomes = outcomes

    def fit(self, X, y):
        t, v = check_comb_pair(X, y)
        cfg = self._config(outcomes=self.outcomes)
        return self._store(classical_comb_divergence(check_classical_measure(self.measure), t, v, cfg))
