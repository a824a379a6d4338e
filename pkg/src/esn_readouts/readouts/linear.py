"""Ridge-trained linear readouts: pointwise (one W per step), endpoint, global."""

from dataclasses import dataclass

import numpy as np

from ..linalg import ridge_solve
from ._common import (
    ReadoutError,
    as_batch,
    check_length,
    check_targets,
    decide_max,
    training_tensor,
)

__all__ = [
    "PointwiseReadout",
    "EndpointReadout",
    "GlobalReadout",
    "fit_pointwise",
    "fit_endpoint",
    "fit_global",
    "classify_pointwise",
    "classify_endpoint",
    "classify_global",
]


class _LinearMixin:
    def classify(self, states):
        """Return ``(class index, z)`` for one trajectory, or arrays for a batch."""
        z = self.scores(states)
        return decide_max(z), z

    def predict(self, states):
        return self.classify(states)[0]


@dataclass(frozen=True)
class PointwiseReadout(_LinearMixin):
    weights: np.ndarray  # (T, K, N)
    lam: float

    kind = "pointwise"

    @property
    def length(self):
        return self.weights.shape[0]

    def scores(self, states):
        """``z = sum_t W(t) X(t)``."""
        X, single = as_batch(states)
        check_length(X, self.length)
        z = np.einsum("tkn,jtn->jk", self.weights, X)
        return z[0] if single else z


@dataclass(frozen=True)
class EndpointReadout(_LinearMixin):
    weight: np.ndarray  # (K, N)
    lam: float

    kind = "endpoint"

    def scores(self, states):
        """``z = W X(T)`` from the final state only."""
        X, single = as_batch(states)
        z = X[:, -1] @ self.weight.T
        return z[0] if single else z


@dataclass(frozen=True)
class GlobalReadout(_LinearMixin):
    weight: np.ndarray  # (K, N)
    lam: float

    kind = "global"

    def scores(self, states):
        """``z = W sum_t X(t)``."""
        X, single = as_batch(states)
        z = X.sum(axis=1) @ self.weight.T
        return z[0] if single else z


def fit_pointwise(trajectories, targets, lam):
    """One ridge solve per time step on the N x J matrix of states at that step."""
    X = training_tensor(trajectories)
    y = check_targets(targets, X.shape[0])
    weights = np.stack([ridge_solve(X[:, t].T, y, lam) for t in range(X.shape[1])])
    return PointwiseReadout(weights=weights, lam=float(lam))


def fit_endpoint(trajectories, targets, lam):
    X = training_tensor(trajectories)
    y = check_targets(targets, X.shape[0])
    return EndpointReadout(weight=ridge_solve(X[:, -1].T, y, lam), lam=float(lam))


def fit_global(trajectories, targets, lam):
    """Single W fitting ``W X_tr(t) ~ y`` jointly over every t.

    Closed form ``y (sum_t X_t)^T (sum_t X_t X_t^T + lam I)^-1``, i.e. ridge on
    the time-concatenated states against T copies of ``y``.
    """
    X = training_tensor(trajectories)
    J, T, N = X.shape
    y = check_targets(targets, J)
    stacked = X.transpose(2, 1, 0).reshape(N, T * J)
    return GlobalReadout(weight=ridge_solve(stacked, np.tile(y, (1, T)), lam), lam=float(lam))


def _single(model, trajectory):
    X = np.asarray(trajectory, dtype=np.float64)
    if X.ndim != 2:
        raise ReadoutError(f"expected one (T, N) trajectory, got shape {X.shape}")
    cls, z = model.classify(X)
    return int(cls), z


def classify_pointwise(model, trajectory):
    return _single(model, trajectory)


def classify_endpoint(model, trajectory):
    return _single(model, trajectory)


def classify_global(model, trajectory):
    return _single(model, trajectory)
