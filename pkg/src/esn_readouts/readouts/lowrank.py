"""Subspace (PCA residual) classifier.

Training keeps, for every class ``k`` and step ``t``, the leading principal
directions ``U_k(t)`` of that class's states. A test trajectory scores
``z(k) = sum_t ||(U_k(t) U_k(t)^T - I) X(t)||`` and is assigned to the class
with the smallest score.
"""

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..linalg import principal_components
from ._common import ReadoutError, as_batch, check_length, decide_min, training_tensor

__all__ = ["LowRankModel", "fit_lowrank", "score_lowrank"]

RESIDUALS = ("l2", "squared")


@dataclass(frozen=True)
class LowRankModel:
    bases: tuple  # one (T, N, R_k) array per class
    rank: int  # requested rank
    residual: str = "l2"
    center: bool = False

    kind = "lowrank"

    @property
    def n_classes(self):
        return len(self.bases)

    @property
    def length(self):
        return self.bases[0].shape[0]

    @property
    def effective_ranks(self):
        return tuple(b.shape[2] for b in self.bases)

    def scores(self, states):
        """Residual score per class; ``(K,)`` for one trajectory, ``(J, K)`` for a batch."""
        X, single = as_batch(states)
        check_length(X, self.length)
        X = np.ascontiguousarray(X)
        squared = self.residual == "squared"
        z = np.stack(
            [_kernels.residual_scores(X, np.ascontiguousarray(b), squared) for b in self.bases],
            axis=-1,
        )
        return z[0] if single else z

    def classify(self, states):
        z = self.scores(states)
        return decide_min(z), z

    def predict(self, states):
        return self.classify(states)[0]


def fit_lowrank(trajectories, labels, rank=3, n_classes=None, residual="l2", center=False):
    """Per-class, per-step principal subspaces.

    ``labels`` are class indices. Each class uses ``min(rank, N, J_k)``
    components, so a class with fewer patterns than ``rank`` keeps all of them.
    """
    X = training_tensor(trajectories)
    J, T, N = X.shape
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (J,):
        raise ReadoutError(f"need {J} labels, got shape {labels.shape}")
    if int(rank) < 1:
        raise ReadoutError(f"rank must be >= 1, got {rank}")
    if residual not in RESIDUALS:
        raise ReadoutError(f"residual must be one of {RESIDUALS}")
    K = int(labels.max()) + 1 if n_classes is None else int(n_classes)
    bases = []
    for k in range(K):
        members = X[labels == k]
        if members.shape[0] == 0:
            raise ReadoutError(f"class {k} has no training patterns")
        r = min(int(rank), N, members.shape[0])
        bases.append(
            np.stack([principal_components(members[:, t].T, r, center=center) for t in range(T)])
        )
    return LowRankModel(bases=tuple(bases), rank=int(rank), residual=residual, center=center)


def score_lowrank(model, trajectory):
    """``(z, class index)`` for one ``(T, N)`` trajectory."""
    X = np.asarray(trajectory, dtype=np.float64)
    if X.ndim != 2:
        raise ReadoutError(f"expected one (T, N) trajectory, got shape {X.shape}")
    cls, z = model.classify(X)
    return z, int(cls)
