"""Sparse pointwise readout via the penalized Dantzig selector.

For each time step and each class row ``k``::

    min_w  || (w^T X - y_k) X^T D^-1 ||  +  lam ||w||_1

with ``D = diag(row norms of X)``. The first term is the largest absolute
correlation (``norm="max"``, default) or the sum of absolute correlations
(``norm="operator"``, the induced infinity-norm of a 1 x N row). Either way
the problem is a linear program; it is solved with HiGHS dual simplex, whose
pivoting is deterministic for a fixed problem.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse as sp
from scipy.optimize import linprog

from ..linalg import as_matrix
from ._common import ReadoutError, as_batch, check_length, check_targets, decide_max, training_tensor

__all__ = [
    "DantzigProblem",
    "DantzigResult",
    "SparseReadout",
    "DegenerateNodeWarning",
    "dantzig_objective",
    "dantzig_solve",
    "fit_sparse",
    "classify_sparse",
    "NONZERO_THRESHOLD",
]

NONZERO_THRESHOLD = 1e-8
NORMS = ("max", "operator")

# Tight tolerances first; near rank-deficient Gram matrices can stall the
# dual simplex there, so fall back to default tolerances, then interior point.
_SOLVER_ATTEMPTS = (
    ("highs-ds", {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}),
    ("highs-ds", {}),
    ("highs-ipm", {}),
)


class DegenerateNodeWarning(UserWarning):
    """A reservoir node had an all-zero state row and was left out of the fit."""


class LPFailure(RuntimeError):
    pass


def _linprog(c, A_ub, b_ub):
    messages = []
    for method, options in _SOLVER_ATTEMPTS:
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method=method, options=options)
        if res.status == 0:
            return res.x
        messages.append(f"{method}: {res.message}")
    raise LPFailure("Dantzig LP did not solve: " + "; ".join(messages))


@dataclass(frozen=True)
class DantzigProblem:
    states: np.ndarray  # (N, J)
    targets: np.ndarray  # (K, J)
    lam: float
    norm: str = "max"

    def __post_init__(self):
        X = as_matrix(self.states, "states")
        y = as_matrix(self.targets, "targets")
        if y.shape[1] != X.shape[1]:
            raise ReadoutError("states and targets disagree on the number of patterns")
        if not self.lam > 0:
            raise ReadoutError(f"lambda must be positive, got {self.lam}")
        if self.norm not in NORMS:
            raise ReadoutError(f"norm must be one of {NORMS}")
        object.__setattr__(self, "states", X)
        object.__setattr__(self, "targets", y)

    @property
    def scaling(self):
        return np.linalg.norm(self.states, axis=1)


@dataclass(frozen=True)
class DantzigResult:
    weights: np.ndarray  # (K, N)
    objective: np.ndarray  # (K,)
    excluded: np.ndarray  # node indices dropped for zero rows


def dantzig_objective(w, states, target_row, lam, norm="max"):
    """Objective of one class row; ``w`` may be (N,) or a stack (M, N)."""
    X = np.asarray(states, dtype=np.float64)
    d = np.linalg.norm(X, axis=1)
    keep = d > 0
    w = np.asarray(w, dtype=np.float64)
    corr = ((w @ X - target_row) @ X.T)[..., keep] / d[keep]
    fit = np.abs(corr).max(axis=-1) if norm == "max" else np.abs(corr).sum(axis=-1)
    return fit + lam * np.abs(w).sum(axis=-1)


def _row_lp(gram_t, b, lam, norm):
    """Assemble and solve the LP for one class row.

    ``corr(w) = gram_t @ w - b`` with ``gram_t = D^-1 X X^T`` (rows scaled).
    Variables ``[w+, w-, s]`` where ``s`` is one slack (max) or n slacks
    (operator).
    """
    n = gram_t.shape[0]
    n_slack = 1 if norm == "max" else n
    c = np.concatenate([np.full(2 * n, lam), np.ones(n_slack)])
    slack = -np.ones((n, 1)) if norm == "max" else -np.eye(n)
    A_ub = np.block([[gram_t, -gram_t, slack], [-gram_t, gram_t, slack]])
    b_ub = np.concatenate([b, -b])
    x = _linprog(c, sp.csr_matrix(A_ub), b_ub)
    return x[:n] - x[n:2 * n]


def _block_lp(gram_t, B, lam, norm):
    """All class rows in one block-diagonal LP (per-row slacks, summed objective)."""
    K, n = B.shape
    blocks_c, blocks_A = [], []
    for _ in range(K):
        n_slack = 1 if norm == "max" else n
        blocks_c.append(np.concatenate([np.full(2 * n, lam), np.ones(n_slack)]))
        slack = -np.ones((n, 1)) if norm == "max" else -np.eye(n)
        blocks_A.append(np.block([[gram_t, -gram_t, slack], [-gram_t, gram_t, slack]]))
    sol = _linprog(
        np.concatenate(blocks_c),
        sp.block_diag(blocks_A, format="csr"),
        np.concatenate([np.concatenate([b, -b]) for b in B]),
    )
    width = len(blocks_c[0])
    W = np.empty((K, n))
    for k in range(K):
        x = sol[k * width:(k + 1) * width]
        W[k] = x[:n] - x[n:2 * n]
    return W


def dantzig_solve(problem, joint=False):
    """Solve the Dantzig program for every class row of ``problem.targets``.

    Nodes whose state row is identically zero carry no information and make
    ``D`` singular; they are dropped from the correlation constraints, their
    weight is fixed at 0 and a :class:`DegenerateNodeWarning` is issued.
    ``joint=True`` solves all rows as one block LP instead of row by row.
    """
    X, y, lam = problem.states, problem.targets, float(problem.lam)
    d = problem.scaling
    keep = np.flatnonzero(d > 0)
    excluded = np.flatnonzero(d == 0)
    if excluded.size:
        warnings.warn(
            f"zero state rows for nodes {excluded.tolist()}; excluded from the fit",
            DegenerateNodeWarning,
            stacklevel=2,
        )
    K, N = y.shape[0], X.shape[0]
    W = np.zeros((K, N))
    if keep.size:
        Xk = X[keep]
        gram_t = (Xk @ Xk.T) / d[keep][:, None]
        B = (y @ Xk.T) / d[keep]
        if joint:
            W[:, keep] = _block_lp(gram_t, B, lam, problem.norm)
        else:
            for k in range(K):
                W[k, keep] = _row_lp(gram_t, B[k], lam, problem.norm)
    W[np.abs(W) <= NONZERO_THRESHOLD] = 0.0
    objective = np.array(
        [dantzig_objective(W[k], X, y[k], lam, problem.norm) for k in range(K)]
    )
    return DantzigResult(weights=W, objective=objective, excluded=excluded)


@dataclass(frozen=True)
class SparseReadout:
    """Per-step sparse weights stored as (t, k, node) coordinates."""

    shape: tuple  # (T, K, N)
    index: np.ndarray  # (nnz, 3) int
    values: np.ndarray  # (nnz,)
    lam: float
    objective: np.ndarray  # (T, K)
    norm: str = "max"

    kind = "sparse"

    @classmethod
    def from_dense(cls, weights, lam, objective, norm="max"):
        weights = np.asarray(weights, dtype=np.float64)
        idx = np.argwhere(np.abs(weights) > 0)
        return cls(
            shape=tuple(int(s) for s in weights.shape),
            index=idx.astype(np.int64),
            values=weights[tuple(idx.T)],
            lam=float(lam),
            objective=np.asarray(objective, dtype=np.float64),
            norm=norm,
        )

    def dense(self):
        W = np.zeros(self.shape)
        W[tuple(self.index.T)] = self.values
        return W

    @property
    def length(self):
        return self.shape[0]

    @property
    def sparsity(self):
        """Fraction of zero weights at each time step."""
        T, K, N = self.shape
        nnz = np.bincount(self.index[:, 0], minlength=T) if self.index.size else np.zeros(T)
        return 1.0 - nnz / (K * N)

    def nonzero_count(self):
        return int(self.values.size)

    def scores(self, states):
        X, single = as_batch(states)
        check_length(X, self.length)
        z = np.einsum("tkn,jtn->jk", self.dense(), X)
        return z[0] if single else z

    def classify(self, states):
        z = self.scores(states)
        return decide_max(z), z

    def predict(self, states):
        return self.classify(states)[0]


def fit_sparse(trajectories, targets, lam, norm="max"):
    """Dantzig-selector weights for every time step."""
    X = training_tensor(trajectories)
    J, T, N = X.shape
    y = check_targets(targets, J)
    weights = np.empty((T, y.shape[0], N))
    objective = np.empty((T, y.shape[0]))
    for t in range(T):
        res = dantzig_solve(DantzigProblem(X[:, t].T, y, lam, norm))
        weights[t] = res.weights
        objective[t] = res.objective
    return SparseReadout.from_dense(weights, lam, objective, norm)


def classify_sparse(model, trajectory):
    X = np.asarray(trajectory, dtype=np.float64)
    if X.ndim != 2:
        raise ReadoutError(f"expected one (T, N) trajectory, got shape {X.shape}")
    cls, z = model.classify(X)
    return int(cls), z
