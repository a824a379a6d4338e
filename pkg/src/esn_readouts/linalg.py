"""Dense numerical kernels shared by the readouts.

Ridge regression through the Gram (normal-equations) system, truncated
principal components with a deterministic sign convention, and spectral
radius estimation by power iteration with a dense eigensolver fallback.
"""

import numpy as np
from scipy import linalg as sla

__all__ = [
    "LinalgError",
    "SingularNormalEquationsError",
    "DegenerateMatrixError",
    "as_matrix",
    "ridge_solve",
    "principal_components",
    "normalize_signs",
    "spectral_radius",
]


_STALL_WINDOW = 250


class LinalgError(ValueError):
    pass


class SingularNormalEquationsError(LinalgError):
    pass


class DegenerateMatrixError(LinalgError):
    pass


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array with positive dimensions."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise LinalgError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise LinalgError(f"{name} has an empty dimension: {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError(f"{name} contains NaN or Inf")
    return a


def ridge_solve(states, targets, lam):
    """Regularized least squares readout.

    Solves ``min_W ||targets - W @ states||^2 + lam * ||W||^2`` in closed form,
    ``W = targets @ states.T @ inv(states @ states.T + lam * I)``, via a
    Cholesky factorization of the N x N Gram matrix.

    Parameters
    ----------
    states : array, shape (N, J)
        One column per training pattern.
    targets : array, shape (K, J)
    lam : float
        Nonnegative ridge penalty.

    Returns
    -------
    W : array, shape (K, N)
    """
    X = as_matrix(states, "states")
    Y = as_matrix(targets, "targets")
    if X.shape[1] != Y.shape[1]:
        raise LinalgError(
            f"states has {X.shape[1]} columns but targets has {Y.shape[1]}"
        )
    lam = float(lam)
    if not lam >= 0.0:
        raise LinalgError(f"lambda must be nonnegative, got {lam}")

    n = X.shape[0]
    gram = X @ X.T
    if lam > 0.0:
        gram[np.diag_indices(n)] += lam
    else:
        # Cholesky happily factors matrices that are singular to working precision.
        evals = np.linalg.eigvalsh(gram)
        if evals[-1] <= 0.0 or evals[0] <= n * np.finfo(float).eps * evals[-1]:
            raise SingularNormalEquationsError(
                "singular normal equations: states @ states.T is not invertible "
                "and lambda = 0"
            )
    try:
        factor = sla.cho_factor(gram, lower=False, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularNormalEquationsError(f"singular normal equations: {exc}") from exc
    return sla.cho_solve(factor, X @ Y.T, check_finite=False).T


def normalize_signs(vectors):
    """Flip columns so each one's largest-magnitude entry is positive.

    Ties in magnitude resolve to the first (lowest-index) entry.
    """
    vectors = np.array(vectors, dtype=np.float64, copy=True)
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def principal_components(states, rank, center=False):
    """Leading ``rank`` left singular vectors of ``states`` (N x J).

    States are used raw unless ``center`` is set, in which case each row has
    its mean across patterns removed first. Columns come back ordered by
    nonincreasing singular value with the sign convention of
    :func:`normalize_signs`.
    """
    X = as_matrix(states, "states")
    rank = int(rank)
    if rank < 1:
        raise LinalgError(f"rank must be >= 1, got {rank}")
    if rank > min(X.shape):
        raise LinalgError(f"rank {rank} exceeds min(N, J) = {min(X.shape)}")
    if center:
        X = X - X.mean(axis=1, keepdims=True)
    if not np.any(X):
        raise DegenerateMatrixError("degenerate state matrix: all entries are zero")
    U, _, _ = np.linalg.svd(X, full_matrices=False)
    return normalize_signs(U[:, :rank])


def spectral_radius(square, max_iter=5000, tol=1e-6, seed=0):
    """Largest eigenvalue magnitude of a square matrix.

    Power iteration from a fixed random start. An iterate is accepted once the
    eigenpair residual ``||M x - q x||`` drops below ``1e-3 * tol * |q|`` (``q``
    the Rayleigh quotient), which keeps the eigenvalue error under ``tol`` even
    for mildly non-normal matrices. A complex dominant pair never passes that
    check; once the residual stalls (or ``max_iter`` runs out) the full
    spectrum is computed instead.
    """
    M = as_matrix(square, "square")
    n = M.shape[0]
    if M.shape[1] != n:
        raise LinalgError(f"spectral_radius needs a square matrix, got {M.shape}")
    if not np.any(M):
        return 0.0

    rtol = 1e-3 * tol
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    checkpoint = np.inf
    for it in range(max_iter):
        y = M @ x
        q = float(x @ y)
        resid = np.linalg.norm(y - q * x)
        if q != 0.0 and resid <= rtol * abs(q):
            return abs(q)
        if it % _STALL_WINDOW == _STALL_WINDOW - 1:
            # not even halving the residual per window: oscillating or hopeless
            if resid > 0.5 * checkpoint:
                break
            checkpoint = resid
        ny = np.linalg.norm(y)
        if ny == 0.0:
            break
        x = y / ny
    return float(np.max(np.abs(np.linalg.eigvals(M))))
