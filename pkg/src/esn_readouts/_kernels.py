"""Hot loops: the leaky reservoir recurrence and subspace residual scoring.

Each kernel has a numba version and a numpy version with the same signature.
The public names ``leaky_run`` and ``residual_scores`` point at one or the
other depending on ``ESN_READOUTS_DISABLE_JIT``; ``leaky_run_batch`` always
uses numpy. All versions stay importable so tests and the benchmark can
compare them directly.
"""

import numpy as np

from ._jit import USE_JIT, njit

TANH = 0
IDENTITY = 1


@njit(cache=True)
def _leaky_run_jit(w_res, drive, x0, alpha, rho, act):
    T, N = drive.shape
    out = np.empty((T, N))
    x = x0.copy()
    pre = np.empty(N)
    for t in range(T):
        for i in range(N):
            acc = drive[t, i]
            for j in range(N):
                acc += rho * w_res[i, j] * x[j]
            pre[i] = acc
        for i in range(N):
            a = np.tanh(pre[i]) if act == TANH else pre[i]
            x[i] = (1.0 - alpha) * x[i] + a
            out[t, i] = x[i]
    return out


def _leaky_run_numpy(w_res, drive, x0, alpha, rho, act):
    T, N = drive.shape
    out = np.empty((T, N))
    x = x0.copy()
    w = rho * w_res
    for t in range(T):
        pre = w @ x + drive[t]
        x = (1.0 - alpha) * x + (np.tanh(pre) if act == TANH else pre)
        out[t] = x
    return out


@njit(cache=True)
def _leaky_run_batch_jit(w_res, drive, alpha, rho, act):
    # one (J, N) x (N, N) product per step goes to BLAS; the update is fused
    J, T, N = drive.shape
    out = np.empty((J, T, N))
    x = np.zeros((J, N))
    wt = np.ascontiguousarray((rho * w_res).T)
    for t in range(T):
        pre = np.dot(x, wt)
        for p in range(J):
            for i in range(N):
                a = pre[p, i] + drive[p, t, i]
                if act == TANH:
                    a = np.tanh(a)
                x[p, i] = (1.0 - alpha) * x[p, i] + a
                out[p, t, i] = x[p, i]
    return out


def _leaky_run_batch_numpy(w_res, drive, alpha, rho, act):
    J, T, N = drive.shape
    out = np.empty((J, T, N))
    x = np.zeros((J, N))
    wt = (rho * w_res).T
    for t in range(T):
        pre = x @ wt + drive[:, t]
        x = (1.0 - alpha) * x + (np.tanh(pre) if act == TANH else pre)
        out[:, t] = x
    return out


@njit(cache=True)
def _residual_scores_jit(states, bases, squared):
    J, T, N = states.shape
    R = bases.shape[2]
    z = np.zeros(J)
    for p in range(J):
        total = 0.0
        for t in range(T):
            norm2 = 0.0
            for i in range(N):
                norm2 += states[p, t, i] * states[p, t, i]
            proj2 = 0.0
            for r in range(R):
                c = 0.0
                for i in range(N):
                    c += bases[t, i, r] * states[p, t, i]
                proj2 += c * c
            res2 = norm2 - proj2
            if res2 < 0.0:
                res2 = 0.0
            total += res2 if squared else np.sqrt(res2)
        z[p] = total
    return z


def _residual_scores_numpy(states, bases, squared):
    norm2 = np.einsum("jti,jti->jt", states, states)
    coef = np.einsum("tir,jti->jtr", bases, states)
    res2 = np.maximum(norm2 - np.einsum("jtr,jtr->jt", coef, coef), 0.0)
    return (res2 if squared else np.sqrt(res2)).sum(axis=1)


# The batched recurrence is one BLAS product plus a vectorized tanh per step;
# numba's scalar tanh loses to numpy there (see the benchmark), so the numpy
# kernel serves both modes.
leaky_run_batch = _leaky_run_batch_numpy
if USE_JIT:
    leaky_run = _leaky_run_jit
    residual_scores = _residual_scores_jit
else:
    leaky_run = _leaky_run_numpy
    residual_scores = _residual_scores_numpy

BACKEND = "numba" if USE_JIT else "numpy"
