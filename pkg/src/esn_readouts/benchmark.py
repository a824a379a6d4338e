"""Time the numba kernels against their numpy fallbacks.

    python -m esn_readouts.benchmark [--repeat 5]

The first numba call (compilation) is excluded from the timings.
"""

import argparse
import time

import numpy as np

from . import _kernels as K
from ._jit import HAVE_NUMBA


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(seed=0):
    rng = np.random.default_rng(seed)
    n = 50
    w_res = rng.uniform(-1, 1, (n, n)) * 0.1
    stream = rng.uniform(-1.5, 1.5, (7500, n))  # sine/square: 750 segments of 10
    batch = rng.uniform(-1.5, 1.5, (270, 30, n))  # Japanese vowels training set
    states = np.tanh(rng.standard_normal((370, 30, 75)))
    bases = np.linalg.qr(rng.standard_normal((30, 75, 3)))[0]
    return [
        ("leaky_run (T=7500, N=50)",
         lambda f: f(w_res, stream, np.zeros(n), 1.0, 0.8, K.TANH),
         K._leaky_run_jit, K._leaky_run_numpy),
        ("leaky_run_batch (J=270, T=30, N=50)",
         lambda f: f(w_res, batch, 0.2, 0.2, K.TANH),
         K._leaky_run_batch_jit, K._leaky_run_batch_numpy),
        ("residual_scores (J=370, T=30, N=75, R=3)",
         lambda f: f(states, bases, False),
         K._residual_scores_jit, K._residual_scores_numpy),
    ]


def run(repeat=5):
    rows = []
    for name, call, jit_fn, np_fn in cases():
        t_np = _best_of(lambda: call(np_fn), repeat)
        if HAVE_NUMBA:
            ref = call(np_fn)
            out = call(jit_fn)  # compile
            err = float(np.max(np.abs(out - ref)))
            t_jit = _best_of(lambda: call(jit_fn), repeat)
        else:
            err, t_jit = float("nan"), float("nan")
        rows.append((name, t_jit, t_np, err))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"{'kernel':44s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, t_jit, t_np, err in run(args.repeat):
        print(f"{name:44s} {1e3 * t_jit:11.2f} {1e3 * t_np:11.2f} {t_np / t_jit:8.1f} {err:11.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
