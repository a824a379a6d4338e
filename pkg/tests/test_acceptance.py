"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line (shown in the "acceptance criteria"
section of the pytest summary) before asserting. Criteria 5 and 6 need the
Japanese vowels files and skip without them.
"""

import time
import warnings

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES, have_jv, jv_root
from oracles import dantzig_grid_min, eig_radius, leading_singular_vectors, same_up_to_sign

from esn_readouts import harness as H
from esn_readouts.linalg import principal_components, ridge_solve, spectral_radius
from esn_readouts.readouts import (
    DantzigProblem,
    DegenerateNodeWarning,
    dantzig_solve,
    fit_endpoint,
    fit_global,
    fit_lowrank,
    fit_pointwise,
    fit_sparse,
    indicator_matrix,
)
from esn_readouts.reservoir import ReservoirConfig, init_weights, run

pytestmark = pytest.mark.acceptance

SIMS = 10
N_SS = 50
N_JV = 75


def record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def sine_square_clean():
    plan = H.ExperimentPlan(sizes=(N_SS,), sigmas=(0.0,), simulations=SIMS)
    t0 = time.perf_counter()
    table = H.run_plan(plan)
    return table, time.perf_counter() - t0


@pytest.fixture(scope="module")
def sine_square_noisy():
    plan = H.ExperimentPlan(sizes=(N_SS,), sigmas=H.SINE_SQUARE_SIGMAS[1:], simulations=SIMS)
    return H.run_plan(plan)


@pytest.fixture(scope="module")
def sine_square(sine_square_clean, sine_square_noisy):
    return H.ResultTable(sine_square_clean[0].rows + sine_square_noisy.rows).sorted()


@pytest.fixture(scope="module")
def jv_table():
    if not have_jv():
        pytest.skip(f"Japanese vowels files not found under {jv_root()}")
    plan = H.ExperimentPlan(
        dataset="japanese_vowels",
        sizes=(N_JV,),
        sigmas=(0.0, 0.3),
        methods=("A1_1e-4", "A2", "C"),
        simulations=SIMS,
    )
    return H.run_plan(plan)


def test_criterion_1_clean_sine_square(sine_square_clean):
    table, seconds = sine_square_clean
    a2 = table.get(N_SS, 0.0, "A2").mean_acc
    others = {m: table.get(N_SS, 0.0, m).mean_acc for m in ("A1_1e-4", "A1_1e-10", "C")}
    ok = a2 >= 99.0 and all(95.5 <= v <= 100.0 for v in others.values()) and seconds < 120
    detail = f"A2={a2:.2f} " + " ".join(f"{m}={v:.2f}" for m, v in others.items())
    record(1, ok, f"{detail} runtime={seconds:.1f}s (need A2>=99, others in [95.5,100], <120s)")
    assert ok


def test_criterion_2_global_readout_at_chance(sine_square):
    accs = {s: sine_square.get(N_SS, s, "A3").mean_acc for s in H.SINE_SQUARE_SIGMAS}
    outside = {s: a for s, a in accs.items() if not 45.0 <= a <= 55.0}
    detail = " ".join(f"{s:g}:{a:.1f}" for s, a in accs.items())
    record(2, not outside, f"A3 by sigma {detail} (need all in [45,55])")
    assert not outside, f"A3 outside [45, 55] at sigma {sorted(outside)}"


def test_criterion_3_lowrank_beats_pointwise_under_noise(sine_square):
    c = sine_square.get(N_SS, 0.3, "C").mean_acc
    a1 = sine_square.get(N_SS, 0.3, "A1_1e-4").mean_acc
    ok = 60.0 <= c <= 72.0 and c - a1 >= 5.0
    record(3, ok, f"sigma=0.3 C={c:.2f} A1_1e-4={a1:.2f} gap={c - a1:.2f} (need C in [60,72], gap>=5)")
    assert 60.0 <= c <= 72.0, f"C = {c:.2f} outside [60, 72]"
    assert c - a1 >= 5.0, f"C - A1 = {c - a1:.2f} < 5"


def test_criterion_4_lowrank_monotone_in_noise(sine_square):
    sigmas = (0.0, 0.05, 0.1, 0.2, 0.3)
    accs = [sine_square.get(N_SS, s, "C").mean_acc for s in sigmas]
    ok = all(b <= a + 2.0 for a, b in zip(accs, accs[1:]))
    detail = " ".join(f"{s:g}:{a:.2f}" for s, a in zip(sigmas, accs))
    record(4, ok, f"C by sigma {detail} (nonincreasing, 2-point slack)")
    assert ok


@pytest.mark.datagated
def test_criterion_5_japanese_vowels_clean(jv_table):
    a2 = jv_table.get(N_JV, 0.0, "A2").mean_acc
    a1 = jv_table.get(N_JV, 0.0, "A1_1e-4").mean_acc
    ok = 95.5 <= a2 <= 99.0 and 94.5 <= a1 <= 98.5
    record(5, ok, f"sigma=0 A2={a2:.2f} A1_1e-4={a1:.2f} (need A2 in [95.5,99], A1 in [94.5,98.5])")
    assert ok


@pytest.mark.datagated
def test_criterion_6_japanese_vowels_noisy(jv_table):
    c = jv_table.get(N_JV, 0.3, "C").mean_acc
    a1 = jv_table.get(N_JV, 0.3, "A1_1e-4").mean_acc
    ok = c >= 75.0 and c - a1 >= 20.0
    record(6, ok, f"sigma=0.3 C={c:.2f} A1_1e-4={a1:.2f} gap={c - a1:.2f} (need C>=75, gap>=20)")
    assert ok


def test_criterion_7_oracle_equivalences():
    rng = np.random.default_rng(2024)
    failures = []

    worst_ridge = 0.0
    for _ in range(100):
        N, J, K = rng.integers(1, 15), rng.integers(1, 50), rng.integers(1, 6)
        X, Y = rng.standard_normal((N, J)), rng.standard_normal((K, J))
        lam = 10.0 ** rng.uniform(-6, 2)
        W = ridge_solve(X, Y, lam)
        worst_ridge = max(worst_ridge, np.max(np.abs((W @ X - Y) @ X.T + lam * W)))
    if worst_ridge >= 1e-8:
        failures.append("ridge")

    worst_lp, done = 0.0, 0
    while done < 20:
        X, y = rng.standard_normal((2, 3)), rng.standard_normal(3)
        lam = float(rng.choice([1e-2, 0.1, 0.5]))
        res = dantzig_solve(DantzigProblem(X, y[None], lam))
        if np.max(np.abs(res.weights)) > 1.9:
            continue
        worst_lp = max(worst_lp, abs(res.objective[0] - dantzig_grid_min(X, y, lam)[1]))
        done += 1
    if worst_lp > 2e-3:
        failures.append("dantzig")

    pca_bad = 0
    for _ in range(50):
        N, J = int(rng.integers(3, 12)), int(rng.integers(3, 20))
        X = rng.standard_normal((N, J))
        R = int(rng.integers(1, min(N, J)))
        if not same_up_to_sign(principal_components(X, R), leading_singular_vectors(X, R), 1e-8):
            pca_bad += 1
    if pca_bad:
        failures.append("pca")

    worst_rad = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 15))
        M = rng.uniform(-1, 1, (n, n))
        worst_rad = max(worst_rad, abs(spectral_radius(M) / eig_radius(M) - 1.0))
    if worst_rad > 1e-6:
        failures.append("spectral radius")

    record(
        7,
        not failures,
        f"ridge stationarity {worst_ridge:.1e} (<1e-8), Dantzig vs grid {worst_lp:.1e} (<=2e-3), "
        f"PCA mismatches {pca_bad}/50, radius rel err {worst_rad:.1e} (<=1e-6)",
    )
    assert not failures, failures


def test_criterion_8_structural_invariants():
    failures = []

    slowest = 0
    for seed in range(20):
        cfg = ReservoirConfig(50, 1, alpha=1.0, rho=0.8, gamma=1.5, weight_seed=1000 + seed)
        w = init_weights(cfg)
        u = np.concatenate([np.random.default_rng(seed).uniform(-1, 1, 50), np.zeros(200)])
        norms = np.linalg.norm(run(w, cfg, u)[50:], axis=1)
        below = np.flatnonzero(norms < 1e-6)
        if not below.size or np.any(norms[1:] > norms[:-1] * (1 + 1e-12) + 1e-300):
            failures.append(f"echo decay seed {seed}")
        else:
            slowest = max(slowest, int(below[0]))

    rng = np.random.default_rng(8)
    X = rng.standard_normal((24, 4, 6))
    labels = np.arange(24) % 3
    probe = rng.standard_normal((10, 4, 6))
    prev = None
    for R in range(1, 7):
        z = fit_lowrank(X, labels, rank=R).scores(probe)
        if prev is not None and np.any(z > prev + 1e-10):
            failures.append(f"PCA residual grew at R={R}")
        prev = z

    Xs = rng.standard_normal((60, 3, 10))
    ys = np.where(np.arange(60) % 2 == 0, 1.0, -1.0)[None]
    counts = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateNodeWarning)
        for lam in (1e-4, 1e-2, 1.0, 1e2):
            counts.append((np.abs(fit_sparse(Xs, ys, lam).dense()) > 1e-8).sum(axis=(1, 2)))
    if any(np.any(b > a) for a, b in zip(counts, counts[1:])):
        failures.append("Dantzig sparsity not monotone")

    one = rng.standard_normal((12, 1, 5))
    y = indicator_matrix(np.arange(12) % 3, 3)
    p1 = fit_pointwise(one, y, 1e-3).weights[0]
    e1 = fit_endpoint(one, y, 1e-3).weight
    g1 = fit_global(one, y, 1e-3).weight
    const = np.repeat(one, 5, axis=1)
    gc = fit_global(const, y, 5 * 1e-3).weight
    pc = fit_pointwise(const, y, 1e-3).weights
    if not (
        np.allclose(p1, ridge_solve(one[:, 0].T, y, 1e-3), atol=1e-12)
        and np.allclose(e1, p1, atol=1e-12)
        and np.allclose(g1, e1, atol=1e-12)
        and all(np.allclose(gc, pc[t], atol=1e-10) for t in range(5))
    ):
        failures.append("degenerate-T equivalence")

    record(
        8,
        not failures,
        f"echo decay 20/20 (slowest {slowest} steps), PCA residual monotone in R, "
        f"sparsity counts {[int(c.sum()) for c in counts]}, T=1 and constant-trajectory collapses"
        if not failures
        else "; ".join(failures),
    )
    assert not failures, failures


def test_criterion_9_byte_identical_reruns():
    plan = H.ExperimentPlan(sizes=(20, 30), sigmas=(0.0, 0.2), simulations=3)
    first = H.run_plan(plan).to_csv_text().encode()
    second = H.run_plan(plan).to_csv_text().encode()
    parallel = H.run_plan(plan, workers=2).to_csv_text().encode()
    ok = first == second == parallel
    record(9, ok, f"{len(first)} CSV bytes identical across two serial runs and a 2-worker run")
    assert ok
