import warnings

import numpy as np
import pytest
from oracles import dantzig_grid_min

from esn_readouts.readouts import (
    DantzigProblem,
    DegenerateNodeWarning,
    PointwiseReadout,
    ReadoutError,
    SparseReadout,
    classify_pointwise,
    classify_sparse,
    dantzig_objective,
    dantzig_solve,
    fit_sparse,
    indicator_matrix,
)


def test_grid_oracle_20_instances():
    rng = np.random.default_rng(21)
    checked = 0
    while checked < 20:
        X = rng.standard_normal((2, 3))
        y = rng.standard_normal(3)
        lam = float(rng.choice([1e-2, 0.1, 0.5]))
        res = dantzig_solve(DantzigProblem(X, y[None], lam))
        if np.max(np.abs(res.weights)) > 1.9:
            continue  # optimum outside the oracle's box
        _, f_grid = dantzig_grid_min(X, y, lam)
        assert abs(res.objective[0] - f_grid) <= 2e-3
        assert res.objective[0] <= f_grid + 1e-9
        checked += 1


def test_zero_targets():
    X = np.random.default_rng(0).standard_normal((4, 6))
    res = dantzig_solve(DantzigProblem(X, np.zeros((2, 6)), 0.1))
    assert np.all(res.weights == 0) and np.all(res.objective == 0)


def test_huge_lambda_gives_zero():
    rng = np.random.default_rng(1)
    X = rng.uniform(-1, 1, (5, 20))
    y = indicator_matrix(np.arange(20) % 3, 3)
    res = dantzig_solve(DantzigProblem(X, y, 1e6))
    assert np.all(res.weights == 0)
    d = np.linalg.norm(X, axis=1)
    np.testing.assert_allclose(res.objective, np.max(np.abs(y @ X.T / d), axis=1), rtol=1e-12)


def test_local_optimality_and_zero_bound():
    rng = np.random.default_rng(2)
    for _ in range(10):
        N, J = int(rng.integers(2, 7)), int(rng.integers(4, 15))
        X = rng.standard_normal((N, J))
        y = rng.standard_normal((2, J))
        lam = 0.05
        res = dantzig_solve(DantzigProblem(X, y, lam))
        for k in range(2):
            w = res.weights[k]
            f = dantzig_objective(w, X, y[k], lam)
            assert f == pytest.approx(res.objective[k], abs=1e-12)
            assert f <= dantzig_objective(np.zeros(N), X, y[k], lam) + 1e-9
            probes = w + 1e-3 * np.vstack([np.eye(N), -np.eye(N)])
            assert np.all(f <= dantzig_objective(probes, X, y[k], lam) + 1e-6)


@pytest.mark.parametrize("norm", ["max", "operator"])
def test_joint_equals_per_row(norm):
    rng = np.random.default_rng(3)
    X = rng.standard_normal((4, 12))
    y = indicator_matrix(np.arange(12) % 3, 3)
    a = dantzig_solve(DantzigProblem(X, y, 0.1, norm))
    b = dantzig_solve(DantzigProblem(X, y, 0.1, norm), joint=True)
    np.testing.assert_allclose(a.objective, b.objective, atol=1e-6)


def test_operator_norm_objective_is_sum():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((3, 8))
    y = rng.standard_normal(8)
    w = rng.standard_normal(3)
    d = np.linalg.norm(X, axis=1)
    corr = (w @ X - y) @ X.T / d
    assert dantzig_objective(w, X, y, 0.2, "operator") == pytest.approx(np.abs(corr).sum() + 0.2 * np.abs(w).sum())


def test_zero_row_excluded_with_warning():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((4, 10))
    X[2] = 0.0
    with pytest.warns(DegenerateNodeWarning):
        res = dantzig_solve(DantzigProblem(X, rng.standard_normal((1, 10)), 0.01))
    assert res.weights[0, 2] == 0.0
    assert res.excluded.tolist() == [2]


def test_problem_validation():
    with pytest.raises(ReadoutError):
        DantzigProblem(np.ones((2, 3)), np.ones((1, 3)), 0.0)
    with pytest.raises(ReadoutError):
        DantzigProblem(np.ones((2, 3)), np.ones((1, 4)), 1.0)
    with pytest.raises(ReadoutError):
        DantzigProblem(np.ones((2, 3)), np.ones((1, 3)), 1.0, norm="frobenius")


def test_sparsity_monotone_in_lambda():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((60, 4, 12))
    labels = np.arange(60) % 2
    y = np.where(labels == 0, 1.0, -1.0)[None]
    counts = []
    for lam in (1e-4, 1e-2, 1.0, 1e2):
        m = fit_sparse(X, y, lam)
        counts.append(np.array([(np.abs(m.dense()[t]) > 1e-8).sum() for t in range(4)]))
    for a, b in zip(counts, counts[1:]):
        assert np.all(b <= a)
    assert counts[-1].sum() == 0


def test_fit_sparse_t1_is_single_solve():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((9, 1, 5))
    y = indicator_matrix(np.arange(9) % 3, 3)
    m = fit_sparse(X, y, 0.01)
    res = dantzig_solve(DantzigProblem(X[:, 0].T, y, 0.01))
    np.testing.assert_array_equal(m.dense()[0], res.weights)
    np.testing.assert_array_equal(m.objective[0], res.objective)


def test_sparse_storage_and_classification_match_dense():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((30, 3, 6))
    y = indicator_matrix(np.arange(30) % 3, 3)
    m = fit_sparse(X, y, 0.05)
    assert np.all(np.abs(m.values) > 0)
    assert np.all(np.isfinite(m.objective))
    assert m.nonzero_count() == np.count_nonzero(m.dense())
    np.testing.assert_allclose(m.sparsity, 1 - (m.dense() != 0).sum(axis=(1, 2)) / 18)
    dense = PointwiseReadout(m.dense(), m.lam)
    for j in range(30):
        a, za = classify_sparse(m, X[j])
        b, zb = classify_pointwise(dense, X[j])
        assert a == b
        np.testing.assert_allclose(za, zb, atol=1e-14)


def test_sparse_trivial_classification():
    W = np.zeros((2, 2, 2))
    W[:, 1, 0] = 1.0
    m = SparseReadout.from_dense(W, 0.1, np.zeros((2, 2)))
    X = np.array([[1.0, 0.0], [1.0, 0.0]])
    cls, z = classify_sparse(m, X)
    assert cls == 1 and np.allclose(z, [0.0, 2.0])
    assert classify_sparse(m, np.zeros((2, 2)))[0] == 0


def test_sine_square_training_accuracy():
    from esn_readouts import harness as H
    from esn_readouts.readouts import binary_targets

    plan = H.ExperimentPlan(sizes=(50,), sigmas=(0.0,), simulations=1)
    _, _, (Xtr, ytr), _, _ = H._prepare(plan, 50, 0.0, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateNodeWarning)
        m = fit_sparse(Xtr, binary_targets(ytr), 1e-4)
    assert np.mean(m.predict(Xtr) == ytr) >= 0.90
