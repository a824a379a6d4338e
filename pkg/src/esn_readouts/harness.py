"""Experiment grid runner.

A plan names a dataset, a grid of reservoir sizes and test-noise levels, a
set of readout methods and a number of repeated simulations per cell. Every
simulation draws fresh reservoir weights, data and noise from a child seed
that depends only on ``(base_seed, dataset, N, sigma, simulation)``, so all
methods in a simulation see the same reservoir and the same inputs, and
changing the method list never changes what any method sees.
"""

import csv
import hashlib
import io
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import data as D
from .readouts import (
    binary_targets,
    fit_endpoint,
    fit_global,
    fit_lowrank,
    fit_pointwise,
    fit_sparse,
    indicator_matrix,
)
from .reservoir import ReservoirConfig, init_weights, run, run_batch

log = logging.getLogger(__name__)

__all__ = [
    "METHODS",
    "DATASETS",
    "CSV_HEADER",
    "PlanError",
    "ExperimentPlan",
    "ResultRow",
    "ResultTable",
    "child_seed",
    "data_dir",
    "simulate",
    "run_cell",
    "run_plan",
    "best_methods",
]

METHODS = ("A1_1e-4", "A1_1e-10", "A2", "A3", "B", "C")
DATASETS = ("sine_square", "japanese_vowels")
CSV_HEADER = "dataset,N,sigma,method,mean_acc,std_acc,n_sims"

# Reservoir parameter blocks per dataset.
DATASET_DEFAULTS = {
    "sine_square": {"alpha": 1.0, "rho": 0.8, "gamma": 1.5},
    "japanese_vowels": {"alpha": 0.2, "rho": 0.2, "gamma": 1.5},
}
SINE_SQUARE_SIGMAS = (0.0, 0.01, 0.02, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
JV_SIGMAS = (0.0, 0.01, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30)

DATA_ENV = "ESN_READOUTS_DATA"


class PlanError(ValueError):
    pass


def data_dir():
    """Dataset cache directory (``$ESN_READOUTS_DATA`` or ``~/.cache/esn_readouts``)."""
    root = os.environ.get(DATA_ENV)
    return Path(root) if root else Path.home() / ".cache" / "esn_readouts"


@dataclass(frozen=True)
class ExperimentPlan:
    dataset: str = "sine_square"
    sizes: tuple = (50,)
    sigmas: tuple = (0.0,)
    methods: tuple = METHODS
    simulations: int = 10
    base_seed: int = 0
    rank: int = 3
    output: str = "results.csv"
    # reservoir; None -> dataset default
    alpha: float = None
    rho: float = None
    gamma: float = None
    activation: str = "tanh"
    spectral_target: float = 0.95
    washout: int = 0
    include_input: bool = False
    connectivity: float = 1.0
    # readouts
    indicator_off: float = 0.0
    sparse_norm: str = "max"
    lowrank_residual: str = "l2"
    lowrank_center: bool = False
    # sine/square
    period: int = 10
    train_segments: int = 500
    test_segments: int = 250
    # Japanese vowels
    jv_dir: str = None
    jv_length: int = 30
    bias: tuple = (1.0, 1.0)
    workers: int = 1

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise PlanError(f"unknown dataset {self.dataset!r}; choose from {DATASETS}")
        if not self.sizes or not self.sigmas or not self.methods:
            raise PlanError("sizes, sigmas and methods must be nonempty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise PlanError(f"unknown methods {bad}; choose from {METHODS}")
        if self.simulations < 1:
            raise PlanError("simulations must be >= 1")
        if any(s < 0 for s in self.sigmas):
            raise PlanError("noise levels must be nonnegative")
        if self.indicator_off not in (0.0, -1.0):
            raise PlanError("indicator_off must be 0 or -1")
        # canonical order so results never depend on how the plan was written
        object.__setattr__(self, "sizes", tuple(sorted({int(n) for n in self.sizes})))
        object.__setattr__(self, "sigmas", tuple(sorted({float(s) for s in self.sigmas})))
        object.__setattr__(
            self, "methods", tuple(m for m in METHODS if m in set(self.methods))
        )
        object.__setattr__(self, "bias", tuple(float(b) for b in self.bias))

    def param(self, name):
        value = getattr(self, name)
        return DATASET_DEFAULTS[self.dataset][name] if value is None else value

    @classmethod
    def from_file(cls, path, **overrides):
        return cls.from_mapping(parse_plan_text(Path(path).read_text(), str(path)), **overrides)

    @classmethod
    def from_mapping(cls, mapping, **overrides):
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in mapping.items():
            if key not in known:
                raise PlanError(f"unknown plan key {key!r}")
            kwargs[key] = _coerce(key, raw)
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


_LIST_KEYS = {"sizes": int, "sigmas": float, "methods": str, "bias": float}
_INT_KEYS = {
    "simulations", "base_seed", "rank", "washout", "period", "train_segments",
    "test_segments", "jv_length", "workers",
}
_FLOAT_KEYS = {
    "alpha", "rho", "gamma", "spectral_target", "connectivity", "indicator_off",
}
_BOOL_KEYS = {"include_input", "lowrank_center"}


def _coerce(key, raw):
    if not isinstance(raw, str):
        return raw
    try:
        if key in _LIST_KEYS:
            kind = _LIST_KEYS[key]
            return tuple(kind(v.strip()) for v in raw.split(",") if v.strip())
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
    except ValueError:
        raise PlanError(f"bad value for {key}: {raw!r}") from None
    return raw


def parse_plan_text(text, source="<plan>"):
    """Parse ``key = value`` lines; ``#`` starts a comment, lists are comma separated."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PlanError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            raise PlanError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def child_seed(base_seed, dataset, n_nodes, sigma, sim):
    """Stable 64-bit seed: first 8 bytes of SHA-256 over
    ``"{base_seed}|{dataset}|{N}|{sigma!r}|{sim}"`` (big endian)."""
    key = f"{int(base_seed)}|{dataset}|{int(n_nodes)}|{float(sigma)!r}|{int(sim)}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def _sub_seeds(seed):
    # weights, training data, test data, test noise
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(4, dtype=np.uint64)]


def _reservoir_config(plan, n_nodes, n_inputs, weight_seed):
    return ReservoirConfig(
        n_nodes=n_nodes,
        n_inputs=n_inputs,
        alpha=plan.param("alpha"),
        rho=plan.param("rho"),
        gamma=plan.param("gamma"),
        activation=plan.activation,
        spectral_target=plan.spectral_target,
        weight_seed=weight_seed,
        include_input=plan.include_input,
        connectivity=plan.connectivity,
    )


def _stream_states(weights, cfg, dataset, washout):
    """Run the segments as one continuous stream; return ``(J', P, N)`` windows
    and labels, dropping leading segments that overlap the washout."""
    period = dataset.meta["period"]
    states = run(weights, cfg, dataset.stream())
    J = len(dataset)
    states = states.reshape(J, period, -1)
    skip = -(-washout // period)
    return states[skip:], dataset.labels[skip:]


_JV_CACHE = {}


def _load_jv(plan):
    root = Path(plan.jv_dir) if plan.jv_dir else data_dir() / "japanese_vowels"
    key = (str(root), plan.jv_length, plan.bias)
    if key not in _JV_CACHE:
        train_path, test_path = root / "ae.train", root / "ae.test"
        for p in (train_path, test_path, root / "size_ae.test"):
            if not p.exists():
                raise FileNotFoundError(
                    f"Japanese vowels file {p} is missing; run `esn-readouts fetch-jv` "
                    f"or set {DATA_ENV}"
                )
        train, test = D.load_japanese_vowels(train_path, test_path)
        train = D.append_bias_channels(D.resample_to_length(train, plan.jv_length), plan.bias)
        test = D.resample_to_length(test, plan.jv_length)
        _JV_CACHE[key] = (train, test)
    return _JV_CACHE[key]


def _prepare(plan, n_nodes, sigma, sim):
    """Weights, training states/labels and noisy test states/labels for one simulation."""
    seed = child_seed(plan.base_seed, plan.dataset, n_nodes, sigma, sim)
    s_weights, s_train, s_test, s_noise = _sub_seeds(seed)
    if plan.dataset == "sine_square":
        cfg = _reservoir_config(plan, n_nodes, 1, s_weights)
        weights = init_weights(cfg)
        train = D.gen_sine_square(D.SineSquareConfig(plan.period, plan.train_segments, s_train))
        test = D.gen_sine_square(D.SineSquareConfig(plan.period, plan.test_segments, s_test))
        test = D.add_noise(test, D.NoiseSpec(sigma, s_noise))
        Xtr, ytr = _stream_states(weights, cfg, train, plan.washout)
        Xte, yte = _stream_states(weights, cfg, test, plan.washout)
        n_classes = 2
    else:
        train, test = _load_jv(plan)
        n_channels = test.n_inputs
        test = D.add_noise(test, D.NoiseSpec(sigma, s_noise, channels=tuple(range(n_channels))))
        test = D.append_bias_channels(test, plan.bias)
        cfg = replace(_reservoir_config(plan, n_nodes, train.n_inputs, s_weights), washout=plan.washout)
        weights = init_weights(cfg)
        Xtr, ytr = run_batch(weights, cfg, train.as_array()), train.labels
        Xte, yte = run_batch(weights, cfg, test.as_array()), test.labels
        n_classes = train.n_classes
    return weights, cfg, (Xtr, ytr), (Xte, yte), n_classes


def _targets(plan, labels, n_classes):
    # Two classes use the signed single-output indicator (+1 sine, -1 square).
    if n_classes == 2:
        return binary_targets(labels)
    return indicator_matrix(labels, n_classes, plan.indicator_off)


def train_method(plan, method, states, labels, n_classes):
    """Fit one of the named readouts on ``(J, T, N)`` training states."""
    if method == "C":
        return fit_lowrank(
            states, labels, plan.rank, n_classes=n_classes,
            residual=plan.lowrank_residual, center=plan.lowrank_center,
        )
    y = _targets(plan, labels, n_classes)
    if method == "A1_1e-4":
        return fit_pointwise(states, y, 1e-4)
    if method == "A1_1e-10":
        return fit_pointwise(states, y, 1e-10)
    if method == "A2":
        return fit_endpoint(states, y, 1e-4)
    if method == "A3":
        return fit_global(states, y, 1e-4)
    if method == "B":
        return fit_sparse(states, y, 1e-4, norm=plan.sparse_norm)
    raise PlanError(f"unknown method {method!r}")


def accuracy(predicted, truth):
    """Percent of ``predicted`` equal to ``truth``."""
    predicted, truth = np.asarray(predicted), np.asarray(truth)
    return 100.0 * np.count_nonzero(predicted == truth) / truth.size


def simulate(plan, n_nodes, sigma, sim, methods=None):
    """Accuracy (%) of each method for one simulation; NaN marks a failed method."""
    methods = plan.methods if methods is None else methods
    _, _, (Xtr, ytr), (Xte, yte), K = _prepare(plan, n_nodes, sigma, sim)
    out = {}
    if not (np.all(np.isfinite(Xtr)) and np.all(np.isfinite(Xte))):
        log.warning("non-finite reservoir states: N=%s sigma=%s sim=%s", n_nodes, sigma, sim)
        return {m: math.nan for m in methods}
    for m in methods:
        try:
            with np.errstate(divide="raise", over="raise", invalid="raise"):
                model = train_method(plan, m, Xtr, ytr, K)
                out[m] = accuracy(model.predict(Xte), yte)
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            log.warning("method %s failed (N=%s sigma=%s sim=%s): %s", m, n_nodes, sigma, sim, exc)
            out[m] = math.nan
    return out


def run_cell(plan, n_nodes, sigma, method, sim):
    """Percent accuracy of a single (N, sigma, method, simulation)."""
    return simulate(plan, n_nodes, sigma, sim, methods=(method,))[method]


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    N: int
    sigma: float
    method: str
    mean_acc: float
    std_acc: float
    n_sims: int
    n_failed: int = 0
    seconds: float = field(default=0.0, compare=False)

    @property
    def flagged(self):
        """Single-simulation rows report std 0 by convention."""
        return self.n_sims == 1

    def csv_fields(self):
        return [
            self.dataset,
            str(self.N),
            f"{self.sigma:g}",
            self.method,
            f"{self.mean_acc:.4f}",
            f"{self.std_acc:.4f}",
            str(self.n_sims),
        ]


def _method_rank(method):
    return METHODS.index(method) if method in METHODS else len(METHODS)


@dataclass
class ResultTable:
    rows: list

    def sorted(self):
        return ResultTable(
            sorted(self.rows, key=lambda r: (r.dataset, r.N, r.sigma, _method_rank(r.method), r.method))
        )

    def to_csv_text(self):
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for r in self.sorted().rows:
            buf.write(",".join(r.csv_fields()) + "\n")
        return buf.getvalue()

    def write_csv(self, path):
        Path(path).write_text(self.to_csv_text())

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or ",".join(header) != CSV_HEADER:
                raise PlanError(f"{path}: not a results file (header {header})")
            rows = [
                ResultRow(d, int(n), float(s), m, float(mu), float(sd), int(k))
                for d, n, s, m, mu, sd, k in reader
            ]
        return cls(rows)

    def get(self, N, sigma, method):
        for r in self.rows:
            if r.N == N and math.isclose(r.sigma, sigma) and r.method == method:
                return r
        raise KeyError((N, sigma, method))


def _summarize(dataset, N, sigma, method, accs, seconds):
    accs = np.asarray(accs, dtype=float)
    ok = accs[np.isfinite(accs)]
    n = ok.size
    if n == 0:
        mean, std = math.nan, math.nan
    else:
        mean = float(ok.mean())
        std = float(ok.std(ddof=1)) if n > 1 else 0.0
    return ResultRow(dataset, N, sigma, method, mean, std, n, int(accs.size - n), seconds)


def _simulate_task(args):
    plan, n_nodes, sigma, sim = args
    t0 = time.perf_counter()
    accs = simulate(plan, n_nodes, sigma, sim)
    return (n_nodes, sigma, sim), accs, time.perf_counter() - t0


def run_plan(plan, workers=None):
    """Execute every cell of ``plan``; rows are in canonical (N, sigma, method) order."""
    workers = plan.workers if workers is None else workers
    tasks = [
        (plan, n, s, k) for n in plan.sizes for s in plan.sigmas for k in range(plan.simulations)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_task, tasks))
    else:
        results = [_simulate_task(t) for t in tasks]
    collected = {}
    for (n, s, _), accs, secs in results:
        for m, a in accs.items():
            bucket = collected.setdefault((n, s, m), [[], 0.0])
            bucket[0].append(a)
            bucket[1] += secs
    rows = []
    for (n, s, m), (accs, secs) in collected.items():
        row = _summarize(plan.dataset, n, s, m, accs, secs)
        if row.n_failed:
            log.warning("%s N=%s sigma=%g: %d of %d simulations failed", m, n, s, row.n_failed, len(accs))
        if row.flagged:
            log.info("%s N=%s sigma=%g: single simulation, std reported as 0", m, n, s)
        log.info("N=%s sigma=%g %s: %.2f +/- %.2f (%.2fs)", n, s, m, row.mean_acc, row.std_acc, secs)
        rows.append(row)
    return ResultTable(rows).sorted()


def best_methods(table):
    """Best (highest mean) method per (dataset, N, sigma) group.

    Ties go to the earlier method in the canonical order, so the choice does
    not depend on row order.
    """
    best = {}
    for r in table.rows:
        if not math.isfinite(r.mean_acc):
            continue
        key = (r.dataset, r.N, r.sigma)
        cur = best.get(key)
        if cur is None or (r.mean_acc, -_method_rank(r.method)) > (cur.mean_acc, -_method_rank(cur.method)):
            best[key] = r
    return dict(sorted(best.items()))
