"""Fixed random echo state reservoir with leaky tanh/identity units.

State update (no output feedback)::

    X(t+1) = (1 - alpha) X(t) + f(rho W_res X(t) + gamma W_in u(t)),  X(0) = 0
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .linalg import spectral_radius

__all__ = [
    "ReservoirConfig",
    "ReservoirWeights",
    "ReservoirError",
    "init_weights",
    "run",
    "run_batch",
]

ACTIVATIONS = {"tanh": _kernels.TANH, "identity": _kernels.IDENTITY}


class ReservoirError(ValueError):
    pass


@dataclass(frozen=True)
class ReservoirConfig:
    """Reservoir hyperparameters.

    ``washout`` drops that many leading states from every trajectory and
    ``include_input`` appends the raw input to each state (``S(t) = [X(t);
    u(t)]``). ``connectivity`` < 1 zeroes a random fraction of ``w_res``
    before rescaling. All three default to the plain dense, cold-start setup.
    """

    n_nodes: int
    n_inputs: int
    alpha: float = 1.0
    rho: float = 1.0
    gamma: float = 1.0
    activation: str = "tanh"
    spectral_target: float = 0.95
    weight_seed: int = 0
    washout: int = 0
    include_input: bool = False
    connectivity: float = 1.0

    def __post_init__(self):
        if self.n_nodes < 1 or self.n_inputs < 1:
            raise ReservoirError("n_nodes and n_inputs must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ReservoirError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.rho < 0 or self.gamma < 0:
            raise ReservoirError("rho and gamma must be nonnegative")
        if not 0.0 < self.spectral_target < 1.0:
            raise ReservoirError(
                f"spectral_target must lie in (0, 1), got {self.spectral_target}"
            )
        if self.activation not in ACTIVATIONS:
            raise ReservoirError(f"unknown activation {self.activation!r}")
        if self.washout < 0:
            raise ReservoirError("washout must be >= 0")
        if not 0.0 < self.connectivity <= 1.0:
            raise ReservoirError("connectivity must lie in (0, 1]")

    @property
    def state_dim(self):
        return self.n_nodes + (self.n_inputs if self.include_input else 0)


@dataclass(frozen=True)
class ReservoirWeights:
    w_in: np.ndarray
    w_res: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w_in", np.array(self.w_in, dtype=np.float64))
        object.__setattr__(self, "w_res", np.array(self.w_res, dtype=np.float64))
        n = self.w_res.shape[0]
        if self.w_res.shape != (n, n) or self.w_in.ndim != 2 or self.w_in.shape[0] != n:
            raise ReservoirError(
                f"inconsistent shapes w_in {self.w_in.shape}, w_res {self.w_res.shape}"
            )
        if not (np.all(np.isfinite(self.w_in)) and np.all(np.isfinite(self.w_res))):
            raise ReservoirError("weights must be finite")
        self.w_in.setflags(write=False)
        self.w_res.setflags(write=False)


def init_weights(config):
    """Draw U(-1, 1) input and recurrent weights, rescale ``w_res`` to the
    configured spectral radius. Deterministic in ``config.weight_seed``."""
    rng = np.random.default_rng(config.weight_seed)
    n, L = config.n_nodes, config.n_inputs
    w_in = rng.uniform(-1.0, 1.0, size=(n, L))
    w_res = rng.uniform(-1.0, 1.0, size=(n, n))
    if config.connectivity < 1.0:
        w_res *= rng.random(size=(n, n)) < config.connectivity
    radius = spectral_radius(w_res)
    if radius == 0.0:
        raise ReservoirError("raw recurrent matrix has spectral radius 0; cannot rescale")
    w_res *= config.spectral_target / radius
    return ReservoirWeights(w_in=w_in, w_res=w_res)


def _check_input(inputs, config):
    u = np.asarray(inputs, dtype=np.float64)
    if u.ndim == 1 and config.n_inputs == 1:
        u = u[:, None]
    if u.shape[-1] != config.n_inputs:
        raise ReservoirError(
            f"input has {u.shape[-1]} channels, reservoir expects {config.n_inputs}"
        )
    if u.shape[-2] < 1:
        raise ReservoirError("input sequence must have at least one step")
    if not np.all(np.isfinite(u)):
        raise ReservoirError("input contains NaN or Inf")
    return u


def _finish(states, u, config):
    if config.include_input:
        states = np.concatenate([states, u], axis=-1)
    if config.washout:
        states = states[..., config.washout:, :]
    return states


def run(weights, config, inputs):
    """Drive the reservoir with one ``(T, L)`` input sequence from ``X(0) = 0``.

    Returns the ``(T, N)`` state trajectory ``X(1) .. X(T)`` (after washout,
    and with inputs appended when ``config.include_input``).
    """
    u = _check_input(inputs, config)
    if u.ndim != 2:
        raise ReservoirError(f"expected a (T, L) sequence, got shape {u.shape}")
    drive = config.gamma * (u @ weights.w_in.T)
    states = _kernels.leaky_run(
        weights.w_res,
        np.ascontiguousarray(drive),
        np.zeros(config.n_nodes),
        float(config.alpha),
        float(config.rho),
        ACTIVATIONS[config.activation],
    )
    return _finish(states, u, config)


def run_batch(weights, config, inputs):
    """Run ``J`` equal-length sequences, each from a cold start.

    ``inputs`` has shape ``(J, T, L)``; the result has shape ``(J, T, N)``.
    """
    u = _check_input(inputs, config)
    if u.ndim != 3:
        raise ReservoirError(f"expected a (J, T, L) batch, got shape {u.shape}")
    drive = config.gamma * (u @ weights.w_in.T)
    states = _kernels.leaky_run_batch(
        weights.w_res,
        np.ascontiguousarray(drive),
        float(config.alpha),
        float(config.rho),
        ACTIVATIONS[config.activation],
    )
    return _finish(states, u, config)
