import numpy as np


class ReadoutError(ValueError):
    pass


def indicator_matrix(labels, n_classes, off_value=0.0):
    """K x J class-membership targets: +1 on the member row, ``off_value`` elsewhere."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise ReadoutError("labels must be a 1-D array of class indices")
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise ReadoutError(f"labels must lie in [0, {n_classes})")
    y = np.full((n_classes, labels.size), float(off_value))
    y[labels, np.arange(labels.size)] = 1.0
    return y


def binary_targets(labels):
    """Single-row +/-1 targets for a two-class problem (class 0 -> +1)."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() > 1):
        raise ReadoutError("binary targets need labels in {0, 1}")
    return np.where(labels == 0, 1.0, -1.0)[None, :]


def decide_max(z):
    """Argmax over the last axis, lowest index on ties.

    A single score row is a signed two-class decision: ``z >= 0`` is class 0,
    ``z < 0`` class 1, the same as argmax over ``[z, -z]``.
    """
    z = np.asarray(z)
    if z.shape[-1] == 1:
        return np.where(z[..., 0] >= 0.0, 0, 1)
    return np.argmax(z, axis=-1)


def decide_min(z):
    return np.argmin(np.asarray(z), axis=-1)


def as_batch(states):
    """Promote a single ``(T, N)`` trajectory to a ``(1, T, N)`` batch."""
    states = np.asarray(states, dtype=np.float64)
    if states.ndim == 2:
        return states[None], True
    if states.ndim == 3:
        return states, False
    raise ReadoutError(f"expected (T, N) or (J, T, N) states, got shape {states.shape}")


def training_tensor(trajectories):
    """Stack per-pattern trajectories into a ``(J, T, N)`` array.

    Accepts an existing 3-D array or a sequence of ``(T, N)`` arrays, which
    must all share the same length.
    """
    if isinstance(trajectories, np.ndarray):
        if trajectories.ndim != 3:
            raise ReadoutError(f"expected (J, T, N) states, got {trajectories.shape}")
        out = np.asarray(trajectories, dtype=np.float64)
    else:
        seqs = [np.asarray(tr, dtype=np.float64) for tr in trajectories]
        if not seqs:
            raise ReadoutError("no training trajectories")
        if len({s.shape for s in seqs}) != 1:
            raise ReadoutError(
                "inconsistent trajectory lengths/widths: "
                f"{sorted({s.shape for s in seqs})}"
            )
        out = np.stack(seqs)
    if out.shape[1] < 1:
        raise ReadoutError("trajectories must have at least one time step")
    if not np.all(np.isfinite(out)):
        raise ReadoutError("training states contain NaN or Inf")
    return out


def check_targets(targets, n_patterns):
    y = np.asarray(targets, dtype=np.float64)
    if y.ndim != 2 or y.shape[1] != n_patterns:
        raise ReadoutError(
            f"targets must be K x {n_patterns}, got shape {y.shape}"
        )
    return y


def check_length(states, T):
    if states.shape[1] != T:
        raise ReadoutError(f"trajectory length {states.shape[1]} != model length {T}")
