"""Datasets: the synthetic sine/square stream and UCI Japanese Vowels.

Class labels are 0-based throughout the library (sine = 0, square = 1;
speakers 0..8). Files written for people (CSV exports) use 1-based numbers.
"""

import csv
import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

__all__ = [
    "DataError",
    "LabeledSequenceSet",
    "SineSquareConfig",
    "NoiseSpec",
    "gen_sine_square",
    "sine_segment",
    "square_segment",
    "load_japanese_vowels",
    "parse_blocks",
    "read_sizes",
    "resample_to_length",
    "append_bias_channels",
    "add_noise",
    "write_sine_square_csv",
    "ts_to_blocks",
    "content_digest",
    "JV_N_FEATURES",
    "JV_TRAIN_SIZES",
]

JV_N_FEATURES = 12
JV_N_SPEAKERS = 9
JV_TRAIN_SIZES = (30,) * JV_N_SPEAKERS


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledSequenceSet:
    sequences: tuple  # J arrays of shape (T_j, L)
    labels: np.ndarray  # (J,) int, 0-based
    n_classes: int
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        seqs = tuple(np.array(s, dtype=np.float64, ndmin=2) for s in self.sequences)
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (len(seqs),):
            raise DataError(f"{len(seqs)} sequences but labels of shape {labels.shape}")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            raise DataError(f"labels outside [0, {self.n_classes})")
        if len({s.shape[1] for s in seqs}) > 1:
            raise DataError("sequences disagree on the number of channels")
        for j, s in enumerate(seqs):
            if not np.all(np.isfinite(s)):
                raise DataError(f"sequence {j} contains NaN or Inf")
        object.__setattr__(self, "sequences", seqs)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.sequences)

    @property
    def n_inputs(self):
        return self.sequences[0].shape[1] if self.sequences else 0

    @property
    def lengths(self):
        return np.array([s.shape[0] for s in self.sequences])

    def as_array(self):
        """``(J, T, L)`` array; all sequences must share one length."""
        if len(set(self.lengths.tolist())) != 1:
            raise DataError("sequences have different lengths; resample first")
        return np.stack(self.sequences)

    def stream(self):
        """All sequences concatenated in order, shape ``(sum T_j, L)``."""
        return np.concatenate(self.sequences, axis=0)


@dataclass(frozen=True)
class SineSquareConfig:
    period: int = 10
    n_segments: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.period < 4 or self.period % 2:
            raise DataError(f"period must be even and >= 4, got {self.period}")
        if self.n_segments < 1:
            raise DataError("n_segments must be >= 1")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive N(0, sigma) noise; ``channels=None`` means every channel."""

    sigma: float
    seed: int = 0
    channels: tuple = None

    def __post_init__(self):
        if not self.sigma >= 0:
            raise DataError(f"sigma must be nonnegative, got {self.sigma}")


def sine_segment(period):
    t = np.arange(1, period + 1)
    return np.sin(2.0 * np.pi * t / period)


def square_segment(period):
    t = np.arange(1, period + 1)
    return np.where(t <= period // 2, 1.0, -1.0)


def gen_sine_square(config):
    """Random sequence of one-period sine (class 0) / square (class 1) segments.

    Segments are meant to be fed to the reservoir back to back as one stream
    (see :meth:`LabeledSequenceSet.stream`).
    """
    rng = np.random.default_rng(config.seed)
    labels = rng.integers(0, 2, size=config.n_segments)
    shapes = (sine_segment(config.period), square_segment(config.period))
    seqs = tuple(shapes[c][:, None] for c in labels)
    return LabeledSequenceSet(
        seqs, labels, 2, name="sine_square", meta={"period": config.period}
    )


def write_sine_square_csv(dataset, path):
    """CSV with columns ``segment_id,t,value,class`` (1-based ids, t and class)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["segment_id", "t", "value", "class"])
        for j, (seq, lab) in enumerate(zip(dataset.sequences, dataset.labels), start=1):
            for t, v in enumerate(seq[:, 0], start=1):
                w.writerow([j, t, repr(float(v)), int(lab) + 1])


def parse_blocks(path, n_fields=JV_N_FEATURES):
    """Read UCI Japanese-vowels style blocks: rows of ``n_fields`` numbers,
    blocks separated by blank lines."""
    blocks, rows = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                if rows:
                    blocks.append(np.array(rows))
                    rows = []
                continue
            if len(parts) != n_fields:
                raise DataError(
                    f"{path}:{lineno}: expected {n_fields} fields, found {len(parts)}"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    if rows:
        blocks.append(np.array(rows))
    return blocks


def read_sizes(path):
    """Per-speaker block counts from a ``size_ae.*`` file."""
    try:
        counts = [int(v) for v in Path(path).read_text().split()]
    except ValueError as exc:
        raise DataError(f"{path}: malformed size file ({exc})") from None
    if len(counts) != JV_N_SPEAKERS or min(counts) < 1:
        raise DataError(f"{path}: expected {JV_N_SPEAKERS} positive counts, got {counts}")
    return tuple(counts)


def _labelled(blocks, counts, path, name):
    if len(blocks) != sum(counts):
        raise DataError(
            f"{path}: found {len(blocks)} blocks but the size counts sum to {sum(counts)}"
        )
    labels = np.repeat(np.arange(len(counts)), counts)
    return LabeledSequenceSet(tuple(blocks), labels, len(counts), name=name)


def load_japanese_vowels(train_path, test_path, test_sizes_path=None, train_sizes_path=None):
    """Load ``ae.train`` / ``ae.test``.

    Blocks are assigned to speakers in file order. Training uses the dataset's
    30-per-speaker layout (or ``size_ae.train`` when it sits next to the file);
    test counts must come from ``size_ae.test``, which is looked up next to
    ``test_path`` when not given explicitly.
    """
    train_path, test_path = Path(train_path), Path(test_path)
    if test_sizes_path is None:
        test_sizes_path = test_path.with_name("size_ae.test")
    if not Path(test_sizes_path).exists():
        raise DataError(
            f"speaker counts file {test_sizes_path} not found; test labels cannot be assigned"
        )
    if train_sizes_path is None and train_path.with_name("size_ae.train").exists():
        train_sizes_path = train_path.with_name("size_ae.train")
    train_counts = read_sizes(train_sizes_path) if train_sizes_path else JV_TRAIN_SIZES
    train = _labelled(parse_blocks(train_path), train_counts, train_path, "jv_train")
    test = _labelled(parse_blocks(test_path), read_sizes(test_sizes_path), test_path, "jv_test")
    return train, test


def _resample(seq, length):
    m = seq.shape[0]
    if m == 1:
        return np.repeat(seq, length, axis=0)
    if m == length:
        return seq.copy()
    src = np.arange(m, dtype=np.float64)
    dst = np.linspace(0.0, m - 1.0, length)
    return np.stack([np.interp(dst, src, seq[:, c]) for c in range(seq.shape[1])], axis=1)


def resample_to_length(dataset, length):
    """Linearly interpolate every sequence onto ``length`` equispaced points
    spanning its own duration (endpoints preserved)."""
    if length < 2:
        raise DataError(f"target length must be >= 2, got {length}")
    seqs = tuple(_resample(s, length) for s in dataset.sequences)
    return replace(dataset, sequences=seqs)


def append_bias_channels(dataset, values):
    values = [float(v) for v in values]
    if not values:
        return dataset
    seqs = tuple(
        np.hstack([s, np.broadcast_to(values, (s.shape[0], len(values)))])
        for s in dataset.sequences
    )
    return replace(dataset, sequences=seqs)


def add_noise(dataset, spec):
    """Add independent N(0, sigma) samples to the selected channels.

    Draws are taken sequence by sequence in order, full ``(T_j, L)`` blocks
    at a time, so the same seed gives the same perturbation whatever the mask.
    """
    if spec.sigma == 0:
        return replace(dataset, sequences=tuple(s.copy() for s in dataset.sequences))
    rng = np.random.default_rng(spec.seed)
    L = dataset.n_inputs
    mask = np.zeros(L, dtype=bool)
    if spec.channels is None:
        mask[:] = True
    else:
        mask[list(spec.channels)] = True
    seqs = []
    for s in dataset.sequences:
        eps = rng.normal(0.0, spec.sigma, size=s.shape)
        seqs.append(s + eps * mask)
    return replace(dataset, sequences=tuple(seqs))


def ts_to_blocks(ts_path, blocks_path, sizes_path=None):
    """Convert a UEA/sktime ``JapaneseVowels_*.ts`` file to the UCI block layout.

    Writes one 12-value row per frame, a blank line after each utterance and,
    if ``sizes_path`` is given, the per-speaker counts. Speakers must appear
    in contiguous runs in label order, as they do in the published files.
    """
    blocks, labels = [], []
    in_data = False
    with open(ts_path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("@"):
                in_data = line.lower().startswith("@data")
                continue
            if not in_data:
                continue
            parts = line.split(":")
            if len(parts) != JV_N_FEATURES + 1:
                raise DataError(f"{ts_path}:{lineno}: expected 12 dimensions and a label")
            try:
                dims = [[float(v) for v in p.split(",")] for p in parts[:-1]]
                label = int(parts[-1])
            except ValueError as exc:
                raise DataError(f"{ts_path}:{lineno}: {exc}") from None
            if len({len(d) for d in dims}) != 1:
                raise DataError(f"{ts_path}:{lineno}: dimensions differ in length")
            blocks.append(np.array(dims).T)
            labels.append(label)
    if labels != sorted(labels):
        raise DataError(f"{ts_path}: speakers are not in contiguous label order")
    with open(blocks_path, "w") as fh:
        for b in blocks:
            for row in b:
                fh.write(" ".join(f"{v:.6f}" for v in row) + " \n")
            fh.write("\n")
    counts = [labels.count(k) for k in range(1, JV_N_SPEAKERS + 1)]
    if sizes_path is not None:
        Path(sizes_path).write_text(" ".join(str(c) for c in counts) + "\n")
    return counts


def content_digest(dataset):
    """SHA-256 over labels, block lengths and values (float64, little endian).

    Independent of the text formatting of the source file, so the same data
    from different mirrors hashes identically.
    """
    h = hashlib.sha256()
    h.update(np.asarray(dataset.labels, dtype="<i8").tobytes())
    h.update(np.asarray(dataset.lengths, dtype="<i8").tobytes())
    for s in dataset.sequences:
        h.update(np.ascontiguousarray(s, dtype="<f8").tobytes())
    return h.hexdigest()
