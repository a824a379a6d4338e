"""Save and load a trained readout together with its reservoir.

File layout: the 8-byte magic ``b"ESNRDOUT"``, a little-endian uint16 format
version, then an uncompressed ``.npz`` archive. The archive holds the arrays
plus a ``header`` entry with JSON metadata (reservoir config, readout kind
and scalar parameters). Nothing is pickled.
"""

import io
import json
import zipfile
from dataclasses import asdict, dataclass

import numpy as np

from .readouts import EndpointReadout, GlobalReadout, LowRankModel, PointwiseReadout, SparseReadout
from .reservoir import ReservoirConfig, ReservoirWeights

MAGIC = b"ESNRDOUT"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SavedModel:
    readout: object
    weights: ReservoirWeights
    config: ReservoirConfig


def _readout_payload(readout):
    if isinstance(readout, PointwiseReadout):
        return {"kind": "pointwise", "lam": readout.lam}, {"weights": readout.weights}
    if isinstance(readout, EndpointReadout):
        return {"kind": "endpoint", "lam": readout.lam}, {"weight": readout.weight}
    if isinstance(readout, GlobalReadout):
        return {"kind": "global", "lam": readout.lam}, {"weight": readout.weight}
    if isinstance(readout, SparseReadout):
        meta = {"kind": "sparse", "lam": readout.lam, "shape": list(readout.shape), "norm": readout.norm}
        return meta, {"index": readout.index, "values": readout.values, "objective": readout.objective}
    if isinstance(readout, LowRankModel):
        meta = {
            "kind": "lowrank",
            "rank": readout.rank,
            "residual": readout.residual,
            "center": readout.center,
            "n_classes": readout.n_classes,
        }
        return meta, {f"basis_{k}": b for k, b in enumerate(readout.bases)}
    raise TypeError(f"cannot serialize readout of type {type(readout).__name__}")


def _build_readout(meta, arrays):
    kind = meta.get("kind")
    if kind == "pointwise":
        return PointwiseReadout(weights=arrays["weights"], lam=meta["lam"])
    if kind == "endpoint":
        return EndpointReadout(weight=arrays["weight"], lam=meta["lam"])
    if kind == "global":
        return GlobalReadout(weight=arrays["weight"], lam=meta["lam"])
    if kind == "sparse":
        return SparseReadout(
            shape=tuple(meta["shape"]),
            index=arrays["index"],
            values=arrays["values"],
            lam=meta["lam"],
            objective=arrays["objective"],
            norm=meta["norm"],
        )
    if kind == "lowrank":
        bases = tuple(arrays[f"basis_{k}"] for k in range(meta["n_classes"]))
        return LowRankModel(bases=bases, rank=meta["rank"], residual=meta["residual"], center=meta["center"])
    raise ModelFormatError(f"unknown readout kind {kind!r}")


def dumps_model(readout, weights, config):
    meta, arrays = _readout_payload(readout)
    header = {"readout": meta, "config": asdict(config)}
    buf = io.BytesIO()
    np.savez(
        buf,
        header=np.frombuffer(json.dumps(header, sort_keys=True).encode(), dtype=np.uint8),
        w_in=weights.w_in,
        w_res=weights.w_res,
        **{f"r_{k}": v for k, v in arrays.items()},
    )
    return MAGIC + FORMAT_VERSION.to_bytes(2, "little") + buf.getvalue()


def loads_model(blob):
    if len(blob) < len(MAGIC) + 2 or not blob.startswith(MAGIC):
        raise ModelFormatError("not a model file (bad magic prefix)")
    version = int.from_bytes(blob[len(MAGIC):len(MAGIC) + 2], "little")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version} (expected {FORMAT_VERSION})")
    try:
        with np.load(io.BytesIO(blob[len(MAGIC) + 2:]), allow_pickle=False) as npz:
            arrays = {k: npz[k] for k in npz.files}
        header = json.loads(arrays.pop("header").tobytes().decode())
        config = ReservoirConfig(**header["config"])
        weights = ReservoirWeights(w_in=arrays.pop("w_in"), w_res=arrays.pop("w_res"))
        readout = _build_readout(
            header["readout"], {k[2:]: v for k, v in arrays.items() if k.startswith("r_")}
        )
    except ModelFormatError:
        raise
    except (zipfile.BadZipFile, KeyError, ValueError, TypeError, OSError, EOFError) as exc:
        raise ModelFormatError(f"corrupt model file: {exc}") from exc
    return SavedModel(readout=readout, weights=weights, config=config)


def persist_model(path, readout, weights, config):
    with open(path, "wb") as fh:
        fh.write(dumps_model(readout, weights, config))


def load_model(path):
    with open(path, "rb") as fh:
        return loads_model(fh.read())
