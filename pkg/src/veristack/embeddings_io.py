"""Bit-exact file format for externally produced dense vectors.

Three files per set, sharing a path prefix:

    <prefix>.manifest.json   model_id, dim, count, dtype, preprocessing_id
    <prefix>.ids.txt         one id per line, in payload row order
    <prefix>.vectors.bin     raw little-endian row-major payload

The same format carries sentence embeddings (dim 768), external base-model
prediction columns (dim 1) and per-class score columns (dim 2).
"""

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Dataset
from .errors import DataError, FormatError, ValidationError
from .ioutil import atomic_write_bytes, atomic_write_json, atomic_write_text, read_json

_DTYPES = {"f32": np.dtype("<f4"), "f64": np.dtype("<f8")}


@dataclass(frozen=True)
class EmbeddingManifest:
    model_id: str
    dim: int
    count: int
    dtype: str  # "f32" | "f64"
    preprocessing_id: str

    def __post_init__(self) -> None:
        if self.dtype not in _DTYPES:
            raise FormatError(f"unsupported dtype {self.dtype!r}, expected f32 or f64")
        if self.dim < 1:
            raise FormatError(f"dim must be >= 1, got {self.dim}")
        if self.count < 0:
            raise FormatError(f"count must be >= 0, got {self.count}")


@dataclass
class EmbeddingSet:
    manifest: EmbeddingManifest
    ids: list[str]
    vectors: np.ndarray  # (count, dim), dtype per manifest

    def __post_init__(self) -> None:
        m = self.manifest
        if len(self.ids) != m.count:
            raise FormatError(f"{len(self.ids)} ids but manifest count is {m.count}")
        if self.vectors.shape != (m.count, m.dim):
            raise FormatError(
                f"vectors shape {self.vectors.shape} does not match manifest ({m.count}, {m.dim})"
            )
        if self.vectors.dtype != _DTYPES[m.dtype]:
            raise FormatError(
                f"vectors dtype {self.vectors.dtype} does not match manifest {m.dtype!r}"
            )
        if len(set(self.ids)) != len(self.ids):
            seen: set[str] = set()
            for i in self.ids:
                if i in seen:
                    raise ValidationError(f"duplicate id {i!r} in embedding set")
                seen.add(i)
        if self.vectors.size and not np.isfinite(self.vectors).all():
            bad = np.where(~np.isfinite(self.vectors).all(axis=1))[0][0]
            raise DataError(f"non-finite vector for id {self.ids[bad]!r}")


def _paths(prefix: str | Path) -> tuple[Path, Path, Path]:
    prefix = str(prefix)
    return (
        Path(prefix + ".manifest.json"),
        Path(prefix + ".ids.txt"),
        Path(prefix + ".vectors.bin"),
    )


def write_embeddings(es: EmbeddingSet, prefix: str | Path) -> None:
    """Persist the three-file format; read_embeddings round-trips bit-exactly."""
    manifest_path, ids_path, payload_path = _paths(prefix)
    m = es.manifest
    atomic_write_json(
        manifest_path,
        {
            "model_id": m.model_id,
            "dim": m.dim,
            "count": m.count,
            "dtype": m.dtype,
            "preprocessing_id": m.preprocessing_id,
        },
    )
    atomic_write_text(ids_path, "".join(i + "\n" for i in es.ids))
    atomic_write_bytes(payload_path, np.ascontiguousarray(es.vectors, _DTYPES[m.dtype]).tobytes())


def read_embeddings(prefix: str | Path) -> EmbeddingSet:
    """Load and fully validate an embedding set (shape, dtype, finiteness)."""
    manifest_path, ids_path, payload_path = _paths(prefix)
    for p in (manifest_path, ids_path, payload_path):
        if not p.exists():
            raise FormatError(f"missing embedding file: {p}")
    raw = read_json(manifest_path)
    try:
        manifest = EmbeddingManifest(
            model_id=raw["model_id"],
            dim=int(raw["dim"]),
            count=int(raw["count"]),
            dtype=raw["dtype"],
            preprocessing_id=raw["preprocessing_id"],
        )
    except KeyError as exc:
        raise FormatError(f"{manifest_path}: missing manifest field {exc}") from None

    ids = ids_path.read_text(encoding="utf-8").splitlines()
    payload = payload_path.read_bytes()
    dtype = _DTYPES[manifest.dtype]
    expected = manifest.count * manifest.dim * dtype.itemsize
    if len(payload) != expected:
        raise FormatError(
            f"{payload_path}: payload is {len(payload)} bytes, "
            f"manifest declares {expected} ({manifest.count} x {manifest.dim} {manifest.dtype})"
        )
    vectors = np.frombuffer(payload, dtype=dtype).reshape(manifest.count, manifest.dim).copy()
    return EmbeddingSet(manifest, ids, vectors)


def payload_checksum(prefix: str | Path) -> str:
    """SHA-256 of the raw payload, for the `embeddings validate` CLI verb."""
    _, _, payload_path = _paths(prefix)
    return hashlib.sha256(payload_path.read_bytes()).hexdigest()


def align(es: EmbeddingSet, ds: Dataset) -> np.ndarray:
    """Rows of `es` reordered to dataset order; every dataset id must be present."""
    index = {rec_id: row for row, rec_id in enumerate(es.ids)}
    missing = [rec.id for rec in ds.records if rec.id not in index]
    if missing:
        shown = missing[:10]
        raise ValidationError(
            f"{len(missing)} dataset ids missing from embedding set "
            f"{es.manifest.model_id!r}: {shown}"
        )
    rows = np.array([index[rec.id] for rec in ds.records], dtype=np.int64)
    return es.vectors[rows]
