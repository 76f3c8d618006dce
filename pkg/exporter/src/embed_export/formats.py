"""Corpus reading and embedding-file writing.

The corpus side accepts the headered TSV/CSV shape (columns id, tweet,
optional label; ids synthesized when the column is absent). The output
side writes the three-file embedding format:

    <prefix>.manifest.json   model_id, dim, count, dtype, preprocessing_id
    <prefix>.ids.txt         one id per line, corpus order
    <prefix>.vectors.bin     raw little-endian row-major payload

Writes are atomic (temp file + rename) and the payload is always f32.
"""

import csv
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class CorpusRow:
    id: str
    text: str


def read_corpus(path: str | Path, fmt: str | None = None) -> list[CorpusRow]:
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "tsv"
    with open(path, "r", encoding="utf-8", newline="") as fh:
        if fmt == "csv":
            rows = csv.reader(fh)
        else:
            rows = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        try:
            header = [h.strip().lower() for h in next(rows)]
        except StopIteration:
            raise ValueError(f"{path}: empty corpus file") from None
        if "tweet" not in header:
            raise ValueError(f"{path}: missing required column 'tweet'")
        text_idx = header.index("tweet")
        id_idx = header.index("id") if "id" in header else None
        out: list[CorpusRow] = []
        seen: set[str] = set()
        for row_no, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}: row {row_no} has {len(row)} fields, "
                                 f"expected {len(header)}")
            rec_id = row[id_idx].strip() if id_idx is not None else str(len(out) + 1)
            if rec_id in seen:
                raise ValueError(f"{path}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            out.append(CorpusRow(rec_id, row[text_idx]))
    return out


def _atomic_write(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_embedding_files(
    prefix: str | Path,
    model_id: str,
    preprocessing_id: str,
    ids: list[str],
    vectors: np.ndarray,
) -> None:
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2 or vectors.shape[0] != len(ids):
        raise ValueError(f"vectors shape {vectors.shape} does not match {len(ids)} ids")
    if vectors.size and not np.isfinite(vectors).all():
        raise ValueError("refusing to write non-finite vectors")
    manifest = {
        "model_id": model_id,
        "dim": int(vectors.shape[1]),
        "count": int(vectors.shape[0]),
        "dtype": "f32",
        "preprocessing_id": preprocessing_id,
    }
    prefix = str(prefix)
    _atomic_write(Path(prefix + ".manifest.json"),
                  (json.dumps(manifest, indent=2) + "\n").encode("utf-8"))
    _atomic_write(Path(prefix + ".ids.txt"),
                  "".join(i + "\n" for i in ids).encode("utf-8"))
    _atomic_write(Path(prefix + ".vectors.bin"), vectors.tobytes())
