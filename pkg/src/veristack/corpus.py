"""Loading, validation and export of labeled social-media post datasets.

The canonical on-disk shape is a headered TSV with columns (id, tweet,
label); CSV is accepted as an alternative. The label column is optional so
that unlabeled (hidden) test files are first-class.
"""

import csv
import io
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from .errors import FormatError, StateError, ValidationError

LABELS = ("fake", "real")
SPLIT_NAMES = ("train", "validation", "test", "merged", "derived")

TEXT_COLUMN = "tweet"
ID_COLUMN = "id"
LABEL_COLUMN = "label"


@dataclass(frozen=True)
class Record:
    """One post: unique id, raw UTF-8 text, optional label in {real, fake}."""

    id: str
    text: str
    label: str | None = None


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of records with split provenance."""

    records: tuple[Record, ...]
    split_name: str = "derived"
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.split_name not in SPLIT_NAMES:
            raise ValidationError(f"unknown split name {self.split_name!r}")
        seen: set[str] = set()
        labeled = 0
        for rec in self.records:
            if rec.id in seen:
                raise ValidationError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)
            if rec.label is not None:
                if rec.label not in LABELS:
                    raise ValidationError(
                        f"record {rec.id!r} has label {rec.label!r}, expected one of {LABELS}"
                    )
                labeled += 1
        if labeled not in (0, len(self.records)):
            raise ValidationError(
                f"{labeled} of {len(self.records)} records carry labels; "
                "expected all or none"
            )

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[Record]:
        return iter(self.records)

    @property
    def labeled(self) -> bool:
        return len(self.records) > 0 and self.records[0].label is not None

    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def texts(self) -> list[str]:
        return [r.text for r in self.records]

    def labels(self) -> list[str]:
        if not self.labeled:
            raise StateError("dataset is unlabeled")
        return [r.label for r in self.records]  # type: ignore[misc]

    def subset(self, indices: Sequence[int], split_name: str = "derived") -> "Dataset":
        recs = tuple(self.records[i] for i in indices)
        return Dataset(recs, split_name, dict(self.provenance))


@dataclass(frozen=True)
class LabelDistribution:
    counts: dict[str, int]
    fractions: dict[str, float]
    total: int


def _infer_format(path: str | Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("tsv", "csv"):
            raise FormatError(f"unsupported corpus format {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower()
    return "csv" if suffix == ".csv" else "tsv"


def _reader(fh: io.TextIOBase, fmt: str):
    if fmt == "csv":
        return csv.reader(fh)
    # TSV rows are split on raw tabs; embedded quotes stay literal.
    return csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)


def load_corpus(
    path: str | Path,
    fmt: str | None = None,
    split_name: str = "derived",
) -> Dataset:
    """Load a headered TSV/CSV corpus file into a Dataset.

    The header must name a `tweet` column; `id` and `label` are optional.
    Missing ids are synthesized as sequential integers (recorded in the
    dataset provenance). Labels are case-insensitive on read and stored
    lowercase.
    """
    fmt = _infer_format(path, fmt)
    path = Path(path)
    if not path.exists():
        raise FormatError(f"corpus file not found: {path}")

    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = _reader(fh, fmt)
        try:
            header = next(rows)
        except StopIteration:
            raise FormatError(f"{path}: empty file, expected a header row") from None
        header = [h.strip().lower() for h in header]
        if TEXT_COLUMN not in header:
            raise FormatError(f"{path}: missing required column {TEXT_COLUMN!r}")
        text_idx = header.index(TEXT_COLUMN)
        id_idx = header.index(ID_COLUMN) if ID_COLUMN in header else None
        label_idx = header.index(LABEL_COLUMN) if LABEL_COLUMN in header else None

        records: list[Record] = []
        seen_ids: set[str] = set()
        for row_no, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(
                    f"{path}: row {row_no} has {len(row)} fields, expected {len(header)}"
                )
            rec_id = row[id_idx].strip() if id_idx is not None else str(len(records) + 1)
            if rec_id in seen_ids:
                raise ValidationError(f"{path}: duplicate id {rec_id!r} at row {row_no}")
            seen_ids.add(rec_id)
            text = row[text_idx]
            if not text:
                warnings.warn(f"{path}: record {rec_id!r} has empty text", stacklevel=2)
            label: str | None = None
            if label_idx is not None:
                raw = row[label_idx].strip().lower()
                label = raw if raw else None
            records.append(Record(rec_id, text, label))

    provenance = {"source": str(path), "format": fmt, "synthesized_ids": id_idx is None}
    return Dataset(tuple(records), split_name, provenance)


def write_corpus(ds: Dataset, path: str | Path, fmt: str | None = None) -> None:
    """Serialize a Dataset back to TSV/CSV; load(write(ds)) round-trips exactly."""
    fmt = _infer_format(path, fmt)
    header = [ID_COLUMN, TEXT_COLUMN] + ([LABEL_COLUMN] if ds.labeled else [])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for rec in ds.records:
            writer.writerow([rec.id, rec.text] + ([rec.label] if ds.labeled else []))
        text_out = buf.getvalue()
    else:
        # Raw tab-joined lines, mirroring the QUOTE_NONE reader.
        lines = ["\t".join(header)]
        for rec in ds.records:
            for value in (rec.id, rec.text):
                if "\t" in value or "\n" in value or "\r" in value:
                    raise FormatError(
                        f"record {rec.id!r} contains a tab or newline; export it as csv"
                    )
            lines.append(
                "\t".join([rec.id, rec.text] + ([rec.label] if ds.labeled else []))
            )
        text_out = "\n".join(lines) + "\n"
    from .ioutil import atomic_write_text

    atomic_write_text(path, text_out)


def label_distribution(ds: Dataset) -> LabelDistribution:
    """Per-label counts and fractions; fractions sum to 1 over the dataset."""
    if not ds.labeled:
        raise StateError("label_distribution requires a labeled dataset")
    counts = {label: 0 for label in LABELS}
    for rec in ds.records:
        counts[rec.label] += 1  # type: ignore[index]
    total = len(ds)
    fractions = {label: counts[label] / total for label in LABELS}
    return LabelDistribution(counts, fractions, total)


def merge(a: Dataset, b: Dataset) -> Dataset:
    """Concatenate two datasets with disjoint id sets; a's records come first."""
    overlap = set(a.ids()) & set(b.ids())
    if overlap:
        sample = sorted(overlap)[:10]
        raise ValidationError(f"datasets share {len(overlap)} ids, e.g. {sample}")
    provenance = {"merged_from": [a.provenance.get("source"), b.provenance.get("source")]}
    return Dataset(a.records + b.records, "merged", provenance)
