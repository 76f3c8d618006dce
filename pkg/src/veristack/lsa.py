"""Latent semantic analysis over mixed word/char n-gram TF-IDF features.

The vocabulary takes the n best word 1-2-grams and char 1-3-grams (half
each), ranked by summed TF-IDF mass over the corpus. Documents are
weighted with raw count x smoothed IDF, L2-normalized per row, and
projected onto the top right-singular vectors found by a seeded
randomized range finder.
"""

import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import FormatError, StateError
from .ioutil import atomic_write_bytes, atomic_write_json, read_json

WORD_FAMILY = "word"
CHAR_FAMILY = "char"

# Feature-count and dimension grids swept when tuning the representation.
N_GRID = (500, 1250, 2500, 5000, 10000, 15000, 20000)
D_GRID = (64, 128, 256, 512, 768)

SVD_OVERSAMPLE = 10
SVD_POWER_ITERS = 2


@dataclass(frozen=True)
class LsaConfig:
    """Vocabulary size n (even, split half word / half char), target dim d.

    Setting either n-gram range to None disables that family and gives all
    n slots to the other one.
    """

    n: int = 2500
    d: int = 512
    word_ngram_range: tuple[int, int] | None = (1, 2)
    char_ngram_range: tuple[int, int] | None = (1, 3)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n <= 0 or self.n % 2 != 0:
            raise StateError(f"n must be a positive even integer, got {self.n}")
        if self.d < 1:
            raise StateError(f"d must be >= 1, got {self.d}")
        if self.word_ngram_range is None and self.char_ngram_range is None:
            raise StateError("at least one n-gram family must be enabled")


@dataclass
class LsaModel:
    """Fitted vocabulary, IDF weights and (optionally) the SVD projection."""

    config: LsaConfig
    vocabulary: tuple[tuple[str, str], ...]  # (family, gram), column order
    idf: np.ndarray  # shape (n,)
    basis: np.ndarray | None = None  # shape (n, d), orthonormal columns
    singular_values: np.ndarray | None = None  # shape (d,), non-increasing

    def __post_init__(self) -> None:
        self._index = {entry: col for col, entry in enumerate(self.vocabulary)}

    @property
    def n(self) -> int:
        return len(self.vocabulary)

    @property
    def d(self) -> int:
        return 0 if self.basis is None else self.basis.shape[1]

    def column(self, family: str, gram: str) -> int | None:
        return self._index.get((family, gram))


def word_ngrams(cleaned: str, ngram_range: tuple[int, int]) -> list[str]:
    """Word n-grams of the cleaned text, joined with single spaces."""
    tokens = cleaned.split()
    lo, hi = ngram_range
    grams: list[str] = []
    for size in range(lo, hi + 1):
        grams.extend(" ".join(tokens[i : i + size]) for i in range(len(tokens) - size + 1))
    return grams


def char_ngrams(cleaned: str, ngram_range: tuple[int, int]) -> list[str]:
    """Char n-grams over the full cleaned string, spaces included."""
    lo, hi = ngram_range
    grams: list[str] = []
    for size in range(lo, hi + 1):
        grams.extend(cleaned[i : i + size] for i in range(len(cleaned) - size + 1))
    return grams


def _family_grams(doc: str, family: str, cfg: LsaConfig) -> list[str]:
    if family == WORD_FAMILY:
        return word_ngrams(doc, cfg.word_ngram_range)  # type: ignore[arg-type]
    return char_ngrams(doc, cfg.char_ngram_range)  # type: ignore[arg-type]


def _active_families(cfg: LsaConfig) -> list[str]:
    families = []
    if cfg.word_ngram_range is not None:
        families.append(WORD_FAMILY)
    if cfg.char_ngram_range is not None:
        families.append(CHAR_FAMILY)
    return families


def smoothed_idf(doc_freq: int, n_docs: int) -> float:
    """idf(t) = ln((1+N)/(1+df)) + 1; strictly positive."""
    return float(np.log((1.0 + n_docs) / (1.0 + doc_freq)) + 1.0)


def fit_vocabulary(docs: list[str], cfg: LsaConfig) -> LsaModel:
    """Select the top n/2 n-grams per family by summed corpus TF-IDF mass.

    Ties break lexicographically. If a family offers fewer distinct
    n-grams than requested, the vocabulary shrinks with a warning.
    Returns a model without a projection basis; see fit_svd / fit_lsa.
    """
    if len(docs) < 2:
        raise StateError(f"need at least 2 documents to fit a vocabulary, got {len(docs)}")
    n_docs = len(docs)
    families = _active_families(cfg)
    per_family = cfg.n // len(families)

    vocabulary: list[tuple[str, str]] = []
    idf_values: list[float] = []
    for family in families:
        tf_total: Counter[str] = Counter()
        df: Counter[str] = Counter()
        for doc in docs:
            grams = _family_grams(doc, family, cfg)
            tf_total.update(grams)
            df.update(set(grams))
        if len(df) < per_family:
            warnings.warn(
                f"{family} family has only {len(df)} distinct n-grams, "
                f"requested {per_family}; shrinking vocabulary",
                stacklevel=2,
            )
        idf_by_gram = {g: smoothed_idf(df[g], n_docs) for g in df}
        ranked = sorted(df, key=lambda g: (-tf_total[g] * idf_by_gram[g], g))
        for gram in ranked[:per_family]:
            vocabulary.append((family, gram))
            idf_values.append(idf_by_gram[gram])

    return LsaModel(cfg, tuple(vocabulary), np.array(idf_values, dtype=np.float64))


def tfidf_transform(model: LsaModel, docs: list[str]) -> sp.csr_matrix:
    """Sparse N x n matrix: raw count x IDF, rows L2-normalized.

    Out-of-vocabulary n-grams are ignored; documents with no in-vocabulary
    n-grams stay zero rows.
    """
    cfg = model.config
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        row: dict[int, float] = {}
        for family in _active_families(cfg):
            for gram, count in Counter(_family_grams(doc, family, cfg)).items():
                col = model.column(family, gram)
                if col is not None:
                    row[col] = count * model.idf[col]
        cols = sorted(row)
        values = np.array([row[c] for c in cols], dtype=np.float64)
        norm = np.linalg.norm(values)
        if norm > 0:
            values /= norm
        indices.extend(cols)
        data.extend(values)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(docs), model.n),
    )


def fit_svd(
    X: sp.spmatrix | np.ndarray,
    d: int,
    seed: int,
    oversample: int = SVD_OVERSAMPLE,
    power_iters: int = SVD_POWER_ITERS,
) -> tuple[np.ndarray, np.ndarray]:
    """Randomized truncated SVD: top-d right singular vectors and values.

    Gaussian range finder with `oversample` extra probe directions and
    `power_iters` subspace iterations, re-orthonormalized via QR at every
    step for numerical stability. Deterministic for a fixed seed. Returns
    (basis, singular_values) with basis of shape (n, d), orthonormal
    columns, and singular values in non-increasing order.
    """
    n_rows, n_cols = X.shape
    if d > min(n_rows, n_cols):
        raise StateError(f"d={d} exceeds min(matrix shape)={min(n_rows, n_cols)}")
    rng = np.random.default_rng(seed)
    probes = rng.standard_normal((n_cols, d + oversample))
    Q, _ = np.linalg.qr(X @ probes)
    for _ in range(power_iters):
        W, _ = np.linalg.qr(X.T @ Q)
        Q, _ = np.linalg.qr(X @ W)
    B = (X.T @ Q).T  # (d+oversample) x n_cols, dense
    _, s, vt = np.linalg.svd(B, full_matrices=False)
    return np.ascontiguousarray(vt[:d].T), np.ascontiguousarray(s[:d])


def fit_lsa(docs: list[str], cfg: LsaConfig) -> LsaModel:
    """Full fit: vocabulary + IDF + TF-IDF + randomized SVD projection."""
    model = fit_vocabulary(docs, cfg)
    d = cfg.d
    limit = min(len(docs), model.n)
    if d > limit:
        warnings.warn(f"d={d} exceeds min(N, n)={limit}; shrinking to {limit}", stacklevel=2)
        d = limit
    X = tfidf_transform(model, docs)
    basis, singular_values = fit_svd(X, d, cfg.seed)
    model.basis = basis
    model.singular_values = singular_values
    return model


def project(model: LsaModel, X: sp.spmatrix | np.ndarray) -> np.ndarray:
    """Dense N x d projection X @ basis."""
    if model.basis is None:
        raise StateError("model has no SVD basis; run fit_svd/fit_lsa first")
    if X.shape[1] != model.n:
        raise StateError(f"X has {X.shape[1]} columns, model expects {model.n}")
    out = X @ model.basis
    return np.asarray(out)


def transform_docs(model: LsaModel, docs: list[str]) -> np.ndarray:
    """Convenience: TF-IDF then projection for a batch of cleaned texts."""
    return project(model, tfidf_transform(model, docs))


def grid_candidates() -> list[tuple[int, int]]:
    """All 35 (n, d) pairs of the tuning grid, n-major order."""
    return [(n, d) for n in N_GRID for d in D_GRID]


# Persistence: JSON manifest + one little-endian float64 payload holding
# idf, basis (row-major) and singular values back to back.

def save_lsa(model: LsaModel, prefix: str | Path) -> None:
    if model.basis is None or model.singular_values is None:
        raise StateError("refusing to persist an LSA model without its SVD basis")
    prefix = Path(prefix)
    cfg = model.config
    manifest = {
        "kind": "lsa",
        "config": {
            "n": cfg.n,
            "d": cfg.d,
            "word_ngram_range": list(cfg.word_ngram_range) if cfg.word_ngram_range else None,
            "char_ngram_range": list(cfg.char_ngram_range) if cfg.char_ngram_range else None,
            "seed": cfg.seed,
        },
        "vocabulary": [[family, gram] for family, gram in model.vocabulary],
        "dtype": "f64",
        "byte_order": "little",
        "arrays": {
            "idf": [model.n],
            "basis": [model.n, int(model.basis.shape[1])],
            "singular_values": [int(model.singular_values.shape[0])],
        },
    }
    payload = b"".join(
        np.ascontiguousarray(a, dtype="<f8").tobytes()
        for a in (model.idf, model.basis, model.singular_values)
    )
    atomic_write_json(Path(str(prefix) + ".manifest.json"), manifest)
    atomic_write_bytes(Path(str(prefix) + ".arrays.bin"), payload)


def load_lsa(prefix: str | Path) -> LsaModel:
    manifest = read_json(Path(str(prefix) + ".manifest.json"))
    if manifest.get("kind") != "lsa":
        raise FormatError(f"{prefix}: manifest kind is {manifest.get('kind')!r}, expected 'lsa'")
    cfg_raw = manifest["config"]
    cfg = LsaConfig(
        n=cfg_raw["n"],
        d=cfg_raw["d"],
        word_ngram_range=tuple(cfg_raw["word_ngram_range"]) if cfg_raw["word_ngram_range"] else None,
        char_ngram_range=tuple(cfg_raw["char_ngram_range"]) if cfg_raw["char_ngram_range"] else None,
        seed=cfg_raw["seed"],
    )
    vocabulary = tuple((family, gram) for family, gram in manifest["vocabulary"])
    raw = Path(str(prefix) + ".arrays.bin").read_bytes()
    shapes = manifest["arrays"]
    sizes = {name: int(np.prod(shape)) for name, shape in shapes.items()}
    expected = 8 * sum(sizes.values())
    if len(raw) != expected:
        raise FormatError(f"{prefix}: payload is {len(raw)} bytes, manifest declares {expected}")
    flat = np.frombuffer(raw, dtype="<f8")
    offset = 0
    arrays = {}
    for name in ("idf", "basis", "singular_values"):
        size = sizes[name]
        arrays[name] = flat[offset : offset + size].reshape(shapes[name]).copy()
        offset += size
    return LsaModel(cfg, vocabulary, arrays["idf"], arrays["basis"], arrays["singular_values"])
