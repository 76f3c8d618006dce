"""Experiment harness: TDT split, stratified k-fold CV, grid search and
the per-class variance ranking of word features.

Both splitters are seeded and deterministic. Subset sizes follow the
largest-remainder rule so they always land within one record of the exact
fractions, while per-class allocations keep every subset's label balance
within a record of the parent's.
"""

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .corpus import Dataset
from .errors import StateError, ValidationError
from .ioutil import atomic_write_json
from .lsa import smoothed_idf
from .metrics import f1_score
from .preprocess import DEFAULT_CLEAN, CleanConfig, clean_text

TDT_FRACTIONS = (0.75, 0.1875, 0.0625)


@dataclass(frozen=True)
class TdtSplit:
    train: Dataset
    dev: Dataset
    test: Dataset
    seed: int
    stratified: bool


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray  # record index -> fold id
    seed: int

    def fold_indices(self, fold: int) -> np.ndarray:
        return np.where(self.assignments == fold)[0]

    def splits(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield (train_indices, eval_indices) per fold, in fold order."""
        for fold in range(self.k):
            eval_idx = self.fold_indices(fold)
            train_idx = np.where(self.assignments != fold)[0]
            yield train_idx, eval_idx


def _largest_remainder(total: int, fractions: Sequence[float]) -> list[int]:
    """Integer apportionment of `total` over `fractions`, summing exactly."""
    ideal = [total * f for f in fractions]
    counts = [int(np.floor(v)) for v in ideal]
    leftover = total - sum(counts)
    order = sorted(range(len(fractions)), key=lambda j: -(ideal[j] - counts[j]))
    for j in order[:leftover]:
        counts[j] += 1
    return counts


def _grouped_indices(ds: Dataset, stratified: bool) -> list[list[int]]:
    if not stratified:
        return [list(range(len(ds)))]
    by_label: dict[str, list[int]] = {}
    for i, rec in enumerate(ds.records):
        by_label.setdefault(rec.label, []).append(i)  # type: ignore[arg-type]
    return [by_label[lab] for lab in sorted(by_label)]


def tdt_split(ds: Dataset, seed: int, stratified: bool = True) -> TdtSplit:
    """Shuffle (per class when stratified) and cut at 75% / 18.75% / 6.25%."""
    if not ds.labeled:
        raise StateError("tdt_split requires a labeled dataset")
    if len(ds) < 16:
        raise StateError(f"dataset too small to split at 6.25%: {len(ds)} records")
    rng = np.random.default_rng(seed)
    targets = _largest_remainder(len(ds), TDT_FRACTIONS)
    groups = _grouped_indices(ds, stratified)

    buckets: list[list[int]] = [[], [], []]
    remaining_target = list(targets)
    remaining_total = len(ds)
    for group in groups:
        order = [group[j] for j in rng.permutation(len(group))]
        # Apportion this class against what is still needed overall, so
        # global subset sizes come out exact.
        fracs = [t / remaining_total for t in remaining_target]
        take = _largest_remainder(len(order), fracs)
        start = 0
        for j in range(3):
            buckets[j].extend(order[start : start + take[j]])
            start += take[j]
            remaining_target[j] -= take[j]
        remaining_total -= len(order)

    train = ds.subset(buckets[0], "train")
    dev = ds.subset(buckets[1], "validation")
    test = ds.subset(buckets[2], "test")
    return TdtSplit(train, dev, test, seed, stratified)


def kfold(ds: Dataset, k: int = 10, seed: int = 0, stratified: bool = True) -> FoldPlan:
    """Seeded (stratified) folds; sizes differ by at most one record."""
    if k < 2:
        raise StateError(f"k must be >= 2, got {k}")
    if k > len(ds):
        raise StateError(f"k={k} exceeds dataset size {len(ds)}")
    if stratified and not ds.labeled:
        raise StateError("stratified kfold requires labels")
    rng = np.random.default_rng(seed)
    assignments = np.empty(len(ds), dtype=np.int64)
    position = 0
    for group in _grouped_indices(ds, stratified):
        order = [group[j] for j in rng.permutation(len(group))]
        # Dealing round-robin with a running offset keeps both global and
        # per-class fold sizes within one of each other.
        for idx in order:
            assignments[idx] = position % k
            position += 1
    return FoldPlan(k, assignments, seed)


@dataclass
class GridRunResult:
    position: int
    config: dict
    score: float | None
    fold_scores: list[float] = field(default_factory=list)
    error: str | None = None
    seconds: float = 0.0


@dataclass
class GridSearchResult:
    results: list[GridRunResult]  # ranked: best score first, failures last
    protocol: str
    metric: str
    seed: int

    @property
    def best(self) -> GridRunResult:
        ranked = [r for r in self.results if r.error is None]
        if not ranked:
            raise StateError("every grid configuration failed")
        return ranked[0]

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "metric": self.metric,
            "seed": self.seed,
            "runs": [
                {
                    "position": r.position,
                    "config": r.config,
                    "score": r.score,
                    "fold_scores": r.fold_scores,
                    "error": r.error,
                    "seconds": r.seconds,
                }
                for r in self.results
            ],
        }


def grid_search(
    make_model: Callable[[dict], object],
    grid: Sequence[dict],
    protocol: str,
    dataset: Dataset,
    metric: str = "weighted",
    seed: int = 0,
    k: int = 10,
    out_path=None,
) -> GridSearchResult:
    """Evaluate every config under `protocol` and rank by metric.

    `make_model(config)` must return an object with fit(Dataset) and
    predict(Dataset) -> labels. Protocol "tdt" trains on the train cut and
    scores the dev cut; "cv10" averages the metric over k seeded folds.
    A failing configuration is recorded with its error and skipped in the
    ranking; it never aborts the sweep.
    """
    if protocol not in ("tdt", "cv10"):
        raise StateError(f"unknown protocol {protocol!r}")
    if not grid:
        raise ValidationError("empty grid")

    results: list[GridRunResult] = []
    split = tdt_split(dataset, seed) if protocol == "tdt" else None
    plan = kfold(dataset, k=k, seed=seed) if protocol == "cv10" else None

    for position, config in enumerate(grid):
        run = GridRunResult(position=position, config=dict(config), score=None)
        started = time.perf_counter()
        try:
            if protocol == "tdt":
                model = make_model(config)
                model.fit(split.train)
                predictions = model.predict(split.dev)
                run.score = f1_score(split.dev.labels(), predictions, metric)
            else:
                fold_scores = []
                for train_idx, eval_idx in plan.splits():
                    model = make_model(config)
                    model.fit(dataset.subset(train_idx))
                    eval_ds = dataset.subset(eval_idx)
                    predictions = model.predict(eval_ds)
                    fold_scores.append(f1_score(eval_ds.labels(), predictions, metric))
                run.fold_scores = fold_scores
                run.score = float(np.mean(fold_scores))
        except Exception as exc:  # noqa: BLE001 - isolate per-config failures
            run.error = f"{type(exc).__name__}: {exc}"
        run.seconds = time.perf_counter() - started
        results.append(run)

    ranked = sorted(
        results,
        key=lambda r: (r.error is not None, -(r.score if r.score is not None else 0.0), r.position),
    )
    outcome = GridSearchResult(ranked, protocol, metric, seed)
    if out_path is not None:
        atomic_write_json(out_path, outcome.to_json())
    return outcome


def class_variance_ranking(
    ds: Dataset,
    top_k: int = 8,
    clean_cfg: CleanConfig = DEFAULT_CLEAN,
    max_vocabulary: int = 10000,
    use_tfidf: bool = True,
) -> dict[str, list[str]]:
    """Per-class word lists ranked by feature variance within the class.

    Word unigrams over the cleaned text, capped at the `max_vocabulary`
    most document-frequent words (ties lexicographic), weighted with
    TF-IDF (raw counts when use_tfidf=False), rows L2-normalized in TF-IDF
    mode. Variance is the population variance over the class's rows;
    ranking ties break lexicographically.
    """
    if not ds.labeled:
        raise StateError("class_variance_ranking requires labels")
    cleaned = [clean_text(t, clean_cfg) for t in ds.texts()]
    df: Counter[str] = Counter()
    docs_tokens = []
    for text in cleaned:
        tokens = text.split()
        docs_tokens.append(tokens)
        df.update(set(tokens))
    vocab = sorted(df, key=lambda w: (-df[w], w))[:max_vocabulary]
    col = {w: j for j, w in enumerate(vocab)}
    n_docs = len(ds)
    idf = np.array([smoothed_idf(df[w], n_docs) for w in vocab]) if use_tfidf else None

    X = np.zeros((n_docs, len(vocab)))
    for i, tokens in enumerate(docs_tokens):
        for w, count in Counter(tokens).items():
            j = col.get(w)
            if j is not None:
                X[i, j] = count
    if use_tfidf:
        X *= idf
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        X /= norms

    labels = np.array(ds.labels())
    ranking: dict[str, list[str]] = {}
    for label in sorted(set(labels)):
        rows = X[labels == label]
        if rows.shape[0] == 0:
            raise StateError(f"class {label!r} has no records")
        variances = rows.var(axis=0)
        order = sorted(range(len(vocab)), key=lambda j: (-variances[j], vocab[j]))
        ranking[label] = [vocab[j] for j in order[:top_k]]
    return ranking
