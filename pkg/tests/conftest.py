import numpy as np
import pytest

from veristack.corpus import Dataset, Record


def make_dataset(rows, split_name="derived"):
    """rows: iterable of (id, text, label-or-None)."""
    return Dataset(tuple(Record(str(i), t, lab) for i, t, lab in rows), split_name)


@pytest.fixture
def tiny_labeled():
    return make_dataset(
        [
            (1, "a post", "real"),
            (2, "b post", "fake"),
            (3, "c post", "real"),
            (4, "d post", "fake"),
        ]
    )


@pytest.fixture
def tiny_corpus_tsv(tmp_path):
    path = tmp_path / "tiny.tsv"
    path.write_text(
        "id\ttweet\tlabel\n"
        "1\ta post\treal\n"
        "2\tb post\tfake\n",
        encoding="utf-8",
    )
    return path


def synthetic_corpus(n, seed=0, real_fraction=0.52):
    """Labeled corpus whose text carries a class signal.

    Real posts draw from a reporting-style word pool, fake posts from a
    rumor-style pool, with shared filler words either way.
    """
    rng = np.random.default_rng(seed)
    real_pool = ["cases", "deaths", "tests", "confirmed", "reported", "total", "state", "health"]
    fake_pool = ["cure", "video", "vaccine", "hoax", "secret", "miracle", "exposed", "banned"]
    filler = ["covid", "people", "news", "today", "virus", "world", "update", "says"]
    rows = []
    n_real = round(n * real_fraction)
    for i in range(n):
        label = "real" if i < n_real else "fake"
        pool = real_pool if label == "real" else fake_pool
        words = list(rng.choice(pool, size=6)) + list(rng.choice(filler, size=4))
        rng.shuffle(words)
        rows.append((i + 1, " ".join(words), label))
    return make_dataset(rows)
