"""veristack: fake-news text classification via stacked representations.

Base representations (hand-crafted statistics, LSA over word/char n-gram
TF-IDF, ingested sentence embeddings) feed SGD linear classifiers; two
meta-models (a 5-layer neural stacking network and linear stacking over
base outputs) combine them. Evaluation runs on a 75/18.75/6.25 TDT split
or 10-fold CV.
"""

__version__ = "0.1.0"

from .corpus import Dataset, Record, label_distribution, load_corpus, merge, write_corpus
from .errors import (
    DataError,
    FormatError,
    StateError,
    ValidationError,
    VeristackError,
)

__all__ = [
    "Dataset",
    "Record",
    "label_distribution",
    "load_corpus",
    "merge",
    "write_corpus",
    "VeristackError",
    "FormatError",
    "ValidationError",
    "DataError",
    "StateError",
    "__version__",
]
