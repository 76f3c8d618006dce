"""Text cleaning applied before encoding.

Deliberately re-implemented against the shared contract instead of
importing the classification toolkit, so the exporter stays standalone:
lowercase -> drop '#'-initial tokens -> strip punctuation -> collapse
whitespace -> drop stopwords. The bundled 179-entry English stopword list
is byte-identical to the one the toolkit ships.
"""

import string
import unicodedata
from dataclasses import dataclass
from importlib import resources

_ASCII_PUNCT = frozenset(string.punctuation)

DEFAULT_STOPWORD_LIST = "english-179"


def load_stopwords(list_id: str = DEFAULT_STOPWORD_LIST) -> frozenset[str]:
    name = f"data/stopwords_{list_id.replace('-', '_')}.txt"
    try:
        text = resources.files("embed_export").joinpath(name).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ValueError(f"unknown stopword list {list_id!r}") from None
    return frozenset(w for w in text.split("\n") if w)


@dataclass(frozen=True)
class CleanConfig:
    lowercase: bool = True
    strip_hashtags: bool = True
    strip_punctuation: bool = True
    remove_stopwords: bool = True
    stopword_list_id: str = DEFAULT_STOPWORD_LIST

    @property
    def preprocessing_id(self) -> str:
        """Stable tag recorded in every manifest this exporter writes."""
        steps = []
        if self.lowercase:
            steps.append("lowercase")
        if self.strip_hashtags:
            steps.append("hashtags")
        if self.strip_punctuation:
            steps.append("punctuation")
        if self.remove_stopwords:
            steps.append(f"stopwords:{self.stopword_list_id}")
        return "clean:" + ",".join(steps) if steps else "clean:none"


def _is_punctuation(ch: str) -> bool:
    return ch in _ASCII_PUNCT or unicodedata.category(ch).startswith("P")


def clean_text(raw: str, cfg: CleanConfig = CleanConfig()) -> str:
    text = raw
    if cfg.lowercase:
        text = text.lower()
    if cfg.strip_hashtags:
        text = " ".join(tok for tok in text.split() if not tok.startswith("#"))
    if cfg.strip_punctuation:
        text = "".join(ch for ch in text if not _is_punctuation(ch))
    text = " ".join(text.split())
    if cfg.remove_stopwords:
        stops = load_stopwords(cfg.stopword_list_id)
        text = " ".join(tok for tok in text.split() if tok not in stops)
    return text
