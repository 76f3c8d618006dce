"""Deterministic text cleaning and tokenization.

Cleaning applies, in order: lowercasing, hashtag-token removal,
punctuation stripping, whitespace collapsing, stopword removal. The same
(config, text) pair always yields the same output, and cleaning is
idempotent.
"""

import string
import unicodedata
from dataclasses import dataclass
from importlib import resources

from .errors import ValidationError

# ASCII symbols stripped alongside the Unicode P* categories.
_ASCII_PUNCT = frozenset(string.punctuation)

DEFAULT_STOPWORD_LIST = "english-179"


def _load_stopwords(name: str) -> frozenset[str]:
    resource = resources.files("veristack").joinpath(f"data/stopwords_{name.replace('-', '_')}.txt")
    words = resource.read_text(encoding="utf-8").split("\n")
    return frozenset(w for w in words if w)


_STOPWORD_CACHE: dict[str, frozenset[str]] = {}


def stopword_list(list_id: str = DEFAULT_STOPWORD_LIST) -> frozenset[str]:
    """Return the bundled stopword list registered under `list_id`."""
    if list_id not in _STOPWORD_CACHE:
        try:
            _STOPWORD_CACHE[list_id] = _load_stopwords(list_id)
        except FileNotFoundError:
            raise ValidationError(f"unknown stopword list {list_id!r}") from None
    return _STOPWORD_CACHE[list_id]


@dataclass(frozen=True)
class CleanConfig:
    lowercase: bool = True
    strip_hashtags: bool = True
    strip_punctuation: bool = True
    remove_stopwords: bool = True
    stopword_list_id: str = DEFAULT_STOPWORD_LIST


DEFAULT_CLEAN = CleanConfig()


def is_punctuation(ch: str) -> bool:
    """True for ASCII punctuation/symbols and any Unicode P* character."""
    return ch in _ASCII_PUNCT or unicodedata.category(ch).startswith("P")


def clean_text(raw: str, cfg: CleanConfig = DEFAULT_CLEAN) -> str:
    """Apply the ordered cleaning steps; the result may be empty."""
    text = raw
    if cfg.lowercase:
        text = text.lower()
    if cfg.strip_hashtags:
        text = " ".join(tok for tok in text.split() if not tok.startswith("#"))
    if cfg.strip_punctuation:
        text = "".join(ch for ch in text if not is_punctuation(ch))
    text = " ".join(text.split())
    if cfg.remove_stopwords:
        stops = stopword_list(cfg.stopword_list_id)
        text = " ".join(tok for tok in text.split() if tok not in stops)
    return text


def tokenize(cleaned: str) -> list[str]:
    """Split on runs of whitespace; never yields empty tokens."""
    return cleaned.split()


def clean_corpus(texts: list[str], cfg: CleanConfig = DEFAULT_CLEAN) -> list[str]:
    return [clean_text(t, cfg) for t in texts]
