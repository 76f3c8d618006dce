"""Per-post statistical features computed on the raw (uncleaned) text.

Sixteen values in a fixed order: six word-based statistics followed by ten
character-based counts. Word statistics use the original casing, so this
module must always see raw text, never the cleaned form.
"""

import math

import numpy as np

from .preprocess import is_punctuation

VOWELS = "aeiou"

FIELD_NAMES = (
    "word_max_len",
    "word_min_len",
    "word_avg_len",
    "word_len_std",
    "upper_initial_count",
    "lower_initial_count",
    "digit_count",
    "letter_count",
    "space_count",
    "punct_count",
    "hashtag_count",
    "vowel_a",
    "vowel_e",
    "vowel_i",
    "vowel_o",
    "vowel_u",
)

DIM = len(FIELD_NAMES)


def word_stats(raw: str) -> tuple[float, float, float, float, int, int]:
    """Word-length aggregates plus upper/lower initial-letter counts.

    Words are whitespace-split; the standard deviation is the population
    form (zero for a single word). A post with no words yields all zeros.
    Words whose first character is not a letter count toward neither
    initial-case bucket.
    """
    words = raw.split()
    if not words:
        return (0.0, 0.0, 0.0, 0.0, 0, 0)
    lengths = [len(w) for w in words]
    avg = sum(lengths) / len(lengths)
    var = sum((l - avg) ** 2 for l in lengths) / len(lengths)
    upper = sum(1 for w in words if w[0].isalpha() and w[0].isupper())
    lower = sum(1 for w in words if w[0].isalpha() and w[0].islower())
    return (float(max(lengths)), float(min(lengths)), avg, math.sqrt(var), upper, lower)


def char_stats(raw: str) -> tuple[int, int, int, int, int, int, int, int, int, int]:
    """Counts of digits, letters, spaces, punctuation, hashtags and each vowel.

    '#' counts only as a hashtag character, never as punctuation. Vowel
    counts are case-insensitive and a subset of the letter count.
    """
    digits = letters = spaces = punct = hashtags = 0
    vowels = dict.fromkeys(VOWELS, 0)
    for ch in raw:
        if ch == "#":
            hashtags += 1
        elif ch.isdigit():
            digits += 1
        elif ch.isalpha():
            letters += 1
            low = ch.lower()
            if low in vowels:
                vowels[low] += 1
        elif ch.isspace():
            spaces += 1
        elif is_punctuation(ch):
            punct += 1
    return (
        digits,
        letters,
        spaces,
        punct,
        hashtags,
        vowels["a"],
        vowels["e"],
        vowels["i"],
        vowels["o"],
        vowels["u"],
    )


def handcrafted_vector(raw: str) -> np.ndarray:
    """The 16-entry feature vector: word_stats followed by char_stats."""
    return np.array(word_stats(raw) + char_stats(raw), dtype=np.float64)


def handcrafted_matrix(texts: list[str]) -> np.ndarray:
    """Stack handcrafted_vector over a corpus, one row per text."""
    if not texts:
        return np.zeros((0, DIM), dtype=np.float64)
    return np.stack([handcrafted_vector(t) for t in texts])
