"""Encoder backends.

The catalog names the three supported pretrained sentence encoders; any
other model id requires allow_any. "hash-projection-<dim>" is a
deterministic offline encoder (seeded Gaussian per text hash) used for
testing the export path without a model checkpoint.
"""

import hashlib
import re

import numpy as np

CATALOG = (
    "distilbert-base-nli-mean-tokens",
    "roberta-large-nli-stsb-mean-tokens",
    "xlm-r-large-en-ko-nli-ststb",
)

_HASH_RE = re.compile(r"^hash-projection-(\d+)$")


class EncoderUnavailable(RuntimeError):
    def __init__(self, model_id: str, cause: str):
        super().__init__(f"encoder checkpoint unavailable for {model_id!r}: {cause}")
        self.model_id = model_id


class HashProjectionEncoder:
    """Deterministic stand-in encoder: each text maps to a fixed Gaussian
    vector seeded by the SHA-256 of its UTF-8 bytes."""

    def __init__(self, model_id: str, dim: int):
        self.model_id = model_id
        self.dim = dim

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dim), dtype=np.float32)
        for i, text in enumerate(texts):
            digest = hashlib.sha256(text.encode("utf-8")).digest()
            seed = int.from_bytes(digest[:8], "little")
            rng = np.random.default_rng(seed)
            out[i] = rng.standard_normal(self.dim).astype(np.float32)
        return out


class SentenceTransformerEncoder:
    """Wraps a sentence-transformers checkpoint; loaded lazily."""

    def __init__(self, model_id: str):
        self.model_id = model_id
        try:
            self._model = _load_sentence_transformer(model_id)
        except Exception as exc:  # noqa: BLE001 - any load failure means unavailable
            raise EncoderUnavailable(model_id, str(exc)) from exc

    def encode(self, texts: list[str]) -> np.ndarray:
        vectors = self._model.encode(
            texts, convert_to_numpy=True, show_progress_bar=False,
            batch_size=32, normalize_embeddings=False,
        )
        return np.asarray(vectors, dtype=np.float32)


def _load_sentence_transformer(model_id: str):
    from sentence_transformers import SentenceTransformer

    return SentenceTransformer(model_id)


def resolve_encoder(model_id: str, allow_any: bool = False):
    match = _HASH_RE.match(model_id)
    if match:
        if not allow_any:
            raise ValueError(
                f"model {model_id!r} is outside the catalog; pass --allow-any to use it"
            )
        return HashProjectionEncoder(model_id, int(match.group(1)))
    if model_id not in CATALOG and not allow_any:
        raise ValueError(
            f"model {model_id!r} is outside the catalog {list(CATALOG)}; "
            "pass --allow-any to use it"
        )
    return SentenceTransformerEncoder(model_id)
