"""The export job: corpus in, cleaned texts through an encoder, file
triple out. Deterministic for a fixed checkpoint and cleaning config."""

from dataclasses import dataclass, field
from pathlib import Path

from .cleaning import CleanConfig, clean_text
from .encoders import resolve_encoder
from .formats import read_corpus, write_embedding_files


@dataclass(frozen=True)
class ExportJob:
    corpus_path: str
    model_id: str
    out_prefix: str
    corpus_format: str | None = None
    clean: CleanConfig = field(default_factory=CleanConfig)
    allow_any: bool = False


def export(job: ExportJob) -> dict:
    """Run the job; returns a small summary (count, dim, out prefix).

    Empty cleaned texts are encoded as the empty string, so every corpus
    row yields a vector and ids stay aligned with the corpus order.
    """
    rows = read_corpus(job.corpus_path, job.corpus_format)
    encoder = resolve_encoder(job.model_id, job.allow_any)
    cleaned = [clean_text(r.text, job.clean) for r in rows]
    vectors = encoder.encode(cleaned)
    if vectors.shape[0] != len(rows):
        raise RuntimeError(
            f"encoder returned {vectors.shape[0]} vectors for {len(rows)} texts"
        )
    write_embedding_files(
        job.out_prefix,
        model_id=job.model_id,
        preprocessing_id=job.clean.preprocessing_id,
        ids=[r.id for r in rows],
        vectors=vectors,
    )
    return {
        "count": len(rows),
        "dim": int(vectors.shape[1]) if vectors.size else 0,
        "out_prefix": str(Path(job.out_prefix)),
    }
