"""Batch sentence-embedding exporter.

Encodes a corpus file with one of the cataloged pretrained sentence
encoders (applying the shared text-cleaning contract first) and writes an
embedding file triple: JSON manifest, newline-delimited ids, and a raw
little-endian f32 payload.
"""

__version__ = "0.1.0"

from .cleaning import CleanConfig, clean_text
from .encoders import CATALOG, EncoderUnavailable
from .export import ExportJob, export

__all__ = [
    "CleanConfig",
    "clean_text",
    "CATALOG",
    "EncoderUnavailable",
    "ExportJob",
    "export",
    "__version__",
]
