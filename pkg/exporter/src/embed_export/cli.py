"""embed-export: encode a corpus file into an embedding file triple."""

import argparse
import sys

from .cleaning import CleanConfig
from .encoders import CATALOG, EncoderUnavailable
from .export import ExportJob, export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Encode a corpus with a pretrained sentence encoder and "
        "write the manifest/ids/payload file triple.",
    )
    parser.add_argument("--corpus", required=True, help="headered TSV/CSV with a tweet column")
    parser.add_argument("--format", choices=("tsv", "csv"))
    parser.add_argument("--model", required=True, help=f"one of {list(CATALOG)}")
    parser.add_argument("--out", required=True, help="output path prefix")
    parser.add_argument("--allow-any", action="store_true",
                        help="permit model ids outside the catalog")
    parser.add_argument("--no-lowercase", action="store_true")
    parser.add_argument("--keep-hashtags", action="store_true")
    parser.add_argument("--keep-punctuation", action="store_true")
    parser.add_argument("--keep-stopwords", action="store_true")
    parser.add_argument("--stopword-list", default="english-179")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    job = ExportJob(
        corpus_path=args.corpus,
        model_id=args.model,
        out_prefix=args.out,
        corpus_format=args.format,
        clean=CleanConfig(
            lowercase=not args.no_lowercase,
            strip_hashtags=not args.keep_hashtags,
            strip_punctuation=not args.keep_punctuation,
            remove_stopwords=not args.keep_stopwords,
            stopword_list_id=args.stopword_list,
        ),
        allow_any=args.allow_any,
    )
    try:
        summary = export(job)
    except EncoderUnavailable as exc:
        print(f"embed-export: {exc.model_id}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"embed-export: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {summary['count']}x{summary['dim']} f32 vectors -> {summary['out_prefix']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
