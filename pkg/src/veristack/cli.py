"""Command-line entry point.

Verbs: corpus {validate, export}; preprocess; featurize; lsa {fit,
transform, grid}; embeddings {validate}; train {base, nn-stack,
linear-stack}; predict; eval {tdt, cv, grid}; explain {variance};
render {confusion}.

Exit codes: 0 success, 1 validation/data error, 2 usage error. Every
training or evaluation run writes a JSON ledger holding the effective
configuration (including the seed), so any run can be reproduced with
--config <ledger>.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import seeds
from .corpus import Dataset, label_distribution, load_corpus, write_corpus
from .embeddings_io import (
    EmbeddingManifest,
    EmbeddingSet,
    payload_checksum,
    read_embeddings,
    write_embeddings,
)
from .errors import StateError, VeristackError
from .evaluate import class_variance_ranking, grid_search, kfold, tdt_split
from .handcrafted import FIELD_NAMES, handcrafted_matrix
from .ioutil import atomic_write_json, atomic_write_text, read_json
from .linear import decision_function, load_linear, save_linear
from .lsa import LsaConfig, fit_lsa, grid_candidates, load_lsa, save_lsa, transform_docs
from .metrics import confusion_matrix, f1_score, render_confusion_svg
from .mlp import MlpConfig
from .pipelines import (
    EmbeddingSgdPipeline,
    ExternalColumnSource,
    HandcraftedSgdPipeline,
    LinearStackPipeline,
    LsaSgdPipeline,
    NeuralStackPipeline,
)
from .preprocess import CleanConfig, clean_text
from .presets import (
    LINEAR_PRESETS,
    LSA_PRESETS,
    PRESET_REPRESENTATION,
    linear_preset,
    mlp_preset,
)
from .stacking import load_mlp, mlp_forward, mlp_predict, save_mlp

PROG = "veristack"


def _clean_config_from_args(args) -> CleanConfig:
    return CleanConfig(
        lowercase=not args.no_lowercase,
        strip_hashtags=not args.keep_hashtags,
        strip_punctuation=not args.keep_punctuation,
        remove_stopwords=not args.keep_stopwords,
        stopword_list_id=args.stopword_list,
    )


def _add_clean_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--keep-hashtags", action="store_true")
    p.add_argument("--keep-punctuation", action="store_true")
    p.add_argument("--keep-stopwords", action="store_true")
    p.add_argument("--stopword-list", default="english-179")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default 42)")
    p.add_argument("--config", default=None, help="JSON run file; flags override it")
    p.add_argument("--out-dir", default=None, help="ledger directory (default runs/)")


def _load_config_file(args) -> dict:
    if not getattr(args, "config", None):
        return {}
    blob = read_json(args.config)
    return blob.get("config", blob)


def _resolve(args, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return config.get(key, default)


def _effective_seed(args, config: dict) -> int:
    return int(_resolve(args, config, "seed", 42))


def _ledger_path(args, config: dict, name: str) -> Path:
    out_dir = Path(_resolve(args, config, "out_dir", "runs"))
    return out_dir / f"{name}.json"


def _write_ledger(path: Path, verb: str, config: dict, results: dict, seconds: float) -> None:
    atomic_write_json(
        path,
        {"verb": verb, "config": config, "results": results, "wall_seconds": round(seconds, 3)},
    )
    print(f"ledger: {path}")


def _load_dataset(args, config: dict, key: str = "infile") -> Dataset:
    path = _resolve(args, config, key)
    if path is None:
        raise StateError(f"no input corpus given (--in)")
    fmt = _resolve(args, config, "format")
    return load_corpus(path, fmt)


def _embedding_flags(args, config: dict) -> dict[str, str]:
    """Collect --emb-distilbert/--emb-roberta/--emb-xlm prefixes."""
    out = {}
    for block, key in (
        ("distilbert-emb", "emb_distilbert"),
        ("roberta-emb", "emb_roberta"),
        ("xlm-emb", "emb_xlm"),
    ):
        prefix = _resolve(args, config, key)
        if prefix:
            out[block] = prefix
    return out


# ---------------------------------------------------------------- corpus

def _cmd_corpus_validate(args) -> int:
    config = _load_config_file(args)
    ds = _load_dataset(args, config)
    print(f"records: {len(ds)}")
    print(f"labeled: {ds.labeled}")
    if ds.labeled:
        dist = label_distribution(ds)
        for label in sorted(dist.counts):
            print(f"  {label}: {dist.counts[label]} ({dist.fractions[label]:.2%})")
    return 0


def _cmd_corpus_export(args) -> int:
    config = _load_config_file(args)
    ds = _load_dataset(args, config)
    out = _resolve(args, config, "out")
    write_corpus(ds, out, _resolve(args, config, "out_format"))
    print(f"wrote {len(ds)} records to {out}")
    return 0


# ------------------------------------------------------------ preprocess

def _cmd_preprocess(args) -> int:
    config = _load_config_file(args)
    ds = _load_dataset(args, config)
    cfg = _clean_config_from_args(args)
    lines = ["id\tcleaned_text"]
    lines += [f"{rec.id}\t{clean_text(rec.text, cfg)}" for rec in ds.records]
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {len(ds)} cleaned rows to {args.out}")
    return 0


# ------------------------------------------------------------- featurize

def _cmd_featurize(args) -> int:
    config = _load_config_file(args)
    if not args.handcrafted:
        raise StateError("featurize currently supports only --handcrafted")
    ds = _load_dataset(args, config)
    X = handcrafted_matrix(ds.texts())
    lines = ["\t".join(("id",) + FIELD_NAMES)]
    for rec, row in zip(ds.records, X):
        lines.append(rec.id + "\t" + "\t".join(f"{v:.9g}" for v in row))
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {len(ds)}x{X.shape[1]} feature rows to {args.out}")
    return 0


# ------------------------------------------------------------------- lsa

def _lsa_config(args, config: dict, seed: int) -> LsaConfig:
    preset = _resolve(args, config, "lsa_preset")
    if preset:
        base = LSA_PRESETS[preset] if preset in LSA_PRESETS else None
        if base is None:
            raise StateError(f"unknown LSA preset {preset!r}; available: {sorted(LSA_PRESETS)}")
        n, d = base.n, base.d
    else:
        n = int(_resolve(args, config, "n", 2500))
        d = int(_resolve(args, config, "d", 512))
    return LsaConfig(n=n, d=d, seed=seeds.subseed(seed, seeds.SVD))


def _cmd_lsa_fit(args) -> int:
    config = _load_config_file(args)
    seed = _effective_seed(args, config)
    started = time.perf_counter()
    ds = _load_dataset(args, config)
    clean_cfg = _clean_config_from_args(args)
    lsa_cfg = _lsa_config(args, config, seed)
    model = fit_lsa([clean_text(t, clean_cfg) for t in ds.texts()], lsa_cfg)
    save_lsa(model, args.out)
    print(f"fitted LSA n={model.n} d={model.d} on {len(ds)} docs -> {args.out}")
    effective = {
        "infile": str(_resolve(args, config, "infile")),
        "n": lsa_cfg.n,
        "d": lsa_cfg.d,
        "seed": seed,
        "out": args.out,
    }
    _write_ledger(
        _ledger_path(args, config, "lsa-fit"), "lsa fit", effective,
        {"vocabulary_size": model.n, "top_singular_value": float(model.singular_values[0])},
        time.perf_counter() - started,
    )
    return 0


def _cmd_lsa_transform(args) -> int:
    config = _load_config_file(args)
    ds = _load_dataset(args, config)
    model = load_lsa(args.model)
    clean_cfg = _clean_config_from_args(args)
    Z = transform_docs(model, [clean_text(t, clean_cfg) for t in ds.texts()])
    es = EmbeddingSet(
        EmbeddingManifest(
            model_id=f"lsa-n{model.config.n}-d{Z.shape[1]}",
            dim=int(Z.shape[1]),
            count=len(ds),
            dtype="f64",
            preprocessing_id=f"clean:{clean_cfg.stopword_list_id}",
        ),
        ds.ids(),
        np.ascontiguousarray(Z, dtype="<f8"),
    )
    write_embeddings(es, args.out)
    print(f"wrote {len(ds)}x{Z.shape[1]} LSA vectors to {args.out}")
    return 0


def _cmd_lsa_grid(args) -> int:
    print(json.dumps(grid_candidates()))
    return 0


# ------------------------------------------------------------ embeddings

def _cmd_embeddings_validate(args) -> int:
    es = read_embeddings(args.prefix)
    m = es.manifest
    print(f"model_id: {m.model_id}")
    print(f"dim: {m.dim}")
    print(f"count: {m.count}")
    print(f"dtype: {m.dtype}")
    print(f"preprocessing_id: {m.preprocessing_id}")
    print(f"payload_sha256: {payload_checksum(args.prefix)}")
    return 0


# ----------------------------------------------------------------- train

def _base_pipeline(preset: str, args, config: dict, seed: int):
    sgd_cfg = linear_preset(preset)
    sgd_cfg = type(sgd_cfg)(**{**sgd_cfg.__dict__, "seed": seeds.subseed(seed, seeds.SHUFFLE)})
    representation = PRESET_REPRESENTATION.get(preset)
    if representation == "lsa":
        return LsaSgdPipeline(_lsa_config(args, config, seed), sgd_cfg)
    if representation == "handcrafted":
        return HandcraftedSgdPipeline(sgd_cfg)
    if representation == "embedding":
        prefix = _resolve(args, config, "embeddings")
        if not prefix:
            raise StateError(f"preset {preset!r} needs --embeddings <prefix>")
        return EmbeddingSgdPipeline(read_embeddings(prefix), sgd_cfg)
    raise StateError(f"preset {preset!r} is not a base-model preset")


def _cmd_train_base(args) -> int:
    config = _load_config_file(args)
    seed = _effective_seed(args, config)
    started = time.perf_counter()
    ds = _load_dataset(args, config, "train")
    preset = _resolve(args, config, "preset")
    if not preset:
        raise StateError("--preset is required")
    pipeline = _base_pipeline(preset, args, config, seed)
    pipeline.fit(ds)
    out = args.out
    save_linear(pipeline.model, out)
    manifest = {
        "kind": "base-pipeline",
        "preset": preset,
        "representation": PRESET_REPRESENTATION.get(preset),
        "linear_prefix": out,
    }
    if isinstance(pipeline, LsaSgdPipeline):
        save_lsa(pipeline.lsa_model, out + ".lsa")
        manifest["lsa_prefix"] = out + ".lsa"
    if isinstance(pipeline, EmbeddingSgdPipeline):
        manifest["embeddings"] = _resolve(args, config, "embeddings")
    atomic_write_json(Path(out + ".pipeline.json"), manifest)
    train_f1 = f1_score(ds.labels(), pipeline.predict(ds))
    print(f"train F1 (weighted): {train_f1:.4f}")
    effective = {
        "train": str(_resolve(args, config, "train")),
        "preset": preset,
        "seed": seed,
        "out": out,
        "embeddings": _resolve(args, config, "embeddings"),
    }
    _write_ledger(
        _ledger_path(args, config, f"train-base-{preset}"), "train base", effective,
        {"train_f1_weighted": train_f1}, time.perf_counter() - started,
    )
    return 0


def _nn_stack_pipeline(args, config: dict, seed: int) -> NeuralStackPipeline:
    preset_name = _resolve(args, config, "preset", "reference")
    mlp_cfg = mlp_preset(preset_name)
    overrides = {}
    for key in ("epochs", "batch_size", "dropout_p", "learning_rate"):
        value = _resolve(args, config, key)
        if value is not None:
            overrides[key] = type(getattr(mlp_cfg, key))(value)
    mlp_cfg = MlpConfig(
        **{**{f: getattr(mlp_cfg, f) for f in (
            "layer_dims", "dropout_p", "learning_rate", "batch_size",
            "epochs", "output_activation",
        )}, **overrides, "seed": seeds.subseed(seed, seeds.INIT)},
    )
    emb_prefixes = _embedding_flags(args, config)
    needed = {"distilbert-emb", "roberta-emb", "xlm-emb"}
    if set(emb_prefixes) != needed:
        missing = sorted(needed - set(emb_prefixes))
        raise StateError(f"nn-stack needs all three embedding blocks; missing {missing}")
    embeddings = {name: read_embeddings(prefix) for name, prefix in emb_prefixes.items()}
    lsa_preset = _resolve(args, config, "lsa_preset", "stack")
    lsa_base = LSA_PRESETS[lsa_preset]
    lsa_cfg = LsaConfig(n=lsa_base.n, d=lsa_base.d, seed=seeds.subseed(seed, seeds.SVD))
    return NeuralStackPipeline(mlp_cfg, lsa_cfg, embeddings)


def _cmd_train_nn_stack(args) -> int:
    config = _load_config_file(args)
    seed = _effective_seed(args, config)
    started = time.perf_counter()
    ds = _load_dataset(args, config, "train")
    pipeline = _nn_stack_pipeline(args, config, seed)
    pipeline.fit(ds)
    out = args.out
    save_mlp(pipeline.model, out)
    save_lsa(pipeline.lsa_model, out + ".lsa")
    atomic_write_json(
        Path(out + ".pipeline.json"),
        {
            "kind": "nn-stack-pipeline",
            "mlp_prefix": out,
            "lsa_prefix": out + ".lsa",
            "embeddings": _embedding_flags(args, config),
        },
    )
    train_f1 = f1_score(ds.labels(), pipeline.predict(ds))
    print(f"train F1 (weighted): {train_f1:.4f}")
    effective = {
        "train": str(_resolve(args, config, "train")),
        "preset": _resolve(args, config, "preset", "reference"),
        "seed": seed,
        "out": out,
        **{k: v for k, v in _embedding_flags(args, config).items()},
    }
    _write_ledger(
        _ledger_path(args, config, "train-nn-stack"), "train nn-stack", effective,
        {"train_f1_weighted": train_f1, "final_loss": pipeline.model.loss_history[-1]
         if pipeline.model.loss_history else None},
        time.perf_counter() - started,
    )
    return 0


def _stack_bases(args, config: dict, seed: int):
    """Base-model factories for linear stacking: LSA + handcrafted, plus
    one pipeline per supplied embedding block."""
    bases = []
    lsa_cfg = _lsa_config(args, config, seed)

    def lsa_factory():
        return LsaSgdPipeline(lsa_cfg, linear_preset("lsa-lr"))

    def hand_factory():
        return HandcraftedSgdPipeline(linear_preset("handcrafted-svm"))

    bases.append(("lsa", lsa_factory))
    bases.append(("handcrafted", hand_factory))
    emb_presets = {
        "distilbert-emb": "distilbert-emb-lr",
        "roberta-emb": "roberta-emb-lr",
        "xlm-emb": "xlm-emb-svm",
    }
    for name, prefix in _embedding_flags(args, config).items():
        es = read_embeddings(prefix)
        preset = linear_preset(emb_presets[name])
        bases.append((name, lambda es=es, preset=preset: EmbeddingSgdPipeline(es, preset)))
    return bases


def _cmd_train_linear_stack(args) -> int:
    config = _load_config_file(args)
    seed = _effective_seed(args, config)
    started = time.perf_counter()
    ds = _load_dataset(args, config, "train")
    mode = _resolve(args, config, "mode", "labels")
    externals = []
    for spec in args.external or []:
        name, _, prefix = spec.partition("=")
        if not prefix:
            raise StateError(f"--external expects name=prefix, got {spec!r}")
        externals.append(ExternalColumnSource(name, read_embeddings(prefix)))
    pipeline = LinearStackPipeline(
        _stack_bases(args, config, seed),
        mode=mode,
        externals=externals,
        out_of_fold=not args.in_fold,
        seed=seeds.subseed(seed, seeds.SPLIT),
    )
    pipeline.fit(ds)
    save_linear(pipeline.stacker, args.out)
    train_f1 = f1_score(ds.labels(), pipeline.predict(ds))
    print(f"train F1 (weighted): {train_f1:.4f}")
    effective = {
        "train": str(_resolve(args, config, "train")),
        "mode": mode,
        "seed": seed,
        "out": args.out,
        "out_of_fold": not args.in_fold,
    }
    _write_ledger(
        _ledger_path(args, config, f"train-linear-stack-{mode}"), "train linear-stack",
        effective, {"train_f1_weighted": train_f1}, time.perf_counter() - started,
    )
    return 0


# --------------------------------------------------------------- predict

def _cmd_predict(args) -> int:
    config = _load_config_file(args)
    ds = _load_dataset(args, config)
    manifest = read_json(args.model + ".pipeline.json")
    kind = manifest.get("kind")
    if kind == "base-pipeline":
        model = load_linear(manifest["linear_prefix"])
        representation = manifest.get("representation")
        if representation == "lsa":
            lsa_model = load_lsa(manifest["lsa_prefix"])
            clean_cfg = _clean_config_from_args(args)
            X = transform_docs(lsa_model, [clean_text(t, clean_cfg) for t in ds.texts()])
        elif representation == "handcrafted":
            X = handcrafted_matrix(ds.texts())
        else:
            prefix = _resolve(args, config, "embeddings") or manifest.get("embeddings")
            from .embeddings_io import align

            X = align(read_embeddings(prefix), ds)
        scores = decision_function(model, X)
        labels = ["real" if s > 0 else "fake" for s in scores]
    elif kind == "nn-stack-pipeline":
        mlp_model = load_mlp(manifest["mlp_prefix"])
        lsa_model = load_lsa(manifest["lsa_prefix"])
        emb_prefixes = _embedding_flags(args, config) or manifest.get("embeddings", {})
        from .embeddings_io import align
        from .stacking import concat_blocks

        clean_cfg = _clean_config_from_args(args)
        cleaned = [clean_text(t, clean_cfg) for t in ds.texts()]
        blocks = [
            ("lsa", transform_docs(lsa_model, cleaned)),
            ("handcrafted", handcrafted_matrix(ds.texts())),
        ]
        for name in ("distilbert-emb", "roberta-emb", "xlm-emb"):
            blocks.append((name, align(read_embeddings(emb_prefixes[name]), ds)))
        X = concat_blocks(blocks)
        out = mlp_forward(mlp_model, X)
        labels = mlp_predict(mlp_model, X)
        scores = out[:, 1]
    else:
        raise StateError(f"unknown pipeline kind {kind!r}")
    lines = ["id\tlabel\tscore"]
    lines += [f"{rec.id}\t{lab}\t{score:.9g}" for rec, lab, score in zip(ds.records, labels, scores)]
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {len(ds)} predictions to {args.out}")
    return 0


# ------------------------------------------------------------------ eval

def _cmd_eval_tdt(args) -> int:
    config = _load_config_file(args)
    seed = _effective_seed(args, config)
    started = time.perf_counter()
    ds = _load_dataset(args, config)
    preset = _resolve(args, config, "preset")
    if not preset:
        raise StateError("--preset is required")
    split = tdt_split(ds, seeds.subseed(seed, seeds.SPLIT))
    pipeline = _base_pipeline(preset, args, config, seed)
    pipeline.fit(split.train)
    averaging = _resolve(args, config, "averaging", "weighted")
    scores = {
        "train": f1_score(split.train.labels(), pipeline.predict(split.train), averaging),
        "dev": f1_score(split.dev.labels(), pipeline.predict(split.dev), averaging),
        "test": f1_score(split.test.labels(), pipeline.predict(split.test), averaging),
    }
    for name, value in scores.items():
        print(f"{name} F1 ({averaging}): {value:.4f}")
    effective = {
        "infile": str(_resolve(args, config, "infile")),
        "preset": preset,
        "seed": seed,
        "averaging": averaging,
        "embeddings": _resolve(args, config, "embeddings"),
    }
    _write_ledger(
        _ledger_path(args, config, f"eval-tdt-{preset}"), "eval tdt", effective,
        {"f1": scores, "sizes": {"train": len(split.train), "dev": len(split.dev),
                                 "test": len(split.test)}},
        time.perf_counter() - started,
    )
    return 0


def _cmd_eval_cv(args) -> int:
    config = _load_config_file(args)
    seed = _effective_seed(args, config)
    started = time.perf_counter()
    ds = _load_dataset(args, config)
    preset = _resolve(args, config, "preset")
    if not preset:
        raise StateError("--preset is required")
    k = int(_resolve(args, config, "k", 10))
    averaging = _resolve(args, config, "averaging", "weighted")
    plan = kfold(ds, k=k, seed=seeds.subseed(seed, seeds.SPLIT))
    fold_scores = []
    for train_idx, eval_idx in plan.splits():
        pipeline = _base_pipeline(preset, args, config, seed)
        pipeline.fit(ds.subset(train_idx))
        eval_ds = ds.subset(eval_idx)
        fold_scores.append(f1_score(eval_ds.labels(), pipeline.predict(eval_ds), averaging))
    mean = float(np.mean(fold_scores))
    for i, s in enumerate(fold_scores):
        print(f"fold {i}: F1 ({averaging}) = {s:.4f}")
    print(f"mean F1 ({averaging}): {mean:.4f}")
    effective = {
        "infile": str(_resolve(args, config, "infile")),
        "preset": preset,
        "k": k,
        "seed": seed,
        "averaging": averaging,
        "embeddings": _resolve(args, config, "embeddings"),
    }
    _write_ledger(
        _ledger_path(args, config, f"eval-cv-{preset}"), "eval cv", effective,
        {"fold_f1": fold_scores, "mean_f1": mean}, time.perf_counter() - started,
    )
    return 0


def _cmd_eval_grid(args) -> int:
    config = _load_config_file(args)
    seed = _effective_seed(args, config)
    started = time.perf_counter()
    ds = _load_dataset(args, config)
    protocol = _resolve(args, config, "protocol", "tdt")
    averaging = _resolve(args, config, "averaging", "weighted")
    model_kinds = (_resolve(args, config, "models", "lr,svm")).split(",")
    pairs = grid_candidates()
    max_n = _resolve(args, config, "max_n")
    if max_n is not None:
        pairs = [(n, d) for n, d in pairs if n <= int(max_n)]
    grid = [
        {"n": n, "d": d, "model": kind}
        for n, d in pairs
        for kind in model_kinds
    ]

    def make_model(cfg: dict):
        lsa_cfg = LsaConfig(n=cfg["n"], d=cfg["d"], seed=seeds.subseed(seed, seeds.SVD))
        if cfg["model"] == "lr":
            sgd = linear_preset("lsa-lr")
        else:
            sgd = type(linear_preset("lsa-lr"))(loss="hinge")
        return LsaSgdPipeline(lsa_cfg, sgd)

    out_path = _ledger_path(args, config, f"eval-grid-{protocol}")
    outcome = grid_search(
        make_model, grid, protocol, ds, metric=averaging,
        seed=seeds.subseed(seed, seeds.SPLIT), out_path=out_path,
    )
    best = outcome.best
    print(f"evaluated {len(outcome.results)} configurations")
    print(f"best: {best.config} -> F1 ({averaging}) = {best.score:.4f}")
    print(f"ledger: {out_path}")
    return 0


# --------------------------------------------------------------- explain

def _cmd_explain_variance(args) -> int:
    config = _load_config_file(args)
    ds = _load_dataset(args, config)
    top_k = int(_resolve(args, config, "top_k", 8))
    ranking = class_variance_ranking(ds, top_k=top_k)
    print(json.dumps(ranking, indent=2))
    if args.out:
        atomic_write_json(args.out, ranking)
    return 0


# ---------------------------------------------------------------- render

def _cmd_render_confusion(args) -> int:
    if args.matrix:
        values = [int(v) for v in args.matrix.split(",")]
        if len(values) != 4:
            raise StateError("--matrix expects 4 comma-separated counts")
        m = np.array(values).reshape(2, 2)
    elif args.true_file and args.preds:
        truth = load_corpus(args.true_file)
        pred_rows = Path(args.preds).read_text(encoding="utf-8").splitlines()[1:]
        pred_by_id = dict(line.split("\t")[:2] for line in pred_rows if line)
        y_pred = [pred_by_id[rec.id] for rec in truth.records]
        m = confusion_matrix(truth.labels(), y_pred)
    else:
        raise StateError("render confusion needs --matrix or (--true + --preds)")
    render_confusion_svg(m, args.out, title=args.title)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    corpus_p = sub.add_parser("corpus", help="validate or export corpus files")
    corpus_sub = corpus_p.add_subparsers(dest="action", required=True)
    v = corpus_sub.add_parser("validate")
    v.add_argument("--in", dest="infile")
    v.add_argument("--format", choices=("tsv", "csv"))
    _add_common(v)
    v.set_defaults(handler=_cmd_corpus_validate)
    e = corpus_sub.add_parser("export")
    e.add_argument("--in", dest="infile")
    e.add_argument("--format", choices=("tsv", "csv"))
    e.add_argument("--out", required=True)
    e.add_argument("--out-format", choices=("tsv", "csv"))
    _add_common(e)
    e.set_defaults(handler=_cmd_corpus_export)

    pre = sub.add_parser("preprocess", help="clean a corpus to (id, cleaned_text) TSV")
    pre.add_argument("--in", dest="infile")
    pre.add_argument("--format", choices=("tsv", "csv"))
    pre.add_argument("--out", required=True)
    _add_clean_flags(pre)
    _add_common(pre)
    pre.set_defaults(handler=_cmd_preprocess)

    feat = sub.add_parser("featurize", help="write per-post feature vectors")
    feat.add_argument("--handcrafted", action="store_true")
    feat.add_argument("--in", dest="infile")
    feat.add_argument("--format", choices=("tsv", "csv"))
    feat.add_argument("--out", required=True)
    _add_common(feat)
    feat.set_defaults(handler=_cmd_featurize)

    lsa_p = sub.add_parser("lsa", help="fit/apply the LSA representation")
    lsa_sub = lsa_p.add_subparsers(dest="action", required=True)
    lf = lsa_sub.add_parser("fit")
    lf.add_argument("--in", dest="infile")
    lf.add_argument("--format", choices=("tsv", "csv"))
    lf.add_argument("--n", type=int)
    lf.add_argument("--d", type=int)
    lf.add_argument("--lsa-preset", choices=tuple(LSA_PRESETS))
    lf.add_argument("--out", required=True)
    _add_clean_flags(lf)
    _add_common(lf)
    lf.set_defaults(handler=_cmd_lsa_fit)
    lt = lsa_sub.add_parser("transform")
    lt.add_argument("--model", required=True)
    lt.add_argument("--in", dest="infile")
    lt.add_argument("--format", choices=("tsv", "csv"))
    lt.add_argument("--out", required=True)
    _add_clean_flags(lt)
    _add_common(lt)
    lt.set_defaults(handler=_cmd_lsa_transform)
    lg = lsa_sub.add_parser("grid")
    _add_common(lg)
    lg.set_defaults(handler=_cmd_lsa_grid)

    emb = sub.add_parser("embeddings", help="validate embedding file triples")
    emb_sub = emb.add_subparsers(dest="action", required=True)
    ev = emb_sub.add_parser("validate")
    ev.add_argument("--prefix", required=True)
    _add_common(ev)
    ev.set_defaults(handler=_cmd_embeddings_validate)

    train = sub.add_parser("train", help="train base or meta models")
    train_sub = train.add_subparsers(dest="action", required=True)
    tb = train_sub.add_parser("base")
    tb.add_argument("--preset", choices=tuple(sorted(LINEAR_PRESETS)))
    tb.add_argument("--train", dest="train")
    tb.add_argument("--format", choices=("tsv", "csv"))
    tb.add_argument("--embeddings")
    tb.add_argument("--n", type=int)
    tb.add_argument("--d", type=int)
    tb.add_argument("--lsa-preset", choices=tuple(LSA_PRESETS))
    tb.add_argument("--out", required=True)
    _add_common(tb)
    tb.set_defaults(handler=_cmd_train_base)
    tn = train_sub.add_parser("nn-stack")
    tn.add_argument("--preset")
    tn.add_argument("--train", dest="train")
    tn.add_argument("--format", choices=("tsv", "csv"))
    tn.add_argument("--emb-distilbert", dest="emb_distilbert")
    tn.add_argument("--emb-roberta", dest="emb_roberta")
    tn.add_argument("--emb-xlm", dest="emb_xlm")
    tn.add_argument("--lsa-preset", choices=tuple(LSA_PRESETS))
    tn.add_argument("--epochs", type=int)
    tn.add_argument("--batch-size", dest="batch_size", type=int)
    tn.add_argument("--dropout-p", dest="dropout_p", type=float)
    tn.add_argument("--learning-rate", dest="learning_rate", type=float)
    tn.add_argument("--out", required=True)
    _add_common(tn)
    tn.set_defaults(handler=_cmd_train_nn_stack)
    tl = train_sub.add_parser("linear-stack")
    tl.add_argument("--train", dest="train")
    tl.add_argument("--format", choices=("tsv", "csv"))
    tl.add_argument("--mode", choices=("labels", "decision"))
    tl.add_argument("--emb-distilbert", dest="emb_distilbert")
    tl.add_argument("--emb-roberta", dest="emb_roberta")
    tl.add_argument("--emb-xlm", dest="emb_xlm")
    tl.add_argument("--external", action="append", metavar="NAME=PREFIX")
    tl.add_argument("--in-fold", action="store_true",
                    help="train the stacker on in-fold base predictions")
    tl.add_argument("--n", type=int)
    tl.add_argument("--d", type=int)
    tl.add_argument("--lsa-preset", choices=tuple(LSA_PRESETS))
    tl.add_argument("--out", required=True)
    _add_common(tl)
    tl.set_defaults(handler=_cmd_train_linear_stack)

    pred = sub.add_parser("predict", help="predict labels with a saved model")
    pred.add_argument("--model", required=True)
    pred.add_argument("--in", dest="infile")
    pred.add_argument("--format", choices=("tsv", "csv"))
    pred.add_argument("--embeddings")
    pred.add_argument("--emb-distilbert", dest="emb_distilbert")
    pred.add_argument("--emb-roberta", dest="emb_roberta")
    pred.add_argument("--emb-xlm", dest="emb_xlm")
    pred.add_argument("--out", required=True)
    _add_clean_flags(pred)
    _add_common(pred)
    pred.set_defaults(handler=_cmd_predict)

    ev_p = sub.add_parser("eval", help="TDT / CV / grid evaluation protocols")
    ev_sub = ev_p.add_subparsers(dest="action", required=True)
    et = ev_sub.add_parser("tdt")
    et.add_argument("--in", dest="infile")
    et.add_argument("--format", choices=("tsv", "csv"))
    et.add_argument("--preset")
    et.add_argument("--embeddings")
    et.add_argument("--n", type=int)
    et.add_argument("--d", type=int)
    et.add_argument("--lsa-preset", choices=tuple(LSA_PRESETS))
    et.add_argument("--averaging", choices=("binary_real", "macro", "weighted"))
    _add_common(et)
    et.set_defaults(handler=_cmd_eval_tdt)
    ec = ev_sub.add_parser("cv")
    ec.add_argument("--in", dest="infile")
    ec.add_argument("--format", choices=("tsv", "csv"))
    ec.add_argument("--preset")
    ec.add_argument("--embeddings")
    ec.add_argument("--k", type=int)
    ec.add_argument("--n", type=int)
    ec.add_argument("--d", type=int)
    ec.add_argument("--lsa-preset", choices=tuple(LSA_PRESETS))
    ec.add_argument("--averaging", choices=("binary_real", "macro", "weighted"))
    _add_common(ec)
    ec.set_defaults(handler=_cmd_eval_cv)
    eg = ev_sub.add_parser("grid")
    eg.add_argument("--in", dest="infile")
    eg.add_argument("--format", choices=("tsv", "csv"))
    eg.add_argument("--protocol", choices=("tdt", "cv10"))
    eg.add_argument("--models", help="comma list of lr,svm")
    eg.add_argument("--max-n", dest="max_n", type=int,
                    help="cap the n grid (small corpora)")
    eg.add_argument("--averaging", choices=("binary_real", "macro", "weighted"))
    _add_common(eg)
    eg.set_defaults(handler=_cmd_eval_grid)

    ex = sub.add_parser("explain", help="word-feature diagnostics")
    ex_sub = ex.add_subparsers(dest="action", required=True)
    exv = ex_sub.add_parser("variance")
    exv.add_argument("--in", dest="infile")
    exv.add_argument("--format", choices=("tsv", "csv"))
    exv.add_argument("--top-k", dest="top_k", type=int)
    exv.add_argument("--out")
    _add_common(exv)
    exv.set_defaults(handler=_cmd_explain_variance)

    ren = sub.add_parser("render", help="render confusion-matrix heatmaps")
    ren_sub = ren.add_subparsers(dest="action", required=True)
    rc = ren_sub.add_parser("confusion")
    rc.add_argument("--matrix", help="4 comma-separated counts, row-major")
    rc.add_argument("--true", dest="true_file", help="labeled corpus file")
    rc.add_argument("--preds", help="predictions TSV from `predict`")
    rc.add_argument("--title", default="")
    rc.add_argument("--out", required=True)
    _add_common(rc)
    rc.set_defaults(handler=_cmd_render_confusion)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        return args.handler(args)
    except VeristackError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
