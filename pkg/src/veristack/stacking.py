"""Meta-model layer: input assembly, the neural stacking model, and
linear stacking over base-model outputs.

The canonical stacked input concatenates five blocks in a fixed order
(LSA 256, handcrafted 16, three 768-dim sentence embeddings = 2576
features), standardized per feature with statistics fitted on training
rows only.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, FormatError, StateError, ValidationError
from .ioutil import atomic_write_bytes, atomic_write_json, read_json
from .linear import NEGATIVE_LABEL, POSITIVE_LABEL, LinearModel, SgdConfig, train_sgd
from .mlp import MlpConfig, MlpNetwork, train_network

FAKE_SLOT = 0  # output column order: index 0 = fake, index 1 = real
REAL_SLOT = 1


@dataclass(frozen=True)
class StackInputSpec:
    """Ordered (source, dim) blocks; the canonical preset totals 2576."""

    blocks: tuple[tuple[str, int], ...] = (
        ("lsa", 256),
        ("handcrafted", 16),
        ("distilbert-emb", 768),
        ("roberta-emb", 768),
        ("xlm-emb", 768),
    )

    @property
    def total_dim(self) -> int:
        return sum(dim for _, dim in self.blocks)


CANONICAL_STACK = StackInputSpec()


@dataclass
class Normalizer:
    """Per-feature standardization; constant features get std clamped to 1.

    kind="l2" switches to per-sample unit-norm scaling instead (fit is a
    no-op there).
    """

    kind: str = "standard"
    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    @classmethod
    def fit(cls, X: np.ndarray, kind: str = "standard") -> "Normalizer":
        if kind == "l2":
            return cls(kind="l2")
        if kind != "standard":
            raise StateError(f"unknown normalizer kind {kind!r}")
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std > 0.0, std, 1.0)
        return cls(kind="standard", mean=mean, std=std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.kind == "l2":
            norms = np.linalg.norm(X, axis=1, keepdims=True)
            norms[norms == 0.0] = 1.0
            return X / norms
        if self.mean is None or self.std is None:
            raise StateError("normalizer is not fitted")
        if X.shape[1] != self.mean.shape[0]:
            raise StateError(f"X has {X.shape[1]} features, normalizer expects {self.mean.shape[0]}")
        return (X - self.mean) / self.std


def concat_blocks(
    blocks: Sequence[tuple[str, np.ndarray]],
    spec: StackInputSpec | None = None,
) -> np.ndarray:
    """Validate and horizontally concatenate id-aligned blocks (no scaling).

    All blocks must share the row count. When `spec` is given, block names
    and dims must match it exactly; errors name the offending block.
    """
    if not blocks:
        raise ValidationError("no blocks to assemble")
    arrays = []
    n_rows = None
    for name, arr in blocks:
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise ValidationError(f"block {name!r} must be 2-D, got shape {arr.shape}")
        if n_rows is None:
            n_rows = arr.shape[0]
        elif arr.shape[0] != n_rows:
            raise ValidationError(f"block {name!r} has {arr.shape[0]} rows, expected {n_rows}")
        arrays.append(arr)
    if spec is not None:
        if len(blocks) != len(spec.blocks):
            raise ValidationError(f"expected {len(spec.blocks)} blocks, got {len(blocks)}")
        for (name, _), arr, (want_name, want_dim) in zip(blocks, arrays, spec.blocks):
            if name != want_name:
                raise ValidationError(f"block {name!r} out of order, expected {want_name!r}")
            if arr.shape[1] != want_dim:
                raise ValidationError(
                    f"block {name!r} has dim {arr.shape[1]}, spec requires {want_dim}"
                )
    return np.concatenate(arrays, axis=1)


def assemble_stack_input(
    blocks: Sequence[tuple[str, np.ndarray]],
    spec: StackInputSpec | None = None,
    train_rows: Sequence[int] | None = None,
    normalizer_kind: str = "standard",
) -> tuple[np.ndarray, Normalizer]:
    """Concatenate id-aligned blocks and normalize.

    The normalizer is fitted on `train_rows` (all rows when omitted) and
    applied to every row.
    """
    X = concat_blocks(blocks, spec)
    fit_rows = X if train_rows is None else X[np.asarray(train_rows, dtype=np.int64)]
    normalizer = Normalizer.fit(fit_rows, kind=normalizer_kind)
    return normalizer.transform(X), normalizer


def one_hot(labels) -> np.ndarray:
    """N x 2 one-hot targets, column 0 = fake, column 1 = real."""
    T = np.zeros((len(labels), 2), dtype=np.float64)
    for i, lab in enumerate(labels):
        if lab == NEGATIVE_LABEL:
            T[i, FAKE_SLOT] = 1.0
        elif lab == POSITIVE_LABEL:
            T[i, REAL_SLOT] = 1.0
        else:
            raise DataError(f"unknown label {lab!r}")
    return T


@dataclass
class MlpModel:
    network: MlpNetwork
    normalizer: Normalizer
    config: MlpConfig
    loss_history: list[float]


def train_mlp(
    X,
    labels,
    cfg: MlpConfig,
    normalizer: Normalizer | None = None,
) -> MlpModel:
    """Train the stacking network on raw (unnormalized) assembled input.

    A normalizer is fitted on X unless one is supplied (pass the one from
    assemble_stack_input when X already went through it, or fit on the
    training subset only). epochs=0 returns the initialized, untrained
    model. Deterministic for a fixed config seed.
    """
    X = np.asarray(X, dtype=np.float64)
    if not np.isfinite(X).all():
        raise DataError("X contains NaN or Inf")
    T = one_hot(labels)
    if T[:, REAL_SLOT].sum() == 0 or T[:, FAKE_SLOT].sum() == 0:
        raise StateError("training data contains a single class")
    if X.shape[1] != cfg.layer_dims[0]:
        raise StateError(f"X has {X.shape[1]} features, config expects {cfg.layer_dims[0]}")
    if normalizer is None:
        normalizer = Normalizer.fit(X)
    Xn = normalizer.transform(X)
    rng = np.random.default_rng(cfg.seed)
    net = MlpNetwork(cfg.layer_dims, rng, cfg.output_activation)
    history = train_network(net, Xn, T, cfg, rng)
    return MlpModel(net, normalizer, cfg, history)


def mlp_forward(m: MlpModel, X, training: bool = False,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """N x 2 output activations; inference applies no dropout or rescaling."""
    Xn = m.normalizer.transform(np.asarray(X, dtype=np.float64))
    out, _ = m.network.forward(Xn, training=training, dropout_p=m.config.dropout_p, rng=rng)
    return out


def mlp_predict(m: MlpModel, X) -> list[str]:
    """Argmax over the two output nodes; exact ties resolve to fake."""
    out = mlp_forward(m, X)
    winners = np.argmax(out, axis=1)  # ties pick the first (fake) slot
    return [POSITIVE_LABEL if w == REAL_SLOT else NEGATIVE_LABEL for w in winners]


def stack_base_outputs(
    columns: Sequence[tuple[str, np.ndarray]], mode: str = "labels"
) -> np.ndarray:
    """Assemble per-model output columns into the meta-feature matrix.

    mode="labels": every value must be 0 or 1 (fake/real). mode="decision":
    raw decision scores for hinge models, sigmoid outputs for logistic
    ones, taken as given.
    """
    if mode not in ("labels", "decision"):
        raise StateError(f"unknown stacking mode {mode!r}")
    if len(columns) < 2:
        raise ValidationError(f"linear stacking needs >= 2 base models, got {len(columns)}")
    n_rows = None
    cols = []
    for name, col in columns:
        col = np.asarray(col, dtype=np.float64).reshape(-1)
        if n_rows is None:
            n_rows = col.shape[0]
        elif col.shape[0] != n_rows:
            raise ValidationError(f"column {name!r} has {col.shape[0]} rows, expected {n_rows}")
        if mode == "labels" and not np.isin(col, (0.0, 1.0)).all():
            raise ValidationError(f"column {name!r} has non-binary values in labels mode")
        cols.append(col)
    return np.column_stack(cols)


def labels_to_binary(labels) -> np.ndarray:
    """fake -> 0, real -> 1, for label-mode stacking columns."""
    return np.array([1.0 if lab == POSITIVE_LABEL else 0.0 for lab in labels])


# Table-derived stacker presets: hinge + elastic net, l1_ratio by mode.
STACKER_PRESETS = {
    "labels": SgdConfig(loss="hinge", penalty="elasticnet", l1_ratio=0.3),
    "decision": SgdConfig(loss="hinge", penalty="elasticnet", l1_ratio=0.8),
}


def train_linear_stack(
    meta: np.ndarray, labels, cfg: SgdConfig | None = None, mode: str = "labels"
) -> LinearModel:
    """Fit the linear stacker; defaults to the shipped preset for `mode`."""
    if cfg is None:
        if mode not in STACKER_PRESETS:
            raise StateError(f"unknown stacking mode {mode!r}")
        cfg = STACKER_PRESETS[mode]
    return train_sgd(meta, labels, cfg)


# Persistence: JSON manifest (config, layer dims, normalizer stats) plus a
# little-endian float64 block with every weight matrix and bias vector.

def save_mlp(m: MlpModel, prefix: str | Path) -> None:
    cfg = m.config
    manifest = {
        "kind": "mlp",
        "config": {
            "layer_dims": list(cfg.layer_dims),
            "dropout_p": cfg.dropout_p,
            "learning_rate": cfg.learning_rate,
            "batch_size": cfg.batch_size,
            "epochs": cfg.epochs,
            "output_activation": cfg.output_activation,
            "seed": cfg.seed,
        },
        "normalizer": {
            "kind": m.normalizer.kind,
            "mean": None if m.normalizer.mean is None else m.normalizer.mean.tolist(),
            "std": None if m.normalizer.std is None else m.normalizer.std.tolist(),
        },
        "loss_history": m.loss_history,
    }
    blocks = []
    for w, b in zip(m.network.weights, m.network.biases):
        blocks.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
        blocks.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    atomic_write_json(Path(str(prefix) + ".manifest.json"), manifest)
    atomic_write_bytes(Path(str(prefix) + ".params.bin"), b"".join(blocks))


def load_mlp(prefix: str | Path) -> MlpModel:
    manifest = read_json(Path(str(prefix) + ".manifest.json"))
    if manifest.get("kind") != "mlp":
        raise FormatError(f"{prefix}: manifest kind is {manifest.get('kind')!r}, expected 'mlp'")
    cfg_raw = dict(manifest["config"])
    cfg_raw["layer_dims"] = tuple(cfg_raw["layer_dims"])
    cfg = MlpConfig(**cfg_raw)
    norm_raw = manifest["normalizer"]
    normalizer = Normalizer(
        kind=norm_raw["kind"],
        mean=None if norm_raw["mean"] is None else np.array(norm_raw["mean"]),
        std=None if norm_raw["std"] is None else np.array(norm_raw["std"]),
    )
    raw = Path(str(prefix) + ".params.bin").read_bytes()
    dims = cfg.layer_dims
    expected = 8 * sum(fi * fo + fo for fi, fo in zip(dims[:-1], dims[1:]))
    if len(raw) != expected:
        raise FormatError(f"{prefix}: parameter block is {len(raw)} bytes, expected {expected}")
    net = MlpNetwork(dims, np.random.default_rng(0), cfg.output_activation)
    flat = np.frombuffer(raw, dtype="<f8")
    offset = 0
    for l, (fi, fo) in enumerate(zip(dims[:-1], dims[1:])):
        net.weights[l] = flat[offset : offset + fi * fo].reshape(fi, fo).copy()
        offset += fi * fo
        net.biases[l] = flat[offset : offset + fo].copy()
        offset += fo
    return MlpModel(net, normalizer, cfg, list(manifest.get("loss_history", [])))
