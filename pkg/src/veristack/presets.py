"""Shipped model presets and tuning grids.

Each linear preset names the representation it classifies and the loss
family (lr = logistic, svm = hinge via SGD). The "reference" MLP preset is
the canonical neural-stacking configuration; "paper" is accepted as an
alias for it.
"""

from .errors import StateError
from .linear import SgdConfig
from .lsa import LsaConfig
from .mlp import CANONICAL_LAYER_DIMS, MlpConfig

LINEAR_PRESETS: dict[str, SgdConfig] = {
    "lsa-lr": SgdConfig(loss="log", penalty="elasticnet", l1_ratio=0.05, power_t=0.5),
    "handcrafted-svm": SgdConfig(loss="hinge", penalty="elasticnet", l1_ratio=0.95, power_t=0.1),
    "distilbert-emb-lr": SgdConfig(loss="log", penalty="l2", C=0.1),
    "roberta-emb-lr": SgdConfig(loss="log", penalty="l2", C=0.01),
    "xlm-emb-svm": SgdConfig(loss="hinge", penalty="l2", C=0.1),
    "linear-stacking": SgdConfig(loss="hinge", penalty="elasticnet", l1_ratio=0.3),
    "linear-stacking-probs": SgdConfig(loss="hinge", penalty="elasticnet", l1_ratio=0.8),
    "tax2vec-tfidf-sgd": SgdConfig(
        loss="hinge", penalty="elasticnet", alpha=0.0001, l1_ratio=0.15, power_t=0.5
    ),
}

# Representation each base preset consumes, for CLI wiring.
PRESET_REPRESENTATION = {
    "lsa-lr": "lsa",
    "handcrafted-svm": "handcrafted",
    "distilbert-emb-lr": "embedding",
    "roberta-emb-lr": "embedding",
    "xlm-emb-svm": "embedding",
}

# LSA settings: the best standalone run and the smaller stacking variant.
LSA_PRESETS: dict[str, LsaConfig] = {
    "best": LsaConfig(n=2500, d=512),
    "stack": LsaConfig(n=2500, d=256),
}

MLP_PRESETS: dict[str, MlpConfig] = {
    "reference": MlpConfig(
        layer_dims=CANONICAL_LAYER_DIMS,
        dropout_p=0.7,
        learning_rate=0.001,
        batch_size=32,
        epochs=100,
    ),
}
MLP_PRESETS["paper"] = MLP_PRESETS["reference"]

# Tuning grid for the stacking network (duplicate rate deduplicated).
MLP_LEARNING_RATES = (0.0001, 0.005, 0.001, 0.01, 0.05, 0.1)
MLP_DROPOUTS = (0.1, 0.3, 0.5, 0.7)
MLP_BATCH_SIZES = (16, 32, 64, 128, 256)
MLP_EPOCHS = (10, 100, 1000)


def mlp_grid_candidates() -> list[dict]:
    """All 360 stacking-network configurations of the tuning grid."""
    return [
        {"learning_rate": lr, "dropout_p": p, "batch_size": bs, "epochs": ep}
        for lr in MLP_LEARNING_RATES
        for p in MLP_DROPOUTS
        for bs in MLP_BATCH_SIZES
        for ep in MLP_EPOCHS
    ]


def linear_preset(name: str) -> SgdConfig:
    try:
        return LINEAR_PRESETS[name]
    except KeyError:
        raise StateError(
            f"unknown linear preset {name!r}; available: {sorted(LINEAR_PRESETS)}"
        ) from None


def mlp_preset(name: str) -> MlpConfig:
    try:
        return MLP_PRESETS[name]
    except KeyError:
        raise StateError(f"unknown MLP preset {name!r}; available: {sorted(MLP_PRESETS)}") from None
