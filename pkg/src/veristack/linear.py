"""SGD-trained linear classifiers with logistic and hinge losses.

One engine covers the base classifiers and the linear stackers. Training
is plain per-sample stochastic gradient descent with an inverse-scaling
learning rate eta_t = eta0 / t^power_t (global step counter t), seeded
per-epoch shuffling, and an elastic-net penalty whose L1 part uses the
truncated cumulative-penalty update so sparsity stays stable.

Internally real = +1 and fake = -1, which fixes the sign convention of
decision scores: positive means "real".
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError, StateError
from .ioutil import atomic_write_bytes, atomic_write_json, read_json

LOSSES = ("log", "hinge")
PENALTIES = ("l2", "l1", "elasticnet")

POSITIVE_LABEL = "real"
NEGATIVE_LABEL = "fake"


@dataclass(frozen=True)
class SgdConfig:
    loss: str = "log"
    penalty: str = "l2"
    alpha: float = 1e-4
    l1_ratio: float = 0.15
    power_t: float = 0.5
    eta0: float = 0.1
    epochs: int = 1000
    tol: float = 1e-3
    seed: int = 0
    C: float | None = None  # shorthand: alpha = 1 / (C * N), resolved at fit time

    def __post_init__(self) -> None:
        if self.loss not in LOSSES:
            raise StateError(f"unknown loss {self.loss!r}")
        if self.penalty not in PENALTIES:
            raise StateError(f"unknown penalty {self.penalty!r}")
        if self.alpha <= 0 and self.C is None:
            raise StateError("alpha must be > 0")
        if self.eta0 <= 0:
            raise StateError("eta0 must be > 0")
        if not 0.0 <= self.l1_ratio <= 1.0:
            raise StateError("l1_ratio must lie in [0, 1]")

    def effective_alpha(self, n_samples: int) -> float:
        if self.C is not None:
            return 1.0 / (self.C * n_samples)
        return self.alpha

    def effective_l1_ratio(self) -> float:
        if self.penalty == "l1":
            return 1.0
        if self.penalty == "l2":
            return 0.0
        return self.l1_ratio


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    loss: str
    classes: tuple[str, str] = (NEGATIVE_LABEL, POSITIVE_LABEL)
    config: SgdConfig | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.weights).all() or not math.isfinite(self.bias):
            raise DataError("linear model parameters must be finite")


def encode_labels(labels) -> np.ndarray:
    """Map real -> +1, fake -> -1."""
    y = np.empty(len(labels), dtype=np.float64)
    for i, lab in enumerate(labels):
        if lab == POSITIVE_LABEL:
            y[i] = 1.0
        elif lab == NEGATIVE_LABEL:
            y[i] = -1.0
        else:
            raise DataError(f"unknown label {lab!r}")
    return y


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _loss_value(loss: str, y: np.ndarray, z: np.ndarray) -> float:
    margins = y * z
    if loss == "hinge":
        return float(np.maximum(0.0, 1.0 - margins).mean())
    # log loss: ln(1 + exp(-m)), computed via the stable softplus form
    return float((np.logaddexp(0.0, -margins)).mean())


def objective(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, loss: str, alpha: float, r: float
) -> float:
    """(1/N) sum L + alpha * (r * ||w||_1 + (1-r)/2 * ||w||_2^2)."""
    z = X @ w + b
    penalty = alpha * (r * np.abs(w).sum() + 0.5 * (1.0 - r) * float(w @ w))
    return _loss_value(loss, y, z) + penalty


def train_sgd(X, labels, cfg: SgdConfig) -> LinearModel:
    """Fit a linear model by per-sample SGD.

    Stops after cfg.epochs passes or as soon as the improvement of the
    epoch objective drops below cfg.tol. Deterministic for a fixed config
    (seeded shuffling).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"X must be 2-D, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise DataError("X contains NaN or Inf")
    n, dim = X.shape
    if n < 2:
        raise StateError(f"need at least 2 samples, got {n}")
    y = encode_labels(labels)
    if len(y) != n:
        raise DataError(f"{n} rows but {len(y)} labels")
    if len(np.unique(y)) < 2:
        raise StateError("training data contains a single class")

    alpha = cfg.effective_alpha(n)
    r = cfg.effective_l1_ratio()
    rng = np.random.default_rng(cfg.seed)

    w = np.zeros(dim)
    b = 0.0
    q = np.zeros(dim)  # cumulative L1 penalty actually applied, per weight
    u = 0.0  # cumulative L1 penalty available so far
    t = 1
    prev = objective(X, y, w, b, cfg.loss, alpha, r)
    for _ in range(cfg.epochs):
        for i in rng.permutation(n):
            eta = cfg.eta0 / t**cfg.power_t
            x_i = X[i]
            z = float(x_i @ w) + b
            if cfg.loss == "hinge":
                g = -y[i] if y[i] * z < 1.0 else 0.0
            else:
                g = -y[i] * _sigmoid(-y[i] * z)
            if g != 0.0:
                w -= eta * g * x_i
                b -= eta * g
            # proximal penalty steps: stable for any eta * alpha
            if r < 1.0 and alpha > 0.0:
                w /= 1.0 + eta * alpha * (1.0 - r)
            if r > 0.0 and alpha > 0.0:
                u += eta * alpha * r
                before = w.copy()
                pos = before > 0
                neg = before < 0
                w[pos] = np.maximum(0.0, before[pos] - (u + q[pos]))
                w[neg] = np.minimum(0.0, before[neg] + (u - q[neg]))
                q += w - before
            t += 1
        cur = objective(X, y, w, b, cfg.loss, alpha, r)
        if prev - cur < cfg.tol:
            break
        prev = cur
    return LinearModel(w, b, cfg.loss, config=cfg)


def decision_function(m: LinearModel, X) -> np.ndarray:
    """Raw scores w.x + b, one per row."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != m.weights.shape[0]:
        raise StateError(f"X has {X.shape[1]} columns, model expects {m.weights.shape[0]}")
    return X @ m.weights + m.bias


def predict(m: LinearModel, X) -> list[str]:
    """score > 0 -> real, otherwise fake (ties go to fake)."""
    scores = decision_function(m, X)
    return [POSITIVE_LABEL if s > 0 else NEGATIVE_LABEL for s in scores]


def predict_proba(m: LinearModel, X) -> np.ndarray:
    """P(real) per row via the sigmoid of the decision score; log loss only."""
    if m.loss != "log":
        raise StateError("predict_proba requires a log-loss model (hinge is uncalibrated)")
    scores = decision_function(m, X)
    out = np.empty_like(scores)
    np.negative(scores, out=out)
    np.clip(out, -745.0, 745.0, out=out)  # exp underflow guard
    return 1.0 / (1.0 + np.exp(out))


# Persistence: JSON manifest (config, classes, bias) + binary weight block.

def save_linear(m: LinearModel, prefix: str | Path) -> None:
    cfg = m.config or SgdConfig(loss=m.loss)
    manifest = {
        "kind": "linear",
        "loss": m.loss,
        "classes": list(m.classes),
        "bias": m.bias,
        "dim": int(m.weights.shape[0]),
        "config": {
            "loss": cfg.loss,
            "penalty": cfg.penalty,
            "alpha": cfg.alpha,
            "l1_ratio": cfg.l1_ratio,
            "power_t": cfg.power_t,
            "eta0": cfg.eta0,
            "epochs": cfg.epochs,
            "tol": cfg.tol,
            "seed": cfg.seed,
            "C": cfg.C,
        },
    }
    atomic_write_json(Path(str(prefix) + ".manifest.json"), manifest)
    atomic_write_bytes(
        Path(str(prefix) + ".weights.bin"),
        np.ascontiguousarray(m.weights, dtype="<f8").tobytes(),
    )


def load_linear(prefix: str | Path) -> LinearModel:
    manifest = read_json(Path(str(prefix) + ".manifest.json"))
    if manifest.get("kind") != "linear":
        raise FormatError(f"{prefix}: manifest kind is {manifest.get('kind')!r}, expected 'linear'")
    raw = Path(str(prefix) + ".weights.bin").read_bytes()
    dim = int(manifest["dim"])
    if len(raw) != 8 * dim:
        raise FormatError(f"{prefix}: weight block is {len(raw)} bytes, expected {8 * dim}")
    weights = np.frombuffer(raw, dtype="<f8").copy()
    cfg_raw = manifest["config"]
    cfg = SgdConfig(**cfg_raw)
    return LinearModel(
        weights, float(manifest["bias"]), manifest["loss"],
        tuple(manifest["classes"]), cfg,
    )
