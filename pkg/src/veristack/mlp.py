"""Feed-forward network used as the neural stacking head.

Architecture: affine -> SELU -> inverted dropout for every hidden layer,
then affine -> per-node sigmoid on the 2-node output layer, trained with
cross-entropy against one-hot targets by plain minibatch SGD. All math is
float64 numpy; gradients are exact and checked against central finite
differences.

The output loss treats each sigmoid node as an independent Bernoulli, so
the per-batch loss is

    L = mean_i sum_k [ t_ik * softplus(-z_ik) + (1 - t_ik) * softplus(z_ik) ]

whose gradient w.r.t. the pre-activation z is (sigmoid(z) - T) / batch.
A softmax head (categorical cross-entropy) is available as a config
alternative.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, StateError

SELU_ALPHA = 1.6732632423543772
SELU_LAMBDA = 1.0507009873554805

CANONICAL_LAYER_DIMS = (2576, 896, 640, 512, 216, 2)


@dataclass(frozen=True)
class MlpConfig:
    layer_dims: tuple[int, ...] = CANONICAL_LAYER_DIMS
    dropout_p: float = 0.7
    learning_rate: float = 0.001
    batch_size: int = 32
    epochs: int = 100
    output_activation: str = "sigmoid"  # or "softmax"
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.layer_dims) < 2:
            raise StateError("layer_dims needs at least input and output sizes")
        if self.layer_dims[-1] != 2:
            raise StateError("the output layer must have 2 nodes (fake, real)")
        if not 0.0 <= self.dropout_p < 1.0:
            raise StateError("dropout_p must lie in [0, 1)")
        if self.output_activation not in ("sigmoid", "softmax"):
            raise StateError(f"unknown output activation {self.output_activation!r}")
        if self.batch_size < 1 or self.epochs < 0:
            raise StateError("batch_size must be >= 1 and epochs >= 0")


def selu(z: np.ndarray) -> np.ndarray:
    return SELU_LAMBDA * np.where(z > 0, z, SELU_ALPHA * np.expm1(z))


def selu_grad(z: np.ndarray) -> np.ndarray:
    return SELU_LAMBDA * np.where(z > 0, 1.0, SELU_ALPHA * np.exp(np.minimum(z, 0.0)))


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softplus(z: np.ndarray) -> np.ndarray:
    # log(1 + e^z), stable for large |z|
    return np.logaddexp(0.0, z)


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class MlpNetwork:
    """Weights/biases plus forward, loss and exact backward passes.

    Parameters live as lists of float64 arrays; weights[l] has shape
    (fan_in, fan_out). Initialization is LeCun normal (std 1/sqrt(fan_in)),
    the standard pairing with SELU.
    """

    def __init__(self, layer_dims: tuple[int, ...], rng: np.random.Generator,
                 output_activation: str = "sigmoid"):
        self.layer_dims = tuple(layer_dims)
        self.output_activation = output_activation
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
            std = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.normal(0.0, std, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def forward(
        self,
        X: np.ndarray,
        training: bool = False,
        dropout_p: float = 0.0,
        rng: np.random.Generator | None = None,
    ):
        """Return (output activations, caches for backward).

        Inverted dropout: at train time surviving hidden activations are
        scaled by 1/(1-p); inference applies neither masking nor rescaling.
        """
        if X.shape[1] != self.layer_dims[0]:
            raise StateError(f"input has {X.shape[1]} features, network expects {self.layer_dims[0]}")
        use_dropout = training and dropout_p > 0.0
        if use_dropout and rng is None:
            raise StateError("training forward pass with dropout needs an rng")
        h = X
        pre: list[np.ndarray] = []
        post: list[np.ndarray] = [X]
        masks: list[np.ndarray | None] = []
        for l in range(self.n_layers - 1):
            z = h @ self.weights[l] + self.biases[l]
            h = selu(z)
            mask = None
            if use_dropout:
                mask = (rng.random(h.shape) >= dropout_p) / (1.0 - dropout_p)
                h = h * mask
            pre.append(z)
            post.append(h)
            masks.append(mask)
        z_out = h @ self.weights[-1] + self.biases[-1]
        out = sigmoid(z_out) if self.output_activation == "sigmoid" else softmax(z_out)
        caches = (pre, post, masks, z_out)
        return out, caches

    def loss(self, X: np.ndarray, T: np.ndarray) -> float:
        """Mean cross-entropy of a dropout-free forward pass against one-hot T."""
        _, caches = self.forward(X)
        return self._loss_from_preact(caches[3], T)

    def _loss_from_preact(self, z_out: np.ndarray, T: np.ndarray) -> float:
        if self.output_activation == "sigmoid":
            per_node = T * _softplus(-z_out) + (1.0 - T) * _softplus(z_out)
            return float(per_node.sum(axis=1).mean())
        log_probs = z_out - z_out.max(axis=1, keepdims=True)
        log_probs = log_probs - np.log(np.exp(log_probs).sum(axis=1, keepdims=True))
        return float(-(T * log_probs).sum(axis=1).mean())

    def loss_and_grads(
        self,
        X: np.ndarray,
        T: np.ndarray,
        training: bool = False,
        dropout_p: float = 0.0,
        rng: np.random.Generator | None = None,
    ):
        """One forward/backward pass; returns (loss, dW list, db list)."""
        out, (pre, post, masks, z_out) = self.forward(X, training, dropout_p, rng)
        batch = X.shape[0]
        loss = self._loss_from_preact(z_out, T)
        # Both heads share the same pre-activation gradient form.
        delta = (out - T) / batch
        grads_w = [np.empty(0)] * self.n_layers
        grads_b = [np.empty(0)] * self.n_layers
        grads_w[-1] = post[-1].T @ delta
        grads_b[-1] = delta.sum(axis=0)
        g = delta @ self.weights[-1].T
        for l in range(self.n_layers - 2, -1, -1):
            if masks[l] is not None:
                g = g * masks[l]
            g = g * selu_grad(pre[l])
            grads_w[l] = post[l].T @ g
            grads_b[l] = g.sum(axis=0)
            if l > 0:
                g = g @ self.weights[l].T
        return loss, grads_w, grads_b

    def sgd_step(self, grads_w, grads_b, lr: float) -> None:
        for l in range(self.n_layers):
            self.weights[l] -= lr * grads_w[l]
            self.biases[l] -= lr * grads_b[l]

    def parameters_finite(self) -> bool:
        return all(np.isfinite(w).all() for w in self.weights) and all(
            np.isfinite(b).all() for b in self.biases
        )

    def layer_norms(self) -> list[float]:
        return [float(np.linalg.norm(w)) for w in self.weights]


def train_network(
    net: MlpNetwork,
    X: np.ndarray,
    T: np.ndarray,
    cfg: MlpConfig,
    rng: np.random.Generator,
) -> list[float]:
    """Minibatch SGD over `cfg.epochs` seeded-shuffle passes.

    Returns the per-epoch mean training loss. Aborts with diagnostics the
    moment a non-finite loss shows up.
    """
    n = X.shape[0]
    history: list[float] = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, gw, gb = net.loss_and_grads(
                X[idx], T[idx], training=True, dropout_p=cfg.dropout_p, rng=rng
            )
            if not np.isfinite(loss):
                raise DataError(
                    f"non-finite loss at epoch {epoch}, batch {n_batches}; "
                    f"layer weight norms {net.layer_norms()}"
                )
            net.sgd_step(gw, gb, cfg.learning_rate)
            epoch_loss += loss
            n_batches += 1
        if not net.parameters_finite():
            raise DataError(f"non-finite parameters after epoch {epoch}")
        history.append(epoch_loss / max(1, n_batches))
    return history


def gradient_check(
    layer_dims: tuple[int, ...] = (6, 5, 4, 3, 2, 2),
    seed: int = 0,
    batch_size: int = 8,
    h: float = 1e-6,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Runs on a freshly initialized float64 network with dropout off, over a
    random batch with random one-hot targets. Relative error per parameter
    is |a - n| / max(|a|, |n|, 1e-8).
    """
    rng = np.random.default_rng(seed)
    net = MlpNetwork(layer_dims, rng)
    X = rng.standard_normal((batch_size, layer_dims[0]))
    hot = rng.integers(0, 2, size=batch_size)
    T = np.zeros((batch_size, 2))
    T[np.arange(batch_size), hot] = 1.0

    _, grads_w, grads_b = net.loss_and_grads(X, T)
    max_rel = 0.0
    for params, grads in ((net.weights, grads_w), (net.biases, grads_b)):
        for arr, grad in zip(params, grads):
            flat = arr.ravel()
            gflat = grad.ravel()
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + h
                up = net.loss(X, T)
                flat[j] = orig - h
                down = net.loss(X, T)
                flat[j] = orig
                numeric = (up - down) / (2.0 * h)
                denom = max(abs(gflat[j]), abs(numeric), 1e-8)
                max_rel = max(max_rel, abs(gflat[j] - numeric) / denom)
    return max_rel
