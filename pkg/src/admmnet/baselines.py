"""Backprop baselines: the same biasless ReLU network, trained by SGD or Adam.

These exist so the multiplier-based trainer can be compared against
standard gradient descent on identical footing: identical architecture,
identical Gaussian weight initialization (the weight streams of a given
seed match the other trainer's, layer for layer), and the same forward
pass.  The loss is the squared error averaged over all output entries, the
convention under which the optimizers' textbook default learning rates are
meaningful.  Training is mini-batch with a seeded reshuffle each epoch and
is fully deterministic given its seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admm import ActivationKind, accuracy, predict
from .linalg import DimensionMismatchError, SeededRng, gaussian_matrix

__all__ = [
    "SgdConfig",
    "AdamConfig",
    "MlpState",
    "init_mlp",
    "forward_cache",
    "mean_squared_loss",
    "backward",
    "sgd_step",
    "adam_step",
    "train_baseline",
]


@dataclass(frozen=True)
class SgdConfig:
    """Plain gradient descent; the stated default rate is the one commonly
    shipped for this optimizer."""

    lr: float = 0.01

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")


@dataclass(frozen=True)
class AdamConfig:
    """Adam with bias correction; defaults are the optimizer's canonical
    constants."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(
                f"decay rates must lie in [0, 1), got {self.beta1}, {self.beta2}"
            )
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")


OptimizerConfig = SgdConfig | AdamConfig


@dataclass
class MlpState:
    """Weights plus optimizer bookkeeping.

    ``adam_m`` / ``adam_v`` are the per-weight moment buffers, allocated
    lazily on the first Adam step; ``step_count`` counts optimizer steps
    taken (both optimizers count).  Steps return new states; buffers and
    weights of the input state are never mutated.
    """

    dims: tuple[int, ...]
    weights: list[np.ndarray]
    optimizer: OptimizerConfig
    step_count: int = 0
    adam_m: list[np.ndarray] | None = None
    adam_v: list[np.ndarray] | None = None


def init_mlp(dims, optimizer: OptimizerConfig, seed: int, init_std: float = 0.1) -> MlpState:
    """Gaussian-initialized network.

    Weight matrix i draws from child stream i of ``seed``, the same stream
    assignment the multiplier-based trainer uses, so both methods start
    from identical weights under identical seeds.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ValueError(f"dims must list at least two positive sizes, got {dims}")
    L = len(dims) - 1
    streams = SeededRng(seed).split(L)
    weights = [
        gaussian_matrix(streams[i], dims[i + 1], dims[i], init_std) for i in range(L)
    ]
    return MlpState(dims=dims, weights=weights, optimizer=optimizer)


def forward_cache(state: MlpState, x0: np.ndarray):
    """Forward pass keeping what backprop needs.

    Returns ``(output, caches)`` where ``caches`` is a list of per-layer
    ``(x_in, z)`` pairs: the layer's input and its pre-activation.  Hidden
    layers apply ReLU; the last layer is linear, identical to the
    prediction path of the other trainer.
    """
    x = np.asarray(x0, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != state.dims[0]:
        raise DimensionMismatchError(
            f"input shape {x.shape} does not match network input size {state.dims[0]}"
        )
    caches = []
    L = len(state.weights)
    for i, w in enumerate(state.weights):
        z = w @ x
        caches.append((x, z))
        x = np.maximum(z, 0.0) if i < L - 1 else z
    return x, caches


def mean_squared_loss(output: np.ndarray, y: np.ndarray) -> float:
    """Squared error averaged over every output entry."""
    output = np.asarray(output, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if output.shape != y.shape:
        raise DimensionMismatchError(f"shapes disagree: {output.shape} vs {y.shape}")
    return float(np.mean((output - y) ** 2))


def backward(state: MlpState, caches, y: np.ndarray) -> list[np.ndarray]:
    """Exact gradients of :func:`mean_squared_loss` w.r.t. every weight.

    Reverse-mode chain rule; the ReLU derivative at exactly zero is taken
    as zero.
    """
    y = np.asarray(y, dtype=np.float64)
    x_in, z_last = caches[-1]
    if z_last.shape != y.shape:
        raise DimensionMismatchError(
            f"targets {y.shape} do not match output {z_last.shape}"
        )
    grads: list[np.ndarray] = [None] * len(state.weights)
    delta = 2.0 * (z_last - y) / y.size
    for i in range(len(state.weights) - 1, -1, -1):
        x_in, z = caches[i]
        if i < len(state.weights) - 1:
            delta = delta * (z > 0.0)
        grads[i] = delta @ x_in.T
        if i > 0:
            delta = state.weights[i].T @ delta
    return grads


def sgd_step(state: MlpState, grads: list[np.ndarray]) -> MlpState:
    """One gradient-descent step: ``W <- W - lr * grad`` per layer."""
    if not isinstance(state.optimizer, SgdConfig):
        raise ValueError("sgd_step requires an SgdConfig optimizer")
    lr = state.optimizer.lr
    weights = [w - lr * g for w, g in zip(state.weights, grads)]
    return MlpState(
        dims=state.dims,
        weights=weights,
        optimizer=state.optimizer,
        step_count=state.step_count + 1,
    )


def adam_step(state: MlpState, grads: list[np.ndarray]) -> MlpState:
    """One bias-corrected Adam step.

    ``m <- b1 m + (1-b1) g``, ``v <- b2 v + (1-b2) g^2``, then
    ``W <- W - lr * mhat / (sqrt(vhat) + eps)`` with the corrections for
    step ``t = step_count + 1``.
    """
    if not isinstance(state.optimizer, AdamConfig):
        raise ValueError("adam_step requires an AdamConfig optimizer")
    cfg = state.optimizer
    t = state.step_count + 1
    m_prev = state.adam_m or [np.zeros_like(w) for w in state.weights]
    v_prev = state.adam_v or [np.zeros_like(w) for w in state.weights]
    m = [cfg.beta1 * mp + (1.0 - cfg.beta1) * g for mp, g in zip(m_prev, grads)]
    v = [cfg.beta2 * vp + (1.0 - cfg.beta2) * g**2 for vp, g in zip(v_prev, grads)]
    mc = 1.0 - cfg.beta1**t
    vc = 1.0 - cfg.beta2**t
    weights = [
        w - cfg.lr * (mi / mc) / (np.sqrt(vi / vc) + cfg.eps)
        for w, mi, vi in zip(state.weights, m, v)
    ]
    return MlpState(
        dims=state.dims,
        weights=weights,
        optimizer=cfg,
        step_count=t,
        adam_m=m,
        adam_v=v,
    )


def train_baseline(
    features: np.ndarray,
    one_hot: np.ndarray,
    labels: np.ndarray,
    dims,
    optimizer: OptimizerConfig,
    epochs: int,
    batch_size: int = 32,
    seed: int = 0,
    init_std: float = 0.1,
    epoch_log: list | None = None,
) -> tuple[list[np.ndarray], list[float]]:
    """Mini-batch training loop; returns final weights and the per-epoch
    training accuracy trace.

    Each epoch reshuffles the samples from a dedicated child stream of
    ``seed`` (distinct from the weight streams) and walks them in batches
    of ``batch_size``; a batch size above N is clamped to N (full batch).
    ``epochs=0`` returns the initial weights untouched.  Given the seed,
    the whole trajectory is deterministic.  When ``epoch_log`` is a list,
    one dict per epoch with the full-dataset ``loss`` and ``accuracy`` is
    appended to it as a side channel for reporting.
    """
    features = np.asarray(features, dtype=np.float64)
    one_hot = np.asarray(one_hot, dtype=np.float64)
    if epochs < 0:
        raise ValueError(f"epochs must be nonnegative, got {epochs}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be positive, got {batch_size}")
    n = features.shape[1]
    if one_hot.shape[1] != n or np.asarray(labels).shape[0] != n:
        raise DimensionMismatchError("features, targets, and labels disagree on N")
    batch = min(batch_size, n)

    state = init_mlp(dims, optimizer, seed, init_std)
    L = len(state.weights)
    # Child 3L-1 is untouched by the other trainer's 3L-1 streams (indices
    # 0..3L-2), so sharing the seed keeps the weight init identical without
    # correlating the shuffles with anything else.
    shuffle = SeededRng(seed).split(3 * L)[3 * L - 1]
    step = sgd_step if isinstance(optimizer, SgdConfig) else adam_step

    trace: list[float] = []
    for _ in range(epochs):
        order = np.argsort(shuffle.uniform(n), kind="stable")
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            _, caches = forward_cache(state, features[:, idx])
            grads = backward(state, caches, one_hot[:, idx])
            state = step(state, grads)
        scores = predict(state.weights, features, ActivationKind.RELU)
        trace.append(accuracy(scores, labels))
        if epoch_log is not None:
            epoch_log.append(
                {"loss": mean_squared_loss(scores, one_hot), "accuracy": trace[-1]}
            )
    return state.weights, trace
