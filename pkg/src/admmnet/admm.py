"""Gradient-free network training by alternating minimization with multipliers.

A feed-forward network here is a chain ``z_l = W_l x_{l-1}``, ``x_l = h(z_l)``
with ReLU hidden activations and a linear last layer.  Instead of
backpropagating gradients, training treats every weight matrix ``W_l``,
every activation ``x_l``, and every pre-activation ``z_l`` as a free
variable of an augmented-Lagrangian objective: quadratic penalties tie
``z_l`` to ``W_l x_{l-1}`` and ``x_l`` to ``h(z_l)``, a squared loss ties the
last pre-activation to the targets, and a single multiplier matrix is
attached to the last-layer constraint.  One training iteration sweeps the
variables in a fixed order and minimizes the objective exactly in each one
while the others stay put:

* ``W_l``: a least-squares problem per output row, solved by the direct
  (Cholesky) backend or iteratively (no inverse is ever formed);
* ``x_l``: a small symmetric positive definite system per sample column;
* ``z_l`` (hidden): an element-wise two-branch closed form that searches
  both sides of the ReLU kink;
* ``z_L`` (last): an element-wise closed form from the squared loss;
* the multiplier: a gradient-ascent step on the last-layer residual.

Every update is deterministic and pure; :func:`train_iteration` returns a
new state (arrays it did not touch are shared with the input state).  All
data matrices are column-per-sample.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DimensionMismatchError,
    SeededRng,
    gaussian_matrix,
    solve_normal_equations,
    solve_spd,
)
from .lsmr import LsmrParams, lsmr_solve_multi

__all__ = [
    "ActivationKind",
    "LossKind",
    "DirectSolver",
    "LsmrSolver",
    "HyperParams",
    "NetworkState",
    "TrainReport",
    "relu",
    "init_state",
    "weight_update",
    "activation_update",
    "output_update",
    "last_output_update",
    "lagrangian_update",
    "evaluate_lagrangian",
    "train_iteration",
    "train_admm",
    "predict",
    "accuracy",
]


class ActivationKind(enum.Enum):
    """Hidden-layer nonlinearity.  Only ReLU is implemented; the output
    update relies on the activation being piecewise linear."""

    RELU = "relu"


class LossKind(enum.Enum):
    """Loss tying the last pre-activation to the targets.  Squared loss is
    the one with a closed-form last-output update; the enum exists so a
    hinge variant can be added without touching call sites."""

    SQUARED = "squared"


@dataclass(frozen=True)
class DirectSolver:
    """Least-squares backend that factorizes (Cholesky on the normal or
    SPD system).  May raise on rank-deficient systems."""


@dataclass(frozen=True)
class LsmrSolver:
    """Iterative least-squares backend; never forms a matrix inverse and
    always returns.  ``params`` controls its stopping tests."""

    params: LsmrParams = field(default_factory=LsmrParams)


Solver = DirectSolver | LsmrSolver


@dataclass(frozen=True)
class HyperParams:
    """Training hyperparameters for a network with L weight layers.

    ``gamma`` holds the activation-consistency penalties for the L-1 hidden
    layers; ``beta`` holds the pre-activation-consistency penalties for all
    L layers (the last entry also weights the multiplier constraint).  All
    penalties must be strictly positive: the activation update's system
    matrix is positive definite, and the closed-form updates are unique
    minimizers, only under that condition.
    """

    gamma: tuple[float, ...]
    beta: tuple[float, ...]
    activation: ActivationKind = ActivationKind.RELU
    loss: LossKind = LossKind.SQUARED
    init_std: float = 0.1
    seed: int = 0
    admm_iters: int = 50
    solver: Solver = field(default_factory=LsmrSolver)

    def __post_init__(self):
        if len(self.beta) != len(self.gamma) + 1:
            raise ValueError(
                f"need one beta per layer and one gamma per hidden layer: "
                f"got {len(self.gamma)} gammas, {len(self.beta)} betas"
            )
        if any(g <= 0 for g in self.gamma) or any(b <= 0 for b in self.beta):
            raise ValueError("penalty parameters must be strictly positive")
        if self.init_std <= 0:
            raise ValueError(f"init_std must be positive, got {self.init_std}")
        if self.admm_iters < 0:
            raise ValueError(f"admm_iters must be nonnegative, got {self.admm_iters}")

    @property
    def n_layers(self) -> int:
        return len(self.beta)

    @staticmethod
    def uniform(n_layers: int, gamma: float = 10.0, beta: float = 1.0, **kw) -> "HyperParams":
        """Same penalty value at every layer; the configuration used by all
        presets."""
        if n_layers < 1:
            raise ValueError(f"need at least one layer, got {n_layers}")
        return HyperParams(gamma=(gamma,) * (n_layers - 1), beta=(beta,) * n_layers, **kw)


@dataclass
class NetworkState:
    """All training variables of an L-layer network on N samples.

    ``weights[i]`` maps layer i's input to its pre-activation, shape
    ``(dims[i+1], dims[i])``.  ``activations[0]`` is the input data and
    ``activations[l]`` for l >= 1 the trained activation variables, shape
    ``(dims[l], N)``.  ``preactivations[i]`` is the variable for layer
    ``i+1``'s linear output, shape ``(dims[i+1], N)``; the last one is the
    network-output variable, and ``lam`` is its multiplier with the same
    shape.  Treat states as immutable; updates return new states.
    """

    dims: tuple[int, ...]
    weights: list[np.ndarray]
    activations: list[np.ndarray]
    preactivations: list[np.ndarray]
    lam: np.ndarray

    @property
    def n_layers(self) -> int:
        return len(self.dims) - 1

    @property
    def n_samples(self) -> int:
        return self.activations[0].shape[1]

    def constraint_residual(self) -> float:
        """Frobenius norm of the last-layer constraint violation
        ``z_L - W_L x_{L-1}``."""
        w_term = self.weights[-1] @ self.activations[-1]
        return float(np.linalg.norm(self.preactivations[-1] - w_term))


@dataclass
class TrainReport:
    """Per-iteration training metrics, one entry per completed iteration,
    plus the final held-out accuracy when test data was supplied."""

    lagrangian: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    constraint_residual: list[float] = field(default_factory=list)
    test_accuracy: float | None = None


def relu(z: np.ndarray) -> np.ndarray:
    """Element-wise max(z, 0)."""
    return np.maximum(np.asarray(z, dtype=np.float64), 0.0)


def _apply_activation(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    if kind is ActivationKind.RELU:
        return relu(z)
    raise ValueError(f"unsupported activation {kind!r}")


def init_state(dims, data: np.ndarray, hp: HyperParams) -> NetworkState:
    """Random starting point for training.

    Weights, hidden activations, and pre-activations are filled with i.i.d.
    Gaussian entries of standard deviation ``hp.init_std``; the multiplier
    starts at zero; ``activations[0]`` is the data itself.  Each array draws
    from its own child stream of ``hp.seed`` (weights first, in layer
    order), so two calls with the same seed build identical states and the
    weight streams can be reused verbatim by other training methods.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ValueError(f"need input and output dimensions, got dims={dims}")
    if any(d < 1 for d in dims):
        raise ValueError(f"all layer sizes must be positive, got dims={dims}")
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] != dims[0]:
        raise DimensionMismatchError(
            f"data shape {data.shape} does not match input dimension {dims[0]}"
        )
    n = data.shape[1]
    if n < 1:
        raise ValueError("need at least one sample")
    if hp.n_layers != len(dims) - 1:
        raise ValueError(
            f"hyperparameters describe {hp.n_layers} layers, dims describe {len(dims) - 1}"
        )

    L = len(dims) - 1
    streams = SeededRng(hp.seed).split(3 * L - 1)
    weights = [
        gaussian_matrix(streams[i], dims[i + 1], dims[i], hp.init_std) for i in range(L)
    ]
    activations = [data] + [
        gaussian_matrix(streams[L + i], dims[i + 1], n, hp.init_std) for i in range(L - 1)
    ]
    preactivations = [
        gaussian_matrix(streams[2 * L - 1 + i], dims[i + 1], n, hp.init_std)
        for i in range(L)
    ]
    lam = np.zeros((dims[-1], n))
    return NetworkState(
        dims=dims,
        weights=weights,
        activations=activations,
        preactivations=preactivations,
        lam=lam,
    )


def weight_update(z_l: np.ndarray, x_prev: np.ndarray, solver: Solver) -> np.ndarray:
    """Best weight matrix for fixed pre-activations and inputs.

    Returns the W minimizing ``||W x_prev - z_l||_F``: row i is the
    least-squares solution of ``x_prev^T w = (row i of z_l)^T``.  The direct
    backend factorizes the shared normal matrix once; the iterative backend
    runs all rows as one batched solve.  With a rank-deficient ``x_prev``
    the direct backend raises and the iterative one still returns.
    """
    z_l = np.asarray(z_l, dtype=np.float64)
    x_prev = np.asarray(x_prev, dtype=np.float64)
    if z_l.ndim != 2 or x_prev.ndim != 2:
        raise DimensionMismatchError(
            f"expected 2-D operands, got {z_l.shape} and {x_prev.shape}"
        )
    if z_l.shape[1] != x_prev.shape[1]:
        raise DimensionMismatchError(
            f"sample counts disagree: z has {z_l.shape[1]}, x_prev has {x_prev.shape[1]}"
        )
    if z_l.shape[1] == 0:
        raise ValueError("need at least one sample")
    if isinstance(solver, DirectSolver):
        return solve_normal_equations(x_prev.T, z_l.T).T
    return lsmr_solve_multi(x_prev.T, z_l, solver.params)


def activation_update(
    w_next: np.ndarray,
    z_next: np.ndarray,
    z_l: np.ndarray,
    gamma_l: float,
    beta_next: float,
    activation: ActivationKind,
    solver: Solver,
) -> np.ndarray:
    """Best hidden activation given the neighboring layers.

    Minimizes, independently per sample column,
    ``beta_next ||z_next - w_next x||^2 + gamma_l ||x - h(z_l)||^2``,
    whose unique minimizer solves the SPD system
    ``(gamma_l I + beta_next w_next^T w_next) x = gamma_l h(z_l) + beta_next w_next^T z_next``.
    The direct backend Cholesky-solves it; the iterative backend runs the
    same square system through the batched least-squares solver.
    """
    if gamma_l <= 0 or beta_next <= 0:
        raise ValueError(
            f"penalties must be positive, got gamma={gamma_l}, beta={beta_next}"
        )
    w_next = np.asarray(w_next, dtype=np.float64)
    z_next = np.asarray(z_next, dtype=np.float64)
    z_l = np.asarray(z_l, dtype=np.float64)
    m, n = w_next.shape
    if z_next.shape[0] != m or z_l.shape[0] != n or z_next.shape[1] != z_l.shape[1]:
        raise DimensionMismatchError(
            f"inconsistent shapes: w_next {w_next.shape}, z_next {z_next.shape}, "
            f"z_l {z_l.shape}"
        )
    target = _apply_activation(activation, z_l)
    gram = gamma_l * np.eye(n) + beta_next * (w_next.T @ w_next)
    rhs = gamma_l * target + beta_next * (w_next.T @ z_next)
    if isinstance(solver, DirectSolver):
        return solve_spd(gram, rhs)
    return lsmr_solve_multi(gram, rhs.T, solver.params).T


def output_update(
    x_l: np.ndarray,
    w_term: np.ndarray,
    gamma_l: float,
    beta_l: float,
    activation: ActivationKind,
) -> np.ndarray:
    """Best hidden pre-activation, element-wise.

    For each entry (a = activation target, w = linear prediction) this
    minimizes ``gamma_l (a - h(z))^2 + beta_l (z - w)^2`` over z.  With h =
    ReLU the objective is piecewise quadratic with one candidate per piece:

    * z >= 0: h(z) = z, minimizer ``max(0, (gamma a + beta w)/(gamma + beta))``;
    * z <= 0: h(z) = 0, minimizer ``min(0, w)``.

    The candidate with the smaller objective wins; ties go to the
    nonnegative branch (fixed, so results are reproducible).
    """
    if activation is not ActivationKind.RELU:
        raise ValueError(f"unsupported activation {activation!r}")
    if gamma_l <= 0 or beta_l <= 0:
        raise ValueError(f"penalties must be positive, got gamma={gamma_l}, beta={beta_l}")
    a = np.asarray(x_l, dtype=np.float64)
    w = np.asarray(w_term, dtype=np.float64)
    if a.shape != w.shape:
        raise DimensionMismatchError(
            f"shapes disagree: x_l {a.shape}, w_term {w.shape}"
        )
    z_pos = np.maximum(0.0, (gamma_l * a + beta_l * w) / (gamma_l + beta_l))
    obj_pos = gamma_l * (a - z_pos) ** 2 + beta_l * (z_pos - w) ** 2
    z_neg = np.minimum(0.0, w)
    obj_neg = gamma_l * a**2 + beta_l * (z_neg - w) ** 2
    return np.where(obj_pos <= obj_neg, z_pos, z_neg)


def last_output_update(
    y: np.ndarray,
    w_term: np.ndarray,
    lam: np.ndarray,
    beta_last: float,
    loss: LossKind,
) -> np.ndarray:
    """Best network-output variable, element-wise.

    For squared loss each entry minimizes the convex scalar objective
    ``(z - y)^2 + beta (z - w)^2 + lam z``; setting its derivative to zero
    gives ``z = (2 y + 2 beta w - lam) / (2 + 2 beta)``.
    """
    if loss is not LossKind.SQUARED:
        raise ValueError(f"unsupported loss {loss!r}")
    if beta_last <= 0:
        raise ValueError(f"beta must be positive, got {beta_last}")
    y = np.asarray(y, dtype=np.float64)
    w_term = np.asarray(w_term, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    if y.shape != w_term.shape or y.shape != lam.shape:
        raise DimensionMismatchError(
            f"shapes disagree: y {y.shape}, w_term {w_term.shape}, lam {lam.shape}"
        )
    return (2.0 * y + 2.0 * beta_last * w_term - lam) / (2.0 + 2.0 * beta_last)


def lagrangian_update(
    lam: np.ndarray, z_last: np.ndarray, w_term: np.ndarray, beta_last: float
) -> np.ndarray:
    """Multiplier ascent step: ``lam + beta_last (z_last - w_term)``."""
    lam = np.asarray(lam, dtype=np.float64)
    z_last = np.asarray(z_last, dtype=np.float64)
    w_term = np.asarray(w_term, dtype=np.float64)
    if lam.shape != z_last.shape or lam.shape != w_term.shape:
        raise DimensionMismatchError(
            f"shapes disagree: lam {lam.shape}, z {z_last.shape}, w_term {w_term.shape}"
        )
    return lam + beta_last * (z_last - w_term)


def evaluate_lagrangian(state: NetworkState, y: np.ndarray, hp: HyperParams) -> float:
    """Value of the training objective at the current state.

    Squared loss on the output variable, plus the last-layer quadratic
    penalty and its multiplier term (a Frobenius inner product), plus each
    hidden layer's activation-consistency and pre-activation-consistency
    penalties.
    """
    if hp.loss is not LossKind.SQUARED:
        raise ValueError(f"unsupported loss {hp.loss!r}")
    y = np.asarray(y, dtype=np.float64)
    L = state.n_layers
    z_last = state.preactivations[-1]
    w_term = state.weights[-1] @ state.activations[-1]
    resid = z_last - w_term
    total = float(np.sum((z_last - y) ** 2))
    total += hp.beta[-1] * float(np.sum(resid**2))
    total += float(np.sum(state.lam * resid))
    for l in range(1, L):
        x_l = state.activations[l]
        z_l = state.preactivations[l - 1]
        fit = state.weights[l - 1] @ state.activations[l - 1]
        total += hp.gamma[l - 1] * float(
            np.sum((x_l - _apply_activation(hp.activation, z_l)) ** 2)
        )
        total += hp.beta[l - 1] * float(np.sum((z_l - fit) ** 2))
    return total


def train_iteration(state: NetworkState, y: np.ndarray, hp: HyperParams) -> NetworkState:
    """One full sweep over all training variables.

    For each hidden layer l = 1 .. L-1 in order: update ``W_l``, then
    ``x_l``, then ``z_l``; afterwards update the last weight matrix, the
    output variable, and the multiplier.  Every step reads the freshest
    values produced earlier in the same sweep.  Returns a new state;
    the input state is not modified.
    """
    y = np.asarray(y, dtype=np.float64)
    L = state.n_layers
    if y.shape != state.preactivations[-1].shape:
        raise DimensionMismatchError(
            f"targets {y.shape} do not match output variable "
            f"{state.preactivations[-1].shape}"
        )
    weights = list(state.weights)
    activations = list(state.activations)
    preactivations = list(state.preactivations)

    for l in range(1, L):
        weights[l - 1] = weight_update(preactivations[l - 1], activations[l - 1], hp.solver)
        activations[l] = activation_update(
            weights[l],
            preactivations[l],
            preactivations[l - 1],
            hp.gamma[l - 1],
            hp.beta[l],
            hp.activation,
            hp.solver,
        )
        preactivations[l - 1] = output_update(
            activations[l],
            weights[l - 1] @ activations[l - 1],
            hp.gamma[l - 1],
            hp.beta[l - 1],
            hp.activation,
        )

    weights[L - 1] = weight_update(preactivations[L - 1], activations[L - 1], hp.solver)
    w_term = weights[L - 1] @ activations[L - 1]
    preactivations[L - 1] = last_output_update(y, w_term, state.lam, hp.beta[-1], hp.loss)
    lam = lagrangian_update(state.lam, preactivations[L - 1], w_term, hp.beta[-1])

    return NetworkState(
        dims=state.dims,
        weights=weights,
        activations=activations,
        preactivations=preactivations,
        lam=lam,
    )


def predict(weights: list[np.ndarray], x0: np.ndarray, activation: ActivationKind) -> np.ndarray:
    """Forward pass with the learned weights only.

    Hidden layers apply the activation; the last layer is linear.  The
    trained auxiliary variables play no role here: this is how the network
    is evaluated on data it has never seen.
    """
    x = np.asarray(x0, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatchError(f"input must be 2-D, got shape {x.shape}")
    for w in weights[:-1]:
        if w.shape[1] != x.shape[0]:
            raise DimensionMismatchError(
                f"weight shape {w.shape} does not accept input of {x.shape[0]} rows"
            )
        x = _apply_activation(activation, w @ x)
    w = weights[-1]
    if w.shape[1] != x.shape[0]:
        raise DimensionMismatchError(
            f"weight shape {w.shape} does not accept input of {x.shape[0]} rows"
        )
    return w @ x


def accuracy(scores: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of sample columns whose largest score row equals the label.

    Ties break toward the lowest row index.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 2 or scores.shape[1] != labels.shape[0]:
        raise DimensionMismatchError(
            f"scores {scores.shape} do not match {labels.shape[0]} labels"
        )
    return float(np.mean(np.argmax(scores, axis=0) == labels))


def train_admm(
    data: np.ndarray,
    one_hot: np.ndarray,
    labels: np.ndarray,
    dims,
    hp: HyperParams,
    test_data: np.ndarray | None = None,
    test_labels: np.ndarray | None = None,
) -> tuple[NetworkState, TrainReport]:
    """Full training loop: initialize, sweep ``hp.admm_iters`` times, report.

    Per-iteration metrics are the objective value, the training accuracy of
    a plain forward pass with the current weights, and the last-layer
    constraint violation.  When test data is given, the report also carries
    the final held-out accuracy.  The whole procedure is a pure function of
    its arguments; in particular ``hp.seed`` fixes every random draw.
    """
    state = init_state(dims, data, hp)
    report = TrainReport()
    for _ in range(hp.admm_iters):
        state = train_iteration(state, one_hot, hp)
        report.lagrangian.append(evaluate_lagrangian(state, one_hot, hp))
        report.train_accuracy.append(
            accuracy(predict(state.weights, data, hp.activation), labels)
        )
        report.constraint_residual.append(state.constraint_residual())
    if test_data is not None and test_labels is not None:
        report.test_accuracy = accuracy(
            predict(state.weights, test_data, hp.activation), test_labels
        )
    return state, report
