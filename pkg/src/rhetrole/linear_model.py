"""The trainable core: linear classifier head, stable softmax, class-weighted
cross-entropy with exact analytic gradients, decoupled-weight-decay adaptive
optimizer, and the epoch/batch training loop with best-on-validation
checkpointing.

All math runs in float64. Training is deterministic given (data, config,
seed): parameter init draws from the config seed, each epoch's shuffle from
a generator seeded by (seed, epoch), and batch reductions keep a fixed
summation order.

Checkpoint file format (CKPT v1)
--------------------------------
Line 1: ``CKPT v1 <num_labels> <dim> <provider_id>``. Line 2: label order,
tab-separated. Then one line per weight-matrix row (space-separated
decimals), final line the bias vector. Floats use shortest round-trip
precision, so values survive write -> load -> write byte-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import LABELS, LabeledSentence
from .embedding import embed_batch
from .errors import CheckpointFormatError, DimensionMismatchError, InputError
from .metrics import evaluate_predictions

SELECTION_METRICS = ("macro_f1", "val_loss")


@dataclass
class LinearParams:
    """Classifier head: W is (num_labels, dim), b is (num_labels,)."""

    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.W.ndim != 2 or self.b.ndim != 1 or self.W.shape[0] != self.b.shape[0]:
            raise InputError(f"inconsistent parameter shapes {self.W.shape} / {self.b.shape}")

    def copy(self) -> "LinearParams":
        return LinearParams(self.W.copy(), self.b.copy())


@dataclass
class OptimizerState:
    """First/second moment accumulators plus the completed-step counter."""

    m_w: np.ndarray
    v_w: np.ndarray
    m_b: np.ndarray
    v_b: np.ndarray
    t: int = 0

    @classmethod
    def initial(cls, params: LinearParams) -> "OptimizerState":
        return cls(
            m_w=np.zeros_like(params.W),
            v_w=np.zeros_like(params.W),
            m_b=np.zeros_like(params.b),
            v_b=np.zeros_like(params.b),
        )


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 8
    epochs: int = 4
    learning_rate: float = 2e-5
    weight_decay: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 42
    selection_metric: str = "macro_f1"

    def __post_init__(self):
        if self.batch_size < 1:
            raise InputError("batch_size must be >= 1")
        if self.epochs < 1:
            raise InputError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise InputError("learning_rate must be > 0")
        if self.weight_decay < 0:
            raise InputError("weight_decay must be >= 0")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise InputError("beta1 and beta2 must lie in (0, 1)")
        if self.epsilon <= 0:
            raise InputError("epsilon must be > 0")
        if self.seed < 0:
            raise InputError("seed must be >= 0")
        if self.selection_metric not in SELECTION_METRICS:
            raise InputError(f"selection_metric must be one of {SELECTION_METRICS}")


@dataclass
class LinearCheckpoint:
    """Trained parameters plus the metadata needed to reuse them.

    ``selection_score`` is the validation score of the winning epoch; it is
    not part of the file format, so checkpoints loaded from disk carry NaN.
    """

    params: LinearParams
    labels: tuple[str, ...]
    provider_id: str
    dim: int
    selection_score: float = float("nan")


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_score: float


def forward(params: LinearParams, x: np.ndarray) -> np.ndarray:
    """Logits z = W x + b for a single embedding vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.W.shape[1],):
        raise DimensionMismatchError(
            f"input has shape {x.shape}, classifier expects ({params.W.shape[1]},)"
        )
    return params.W @ x + params.b


def softmax(z: np.ndarray) -> np.ndarray:
    """Max-shifted softmax along the last axis: sums to 1, strictly positive."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _log_sum_exp(z: np.ndarray) -> np.ndarray:
    m = z.max(axis=-1, keepdims=True)
    return (m + np.log(np.exp(z - m).sum(axis=-1, keepdims=True))).squeeze(-1)


def weighted_ce_loss(z: np.ndarray, class_index: int, weights: Sequence[float]) -> float:
    """weights[class] * (-log softmax(z)[class]), via log-sum-exp for stability."""
    z = np.asarray(z, dtype=np.float64)
    w = float(weights[class_index])
    if w < 0:
        raise InputError("class weights must be >= 0")
    return w * (float(_log_sum_exp(z)) - float(z[class_index]))


def loss_gradient(z: np.ndarray, class_index: int, weights: Sequence[float]) -> np.ndarray:
    """d loss / d z = weights[class] * (softmax(z) - onehot(class))."""
    z = np.asarray(z, dtype=np.float64)
    g = softmax(z)
    g[class_index] -= 1.0
    return float(weights[class_index]) * g


def backward(x: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Chain rule through the linear layer: dW = g (outer) x, db = g."""
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if x.ndim != 1 or g.ndim != 1:
        raise DimensionMismatchError("backward expects 1-D x and g")
    return np.outer(g, x), g.copy()


def optimizer_step(
    params: LinearParams,
    grads: tuple[np.ndarray, np.ndarray],
    state: OptimizerState,
    cfg: TrainConfig,
) -> tuple[LinearParams, OptimizerState]:
    """One bias-corrected adaptive-moment update with decoupled weight decay.

    The decay is applied directly to the freshly updated parameters
    (p <- p * (1 - lr * weight_decay)), never through the gradient.
    """
    dW, db = grads
    if dW.shape != params.W.shape or db.shape != params.b.shape:
        raise DimensionMismatchError("gradient shapes do not match parameters")
    t = state.t + 1
    b1, b2 = cfg.beta1, cfg.beta2
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t

    def update(p, g, m, v):
        m_new = b1 * m + (1.0 - b1) * g
        v_new = b2 * v + (1.0 - b2) * g * g
        step = cfg.learning_rate * (m_new / bc1) / (np.sqrt(v_new / bc2) + cfg.epsilon)
        p_new = p - step
        if cfg.weight_decay > 0.0:
            p_new = p_new - cfg.learning_rate * cfg.weight_decay * p_new
        return p_new, m_new, v_new

    w_new, m_w, v_w = update(params.W, dW, state.m_w, state.v_w)
    b_new, m_b, v_b = update(params.b, db, state.m_b, state.v_b)
    return LinearParams(w_new, b_new), OptimizerState(m_w, v_w, m_b, v_b, t)


def initial_params(dim: int, num_labels: int, seed: int) -> LinearParams:
    """W uniform in +-1/sqrt(dim) drawn from the seed, b zero."""
    rng = np.random.default_rng(seed)
    bound = 1.0 / math.sqrt(dim)
    return LinearParams(
        W=rng.uniform(-bound, bound, size=(num_labels, dim)),
        b=np.zeros(num_labels, dtype=np.float64),
    )


def _batch_loss_and_grads(X, y, w_vec, params):
    """Mean-of-sample weighted CE over one batch plus its exact gradients."""
    nb = X.shape[0]
    Z = X @ params.W.T + params.b
    lse = _log_sum_exp(Z)
    sample_w = w_vec[y]
    losses = sample_w * (lse - Z[np.arange(nb), y])
    G = np.exp(Z - lse[:, None])
    G[np.arange(nb), y] -= 1.0
    G *= sample_w[:, None]
    G /= nb
    return float(losses.sum()), (G.T @ X, G.sum(axis=0))


def train(
    train_set: Sequence[LabeledSentence],
    val_set: Sequence[LabeledSentence],
    provider,
    class_weights: Sequence[float],
    cfg: TrainConfig,
    labels: Sequence[str] = LABELS,
    on_epoch: Callable[[EpochStats], None] | None = None,
) -> LinearCheckpoint:
    """Mini-batch training with best-on-validation epoch selection.

    Each epoch shuffles train indices with a generator seeded by
    (cfg.seed, epoch); the last batch may be smaller. After every epoch the
    selection metric is evaluated on the validation set and the best epoch's
    parameters win (ties keep the earlier epoch).
    """
    if not train_set or not val_set:
        raise InputError("train and validation sets must both be non-empty")
    labels = tuple(labels)
    label_to_idx = {name: i for i, name in enumerate(labels)}
    w_vec = np.asarray(class_weights, dtype=np.float64)
    if w_vec.shape != (len(labels),):
        raise DimensionMismatchError(
            f"expected {len(labels)} class weights, got shape {w_vec.shape}"
        )
    if np.any(w_vec < 0) or not np.any(w_vec > 0):
        raise InputError("class weights must be >= 0 with at least one > 0")
    for s in list(train_set) + list(val_set):
        if s.label not in label_to_idx:
            raise InputError(f"sentence label {s.label!r} not in training label set")

    X_train = embed_batch(train_set, provider)
    y_train = np.array([label_to_idx[s.label] for s in train_set], dtype=np.int64)
    X_val = embed_batch(val_set, provider)
    y_val = np.array([label_to_idx[s.label] for s in val_set], dtype=np.int64)

    n = len(train_set)
    params = initial_params(provider.dimension, len(labels), cfg.seed)
    state = OptimizerState.initial(params)
    higher_is_better = cfg.selection_metric == "macro_f1"
    best_score = -math.inf if higher_is_better else math.inf
    best_params = params.copy()

    for epoch in range(1, cfg.epochs + 1):
        order = np.random.default_rng([cfg.seed, epoch]).permutation(n)
        loss_total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            batch_sum, grads = _batch_loss_and_grads(X_train[idx], y_train[idx], w_vec, params)
            loss_total += batch_sum
            params, state = optimizer_step(params, grads, state, cfg)

        score = _validation_score(X_val, y_val, w_vec, params, len(labels), cfg.selection_metric)
        improved = score > best_score if higher_is_better else score < best_score
        if improved:
            best_score = score
            best_params = params.copy()
        if on_epoch is not None:
            on_epoch(EpochStats(epoch=epoch, train_loss=loss_total / n, val_score=score))

    return LinearCheckpoint(
        params=best_params,
        labels=labels,
        provider_id=provider.provider_id,
        dim=provider.dimension,
        selection_score=best_score,
    )


def _validation_score(X_val, y_val, w_vec, params, num_labels, metric):
    Z = X_val @ params.W.T + params.b
    if metric == "macro_f1":
        preds = np.argmax(Z, axis=1)
        _, report = evaluate_predictions(y_val.tolist(), preds.tolist(), num_labels)
        return report.macro_f1
    lse = _log_sum_exp(Z)
    losses = w_vec[y_val] * (lse - Z[np.arange(len(y_val)), y_val])
    return float(losses.sum()) / len(y_val)


def predict_index(ckpt: LinearCheckpoint, x: np.ndarray) -> int:
    """Argmax over logits; ties resolve to the lowest label index."""
    return int(np.argmax(forward(ckpt.params, x)))


def predict(ckpt: LinearCheckpoint, x: np.ndarray) -> str:
    return ckpt.labels[predict_index(ckpt, x)]


def predict_with_probability(ckpt: LinearCheckpoint, x: np.ndarray) -> tuple[str, float]:
    """Predicted label plus its softmax probability."""
    z = forward(ckpt.params, x)
    idx = int(np.argmax(z))
    return ckpt.labels[idx], float(softmax(z)[idx])


def serialize_checkpoint(ckpt: LinearCheckpoint) -> str:
    k, d = ckpt.params.W.shape
    if k != len(ckpt.labels):
        raise InputError("label count does not match weight rows")
    if d != ckpt.dim:
        raise DimensionMismatchError("checkpoint dim does not match weight columns")
    lines = [f"CKPT v1 {k} {d} {ckpt.provider_id}"]
    lines.append("\t".join(ckpt.labels))
    for row in ckpt.params.W:
        lines.append(" ".join(repr(float(v)) for v in row))
    lines.append(" ".join(repr(float(v)) for v in ckpt.params.b))
    return "".join(line + "\n" for line in lines)


def parse_checkpoint(text: str) -> LinearCheckpoint:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3:
        raise CheckpointFormatError("checkpoint file too short")
    header = lines[0].split(" ", 4)
    if len(header) != 5 or header[0] != "CKPT" or header[1] != "v1":
        raise CheckpointFormatError(
            f"bad header {lines[0]!r}; expected 'CKPT v1 <num_labels> <dim> <provider_id>'"
        )
    try:
        k, d = int(header[2]), int(header[3])
    except ValueError:
        raise CheckpointFormatError("non-integer num_labels/dim in header") from None
    provider_id = header[4]
    labels = tuple(lines[1].split("\t"))
    if len(labels) != k:
        raise CheckpointFormatError(f"header declares {k} labels, line 2 has {len(labels)}")
    if len(lines) != 2 + k + 1:
        raise CheckpointFormatError(
            f"expected {2 + k + 1} lines ({k} weight rows plus bias), got {len(lines)}"
        )
    try:
        rows = [[float(v) for v in lines[2 + i].split(" ")] for i in range(k)]
        bias = [float(v) for v in lines[2 + k].split(" ")]
    except ValueError:
        raise CheckpointFormatError("non-numeric parameter value") from None
    if any(len(row) != d for row in rows):
        raise CheckpointFormatError(f"weight row length does not match dim {d}")
    if len(bias) != k:
        raise CheckpointFormatError(f"bias length {len(bias)} does not match {k} labels")
    return LinearCheckpoint(
        params=LinearParams(np.array(rows), np.array(bias)),
        labels=labels,
        provider_id=provider_id,
        dim=d,
    )


def save_checkpoint(ckpt: LinearCheckpoint, path: str | Path) -> None:
    Path(path).write_bytes(serialize_checkpoint(ckpt).encode("utf-8"))


def load_checkpoint(path: str | Path) -> LinearCheckpoint:
    return parse_checkpoint(Path(path).read_bytes().decode("utf-8"))
