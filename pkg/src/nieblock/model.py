"""Feed-forward surrogate regressor for blocked influence.

A small fully-connected network (default 7 -> 128 -> 128 -> 1, ReLU between
the linear layers) trained with plain mini-batch SGD on mean squared error.
Features and labels are z-score normalized with statistics stored in the
model, so a trained model file is self-contained. Training is deterministic
given (dataset, config, seed): fixed split, fixed shuffles, fixed seeded
initialization, no adaptive optimizer state.

Gradients are computed analytically (see loss_and_gradients); the test suite
verifies them against central finite differences.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import FingerprintMismatchError, ModelFormatError, TrainingDivergedError
from .features import FeatureVector
from .ioutil import atomic_write_text, dumps_deterministic

MODEL_FORMAT_VERSION = 1

DEFAULT_LAYER_DIMS = (7, 128, 128, 1)


@dataclass
class MlpModel:
    layer_dims: tuple
    weights: list  # per layer, shape (out_dim, in_dim)
    biases: list  # per layer, shape (out_dim,)
    feature_means: np.ndarray
    feature_stds: np.ndarray
    label_mean: float
    label_std: float
    h_radius: int
    graph_fingerprint: str

    def __post_init__(self):
        dims = tuple(self.layer_dims)
        if len(dims) < 2:
            raise ValueError("layer_dims needs at least input and output sizes")
        if len(self.weights) != len(dims) - 1 or len(self.biases) != len(dims) - 1:
            raise ModelFormatError("weight/bias count does not match layer_dims")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[i + 1], dims[i]) or b.shape != (dims[i + 1],):
                raise ModelFormatError(
                    f"layer {i} shape {w.shape}/{b.shape} does not chain with dims {dims}"
                )
        if dims[-1] != 1:
            raise ValueError("output layer must have one unit")
        if np.any(self.feature_stds <= 0) or self.label_std <= 0:
            raise ValueError("normalization stds must be positive")


@dataclass
class TrainConfig:
    batch_size: int = 512
    learning_rate: float = 0.05
    max_epochs: int = 200
    patience: int = 10
    val_fraction: float = 0.1


@dataclass
class TrainReport:
    epochs_run: int
    train_mse: list = field(default_factory=list)  # raw label units, per epoch
    validation_mse: list = field(default_factory=list)
    stopped_early: bool = False
    best_epoch: int = 0


def _forward_normalized(weights, biases, x):
    """Forward pass on already-normalized inputs; returns activations per layer."""
    acts = [x]
    a = x
    last = len(weights) - 1
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = a @ w.T + b
        a = z if i == last else np.maximum(z, 0.0)
        acts.append(a)
    return acts


def loss_and_gradients(weights, biases, x, y):
    """MSE and its analytic gradients for one batch of normalized data.

    x is (batch, in_dim), y is (batch,). Returns (mse, grad_w, grad_b) with
    gradients shaped like the parameters.
    """
    batch = x.shape[0]
    acts = _forward_normalized(weights, biases, x)
    pred = acts[-1][:, 0]
    resid = pred - y
    mse = float(np.mean(resid * resid))
    grad_w = [None] * len(weights)
    grad_b = [None] * len(biases)
    # delta holds dL/dz for the current layer, shape (batch, out_dim)
    delta = (2.0 / batch) * resid[:, None]
    for i in range(len(weights) - 1, -1, -1):
        grad_w[i] = delta.T @ acts[i]
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i]) * (acts[i] > 0.0)
    return mse, grad_w, grad_b


def _normalize_features(x: np.ndarray, means, stds) -> np.ndarray:
    return (x - means) / stds


def forward(model: MlpModel, features) -> float:
    """Predicted blocked influence for one feature vector."""
    if isinstance(features, FeatureVector):
        x = features.as_array()
    else:
        x = np.asarray(features, dtype=np.float64)
    if x.shape != (model.layer_dims[0],):
        raise ValueError(f"expected {model.layer_dims[0]} features, got shape {x.shape}")
    xn = _normalize_features(x, model.feature_means, model.feature_stds)
    acts = _forward_normalized(model.weights, model.biases, xn[None, :])
    return float(acts[-1][0, 0] * model.label_std + model.label_mean)


def predict_batch(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Predictions for an (n, in_dim) matrix of raw feature rows."""
    x = np.asarray(x, dtype=np.float64)
    xn = _normalize_features(x, model.feature_means, model.feature_stds)
    acts = _forward_normalized(model.weights, model.biases, xn)
    return acts[-1][:, 0] * model.label_std + model.label_mean


def _init_parameters(layer_dims, rng):
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    return weights, biases


def _std_or_one(x: np.ndarray, axis=0) -> np.ndarray:
    s = np.std(x, axis=axis)
    return np.where(s > 0, s, 1.0)


def train(dataset, config: TrainConfig | None = None, seed: int = 0, layer_dims=DEFAULT_LAYER_DIMS):
    """Fit a model to a feature-carrying dataset; returns (model, report).

    Early stopping: after each epoch the validation MSE is measured; when it
    has not improved for `patience` consecutive epochs training stops and
    the best epoch's weights are restored.
    """
    config = config or TrainConfig()
    if not (0.0 < config.val_fraction < 1.0):
        raise ValueError("val_fraction must be in (0, 1)")
    if config.batch_size < 1 or config.max_epochs < 1 or config.patience < 1:
        raise ValueError("batch_size, max_epochs, and patience must be >= 1")
    records = dataset.records
    if len(records) < 2:
        raise ValueError("training needs at least 2 records")
    if any(rec.features is None for rec in records):
        raise ValueError("dataset lacks cached features; regenerate with features enabled")
    x = np.array([rec.features for rec in records], dtype=np.float64)
    y = np.array([rec.label for rec in records], dtype=np.float64)
    if x.shape[1] != layer_dims[0]:
        raise ValueError(f"dataset has {x.shape[1]} features, model expects {layer_dims[0]}")

    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(records))
    n_val = max(1, int(round(len(records) * config.val_fraction)))
    n_val = min(n_val, len(records) - 1)
    val_idx, train_idx = perm[:n_val], perm[n_val:]

    means = np.mean(x[train_idx], axis=0)
    stds = _std_or_one(x[train_idx])
    label_mean = float(np.mean(y[train_idx]))
    label_std = float(_std_or_one(y[train_idx], axis=None))
    xn_train = _normalize_features(x[train_idx], means, stds)
    yn_train = (y[train_idx] - label_mean) / label_std
    xn_val = _normalize_features(x[val_idx], means, stds)
    yn_val = (y[val_idx] - label_mean) / label_std

    weights, biases = _init_parameters(layer_dims, rng)
    raw_scale = label_std * label_std  # normalized MSE -> raw label units

    def split_mse(xn, yn):
        acts = _forward_normalized(weights, biases, xn)
        resid = acts[-1][:, 0] - yn
        return float(np.mean(resid * resid)) * raw_scale

    report = TrainReport(epochs_run=0)
    best_val = np.inf
    best_params = None
    stale = 0
    n_train = len(train_idx)
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(n_train)
        for lo in range(0, n_train, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            mse, grad_w, grad_b = loss_and_gradients(weights, biases, xn_train[idx], yn_train[idx])
            if not np.isfinite(mse):
                raise TrainingDivergedError(epoch)
            for i in range(len(weights)):
                weights[i] -= config.learning_rate * grad_w[i]
                biases[i] -= config.learning_rate * grad_b[i]
        train_mse = split_mse(xn_train, yn_train)
        val_mse = split_mse(xn_val, yn_val)
        if not (np.isfinite(train_mse) and np.isfinite(val_mse)):
            raise TrainingDivergedError(epoch)
        report.train_mse.append(train_mse)
        report.validation_mse.append(val_mse)
        report.epochs_run = epoch
        if val_mse < best_val:
            best_val = val_mse
            best_params = ([w.copy() for w in weights], [b.copy() for b in biases])
            report.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                report.stopped_early = True
                break
    weights, biases = best_params

    model = MlpModel(
        layer_dims=tuple(layer_dims),
        weights=weights,
        biases=biases,
        feature_means=means,
        feature_stds=stds,
        label_mean=label_mean,
        label_std=label_std,
        h_radius=dataset.h_radius,
        graph_fingerprint=dataset.graph_fingerprint,
    )
    return model, report


def save_model(model: MlpModel, path: str) -> None:
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "layer_dims": list(model.layer_dims),
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "feature_means": model.feature_means.tolist(),
        "feature_stds": model.feature_stds.tolist(),
        "label_mean": model.label_mean,
        "label_std": model.label_std,
        "h_radius": model.h_radius,
        "graph_fingerprint": model.graph_fingerprint,
    }
    atomic_write_text(path, dumps_deterministic(payload) + "\n")


def load_model(path: str) -> MlpModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file {path}: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"model file {path}: unsupported format_version "
            f"{payload.get('format_version') if isinstance(payload, dict) else '?'}"
        )
    try:
        return MlpModel(
            layer_dims=tuple(payload["layer_dims"]),
            weights=[np.asarray(w, dtype=np.float64) for w in payload["weights"]],
            biases=[np.asarray(b, dtype=np.float64) for b in payload["biases"]],
            feature_means=np.asarray(payload["feature_means"], dtype=np.float64),
            feature_stds=np.asarray(payload["feature_stds"], dtype=np.float64),
            label_mean=float(payload["label_mean"]),
            label_std=float(payload["label_std"]),
            h_radius=int(payload["h_radius"]),
            graph_fingerprint=payload["graph_fingerprint"],
        )
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"model file {path}: malformed ({exc})") from None


def check_model_graph(model: MlpModel, graph) -> None:
    """Refuse to use a model against a graph it was not trained for."""
    if model.graph_fingerprint != graph.fingerprint:
        raise FingerprintMismatchError(
            "model was trained for a different graph (fingerprint mismatch)"
        )
