"""Dense feed-forward networks trained with Adam, in plain numpy.

Hidden layers use leaky-ReLU. Regression nets end in one linear unit and
minimise log-cosh or mean squared error; classification nets end in a
two-way softmax trained with cross-entropy on one-hot targets.

Inputs and targets are standardised with statistics of the training set,
stored in the model so prediction and fine-tuning reuse them.
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .encoding import Dataset


class TrainingDivergedError(ArithmeticError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch} (loss={loss})")
        self.epoch = epoch


@dataclass
class TrainConfig:
    batch_size: int = 32
    epochs: int = 20
    loss: str = "logcosh"
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int | None = 0
    standardize: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.loss not in ("logcosh", "mse", "crossentropy"):
            raise ValueError(f"unknown loss {self.loss!r}")


@dataclass(frozen=True)
class Architecture:
    hidden: tuple[int, ...]
    alpha: float
    loss: str
    batch_size: int
    epochs: int


ARCHITECTURES = {
    # four hidden layers of 64, log-cosh, batches of 32 for 20 epochs
    "2d-paper": Architecture((64, 64, 64, 64), 0.01, "logcosh", 32, 20),
    # one hidden layer of 100 with a tiny leak, squared error, batches of 16
    "3d-paper": Architecture((100,), 1e-5, "mse", 16, 20),
}


def leaky_relu(x, alpha):
    return np.where(x >= 0, x, alpha * x)


def logcosh(e):
    a = np.abs(e)
    return a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=1, keepdims=True)


@dataclass
class MLPModel:
    sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    alpha: float = 0.01
    task: str = "regression"
    x_shift: np.ndarray | None = None
    x_scale: np.ndarray | None = None
    y_shift: float = 0.0
    y_scale: float = 1.0
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("leaky-ReLU slope must be positive")
        for (a, b), W, c in zip(zip(self.sizes, self.sizes[1:]), self.weights, self.biases):
            if W.shape != (a, b) or c.shape != (b,):
                raise ValueError(f"layer shapes {W.shape}, {c.shape} do not match sizes {a}->{b}")
        if self.x_shift is None:
            self.x_shift = np.zeros(self.sizes[0])
        if self.x_scale is None:
            self.x_scale = np.ones(self.sizes[0])

    @property
    def n_inputs(self) -> int:
        return self.sizes[0]

    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    # forward/backward on standardised data
    def _forward(self, Z):
        pre, acts = [], [Z]
        h = Z
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ W + b
            pre.append(z)
            h = z if i == last else leaky_relu(z, self.alpha)
            acts.append(h)
        return pre, acts

    def _backward(self, pre, acts, dout):
        grads = []
        delta = dout
        for i in range(len(self.weights) - 1, -1, -1):
            gW = acts[i].T @ delta
            gb = delta.sum(axis=0)
            grads.append((gW, gb))
            if i > 0:
                delta = (delta @ self.weights[i].T) * np.where(pre[i - 1] >= 0, 1.0, self.alpha)
        grads.reverse()
        return [g for pair in grads for g in pair]

    def _scale_x(self, X):
        return (X - self.x_shift) / self.x_scale

    def raw_output(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_inputs:
            raise ValueError(f"expected {self.n_inputs} features, got {X.shape[1]}")
        return self._forward(self._scale_x(X))[1][-1]


def init_mlp(sizes, alpha=0.01, task="regression", seed=None) -> MLPModel:
    """Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for a, b in zip(sizes, sizes[1:]):
        lim = np.sqrt(6.0 / (a + b))
        weights.append(rng.uniform(-lim, lim, size=(a, b)))
        biases.append(np.zeros(b))
    return MLPModel(list(sizes), weights, biases, alpha=alpha, task=task)


def loss_and_grad(model: MLPModel, Z, t, loss: str):
    """Mean loss on standardised inputs ``Z`` / targets ``t`` and its parameter gradients."""
    pre, acts = model._forward(Z)
    out = acts[-1]
    n = len(Z)
    if model.task == "classification":
        p = _softmax(out)
        onehot = np.zeros_like(p)
        onehot[np.arange(n), t.astype(int)] = 1.0
        value = -np.mean(np.log(np.clip(p[np.arange(n), t.astype(int)], 1e-300, None)))
        dout = (p - onehot) / n
    else:
        e = out[:, 0] - t
        if loss == "logcosh":
            value = float(np.mean(logcosh(e)))
            dout = (np.tanh(e) / n)[:, None]
        else:
            value = float(np.mean(e * e))
            dout = (2.0 * e / n)[:, None]
    return value, model._backward(pre, acts, dout)


class Adam:
    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def _targets(model, y):
    if model.task == "classification":
        return y.astype(int)
    return (y - model.y_shift) / model.y_scale


def _epoch_loss(model, Z, t, loss):
    return loss_and_grad(model, Z, t, loss)[0]


def _fit(model, data, config, shuffle_rng, val=None, start_epoch=1):
    opt = Adam(model.params(), config.learning_rate, config.beta1, config.beta2, config.eps)
    Z = model._scale_x(data.X)
    t = _targets(model, data.y)
    loss = "crossentropy" if model.task == "classification" else config.loss
    if val is not None:
        Zv, tv = model._scale_x(val.X), _targets(model, val.y)
    log = []
    n = len(Z)
    for epoch in range(start_epoch, start_epoch + config.epochs):
        order = shuffle_rng.permutation(n)
        total = 0.0
        for s in range(0, n, config.batch_size):
            idx = order[s : s + config.batch_size]
            value, grads = loss_and_grad(model, Z[idx], t[idx], loss)
            if not np.isfinite(value) or not all(np.all(np.isfinite(g)) for g in grads):
                raise TrainingDivergedError(epoch, value)
            opt.step(model.params(), grads)
            total += value * len(idx)
        train_loss = total / n
        val_loss = _epoch_loss(model, Zv, tv, loss) if val is not None else float("nan")
        if not np.isfinite(train_loss):
            raise TrainingDivergedError(epoch, train_loss)
        log.append((epoch, train_loss, val_loss))
    return log


def _streams(seed):
    init_ss, shuffle_ss = np.random.SeedSequence(seed).spawn(2)
    return init_ss, np.random.default_rng(shuffle_ss)


def build_model(n_inputs, arch="2d-paper", task="regression", seed=None, hidden=None, alpha=None) -> MLPModel:
    """Untrained network for a named architecture (or ``custom`` with ``hidden``/``alpha``)."""
    if arch == "custom":
        if hidden is None:
            raise ValueError("custom architecture needs hidden layer sizes")
        layers, slope = tuple(hidden), 0.01 if alpha is None else alpha
    else:
        if arch not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {arch!r}")
        a = ARCHITECTURES[arch]
        layers = a.hidden if hidden is None else tuple(hidden)
        slope = a.alpha if alpha is None else alpha
    out = 2 if task == "classification" else 1
    return init_mlp([n_inputs, *layers, out], alpha=slope, task=task, seed=seed)


def config_for(arch: str, **overrides) -> TrainConfig:
    base = {}
    if arch in ARCHITECTURES:
        a = ARCHITECTURES[arch]
        base = {"batch_size": a.batch_size, "epochs": a.epochs, "loss": a.loss}
    base.update({k: v for k, v in overrides.items() if v is not None})
    return TrainConfig(**base)


def train_mlp(data: Dataset, arch="2d-paper", config: TrainConfig | None = None, task="regression",
              val: Dataset | None = None, hidden=None, alpha=None):
    """Train a fresh network; return ``(model, log)`` with log rows ``(epoch, train_loss, val_loss)``.

    Given the same seed and data the result is bit-identical: the seed is
    split into independent streams for weight init and batch shuffling.
    """
    if config is None:
        config = config_for(arch)
    init_ss, shuffle_rng = _streams(config.seed)
    model = build_model(data.n_features, arch, task, seed=init_ss, hidden=hidden, alpha=alpha)
    if config.standardize:
        model.x_shift = data.X.mean(axis=0)
        sd = data.X.std(axis=0)
        model.x_scale = np.where(sd > 0, sd, 1.0)
        if task == "regression":
            model.y_shift = float(data.y.mean())
            model.y_scale = float(data.y.std()) or 1.0
    if task == "classification" and len(np.unique(data.y)) > 2:
        raise ValueError("classification expects labels in {0, 1}")
    model.config = {"arch": arch, "task": task, **asdict(config)}
    log = _fit(model, data, config, shuffle_rng, val)
    return model, log


def fine_tune(model: MLPModel, data: Dataset, config: TrainConfig, val: Dataset | None = None):
    """Continue training a copy of ``model`` with fresh Adam moments."""
    if data.n_features != model.n_inputs:
        raise ValueError(f"model expects {model.n_inputs} features, data has {data.n_features}")
    tuned = copy.deepcopy(model)
    _, shuffle_rng = _streams(config.seed)
    log = _fit(tuned, data, config, shuffle_rng, val)
    tuned.config = {**model.config, "fine_tune": asdict(config)}
    return tuned, log


def predict(model: MLPModel, X) -> np.ndarray:
    """Regression values, or class-1 probabilities for classifiers."""
    out = model.raw_output(X)
    if model.task == "classification":
        return _softmax(out)[:, 1]
    return out[:, 0] * model.y_scale + model.y_shift


def predict_class(model: MLPModel, X, threshold=0.5) -> np.ndarray:
    return (predict(model, X) >= threshold).astype(int)


def _arr(a):
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "data": [float(x) for x in a.ravel()]}


def _unarr(d):
    return np.array(d["data"], dtype=float).reshape(d["shape"])


def model_to_json(model: MLPModel) -> str:
    # json writes floats with repr, which round-trips doubles exactly
    obj = {
        "format": "polytope_ml.mlp",
        "version": 1,
        "sizes": model.sizes,
        "alpha": model.alpha,
        "task": model.task,
        "x_shift": _arr(model.x_shift),
        "x_scale": _arr(model.x_scale),
        "y_shift": model.y_shift,
        "y_scale": model.y_scale,
        "layers": [{"W": _arr(W), "b": _arr(b)} for W, b in zip(model.weights, model.biases)],
        "config": model.config,
    }
    return json.dumps(obj, default=str)


def model_from_json(text: str) -> MLPModel:
    obj = json.loads(text)
    if obj.get("format") != "polytope_ml.mlp":
        raise ValueError("not a serialized MLP model")
    return MLPModel(
        sizes=obj["sizes"],
        weights=[_unarr(L["W"]) for L in obj["layers"]],
        biases=[_unarr(L["b"]) for L in obj["layers"]],
        alpha=obj["alpha"],
        task=obj["task"],
        x_shift=_unarr(obj["x_shift"]),
        x_scale=_unarr(obj["x_scale"]),
        y_shift=obj["y_shift"],
        y_scale=obj["y_scale"],
        config=obj.get("config", {}),
    )


def save_model(model: MLPModel, path) -> None:
    with open(path, "w") as fh:
        fh.write(model_to_json(model))


def load_model(path) -> MLPModel:
    with open(path) as fh:
        return model_from_json(fh.read())
