"""Compact convolutional image classifier written directly in numpy.

Architecture (inputs are ``(3, 56, 56)`` after preprocessing)::

    conv3x3 3->8   + ReLU + maxpool2    56 -> 28
    conv3x3 8->16  + ReLU + maxpool2    28 -> 14
    conv3x3 16->32 + ReLU + maxpool2    14 -> 7
    global average pool                 -> 32
    affine 32->2                        -> logits

Everything runs in float64. Activations are kept channels-last internally so
the im2col products are plain 2-D matmuls; convolutions use stride 1 and
zero padding 1, max pooling floors odd sizes (7 -> 3).
"""

from __future__ import annotations

import csv
import json
import logging
import math
import struct
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import rng
from .metrics import f1 as f1_score

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
CONV_CHANNELS = ((3, 8), (8, 16), (16, 32))
NUM_CLASSES = 2
NORM_MEAN = 0.5
NORM_SCALE = 0.5


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    # per-epoch multiplier is exp(-lr_decay)
    lr_decay: float = 0.09
    max_epochs: int = 200
    patience: int = 8
    batch_size: int = 32
    input_downsample: int = 4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0 < self.patience < self.max_epochs:
            raise ValueError("need 0 < patience < max_epochs")
        if self.input_downsample < 1:
            raise ValueError("input_downsample must be >= 1")

    def lr_at(self, epoch_index: int) -> float:
        """Learning rate used during the 0-based epoch ``epoch_index``."""
        return self.learning_rate * math.exp(-self.lr_decay * epoch_index)


def param_shapes() -> dict[str, tuple[int, ...]]:
    shapes = {}
    for k, (cin, cout) in enumerate(CONV_CHANNELS, 1):
        shapes[f"conv{k}.w"] = (cout, cin, 3, 3)
        shapes[f"conv{k}.b"] = (cout,)
    shapes["fc.w"] = (NUM_CLASSES, CONV_CHANNELS[-1][1])
    shapes["fc.b"] = (NUM_CLASSES,)
    return shapes


@dataclass
class Model:
    params: dict
    adam_m: dict = field(default_factory=dict)
    adam_v: dict = field(default_factory=dict)
    step: int = 0

    def copy(self) -> "Model":
        return Model(
            {k: v.copy() for k, v in self.params.items()},
            {k: v.copy() for k, v in self.adam_m.items()},
            {k: v.copy() for k, v in self.adam_v.items()},
            self.step,
        )

    def flat(self) -> np.ndarray:
        return np.concatenate([self.params[k].ravel() for k in param_shapes()])


def init_model(seed: int = 0) -> Model:
    """He-normal convolution weights, small Gaussian head, zero biases."""
    gen = rng.generator(seed, rng.STREAM_INIT)
    params = {}
    for name, shape in param_shapes().items():
        if name.endswith(".b"):
            params[name] = np.zeros(shape)
        elif name.startswith("conv"):
            fan_in = shape[1] * 9
            params[name] = gen.standard_normal(shape) * math.sqrt(2.0 / fan_in)
        else:
            params[name] = gen.standard_normal(shape) * math.sqrt(1.0 / shape[1])
    return Model(params)


# preprocessing ------------------------------------------------------------------

def preprocess(img, cfg: TrainConfig | None = None) -> np.ndarray:
    """Scale to [0, 1], average-pool by ``cfg.input_downsample`` and normalise
    to ``(v - 0.5) / 0.5``. Returns a ``(3, h, w)`` float64 array."""
    factor = (cfg or TrainConfig()).input_downsample
    px = getattr(img, "pixels", img)
    px = np.asarray(px)
    if px.ndim != 3 or px.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) pixels, got {px.shape}")
    h, w = px.shape[:2]
    if h % factor or w % factor:
        raise ValueError(f"image {w}x{h} not divisible by downsample factor {factor}")
    x = px.astype(np.float64) / 255.0
    x = x.reshape(h // factor, factor, w // factor, factor, 3).mean(axis=(1, 3))
    return ((x - NORM_MEAN) / NORM_SCALE).transpose(2, 0, 1).copy()


# layers -------------------------------------------------------------------------

def _conv_forward(x, w, b):
    """x: (B, H, W, C) -> (B, H, W, F) with 3x3 kernels, pad 1."""
    bsz, h, wd, c = x.shape
    f = w.shape[0]
    xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
    cols = sliding_window_view(xp, (3, 3), axis=(1, 2)).reshape(bsz * h * wd, c * 9)
    out = cols @ w.reshape(f, c * 9).T + b
    return out.reshape(bsz, h, wd, f), cols


def _conv_backward(dout, cols, w, x_shape, need_dx=True):
    bsz, h, wd, c = x_shape
    f = w.shape[0]
    d2 = dout.reshape(-1, f)
    dw = (d2.T @ cols).reshape(w.shape)
    db = d2.sum(axis=0)
    if not need_dx:
        return None, dw, db
    dcols = (d2 @ w.reshape(f, c * 9)).reshape(bsz, h, wd, c, 3, 3)
    dxp = np.zeros((bsz, h + 2, wd + 2, c))
    for i in range(3):
        for j in range(3):
            dxp[:, i:i + h, j:j + wd, :] += dcols[..., i, j]
    return dxp[:, 1:-1, 1:-1, :], dw, db


def _pool_forward(x):
    """2x2 max pool, floor mode. Returns output and the argmax index within each window."""
    bsz, h, w, c = x.shape
    h2, w2 = h // 2, w // 2
    win = x[:, :2 * h2, :2 * w2, :].reshape(bsz, h2, 2, w2, 2, c)
    win = win.transpose(0, 1, 3, 5, 2, 4).reshape(bsz, h2, w2, c, 4)
    idx = win.argmax(axis=-1)
    out = np.take_along_axis(win, idx[..., None], axis=-1)[..., 0]
    return out, idx


def _pool_backward(dout, idx, x_shape):
    bsz, h, w, c = x_shape
    h2, w2 = h // 2, w // 2
    onehot = np.zeros((bsz, h2, w2, c, 4))
    np.put_along_axis(onehot, idx[..., None], dout[..., None], axis=-1)
    blk = onehot.reshape(bsz, h2, w2, c, 2, 2).transpose(0, 1, 4, 2, 5, 3)
    dx = np.zeros(x_shape)
    dx[:, :2 * h2, :2 * w2, :] = blk.reshape(bsz, 2 * h2, 2 * w2, c)
    return dx


def _as_batch(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 3:
        x = x[None]
    if x.ndim != 4 or x.shape[1] != 3:
        raise ValueError(f"expected input of shape (B, 3, H, W) or (3, H, W), got {x.shape}")
    if x.shape[2] < 8 or x.shape[3] < 8:
        raise ValueError(f"input {x.shape[2]}x{x.shape[3]} too small for three pooling stages")
    return x


def _forward(params, x, keep=False):
    h = x.transpose(0, 2, 3, 1)
    caches = []
    for k in range(1, len(CONV_CHANNELS) + 1):
        shape_in = h.shape
        z, cols = _conv_forward(h, params[f"conv{k}.w"], params[f"conv{k}.b"])
        a = np.maximum(z, 0.0)
        h, idx = _pool_forward(a)
        if keep:
            caches.append((shape_in, cols, z > 0, a.shape, idx))
    feats = h.mean(axis=(1, 2))
    logits = feats @ params["fc.w"].T + params["fc.b"]
    return logits, (caches, h.shape, feats)


def forward(model: Model, x) -> np.ndarray:
    """Logits of shape ``(2,)`` for one input or ``(B, 2)`` for a batch."""
    single = np.ndim(x) == 3
    logits, _ = _forward(model.params, _as_batch(x))
    return logits[0] if single else logits


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def predict_class(logits) -> np.ndarray:
    """Argmax over the two logits; ties go to class 0."""
    logits = np.asarray(logits)
    return (logits[..., 1] > logits[..., 0]).astype(np.int64)


def loss_and_grad(model: Model, x, y) -> tuple[float, dict]:
    """Mean softmax cross-entropy over the batch and its gradient for every parameter."""
    x = _as_batch(x)
    y = np.asarray(y, dtype=np.int64).reshape(-1)
    if len(y) == 0 or len(y) != len(x):
        raise ValueError("batch must be nonempty with one label per input")
    params = model.params
    logits, (caches, pooled_shape, feats) = _forward(params, x, keep=True)
    bsz = len(y)
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = float(-logp[np.arange(bsz), y].mean())

    grads = {}
    dlogits = np.exp(logp)
    dlogits[np.arange(bsz), y] -= 1.0
    dlogits /= bsz
    grads["fc.w"] = dlogits.T @ feats
    grads["fc.b"] = dlogits.sum(axis=0)
    dfeats = dlogits @ params["fc.w"]
    _, ph, pw, _ = pooled_shape
    dh = np.broadcast_to(dfeats[:, None, None, :] / (ph * pw), pooled_shape)
    for k in range(len(CONV_CHANNELS), 0, -1):
        shape_in, cols, active, act_shape, idx = caches[k - 1]
        da = _pool_backward(dh, idx, act_shape)
        dz = da * active
        dh, grads[f"conv{k}.w"], grads[f"conv{k}.b"] = _conv_backward(
            dz, cols, params[f"conv{k}.w"], shape_in, need_dx=k > 1
        )
    return loss, grads


def adam_update(model: Model, grads: dict, lr: float, cfg: TrainConfig) -> None:
    model.step += 1
    t = model.step
    for name, g in grads.items():
        m = model.adam_m.get(name)
        if m is None:
            m = model.adam_m[name] = np.zeros_like(g)
            model.adam_v[name] = np.zeros_like(g)
        v = model.adam_v[name]
        m *= cfg.beta1
        m += (1 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1 - cfg.beta2) * g * g
        mhat = m / (1 - cfg.beta1 ** t)
        vhat = v / (1 - cfg.beta2 ** t)
        model.params[name] -= lr * mhat / (np.sqrt(vhat) + cfg.eps)


def predict(model: Model, x, batch_size: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Labels (score >= 0.5) and positive-class probabilities."""
    x = _as_batch(x)
    scores = np.empty(len(x))
    for s in range(0, len(x), batch_size):
        scores[s:s + batch_size] = softmax(forward(model, x[s:s + batch_size]))[:, 1]
    return (scores >= 0.5).astype(np.int64), scores


# training -----------------------------------------------------------------------

class EarlyStopping:
    """Track the best validation score; signal a stop after ``patience``
    epochs without strict improvement."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best = -math.inf
        self.best_epoch = 0
        self.epoch = 0

    def update(self, score: float) -> bool:
        """Record one epoch's score; True if it is a new best."""
        self.epoch += 1
        if score > self.best:
            self.best = score
            self.best_epoch = self.epoch
            return True
        return False

    @property
    def should_stop(self) -> bool:
        return self.epoch - self.best_epoch >= self.patience


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_f1: float
    lr: float


@dataclass
class TrainResult:
    model: Model
    history: list
    best_epoch: int
    best_val_f1: float


def evaluate_f1(model: Model, x, y) -> float:
    labels, _ = predict(model, x)
    return f1_score(y, labels)


def train(model: Model, train_data, val_data, cfg: TrainConfig, score_fn=evaluate_f1) -> TrainResult:
    """Adam with per-epoch exponential decay and F1-based early stopping.

    ``train_data`` and ``val_data`` are ``(inputs, labels)`` pairs. The model
    is updated in place; the returned model is a copy of the best epoch.
    ``score_fn(model, x, y)`` gives the validation score (F1 by default).
    """
    xt, yt = train_data
    xv, yv = val_data
    xt = _as_batch(xt)
    xv = _as_batch(xv)
    yt = np.asarray(yt, dtype=np.int64)
    yv = np.asarray(yv, dtype=np.int64)
    if len(xt) == 0 or len(xv) == 0:
        raise ValueError("training and validation splits must be nonempty")

    stopper = EarlyStopping(cfg.patience)
    best = model.copy()
    history = []
    for e in range(cfg.max_epochs):
        lr = cfg.lr_at(e)
        order = rng.generator(cfg.seed, rng.STREAM_SHUFFLE, e).permutation(len(xt))
        total = 0.0
        for s in range(0, len(order), cfg.batch_size):
            idx = order[s:s + cfg.batch_size]
            loss, grads = loss_and_grad(model, xt[idx], yt[idx])
            adam_update(model, grads, lr, cfg)
            total += loss * len(idx)
        val_f1 = score_fn(model, xv, yv)
        history.append(EpochRecord(e + 1, total / len(xt), val_f1, lr))
        log.info("epoch %d loss %.4f val_f1 %.4f lr %.6f", e + 1, total / len(xt), val_f1, lr)
        if stopper.update(val_f1):
            best = model.copy()
        if stopper.should_stop:
            break
    return TrainResult(best, history, stopper.best_epoch, stopper.best)


# persistence --------------------------------------------------------------------

def architecture() -> dict:
    return {
        "conv_channels": [list(c) for c in CONV_CHANNELS],
        "kernel": 3,
        "pool": 2,
        "head": "gap-affine",
        "classes": NUM_CLASSES,
        "param_order": list(param_shapes()),
    }


CHECKPOINT_MAGIC = b"VNSCKPT\n"


def save_checkpoint(path, model: Model, cfg: TrainConfig | None = None, **meta) -> None:
    """Write a checkpoint: magic line, 8-byte header length, JSON header
    (version, architecture, config, metadata), then the flat parameters as
    little-endian float64. Equal models give equal bytes."""
    header = {"version": CHECKPOINT_VERSION, "architecture": architecture(), "meta": meta}
    if cfg is not None:
        header["train_config"] = asdict(cfg)
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(model.flat().astype("<f8").tobytes())


def load_checkpoint(path) -> tuple[Model, dict]:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(CHECKPOINT_MAGIC):
        raise ValueError(f"{path}: not a checkpoint file")
    pos = len(CHECKPOINT_MAGIC)
    (hlen,) = struct.unpack("<Q", data[pos:pos + 8])
    header = json.loads(data[pos + 8:pos + 8 + hlen].decode("utf-8"))
    flat = np.frombuffer(data, dtype="<f8", offset=pos + 8 + hlen).astype(np.float64)
    if header.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {header.get('version')}")
    if header.get("architecture") != architecture():
        raise ValueError("checkpoint architecture does not match this build")
    params = {}
    pos = 0
    for name, shape in param_shapes().items():
        size = int(np.prod(shape))
        params[name] = flat[pos:pos + size].reshape(shape).copy()
        pos += size
    if pos != len(flat):
        raise ValueError(f"checkpoint holds {len(flat)} values, expected {pos}")
    return Model(params), header


def write_history(path, history) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "val_f1", "lr"])
        for r in history:
            w.writerow([r.epoch, repr(r.train_loss), repr(r.val_f1), repr(r.lr)])
