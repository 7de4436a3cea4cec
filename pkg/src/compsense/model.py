"""Three-way softmax regression over sparse indicator features.

The classifier is p(c | x) = exp(s_c) / sum_c' exp(s_c') with scores
s_c = sum_{j active} W[c, j] + b_c, trained by mini-batch SGD on

    mean NLL + (l2 / 2) * ||W||^2        (bias unpenalized).

Training streams (indices, label) pairs and touches only active columns
per step, so memory is a small multiple of the vocabulary size and never
of the corpus size. The l2 term is applied through a global scale factor
on the weight matrix, clamped at zero, which makes the decay exact
without a dense pass. Given the same hyperparameters, seed, and example
stream, fit is bitwise deterministic: the in-memory and streaming entry
points share one code path.
"""

from __future__ import annotations

import json
from typing import Callable, Iterable, Iterator

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .errors import CompsenseError, DataValidationError, FingerprintMismatchError
from .features import FeatureMatrix
from .labels import LABELS

N_CLASSES = len(LABELS)

_MASK64 = (1 << 64) - 1


def softmax(scores: np.ndarray) -> np.ndarray:
    """Stable softmax along the last axis (max subtraction)."""
    shifted = scores - np.max(scores, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def batch_loss_and_grad(
    W: np.ndarray,
    b: np.ndarray,
    rows: Iterable[np.ndarray],
    labels: Iterable[int],
    l2: float = 0.0,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Dense reference loss and gradient for a batch.

    Exists for verification: the sparse SGD step must agree with this to
    float precision. Never used on large data.
    """
    rows = list(rows)
    labels = list(labels)
    if len(rows) != len(labels) or not rows:
        raise ValueError("rows and labels must be equal-length and non-empty")
    dW = np.zeros_like(W)
    db = np.zeros_like(b)
    total_nll = 0.0
    for idx, label in zip(rows, labels):
        scores = W[:, idx].sum(axis=1) + b
        p = softmax(scores)
        total_nll -= float(np.log(p[label]))
        err = p.copy()
        err[label] -= 1.0
        dW[:, idx] += err[:, None]
        db += err
    n = len(rows)
    loss = total_nll / n + 0.5 * l2 * float(np.sum(W * W))
    dW /= n
    db /= n
    dW += l2 * W
    return loss, dW, db


def _block_shuffled(
    stream: Iterator, block: int, seed: int, epoch: int
) -> Iterator:
    """Yield stream items with order randomized inside fixed-size blocks.

    Keeps at most ``block`` items in memory while still decorrelating
    neighboring examples. block <= 1 passes the stream through.
    """
    if block <= 1:
        yield from stream
        return
    buf: list = []
    block_index = 0
    for item in stream:
        buf.append(item)
        if len(buf) == block:
            yield from _drain(buf, seed, epoch, block_index)
            buf = []
            block_index += 1
    if buf:
        yield from _drain(buf, seed, epoch, block_index)


def _drain(buf: list, seed: int, epoch: int, block_index: int) -> Iterator:
    seq = np.random.SeedSequence([seed & _MASK64, epoch, block_index])
    order = np.random.Generator(np.random.PCG64(seq)).permutation(len(buf))
    for i in order:
        yield buf[i]


class BowSoftmaxRegression(BaseEstimator, ClassifierMixin):
    """Mini-batch SGD softmax regression on sparse indicator rows.

    Hyperparameter defaults are the ones used throughout the toolkit:
    l2 1e-6, 3 epochs, batch 256. The per-epoch learning rate is
    learning_rate / (1 + lr_decay * epoch). The bias picks up the class
    prior, which matters for short sentences; use_bias=False freezes it
    at zero for ablation.

    After fit: coef_ (n_classes, n_features), intercept_ (n_classes,),
    vocab_fingerprint_, train_log_ (one dict per epoch).
    """

    def __init__(
        self,
        l2: float = 1e-6,
        epochs: int = 3,
        batch_size: int = 256,
        learning_rate: float = 0.5,
        lr_decay: float = 1.0,
        seed: int = 0,
        shuffle_block: int = 8192,
        use_bias: bool = True,
    ):
        self.l2 = l2
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.lr_decay = lr_decay
        self.seed = seed
        self.shuffle_block = shuffle_block
        self.use_bias = use_bias

    # -- training ----------------------------------------------------------

    def fit(self, X: FeatureMatrix, y=None) -> "BowSoftmaxRegression":
        labels = X.y if y is None else np.asarray(y, dtype=np.int8)
        if labels is None:
            raise DataValidationError("fit needs labels for every example")
        rows = X.rows

        def stream_factory(epoch: int) -> Iterator:
            return zip(rows, labels)

        return self.fit_stream(stream_factory, X.n_features, X.vocab_fingerprint)

    def fit_stream(
        self,
        stream_factory: Callable[[int], Iterator],
        n_features: int,
        vocab_fingerprint: str = "",
    ) -> "BowSoftmaxRegression":
        """Train from a re-playable stream of (index-array, label) pairs.

        stream_factory(epoch) must yield the same examples each epoch;
        order may differ only if the caller wants it to. All shuffling
        the model itself does is block-local and seeded.
        """
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("epochs and batch_size must be positive")
        Wraw = np.zeros((N_CLASSES, n_features), dtype=np.float64)
        scale = 1.0
        b = np.zeros(N_CLASSES, dtype=np.float64)
        log = []

        for epoch in range(self.epochs):
            lr = self.learning_rate / (1.0 + self.lr_decay * epoch)
            nll_sum = 0.0
            n_seen = 0
            stream = _block_shuffled(
                iter(stream_factory(epoch)), self.shuffle_block, self.seed, epoch
            )
            for batch_no, batch in enumerate(_batches(stream, self.batch_size)):
                grads: dict[int, np.ndarray] = {}
                gb = np.zeros(N_CLASSES, dtype=np.float64)
                for idx, label in batch:
                    scores = scale * Wraw[:, idx].sum(axis=1) + b
                    p = softmax(scores)
                    with np.errstate(divide="ignore"):  # caught just below
                        nll = -float(np.log(p[label]))
                    if not np.isfinite(nll):
                        raise CompsenseError(
                            f"non-finite loss at epoch {epoch}, batch {batch_no}"
                        )
                    nll_sum += nll
                    err = p.copy()
                    err[label] -= 1.0
                    for j in idx:
                        j = int(j)
                        if j in grads:
                            grads[j] += err
                        else:
                            grads[j] = err.copy()
                    gb += err
                n_batch = len(batch)
                n_seen += n_batch
                # exact l2 step: W <- (1 - lr*l2) W - lr * dNLL(W_old)
                scale *= max(0.0, 1.0 - lr * self.l2)
                if scale == 0.0:
                    Wraw[:] = 0.0
                    scale = 1.0
                step = lr / (n_batch * scale)
                for j, g in grads.items():
                    Wraw[:, j] -= step * g
                if self.use_bias:
                    b -= (lr / n_batch) * gb
            if n_seen == 0:
                raise DataValidationError("no training examples")
            w_sq = scale * scale * float(np.sum(Wraw * Wraw))
            log.append(
                {
                    "epoch": epoch,
                    "lr": lr,
                    "mean_nll": nll_sum / n_seen,
                    "loss": nll_sum / n_seen + 0.5 * self.l2 * w_sq,
                    "n": n_seen,
                }
            )

        self.coef_ = scale * Wraw
        self.intercept_ = b
        self.classes_ = np.array([int(c) for c in LABELS])
        self.n_features_in_ = n_features
        self.vocab_fingerprint_ = vocab_fingerprint
        self.train_log_ = log
        return self

    # -- inference ---------------------------------------------------------

    def _check_fingerprint(self, fingerprint: str) -> None:
        if (
            fingerprint
            and self.vocab_fingerprint_
            and fingerprint != self.vocab_fingerprint_
        ):
            raise FingerprintMismatchError(
                "feature rows were built with a different vocabulary "
                f"({fingerprint[:12]} vs model {self.vocab_fingerprint_[:12]})"
            )

    def predict_proba_one(self, idx: np.ndarray) -> np.ndarray:
        check_is_fitted(self, "coef_")
        scores = self.coef_[:, idx].sum(axis=1) + self.intercept_
        return softmax(scores)

    def predict_proba(self, X: FeatureMatrix) -> np.ndarray:
        check_is_fitted(self, "coef_")
        self._check_fingerprint(X.vocab_fingerprint)
        out = np.empty((len(X.rows), N_CLASSES), dtype=np.float64)
        for i, idx in enumerate(X.rows):
            out[i] = self.predict_proba_one(idx)
        return out

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        # argmax takes the first maximum, so exact ties resolve in
        # label order (entailment, contradiction, neutral)
        return np.argmax(self.predict_proba(X), axis=1)

    def score(self, X: FeatureMatrix, y=None) -> float:
        labels = X.y if y is None else np.asarray(y)
        return float(np.mean(self.predict(X) == labels))


def _batches(stream: Iterator, size: int) -> Iterator[list]:
    batch: list = []
    for item in stream:
        batch.append(item)
        if len(batch) == size:
            yield batch
            batch = []
    if batch:
        yield batch


# ---------------------------------------------------------------------------
# Model persistence
#
# Both formats are fully deterministic (no timestamps, no container
# metadata): saving the same model twice gives byte-identical files.

_MODEL_MAGIC_BIN = b"compsense-model 1\n"
_MODEL_MAGIC_TEXT = "compsense-model-text 1"

_PARAM_FIELDS = (
    "l2", "epochs", "batch_size", "learning_rate",
    "lr_decay", "seed", "shuffle_block", "use_bias",
)


def _model_header(model: BowSoftmaxRegression) -> dict:
    header = {
        "n_classes": N_CLASSES,
        "n_features": int(model.n_features_in_),
        "vocab_fingerprint": model.vocab_fingerprint_,
    }
    for name in _PARAM_FIELDS:
        header[name] = getattr(model, name)
    return header


def _model_from_header(header: dict) -> BowSoftmaxRegression:
    model = BowSoftmaxRegression(
        **{name: header[name] for name in _PARAM_FIELDS}
    )
    model.classes_ = np.array([int(c) for c in LABELS])
    model.n_features_in_ = int(header["n_features"])
    model.vocab_fingerprint_ = header["vocab_fingerprint"]
    model.train_log_ = header.get("train_log", [])
    return model


def save_model(model: BowSoftmaxRegression, path, text: bool = False) -> None:
    check_is_fitted(model, "coef_")
    header = _model_header(model)
    header["train_log"] = model.train_log_
    header_json = json.dumps(header, sort_keys=True, separators=(",", ":"))
    if text:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_MODEL_MAGIC_TEXT + "\n")
            fh.write(header_json + "\n")
            for c in range(N_CLASSES):
                fh.write("W " + " ".join(v.hex() for v in model.coef_[c]) + "\n")
            fh.write("b " + " ".join(v.hex() for v in model.intercept_) + "\n")
        return
    with open(path, "wb") as fh:
        fh.write(_MODEL_MAGIC_BIN)
        fh.write(header_json.encode("utf-8"))
        fh.write(b"\n")
        fh.write(np.ascontiguousarray(model.coef_, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.intercept_, dtype="<f8").tobytes())


def load_model(path) -> BowSoftmaxRegression:
    with open(path, "rb") as fh:
        magic = fh.readline()
    if magic == _MODEL_MAGIC_BIN:
        return _load_binary(path)
    if magic.rstrip(b"\n").decode("utf-8", "replace") == _MODEL_MAGIC_TEXT:
        return _load_text(path)
    raise DataValidationError(f"{path}: not a model file")


def _load_binary(path) -> BowSoftmaxRegression:
    with open(path, "rb") as fh:
        fh.readline()
        header = json.loads(fh.readline().decode("utf-8"))
        model = _model_from_header(header)
        d = model.n_features_in_
        w_bytes = fh.read(N_CLASSES * d * 8)
        b_bytes = fh.read(N_CLASSES * 8)
        if len(w_bytes) != N_CLASSES * d * 8 or len(b_bytes) != N_CLASSES * 8:
            raise DataValidationError(f"{path}: truncated model file")
        if fh.read(1):
            raise DataValidationError(f"{path}: trailing bytes in model file")
    model.coef_ = (
        np.frombuffer(w_bytes, dtype="<f8").reshape(N_CLASSES, d).copy()
    )
    model.intercept_ = np.frombuffer(b_bytes, dtype="<f8").copy()
    return model


def _load_text(path) -> BowSoftmaxRegression:
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        header = json.loads(fh.readline())
        model = _model_from_header(header)
        d = model.n_features_in_
        coef = np.zeros((N_CLASSES, d), dtype=np.float64)
        for c in range(N_CLASSES):
            parts = fh.readline().split()
            if not parts or parts[0] != "W" or len(parts) != d + 1:
                raise DataValidationError(f"{path}: bad weight row {c}")
            coef[c] = [float.fromhex(p) for p in parts[1:]]
        parts = fh.readline().split()
        if not parts or parts[0] != "b" or len(parts) != N_CLASSES + 1:
            raise DataValidationError(f"{path}: bad bias row")
        intercept = np.array([float.fromhex(p) for p in parts[1:]])
    model.coef_ = coef
    model.intercept_ = intercept
    return model
