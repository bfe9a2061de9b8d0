"""Min-max normalization, class-prototype construction over chaos
features, and cosine-similarity prediction, plus model persistence."""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .chaos import GlsParams, transform_matrix

_MODEL_FORMAT = "neurochaos-model"
_MODEL_VERSION = 1


class MissingClassError(ValueError):
    """A class index has no training rows."""


def _as_matrix(X, name="X") -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={X.ndim}")
    return X


class MinMaxNormalizer(TransformerMixin, BaseEstimator):
    """Per-column min-max scaling into [0, 1], fit on training rows only.

    Constant columns map to 0; values outside the fitted range (seen at
    predict time) are clipped into [0, 1].
    """

    def fit(self, X, y=None):
        X = _as_matrix(X)
        if X.shape[0] == 0:
            raise ValueError("cannot fit a normalizer on an empty matrix")
        self.data_min_ = X.min(axis=0)
        self.data_max_ = X.max(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        if not hasattr(self, "data_min_"):
            raise NotFittedError("MinMaxNormalizer is not fitted")
        X = _as_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} columns, got {X.shape[1]}"
            )
        span = self.data_max_ - self.data_min_
        out = np.divide(
            X - self.data_min_,
            span,
            out=np.zeros_like(X),
            where=span > 0,
        )
        return np.clip(out, 0.0, 1.0)


def cosine_similarity_matrix(X: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarities; zero-norm rows score 0 everywhere."""
    num = X @ P.T
    xn = np.sqrt(np.einsum("ij,ij->i", X, X))
    pn = np.sqrt(np.einsum("ij,ij->i", P, P))
    denom = xn[:, None] * pn[None, :]
    return np.divide(num, denom, out=np.zeros_like(num), where=denom > 0)


class ChaosNetClassifier(ClassifierMixin, BaseEstimator):
    """Nearest class prototype under cosine similarity.

    Fitting stores one prototype per class: the arithmetic mean of that
    class's training rows. Prediction assigns the argmax-similarity class,
    breaking ties toward the lowest class index. Zero-norm rows (or
    prototypes) have similarity 0 against everything; an all-zero test row
    therefore falls to class 0 with a degenerate-input warning.
    """

    def __init__(self, n_classes=None):
        self.n_classes = n_classes

    def fit(self, X, y):
        X = _as_matrix(X)
        y = np.asarray(y, dtype=np.int64)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError("y must be 1-D with one label per row of X")
        if y.size and y.min() < 0:
            raise ValueError("labels must be nonnegative class indices")
        n_classes = self.n_classes if self.n_classes is not None else int(y.max()) + 1
        counts = np.bincount(y, minlength=n_classes)
        if (counts == 0).any():
            missing = int(np.flatnonzero(counts == 0)[0])
            raise MissingClassError(f"class {missing} has no training rows")
        sums = np.zeros((n_classes, X.shape[1]))
        np.add.at(sums, y, X)  # sequential, order-stable accumulation
        self.prototypes_ = sums / counts[:, None]
        self.classes_ = np.arange(n_classes, dtype=np.int64)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        if not hasattr(self, "prototypes_"):
            raise NotFittedError("ChaosNetClassifier is not fitted")
        X = _as_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} columns, got {X.shape[1]}"
            )
        return cosine_similarity_matrix(X, self.prototypes_)

    def predict(self, X):
        sims = self.decision_function(X)
        degenerate = ~sims.any(axis=1)
        if degenerate.any():
            warnings.warn(
                f"{int(degenerate.sum())} row(s) had zero similarity to every "
                "prototype (zero-norm input); assigned class 0 by tie rule",
                UserWarning,
                stacklevel=2,
            )
        return self.classes_[np.argmax(sims, axis=1)]


class NeurochaosClassifier(ClassifierMixin, BaseEstimator):
    """Full pipeline estimator: normalize -> chaos transform -> prototypes.

    The normalizer is fit on the training rows only; prediction reuses it
    (with clipping) before the chaotic transform, so train and test flow
    through identical feature representations.
    """

    def __init__(self, q=0.52, b=0.75, epsilon=0.1, max_iters=5000, n_classes=None):
        self.q = q
        self.b = b
        self.epsilon = epsilon
        self.max_iters = max_iters
        self.n_classes = n_classes

    def _gls_params(self) -> GlsParams:
        return GlsParams(self.q, self.b, self.epsilon, self.max_iters)

    def fit(self, X, y):
        params = self._gls_params()
        X = _as_matrix(X)
        self.normalizer_ = MinMaxNormalizer().fit(X)
        Z = transform_matrix(self.normalizer_.transform(X), params)
        self.chaosnet_ = ChaosNetClassifier(n_classes=self.n_classes).fit(Z, y)
        self.classes_ = self.chaosnet_.classes_
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "normalizer_"):
            raise NotFittedError("NeurochaosClassifier is not fitted")
        X = _as_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"model expects {self.n_features_in_} input columns, got {X.shape[1]}"
            )
        Z = transform_matrix(self.normalizer_.transform(X), self._gls_params())
        return self.chaosnet_.predict(Z)


def save_model(path, clf: NeurochaosClassifier, strategy=None) -> None:
    """Persist a fitted pipeline model as one structured text file.

    Floats are serialized with full ``repr`` precision, so a reloaded
    model predicts bit-identically.
    """
    if not hasattr(clf, "normalizer_"):
        raise NotFittedError("cannot save an unfitted model")
    doc = {
        "format": _MODEL_FORMAT,
        "version": _MODEL_VERSION,
        "params": {
            "q": clf.q,
            "b": clf.b,
            "epsilon": clf.epsilon,
            "max_iters": clf.max_iters,
        },
        "strategy": None if strategy is None else str(getattr(strategy, "value", strategy)),
        "normalizer": {
            "min": clf.normalizer_.data_min_.tolist(),
            "max": clf.normalizer_.data_max_.tolist(),
        },
        "class_ids": clf.classes_.tolist(),
        "prototypes": clf.chaosnet_.prototypes_.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def load_model(path):
    """Load a persisted model; returns ``(classifier, strategy_or_None)``."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != _MODEL_FORMAT:
        raise ValueError(f"{path}: not a {_MODEL_FORMAT} file")
    if doc.get("version") != _MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {doc.get('version')!r}")
    p = doc["params"]
    clf = NeurochaosClassifier(
        q=p["q"],
        b=p["b"],
        epsilon=p["epsilon"],
        max_iters=p["max_iters"],
        n_classes=len(doc["class_ids"]),
    )
    norm = MinMaxNormalizer()
    norm.data_min_ = np.asarray(doc["normalizer"]["min"], dtype=np.float64)
    norm.data_max_ = np.asarray(doc["normalizer"]["max"], dtype=np.float64)
    norm.n_features_in_ = norm.data_min_.shape[0]
    net = ChaosNetClassifier(n_classes=len(doc["class_ids"]))
    net.prototypes_ = np.asarray(doc["prototypes"], dtype=np.float64)
    net.classes_ = np.asarray(doc["class_ids"], dtype=np.int64)
    net.n_features_in_ = net.prototypes_.shape[1]
    clf.normalizer_ = norm
    clf.chaosnet_ = net
    clf.classes_ = net.classes_
    clf.n_features_in_ = norm.n_features_in_
    return clf, doc.get("strategy")
