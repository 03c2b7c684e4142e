"""Classification with a trained model: code, project, take the argmax."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nrdl.coders import NnlsSolver, RidgeSolver
from nrdl.data import Dataset
from nrdl.exceptions import DataError
from nrdl.trainer import TrainedModel

__all__ = ["EvaluationReport", "Prediction", "classify", "evaluate", "make_coder", "predict"]

CODERS = ("nnls", "ridge")


@dataclass(frozen=True)
class Prediction:
    label: int
    scores: np.ndarray
    code: np.ndarray


@dataclass(frozen=True)
class EvaluationReport:
    true_labels: np.ndarray
    predicted: np.ndarray
    scores: np.ndarray
    confusion: np.ndarray

    @property
    def correct(self) -> int:
        return int(np.sum(self.true_labels == self.predicted))

    @property
    def total(self) -> int:
        return int(self.true_labels.size)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total


def make_coder(model: TrainedModel, coder: str = "nnls", coder_params=None):
    """Build a reusable coder for ``model.D``.

    ``coder_params`` is an :class:`NnlsParams` for ``"nnls"`` and the
    regularization weight (default ``1e-3``) for ``"ridge"``.
    """
    if coder == "nnls":
        return NnlsSolver(model.D, coder_params)
    if coder == "ridge":
        return RidgeSolver(model.D, 1e-3 if coder_params is None else coder_params)
    raise ValueError(f"unknown coder {coder!r}; expected one of {CODERS}")


def _unit_columns(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise DataError(f"cannot classify the zero vector (column {int(zero[0])})")
    return X / norms


def _check_dim(model, X):
    if X.shape[0] != model.D.shape[0]:
        raise DataError(
            f"dimension mismatch: model expects d={model.D.shape[0]}, "
            f"got {X.shape[0]}")


def classify(model: TrainedModel, x, coder: str = "nnls", coder_params=None,
             solver=None) -> Prediction:
    """Label one sample: unit-normalise, code over ``D``, score with ``W``.

    Ties in the scores go to the lowest class index. Pass ``solver`` (from
    :func:`make_coder`) to reuse a factorization across calls.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DataError(f"expected a vector, got shape {x.shape}")
    _check_dim(model, x)
    solver = solver or make_coder(model, coder, coder_params)
    code = solver.solve(_unit_columns(x[:, None])[:, 0])
    f = model.W @ code
    return Prediction(int(np.argmax(f)), f, code)


def predict(model: TrainedModel, X, coder: str = "nnls", coder_params=None):
    """Batch version of :func:`classify` over the columns of ``X``.

    Returns ``(labels, scores, codes)``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] == 0:
        raise DataError("expected a non-empty d x n sample matrix")
    _check_dim(model, X)
    solver = make_coder(model, coder, coder_params)
    codes = solver.solve(_unit_columns(X))
    scores = model.W @ codes
    return np.argmax(scores, axis=0), scores, codes


def evaluate(model: TrainedModel, test: Dataset, coder: str = "nnls",
             coder_params=None) -> EvaluationReport:
    """Classify every test column with one shared coder and tally the results."""
    if test.num_samples == 0:
        raise DataError("empty test set")
    pred, scores, _ = predict(model, test.samples, coder, coder_params)
    C = max(model.W.shape[0], test.num_classes)
    confusion = np.zeros((C, C), dtype=np.int64)
    np.add.at(confusion, (test.labels, pred), 1)
    return EvaluationReport(test.labels.copy(), pred, scores, confusion)
