"""Sample matrices: loading, normalization, splitting, labels and noise.

Samples are stored column-per-sample (``d x N``) throughout the package.
CSV files on disk hold one sample per row and are transposed on load.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nrdl.exceptions import DataError

__all__ = [
    "Dataset",
    "add_salt_pepper",
    "build_label_matrix",
    "load_dataset",
    "load_samples",
    "make_rng",
    "normalize_columns",
    "split_per_class",
]


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; every random draw in nrdl goes through this."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """Samples (``d x N``, one per column), integer labels and class count."""

    samples: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        X = np.asarray(self.samples, dtype=float)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise DataError(f"samples must be a 2-D array, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[1]:
            raise DataError(
                f"dimension mismatch: {X.shape[1]} samples but {y.size} labels")
        if y.size and not np.issubdtype(y.dtype, np.integer):
            if not np.all(np.equal(np.mod(y, 1), 0)):
                raise DataError("labels must be integers")
        y = y.astype(np.int64)
        if self.num_classes < 1:
            raise DataError("num_classes must be at least 1")
        if y.size and (y.min() < 0 or y.max() >= self.num_classes):
            raise DataError(f"labels must lie in [0, {self.num_classes})")
        if not np.all(np.isfinite(X)):
            raise DataError("samples contain non-finite values")
        object.__setattr__(self, "samples", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y))
        object.__setattr__(self, "num_classes", int(self.num_classes))

    @property
    def dim(self) -> int:
        return self.samples.shape[0]

    @property
    def num_samples(self) -> int:
        return self.samples.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.samples[:, idx], self.labels[idx], self.num_classes)

    def with_samples(self, samples: np.ndarray) -> "Dataset":
        return Dataset(samples, self.labels, self.num_classes)


def _read_lines(path: Path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    return [ln.rstrip("\r") for ln in text.split("\n") if ln.strip()]


def load_samples(samples_path) -> np.ndarray:
    """Read a headerless CSV (one sample per row) into a ``d x N`` matrix."""
    rows = []
    with open(samples_path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            vals = []
            for j, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"non-numeric cell at ({i},{j}): {cell!r}") from None
                if not math.isfinite(v):
                    raise DataError(f"non-finite cell at ({i},{j}): {cell!r}")
                vals.append(v)
            if rows and len(vals) != len(rows[0]):
                raise DataError(
                    f"dimension mismatch: row {i} has {len(vals)} columns, "
                    f"expected {len(rows[0])}")
            rows.append(vals)
    if not rows:
        raise DataError(f"empty file: {samples_path}")
    return np.asarray(rows, dtype=float).T


def load_dataset(samples_path, labels_path) -> Dataset:
    """Load a CSV sample file and a label file.

    Parameters
    ----------
    samples_path : path-like
        Headerless CSV, one sample per row.
    labels_path : path-like
        One base-0 integer label per line (LF or CRLF).

    Returns
    -------
    Dataset
        Samples transposed to column-per-sample, ``C = 1 + max(label)``.
    """
    X = load_samples(samples_path)
    label_lines = _read_lines(labels_path)
    if not label_lines:
        raise DataError(f"empty file: {labels_path}")
    labels = []
    for i, ln in enumerate(label_lines):
        try:
            lab = int(ln.strip())
        except ValueError:
            raise DataError(f"non-integer label on line {i}: {ln!r}") from None
        if lab < 0:
            raise DataError(f"negative label on line {i}: {lab}")
        labels.append(lab)
    if len(labels) != X.shape[1]:
        raise DataError(
            f"dimension mismatch: {X.shape[1]} sample rows but "
            f"{len(labels)} labels")

    labels = np.asarray(labels, dtype=np.int64)
    C = int(labels.max()) + 1
    missing = np.flatnonzero(np.bincount(labels, minlength=C) == 0)
    if missing.size:
        warnings.warn(f"labels skip classes {missing.tolist()}", stacklevel=2)
    return Dataset(X, labels, C)


def normalize_columns(X: np.ndarray) -> np.ndarray:
    """Scale every column to unit Euclidean norm."""
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise DataError(f"zero column at index {int(zero[0])}")
    return X / norms


def build_label_matrix(dataset: Dataset) -> np.ndarray:
    """One-hot ``C x N`` label matrix ``H`` with ``H[c, i] = 1`` iff ``labels[i] == c``."""
    H = np.zeros((dataset.num_classes, dataset.num_samples))
    H[dataset.labels, np.arange(dataset.num_samples)] = 1.0
    return H


def split_per_class(dataset: Dataset, n_train_per_class: int, seed: int):
    """Draw ``n_train_per_class`` training columns per class, uniformly at random.

    The remainder of each class goes to the test split. Both splits keep
    the original column order.
    """
    if n_train_per_class < 1:
        raise DataError("n_train_per_class must be at least 1")
    counts = dataset.class_counts()
    for c, n in enumerate(counts):
        if n < n_train_per_class + 1:
            raise DataError(
                f"class {c} has {n} samples, needs at least "
                f"{n_train_per_class + 1}")
    rng = make_rng(seed)
    train_idx = []
    for c in range(dataset.num_classes):
        members = np.flatnonzero(dataset.labels == c)
        train_idx.append(rng.permutation(members)[:n_train_per_class])
    train_idx = np.sort(np.concatenate(train_idx))
    test_mask = np.ones(dataset.num_samples, dtype=bool)
    test_mask[train_idx] = False
    return dataset.subset(train_idx), dataset.subset(np.flatnonzero(test_mask))


def add_salt_pepper(X: np.ndarray, density: float, seed: int) -> np.ndarray:
    """Salt-and-pepper noise on data scaled to ``[0, 1]``.

    One uniform draw ``u`` per entry: ``u < density/2`` sets the entry to 0,
    ``density/2 <= u < density`` sets it to 1, anything else is left alone.
    """
    if not 0.0 <= density <= 1.0:
        raise DataError(f"density must lie in [0, 1], got {density}")
    X = np.asarray(X, dtype=float)
    if X.size and (X.min() < 0.0 or X.max() > 1.0):
        raise DataError("entries must lie in [0, 1] before adding noise")
    out = X.copy()
    if density == 0.0:
        return out
    u = make_rng(seed).random(X.shape)
    out[u < density / 2] = 0.0
    out[(u >= density / 2) & (u < density)] = 1.0
    return out
