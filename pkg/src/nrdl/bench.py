"""Experiment harness: repeated random splits, noise sweeps, synthetic data."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from nrdl.classifier import evaluate
from nrdl.data import Dataset, add_salt_pepper, make_rng, split_per_class
from nrdl.exceptions import DataError
from nrdl.serialize import fmt
from nrdl.trainer import HyperParams, train

__all__ = [
    "BenchmarkSummary",
    "ExperimentConfig",
    "SyntheticSpec",
    "make_synthetic",
    "run_benchmark",
    "run_noise_sweep",
    "write_benchmark_csv",
    "write_noise_sweep_csv",
]


@dataclass(frozen=True)
class SyntheticSpec:
    num_classes: int = 3
    samples_per_class: int = 30
    dim: int = 20
    separation: float = 8.0
    noise: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError("separation must be positive")
        if self.num_classes < 1 or self.samples_per_class < 1 or self.dim < 1:
            raise ValueError("class count, class size and dim must be positive")
        if self.noise < 0:
            raise ValueError("noise must be non-negative")


def make_synthetic(spec: SyntheticSpec) -> Dataset:
    """Gaussian clusters around well separated class means.

    Means are random (orthogonal when ``dim >= num_classes``) and scaled so
    the closest pair sits ``separation`` apart. All entries are then mapped
    to ``[0, 1]`` by one global affine rescaling, which keeps the geometry.
    """
    rng = make_rng(spec.seed)
    C, n, d = spec.num_classes, spec.samples_per_class, spec.dim
    means = rng.standard_normal((d, C))
    if d >= C:
        means = np.linalg.qr(means)[0]
    if C > 1:
        gap = min(np.linalg.norm(means[:, a] - means[:, b])
                  for a, b in combinations(range(C), 2))
    else:
        gap = np.linalg.norm(means[:, 0])
    means *= spec.separation / gap
    X = np.repeat(means, n, axis=1) + spec.noise * rng.standard_normal((d, C * n))
    lo, hi = X.min(), X.max()
    X = (X - lo) / (hi - lo) if hi > lo else np.full_like(X, 0.5)
    return Dataset(X, np.repeat(np.arange(C), n), C)


@dataclass
class ExperimentConfig:
    n_train_per_class: int
    num_repeats: int = 10
    seed: int = 0
    params: HyperParams = field(default_factory=HyperParams)
    coder: str = "nnls"
    coder_params: object = None
    densities: tuple = (0.01, 0.02, 0.03)
    noise_seed: int = 12345

    def __post_init__(self):
        if self.num_repeats < 1:
            raise ValueError("num_repeats must be at least 1")
        if any(not 0.0 <= p <= 1.0 for p in self.densities):
            raise ValueError("noise densities must lie in [0, 1]")

    def repeat_seeds(self):
        """``(split_seed, init_seed)`` for each repeat."""
        return [(self.seed + r, self.params.init_seed + r)
                for r in range(self.num_repeats)]


@dataclass(frozen=True)
class BenchmarkSummary:
    accuracies: tuple
    converged: tuple
    iterations: tuple

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        """Population standard deviation over repeats (0 for a single repeat)."""
        return float(np.std(self.accuracies))


def run_benchmark(config: ExperimentConfig, dataset: Dataset, out=None) -> BenchmarkSummary:
    """Split, train and evaluate ``config.num_repeats`` times.

    Each repeat draws a fresh per-class split; the per-repeat rows go to
    ``out`` as CSV when given.
    """
    accs, conv, iters = [], [], []
    for split_seed, init_seed in config.repeat_seeds():
        tr, te = split_per_class(dataset, config.n_train_per_class, split_seed)
        model, _ = train(tr, replace(config.params, init_seed=init_seed))
        accs.append(evaluate(model, te, config.coder, config.coder_params).accuracy)
        conv.append(model.converged)
        iters.append(model.iterations)
    summary = BenchmarkSummary(tuple(accs), tuple(conv), tuple(iters))
    if out is not None:
        write_benchmark_csv(summary, config, out)
    return summary


def run_noise_sweep(config: ExperimentConfig, dataset: Dataset, out=None):
    """Benchmark on salt-and-pepper corrupted copies of the whole dataset.

    Train and test images are both corrupted, once per density. Returns a
    list of ``(density, BenchmarkSummary)``.
    """
    X = dataset.samples
    if X.min() < 0.0 or X.max() > 1.0:
        raise DataError("noise sweep needs samples rescaled to [0, 1]")
    rows = []
    for k, density in enumerate(config.densities):
        noisy = dataset.with_samples(
            add_salt_pepper(X, density, config.noise_seed + k))
        rows.append((density, run_benchmark(config, noisy)))
    if out is not None:
        write_noise_sweep_csv(rows, out)
    return rows


def write_benchmark_csv(summary: BenchmarkSummary, config: ExperimentConfig, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["repeat", "split_seed", "init_seed", "accuracy",
                    "converged", "iterations"])
        for r, ((s, i), acc, c, it) in enumerate(zip(
                config.repeat_seeds(), summary.accuracies,
                summary.converged, summary.iterations)):
            w.writerow([r, s, i, fmt(acc), int(c), it])
        fh.write(f"# mean={fmt(summary.mean)} std={fmt(summary.std)}\n")


def write_noise_sweep_csv(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["density", "mean_accuracy", "std_accuracy", "num_repeats"])
        for density, s in rows:
            w.writerow([fmt(density), fmt(s.mean), fmt(s.std), len(s.accuracies)])
