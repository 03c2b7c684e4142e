import csv

import numpy as np
import pytest

from nrdl.bench import (ExperimentConfig, SyntheticSpec, make_synthetic, run_benchmark,
                        run_noise_sweep)
from nrdl.data import Dataset
from nrdl.exceptions import DataError

from conftest import SYNTH_N_TRAIN


def data_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [r for r in csv.reader(fh) if r and not r[0].startswith("#")][1:]


class TestSynthetic:
    def test_zero_noise_collapses_classes(self):
        ds = make_synthetic(SyntheticSpec(noise=0.0, samples_per_class=5))
        for c in range(3):
            cols = ds.samples[:, ds.labels == c]
            assert np.all(cols == cols[:, :1])

    def test_same_seed_same_data(self):
        a = make_synthetic(SyntheticSpec(seed=11))
        b = make_synthetic(SyntheticSpec(seed=11))
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, make_synthetic(SyntheticSpec(seed=12)).samples)

    def test_unit_range(self, synth_dataset):
        assert synth_dataset.samples.min() == 0.0 and synth_dataset.samples.max() == 1.0
        assert synth_dataset.class_counts().tolist() == [30, 30, 30]

    def test_nearest_mean_is_perfect(self, synth_dataset):
        X, y = synth_dataset.samples, synth_dataset.labels
        means = np.stack([X[:, y == c].mean(axis=1) for c in range(3)], axis=1)
        dist = ((X[:, :, None] - means[:, None, :]) ** 2).sum(axis=0)
        assert np.all(dist.argmin(axis=1) == y)

    def test_orthogonal_means_equidistant(self):
        spec = SyntheticSpec(noise=0.0, separation=3.0, samples_per_class=1, num_classes=4)
        X = make_synthetic(spec).samples
        d = [np.linalg.norm(X[:, a] - X[:, b]) for a in range(4) for b in range(a + 1, 4)]
        assert max(d) / min(d) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("kw", [dict(separation=0.0), dict(noise=-1.0), dict(dim=0)])
    def test_invalid_synthetic_settings(self, kw):
        with pytest.raises(ValueError):
            SyntheticSpec(**kw)


def quick(**kw):
    kw.setdefault("num_repeats", 2)
    return ExperimentConfig(n_train_per_class=SYNTH_N_TRAIN, **kw)


class TestBenchmark:
    def test_single_repeat_std_zero(self, synth_dataset):
        assert run_benchmark(quick(num_repeats=1), synth_dataset).std == 0.0

    def test_deterministic(self, synth_dataset):
        a = run_benchmark(quick(num_repeats=3, seed=4), synth_dataset)
        b = run_benchmark(quick(num_repeats=3, seed=4), synth_dataset)
        assert a == b

    def test_csv_matches_summary(self, synth_dataset, tmp_path):
        s = run_benchmark(quick(num_repeats=3), synth_dataset, out=tmp_path / "b.csv")
        rows = data_rows(tmp_path / "b.csv")
        assert len(rows) == 3
        assert [int(r[1]) for r in rows] == [0, 1, 2]
        accs = [float(r[3]) for r in rows]
        assert accs == list(s.accuracies)
        assert np.mean(accs) == s.mean

    def test_separable_accuracy(self, synth_dataset):
        assert run_benchmark(quick(num_repeats=3), synth_dataset).mean >= 0.95

    @pytest.mark.parametrize("kw", [dict(num_repeats=0), dict(densities=(0.1, 1.2))])
    def test_invalid_config(self, kw):
        with pytest.raises(ValueError):
            quick(**kw)


class TestNoiseSweep:
    def test_zero_density_is_plain_benchmark(self, synth_dataset):
        cfg = quick(densities=(0.0,))
        ((dens, s),) = run_noise_sweep(cfg, synth_dataset)
        assert dens == 0.0 and s == run_benchmark(cfg, synth_dataset)

    def test_heavy_noise_hurts(self, synth_dataset):
        rows = run_noise_sweep(quick(densities=(0.0, 0.5)), synth_dataset)
        assert rows[1][1].mean <= rows[0][1].mean

    def test_csv_cardinality(self, synth_dataset, tmp_path):
        run_noise_sweep(quick(num_repeats=1, densities=(0.01, 0.02, 0.03)),
                        synth_dataset, out=tmp_path / "n.csv")
        rows = data_rows(tmp_path / "n.csv")
        assert [float(r[0]) for r in rows] == [0.01, 0.02, 0.03]
        assert all(r[3] == "1" for r in rows)

    def test_requires_unit_range(self):
        ds = Dataset(np.full((2, 6), 3.0), [0, 0, 0, 1, 1, 1], 2)
        with pytest.raises(DataError, match=r"\[0, 1\]"):
            run_noise_sweep(quick(), ds)
