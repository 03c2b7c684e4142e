"""Text formats: model files, convergence traces, reports and sample CSVs.

Floats are written with 17 significant digits so that every value
round-trips bit-exactly.
"""

from __future__ import annotations

import csv
from dataclasses import fields
from pathlib import Path

import numpy as np

from nrdl.exceptions import DataError
from nrdl.trainer import ConvergenceTrace, HyperParams, TrainedModel

__all__ = [
    "FORMAT_VERSION",
    "fmt",
    "load_model",
    "read_trace",
    "save_model",
    "write_dataset",
    "write_report",
    "write_trace",
]

FORMAT_VERSION = 1
_MAGIC = "NRDL"
_FLOAT_PARAMS = {"lam", "alpha", "beta", "gamma", "mu", "tol", "jitter"}


def fmt(x) -> str:
    return "%.17g" % x


def _write_rows(fh, A):
    for row in A:
        fh.write(" ".join(fmt(v) for v in row) + "\n")


def _params_meta(params: HyperParams) -> dict:
    meta = {}
    for f in fields(params):
        key = "lambda" if f.name == "lam" else f.name
        meta[key] = getattr(params, f.name)
    return meta


def save_model(model: TrainedModel, path) -> None:
    """Write ``NRDL 1 d K C``, the rows of ``D``, the rows of ``W``, then ``key=value`` metadata."""
    d, K, C = model.dims
    meta = _params_meta(model.params)
    meta.update(iterations=model.iterations, residual_P=model.residual_P,
                residual_J=model.residual_J, converged=model.converged)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{_MAGIC} {FORMAT_VERSION} {d} {K} {C}\n")
        _write_rows(fh, model.D)
        _write_rows(fh, model.W)
        for key, val in meta.items():
            if isinstance(val, float):
                val = fmt(val)
            fh.write(f"{key}={val}\n")


def _parse_meta_value(raw: str):
    if raw in ("True", "False"):
        return raw == "True"
    if raw == "None":
        return None
    try:
        return int(raw)
    except ValueError:
        return float(raw)


def load_model(path) -> TrainedModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataError(f"empty model file: {path}")
    head = lines[0].split()
    if len(head) != 5 or head[0] != _MAGIC:
        raise DataError(f"not an NRDL model file: {path}")
    if int(head[1]) != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {head[1]}")
    d, K, C = (int(v) for v in head[2:])
    if len(lines) < 1 + d + C:
        raise DataError("model file is truncated")
    try:
        D = np.array([[float(v) for v in ln.split()] for ln in lines[1:1 + d]])
        W = np.array([[float(v) for v in ln.split()]
                      for ln in lines[1 + d:1 + d + C]])
    except ValueError as exc:
        raise DataError(f"bad number in model file: {exc}") from None
    if D.shape != (d, K) or W.shape != (C, K):
        raise DataError("model matrix sizes do not match the header")

    meta = {}
    for ln in lines[1 + d + C:]:
        if not ln.strip():
            continue
        key, sep, raw = ln.partition("=")
        if not sep:
            raise DataError(f"bad metadata line: {ln!r}")
        meta[key.strip()] = _parse_meta_value(raw.strip())
    kw = {}
    for f in fields(HyperParams):
        key = "lambda" if f.name == "lam" else f.name
        if key in meta:
            val = meta[key]
            kw[f.name] = float(val) if f.name in _FLOAT_PARAMS else val
    params = HyperParams(**kw)
    return TrainedModel(D=D, W=W, params=params,
                        iterations=int(meta.get("iterations", 0)),
                        residual_P=float(meta.get("residual_P", float("nan"))),
                        residual_J=float(meta.get("residual_J", float("nan"))),
                        converged=bool(meta.get("converged", False)))


TRACE_HEADER = ["iter", "objective", "residual_P", "residual_J"]


def write_trace(trace: ConvergenceTrace, path) -> None:
    if len(trace) == 0:
        raise ValueError("cannot write an empty trace")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for it, obj, rp, rj in trace.records():
            w.writerow([it, fmt(obj), fmt(rp), fmt(rj)])


def read_trace(path) -> ConvergenceTrace:
    trace = ConvergenceTrace()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != TRACE_HEADER:
            raise DataError(f"not a trace file: {path}")
        for row in reader:
            trace.append(float(row[1]), float(row[2]), float(row[3]))
    return trace


def write_report(report, path) -> None:
    """Per-sample ``sample_index,true_label,pred_label`` rows and a summary comment."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_index", "true_label", "pred_label"])
        for i, (t, p) in enumerate(zip(report.true_labels, report.predicted)):
            w.writerow([i, "" if t < 0 else int(t), int(p)])
        if np.all(report.true_labels >= 0):
            fh.write(f"# accuracy={fmt(report.accuracy)} "
                     f"correct={report.correct} total={report.total}\n")


def write_dataset(dataset, samples_path, labels_path) -> None:
    """Inverse of :func:`nrdl.data.load_dataset`."""
    with open(samples_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for col in dataset.samples.T:
            w.writerow([fmt(v) for v in col])
    with open(labels_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{int(c)}\n" for c in dataset.labels)
