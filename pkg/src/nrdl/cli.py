"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from nrdl import plotting
from nrdl.bench import (ExperimentConfig, SyntheticSpec, make_synthetic,
                        run_benchmark, run_noise_sweep)
from nrdl.classifier import EvaluationReport, evaluate, predict
from nrdl.coders import NnlsParams
from nrdl.data import load_dataset, load_samples, split_per_class
from nrdl.exceptions import DataError, NumericalError
from nrdl.serialize import load_model, save_model, write_dataset, write_report, write_trace
from nrdl.trainer import HyperParams, train

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _densities(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad density list {text!r}") from None


def _add_data(p, labels_required=True):
    p.add_argument("--samples", required=True, help="CSV, one sample per row")
    p.add_argument("--labels", required=labels_required,
                   help="one base-0 integer label per line")


def _add_hyper(p):
    d = HyperParams()
    g = p.add_argument_group("hyperparameters")
    g.add_argument("--lambda", dest="lam", type=float, default=d.lam)
    g.add_argument("--alpha", type=float, default=d.alpha)
    g.add_argument("--beta", type=float, default=d.beta)
    g.add_argument("--gamma", type=float, default=d.gamma)
    g.add_argument("--mu", type=float, default=d.mu)
    g.add_argument("--tol", type=float, default=d.tol)
    g.add_argument("--max-iter", type=int, default=d.max_iter)
    g.add_argument("--jitter", type=float, default=d.jitter)
    g.add_argument("--atoms", type=int, default=None,
                   help="dictionary size (default: number of training samples)")
    g.add_argument("--legacy-p-update", action="store_true",
                   help="P-step without the 2*beta factor")
    g.add_argument("--seed", type=int, default=0,
                   help="seed for splits and initialisation")


def _add_coder(p):
    p.add_argument("--coder", choices=("nnls", "ridge"), default="nnls")
    p.add_argument("--ridge-reg", type=float, default=1e-3)
    p.add_argument("--nnls-rho", type=float, default=1.0)
    p.add_argument("--nnls-tol", type=float, default=1e-8)
    p.add_argument("--nnls-max-iter", type=int, default=1000)


def _add_bench(p):
    p.add_argument("--n-train", type=int, required=True,
                   help="training samples per class")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--no-plot", action="store_true",
                   help="skip the PNG figure written next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nrdl", description=(
        "Train and evaluate non-negative dictionary learning classifiers."))
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a model and save it")
    _add_data(p)
    _add_hyper(p)
    p.add_argument("--n-train", type=int, default=None,
                   help="train on a per-class split of this size (default: all)")
    p.add_argument("--trace", help="also write the convergence trace CSV here")
    p.add_argument("--out", required=True, help="model file")

    p = sub.add_parser("classify", help="classify samples with a saved model")
    p.add_argument("--model", required=True)
    _add_data(p, labels_required=False)
    _add_coder(p)
    p.add_argument("--out", required=True, help="report CSV")

    p = sub.add_parser("bench", help="accuracy over repeated random splits")
    _add_data(p)
    _add_hyper(p)
    _add_coder(p)
    _add_bench(p)
    p.add_argument("--out", required=True, help="per-repeat CSV")

    p = sub.add_parser("noise-sweep", help="benchmark under salt-and-pepper noise")
    _add_data(p)
    _add_hyper(p)
    _add_coder(p)
    _add_bench(p)
    p.add_argument("--densities", type=_densities, default=(0.01, 0.02, 0.03))
    p.add_argument("--noise-seed", type=int, default=12345)
    p.add_argument("--out", required=True, help="per-density CSV")

    p = sub.add_parser("synth", help="write a synthetic clustered dataset")
    s = SyntheticSpec()
    p.add_argument("--classes", type=int, default=s.num_classes)
    p.add_argument("--per-class", type=int, default=s.samples_per_class)
    p.add_argument("--dim", type=int, default=s.dim)
    p.add_argument("--separation", type=float, default=s.separation)
    p.add_argument("--noise", type=float, default=s.noise)
    p.add_argument("--seed", type=int, default=s.seed)
    p.add_argument("--out", required=True,
                   help="output directory for samples.csv and labels.txt")

    p = sub.add_parser("trace", help="train and write the convergence trace")
    _add_data(p)
    _add_hyper(p)
    p.add_argument("--n-train", type=int, default=None,
                   help="train on a per-class split of this size (default: all)")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", required=True, help="trace CSV")
    return parser


def _hyper(args) -> HyperParams:
    try:
        return HyperParams(lam=args.lam, alpha=args.alpha, beta=args.beta,
                           gamma=args.gamma, mu=args.mu, tol=args.tol,
                           max_iter=args.max_iter, init_seed=args.seed,
                           jitter=args.jitter, n_atoms=args.atoms,
                           legacy_p_update=args.legacy_p_update)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _coder_params(args):
    if args.coder == "ridge":
        return args.ridge_reg
    try:
        return NnlsParams(args.nnls_rho, args.nnls_max_iter, args.nnls_tol)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _config(args) -> ExperimentConfig:
    try:
        return ExperimentConfig(
            n_train_per_class=args.n_train, num_repeats=args.repeats,
            seed=args.seed, params=_hyper(args), coder=args.coder,
            coder_params=_coder_params(args),
            densities=getattr(args, "densities", (0.01, 0.02, 0.03)),
            noise_seed=getattr(args, "noise_seed", 12345))
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _figure_path(out) -> Path:
    return Path(out).with_suffix(".png")


def _training_set(args):
    ds = load_dataset(args.samples, args.labels)
    if args.n_train is not None:
        ds, _ = split_per_class(ds, args.n_train, args.seed)
    return ds


def cmd_train(args):
    model, trace = train(_training_set(args), _hyper(args))
    save_model(model, args.out)
    if args.trace:
        write_trace(trace, args.trace)
    print(f"trained d={model.dims[0]} K={model.dims[1]} C={model.dims[2]} "
          f"iterations={model.iterations} converged={model.converged}")


def cmd_classify(args):
    model = load_model(args.model)
    coder_params = _coder_params(args)
    if args.labels:
        report = evaluate(model, load_dataset(args.samples, args.labels),
                          args.coder, coder_params)
        print(f"accuracy={report.accuracy:.4f} ({report.correct}/{report.total})")
    else:
        pred, scores, _ = predict(model, load_samples(args.samples),
                                  args.coder, coder_params)
        report = EvaluationReport(np.full(pred.size, -1), pred, scores,
                                  np.zeros((0, 0), dtype=np.int64))
        print(f"classified {pred.size} samples")
    write_report(report, args.out)


def cmd_bench(args):
    config = _config(args)
    summary = run_benchmark(config, load_dataset(args.samples, args.labels),
                            out=args.out)
    if not args.no_plot:
        plotting.plot_benchmark(summary, _figure_path(args.out))
    print(f"accuracy mean={100 * summary.mean:.2f}% std={100 * summary.std:.2f}% "
          f"over {len(summary.accuracies)} repeats")


def cmd_noise_sweep(args):
    config = _config(args)
    rows = run_noise_sweep(config, load_dataset(args.samples, args.labels),
                           out=args.out)
    if not args.no_plot:
        plotting.plot_noise_sweep(rows, _figure_path(args.out))
    for density, s in rows:
        print(f"density={density:g} mean={100 * s.mean:.2f}% std={100 * s.std:.2f}%")


def cmd_synth(args):
    try:
        spec = SyntheticSpec(args.classes, args.per_class, args.dim,
                             args.separation, args.noise, args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_dataset(make_synthetic(spec), out / "samples.csv", out / "labels.txt")
    print(f"wrote {out / 'samples.csv'} and {out / 'labels.txt'}")


def cmd_trace(args):
    model, trace = train(_training_set(args), _hyper(args))
    write_trace(trace, args.out)
    if not args.no_plot:
        plotting.plot_trace(trace, _figure_path(args.out))
    print(f"iterations={model.iterations} converged={model.converged} "
          f"final objective={trace.objective[-1]:.6g}")


COMMANDS = {
    "train": cmd_train,
    "classify": cmd_classify,
    "bench": cmd_bench,
    "noise-sweep": cmd_noise_sweep,
    "synth": cmd_synth,
    "trace": cmd_trace,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"nrdl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"nrdl: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, OSError) as exc:
        print(f"nrdl: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
