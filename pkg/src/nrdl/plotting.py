"""Figures rendered next to the CSV outputs of the bench commands.

Uses the object-oriented matplotlib API (no pyplot state), so it is safe
to call from scripts and tests without a display.
"""

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

__all__ = ["plot_benchmark", "plot_noise_sweep", "plot_trace"]

_STYLE = {"figsize": (5.0, 3.4), "dpi": 120}


def _save(fig, path):
    FigureCanvasAgg(fig)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})


def plot_trace(trace, path, title=None):
    """Objective and constraint residuals against iteration."""
    it = np.arange(1, len(trace) + 1)
    fig = Figure(**_STYLE)
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(it, trace.objective, "o-", ms=3, color="C0", label="objective")
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective value")
    ax2 = ax.twinx()
    res = np.maximum(np.asarray(trace.residual_P), np.asarray(trace.residual_J))
    ax2.semilogy(it, np.maximum(res, np.finfo(float).tiny), "s--", ms=3,
                 color="C3", label="max residual")
    ax2.set_ylabel("max(|WS-P|, |WS-J|)")
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], loc="upper right",
              fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_noise_sweep(rows, path, title=None):
    """Mean accuracy with std error bars against noise density."""
    dens = [r[0] for r in rows]
    mean = [100 * r[1].mean for r in rows]
    std = [100 * r[1].std for r in rows]
    fig = Figure(**_STYLE)
    ax = fig.add_subplot(1, 1, 1)
    ax.errorbar(dens, mean, yerr=std, fmt="o-", capsize=3)
    ax.set_xlabel("salt & pepper density")
    ax.set_ylabel("recognition rate (%)")
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_benchmark(summary, path, title=None):
    acc = 100 * np.asarray(summary.accuracies)
    fig = Figure(**_STYLE)
    ax = fig.add_subplot(1, 1, 1)
    ax.bar(np.arange(acc.size), acc, color="C0")
    ax.axhline(acc.mean(), color="k", lw=1, ls="--",
               label=f"mean {acc.mean():.1f} ± {acc.std():.1f}")
    ax.set_xlabel("repeat")
    ax.set_ylabel("recognition rate (%)")
    ax.set_ylim(min(acc.min() - 5, 90), 100.5)
    ax.legend(loc="lower right", fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)
