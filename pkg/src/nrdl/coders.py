"""Test-time coding over a fixed dictionary.

Two coders share the same interface: non-negative least squares solved by
ADMM (:class:`NnlsSolver`) and closed-form ridge regression
(:class:`RidgeSolver`). Both factor their Gram system once at construction,
so a solver built for one dictionary can code any number of samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from nrdl.exceptions import DataError, NumericalError

__all__ = [
    "NnlsParams",
    "NnlsResult",
    "NnlsSolver",
    "RidgeSolver",
    "solve_nnls",
    "solve_ridge",
]


@dataclass(frozen=True)
class NnlsParams:
    rho: float = 1.0
    max_iter: int = 1000
    tol: float = 1e-8

    def __post_init__(self):
        if not (self.rho > 0 and self.tol > 0 and self.max_iter >= 1):
            raise ValueError("rho, tol and max_iter must all be positive")


class NnlsResult(NamedTuple):
    codes: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    primal_residual: np.ndarray
    dual_residual: np.ndarray


def _check_dictionary(D) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2:
        raise DataError(f"dictionary must be 2-D, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise DataError("dictionary contains non-finite values")
    return D


def _check_signal(D, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim not in (1, 2) or y.shape[0] != D.shape[0]:
        raise DataError(
            f"dimension mismatch: dictionary has {D.shape[0]} rows, "
            f"signal has shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise DataError("signal contains non-finite values")
    return y


def _cho_factor(G):
    try:
        return linalg.cho_factor(G, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NumericalError(f"Gram system is not positive definite: {exc}") from exc


class NnlsSolver:
    r"""ADMM solver for :math:`\min_\eta \|y - D\eta\|_2^2` s.t. :math:`\eta \ge 0`.

    Splits :math:`\eta = z` with :math:`z \ge 0` and iterates a cached
    least-squares step, a clamp at zero and a scaled dual update. The
    returned codes are always the clamped iterate ``z``, so they are
    non-negative even when the iteration limit is hit first.

    Parameters
    ----------
    D : ndarray
        Dictionary, ``d x K``.
    params : NnlsParams, optional
    """

    def __init__(self, D, params: NnlsParams | None = None):
        self.D = _check_dictionary(D)
        self.params = params or NnlsParams()
        K = self.D.shape[1]
        self._factor = _cho_factor(self.D.T @ self.D + self.params.rho * np.eye(K))

    def solve_full(self, y) -> NnlsResult:
        """Code one signal (shape ``(d,)``) or a batch (shape ``(d, n)``).

        Columns are iterated independently: a column stops updating as soon
        as its own primal and dual residuals drop below ``tol``.
        """
        y = _check_signal(self.D, y)
        single = y.ndim == 1
        Y = y[:, None] if single else y
        rho, tol = self.params.rho, self.params.tol
        K, n = self.D.shape[1], Y.shape[1]

        Dty = self.D.T @ Y
        z = np.zeros((K, n))
        u = np.zeros((K, n))
        iters = np.zeros(n, dtype=np.int64)
        done = np.zeros(n, dtype=bool)
        r_pri = np.full(n, np.inf)
        r_dual = np.full(n, np.inf)
        for it in range(1, self.params.max_iter + 1):
            act = np.flatnonzero(~done)
            if act.size == 0:
                break
            za, ua = z[:, act], u[:, act]
            x = linalg.cho_solve(self._factor, Dty[:, act] + rho * (za - ua),
                                 check_finite=False)
            z_new = np.maximum(x + ua, 0.0)
            u[:, act] = ua + x - z_new
            r_pri[act] = np.linalg.norm(x - z_new, axis=0)
            r_dual[act] = rho * np.linalg.norm(z_new - za, axis=0)
            z[:, act] = z_new
            iters[act] = it
            done[act] = (r_pri[act] <= tol) & (r_dual[act] <= tol)

        if single:
            return NnlsResult(z[:, 0], iters[0], done[0], r_pri[0], r_dual[0])
        return NnlsResult(z, iters, done, r_pri, r_dual)

    def solve(self, y) -> np.ndarray:
        return self.solve_full(y).codes


class RidgeSolver:
    """Closed-form ridge codes ``(D^T D + reg I)^{-1} D^T y``."""

    def __init__(self, D, reg: float = 1e-3):
        if not reg > 0:
            raise ValueError("reg must be positive")
        self.D = _check_dictionary(D)
        self.reg = float(reg)
        K = self.D.shape[1]
        self._factor = _cho_factor(self.D.T @ self.D + self.reg * np.eye(K))

    def solve(self, y) -> np.ndarray:
        y = _check_signal(self.D, y)
        return linalg.cho_solve(self._factor, self.D.T @ y, check_finite=False)


def solve_nnls(D, y, params: NnlsParams | None = None) -> np.ndarray:
    """Non-negative codes of ``y`` over ``D``; see :class:`NnlsSolver`."""
    return NnlsSolver(D, params).solve(y)


def solve_ridge(D, y, reg: float = 1e-3) -> np.ndarray:
    return RidgeSolver(D, reg).solve(y)
