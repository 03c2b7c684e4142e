r"""ADMM training of the joint dictionary and linear classifier.

The trained model minimises

.. math::
   \|X - DS\|_F^2 + \lambda \|D(A \odot S)\|_F^2 + \alpha \|H - WS\|_F^2
   + \beta \sum_i \sum_{j \ne i} \|(WS_i)^T (WS_j)\|_F^2
   + \gamma \, \mathrm{tr}(W S L S^T W^T) \quad \text{s.t.} \; S \ge 0

by splitting :math:`WS = P` (incoherence term) and :math:`WS = J` (graph
term). Each iteration runs the block updates S, W, P, J, D followed by the
multiplier ascent and the residual test. Every linear solve adds
``jitter * I`` to its system matrix.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import linalg

from nrdl.data import Dataset, build_label_matrix, make_rng, normalize_columns
from nrdl.exceptions import DataError, NumericalError
from nrdl.graph import laplacian, pairwise_similarity
from nrdl.masks import BlockMask, assign_atom_labels, build_block_mask

log = logging.getLogger(__name__)

__all__ = [
    "ConvergenceTrace",
    "HyperParams",
    "TrainedModel",
    "TrainerState",
    "check_convergence",
    "init_state",
    "objective",
    "train",
    "update_D",
    "update_J",
    "update_P",
    "update_S",
    "update_W",
    "update_multipliers",
]


@dataclass(frozen=True)
class HyperParams:
    """Solver knobs.

    ``lam`` weighs the off-block reconstruction term; ``alpha``, ``beta`` and
    ``gamma`` weigh the label fit, the cross-class incoherence and the graph
    term; ``mu`` is the (fixed) ADMM penalty. ``legacy_p_update`` drops the
    ``2 * beta`` factor from the P-step. ``n_atoms=None`` uses one atom per
    training sample.
    """

    lam: float = 1.0
    alpha: float = 1.0
    beta: float = 1e-3
    gamma: float = 1e-3
    mu: float = 1.0
    tol: float = 1e-5
    max_iter: int = 100
    init_seed: int = 0
    jitter: float = 1e-8
    legacy_p_update: bool = False
    n_atoms: int | None = None

    def __post_init__(self):
        for name in ("lam", "alpha", "beta", "gamma", "jitter"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.n_atoms is not None and self.n_atoms < 1:
            raise ValueError("n_atoms must be positive")


@dataclass
class TrainerState:
    X: np.ndarray
    H: np.ndarray
    L: np.ndarray
    mask: BlockMask
    D: np.ndarray
    S: np.ndarray
    W: np.ndarray
    P: np.ndarray
    J: np.ndarray
    C1: np.ndarray
    C2: np.ndarray

    @property
    def sample_labels(self) -> np.ndarray:
        return self.mask.sample_labels

    @property
    def num_classes(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class TrainedModel:
    D: np.ndarray
    W: np.ndarray
    params: HyperParams = field(default_factory=HyperParams)
    iterations: int = 0
    residual_P: float = float("nan")
    residual_J: float = float("nan")
    converged: bool = False

    def __post_init__(self):
        D = np.asarray(self.D, dtype=float)
        W = np.asarray(self.W, dtype=float)
        if D.ndim != 2 or W.ndim != 2 or D.shape[1] != W.shape[1]:
            raise DataError(
                f"inconsistent model shapes: D {D.shape}, W {W.shape}")
        if not (np.all(np.isfinite(D)) and np.all(np.isfinite(W))):
            raise DataError("model contains non-finite values")
        D.flags.writeable = False
        W.flags.writeable = False
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "W", W)

    @property
    def dims(self) -> tuple[int, int, int]:
        """``(d, K, C)``."""
        return self.D.shape[0], self.D.shape[1], self.W.shape[0]


@dataclass
class ConvergenceTrace:
    objective: list = field(default_factory=list)
    residual_P: list = field(default_factory=list)
    residual_J: list = field(default_factory=list)

    def append(self, obj, res_p, res_j):
        self.objective.append(float(obj))
        self.residual_P.append(float(res_p))
        self.residual_J.append(float(res_j))

    def __len__(self):
        return len(self.objective)

    def records(self):
        """``(iter, objective, residual_P, residual_J)`` tuples, iter from 1."""
        return [(i + 1, o, p, j) for i, (o, p, j) in
                enumerate(zip(self.objective, self.residual_P, self.residual_J))]


# -- linear algebra helpers ------------------------------------------------

def _solve_left(G, B, what):
    """``G^{-1} B`` for symmetric positive definite ``G``."""
    try:
        c = linalg.cho_factor(G, lower=True, check_finite=False)
        out = linalg.cho_solve(c, B, check_finite=False)
    except linalg.LinAlgError:
        raise NumericalError(
            f"{what}: system is singular (condition number "
            f"{np.linalg.cond(G):.3e}); increase jitter") from None
    if not np.all(np.isfinite(out)):
        raise NumericalError(
            f"{what}: non-finite solution (condition number "
            f"{np.linalg.cond(G):.3e})")
    return out


def _solve_right(B, G, what):
    """``B G^{-1}`` for symmetric positive definite ``G``."""
    return _solve_left(G, B.T, what).T


def _class_blocks(labels, num_classes):
    return [np.flatnonzero(labels == c) for c in range(num_classes)]


# -- initialisation --------------------------------------------------------

def init_state(train: Dataset, params: HyperParams) -> TrainerState:
    """Initial iterates.

    The dictionary starts as the unit-normalised training columns (with
    ``n_atoms != N``, columns are drawn per class with replacement), codes
    are clamped ridge codes, ``W`` is the least-squares fit to the labels,
    ``P = J = WS`` and both multipliers are zero.
    """
    counts = train.class_counts()
    if train.num_samples == 0:
        raise DataError("empty training set")
    if np.any(counts == 0):
        raise DataError(
            f"classes {np.flatnonzero(counts == 0).tolist()} have no training samples")

    X = normalize_columns(train.samples)
    N = X.shape[1]
    K = N if params.n_atoms is None else params.n_atoms
    if K > X.shape[0]:
        # D^T D has rank <= d, so the code system leans on W^T W and jitter
        warnings.warn(
            f"{K} atoms exceed the sample dimension {X.shape[0]}; the code "
            "update is poorly conditioned and the residuals may stall above tol",
            RuntimeWarning, stacklevel=3)
    if K == N:
        D = X.copy()
        atom_labels = train.labels.copy()
    else:
        atom_labels = assign_atom_labels(train.labels, K, train.num_classes)
        rng = make_rng(params.init_seed)
        cols = np.empty(K, dtype=np.int64)
        for c in range(train.num_classes):
            slots = np.flatnonzero(atom_labels == c)
            members = np.flatnonzero(train.labels == c)
            cols[slots] = rng.choice(members, size=slots.size, replace=True)
        D = X[:, cols]

    mask = build_block_mask(atom_labels, train.labels)
    L = laplacian(pairwise_similarity(X))
    H = build_label_matrix(train)

    S = _solve_left(D.T @ D + params.jitter * np.eye(K), D.T @ X, "init S")
    S = np.maximum(S, 0.0)
    W = _solve_right(H @ S.T, S @ S.T + params.jitter * np.eye(K), "init W")
    F = W @ S
    Z = np.zeros_like(F)
    return TrainerState(X=X, H=H, L=L, mask=mask, D=D, S=S, W=W,
                        P=F.copy(), J=F.copy(), C1=Z, C2=Z.copy())


# -- block updates ---------------------------------------------------------

def update_S(state: TrainerState, params: HyperParams, clamp: bool = True) -> np.ndarray:
    """Closed-form code update; negative entries are zeroed when ``clamp``.

    The off-block term is linearised around the current codes through
    ``R = D (Q * S)``, which turns it into ``lam * ||D S - R||^2``.
    """
    D, W, mu, lam = state.D, state.W, params.mu, params.lam
    K = D.shape[1]
    R = D @ (state.mask.Q * state.S)
    G = ((1.0 + lam) * (D.T @ D) + (params.alpha + 2.0 * mu) * (W.T @ W)
         + params.jitter * np.eye(K))
    T = params.alpha * state.H + mu * state.P - state.C1 + mu * state.J - state.C2
    B = D.T @ (state.X + lam * R) + W.T @ T
    S = _solve_left(G, B, "update_S")
    return np.maximum(S, 0.0) if clamp else S


def update_W(state: TrainerState, params: HyperParams) -> np.ndarray:
    S, mu = state.S, params.mu
    T = params.alpha * state.H + mu * state.P - state.C1 + mu * state.J - state.C2
    G = (params.alpha + 2.0 * mu) * (S @ S.T) + params.jitter * np.eye(S.shape[0])
    return _solve_right(T @ S.T, G, "update_W")


def update_P(state: TrainerState, params: HyperParams) -> np.ndarray:
    """One Gauss-Seidel sweep over the class blocks of ``P``, lowest class first."""
    mu = params.mu
    coef = 1.0 if params.legacy_p_update else 2.0 * params.beta
    C = state.num_classes
    F = state.W @ state.S
    P = state.P.copy()
    blocks = _class_blocks(state.sample_labels, C)
    grams = [P[:, b] @ P[:, b].T for b in blocks]
    eye = np.eye(C)
    for i, bi in enumerate(blocks):
        cross = sum((grams[j] for j in range(C) if j != i), np.zeros((C, C)))
        rhs = mu * F[:, bi] + state.C1[:, bi]
        P[:, bi] = _solve_left(coef * cross + mu * eye, rhs, "update_P")
        grams[i] = P[:, bi] @ P[:, bi].T
    return P


def update_J(state: TrainerState, params: HyperParams) -> np.ndarray:
    N = state.L.shape[0]
    G = params.gamma * state.L + params.mu * np.eye(N)
    return _solve_right(params.mu * (state.W @ state.S) + state.C2, G, "update_J")


def update_D(state: TrainerState, params: HyperParams) -> np.ndarray:
    S = state.S
    B = state.mask.A * S
    G = S @ S.T + params.lam * (B @ B.T) + params.jitter * np.eye(S.shape[0])
    return _solve_right(state.X @ S.T, G, "update_D")


def update_multipliers(state: TrainerState, params: HyperParams):
    F = state.W @ state.S
    return (state.C1 + params.mu * (F - state.P),
            state.C2 + params.mu * (F - state.J))


def check_convergence(state: TrainerState, params: HyperParams):
    """Max-abs constraint violations of ``WS = P`` and ``WS = J`` against ``tol``."""
    F = state.W @ state.S
    res_p = float(np.max(np.abs(F - state.P)))
    res_j = float(np.max(np.abs(F - state.J)))
    return max(res_p, res_j) <= params.tol, (res_p, res_j)


def incoherence(F: np.ndarray, labels: np.ndarray, num_classes: int) -> float:
    r""":math:`\sum_i \sum_{j \ne i} \|F_i^T F_j\|_F^2` over the class blocks of ``F``.

    Uses :math:`\|F_i^T F_j\|_F^2 = \langle F_i F_i^T, F_j F_j^T \rangle`.
    """
    grams = np.array([F[:, b] @ F[:, b].T for b in _class_blocks(labels, num_classes)])
    total = grams.sum(axis=0)
    return float(np.sum(total * total) - np.sum(grams * grams))


def objective(state: TrainerState, params: HyperParams) -> float:
    """Un-split training objective, evaluated with ``WS`` in place of ``P`` and ``J``."""
    with np.errstate(invalid="ignore", over="ignore"):
        val = _objective_terms(state, params)
    if not np.isfinite(val):
        raise NumericalError("objective is not finite")
    return float(val)


def _objective_terms(state, params):
    F = state.W @ state.S
    return (np.sum((state.X - state.D @ state.S) ** 2)
            + params.lam * np.sum((state.D @ (state.mask.A * state.S)) ** 2)
            + params.alpha * np.sum((state.H - F) ** 2)
            + params.beta * incoherence(F, state.sample_labels, state.num_classes)
            + params.gamma * np.trace(F @ state.L @ F.T))


def train(train: Dataset, params: HyperParams | None = None,
          callback: Callable[[int, TrainerState], None] | None = None):
    """Fit a model.

    Parameters
    ----------
    train : Dataset
        Training samples; columns are unit-normalised internally.
    params : HyperParams, optional
    callback : callable, optional
        Called as ``callback(iteration, state)`` after every completed
        iteration.

    Returns
    -------
    model : TrainedModel
        Final ``D`` and ``W``. ``model.converged`` is False when
        ``max_iter`` ran out first; that is not an error.
    trace : ConvergenceTrace
        One record per completed iteration.
    """
    params = params or HyperParams()
    state = init_state(train, params)
    trace = ConvergenceTrace()
    converged, res = False, (float("nan"), float("nan"))
    it = 0
    for it in range(1, params.max_iter + 1):
        state.S = update_S(state, params)
        state.W = update_W(state, params)
        state.P = update_P(state, params)
        state.J = update_J(state, params)
        state.D = update_D(state, params)
        state.C1, state.C2 = update_multipliers(state, params)
        converged, res = check_convergence(state, params)
        trace.append(objective(state, params), *res)
        log.debug("iter %d objective %.6g residuals %.3e %.3e",
                  it, trace.objective[-1], *res)
        if callback is not None:
            callback(it, state)
        if converged:
            break
    model = TrainedModel(D=state.D, W=state.W, params=params, iterations=it,
                         residual_P=res[0], residual_J=res[1], converged=converged)
    return model, trace
