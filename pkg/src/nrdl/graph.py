"""Dense similarity graph over training samples and its Laplacian."""

import numpy as np

from nrdl.exceptions import DataError

__all__ = ["laplacian", "pairwise_similarity", "squared_distances"]


def squared_distances(X: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between all column pairs of ``X``."""
    X = np.asarray(X, dtype=float)
    sq = np.einsum("ij,ij->j", X, X)
    D2 = sq[:, None] + sq[None, :] - 2.0 * (X.T @ X)
    np.maximum(D2, 0.0, out=D2)
    np.fill_diagonal(D2, 0.0)
    # exact symmetry regardless of BLAS rounding
    return 0.5 * (D2 + D2.T)


def pairwise_similarity(X: np.ndarray) -> np.ndarray:
    r"""Similarity weights :math:`M_{uv} = 1 / (1 + \|x_u - x_v\|_2^2)`.

    Every pair of columns is connected; no neighbourhood truncation.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 1:
        raise DataError("need a 2-D matrix with at least one column")
    return 1.0 / (1.0 + squared_distances(X))


def laplacian(M: np.ndarray) -> np.ndarray:
    """Graph Laplacian ``L = Z - M`` where ``Z`` is the diagonal degree matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DataError(f"weight matrix must be square, got {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12):
        raise DataError("weight matrix is not symmetric")
    return np.diag(M.sum(axis=1)) - M
