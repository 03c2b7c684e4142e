"""Block indicator ``Q`` of same-class (atom, sample) pairs and its complement ``A``."""

from dataclasses import dataclass

import numpy as np

from nrdl.exceptions import DataError

__all__ = ["BlockMask", "assign_atom_labels", "build_block_mask", "off_block"]


@dataclass(frozen=True)
class BlockMask:
    """``Q[k, i] = 1`` iff atom ``k`` and sample ``i`` share a class; ``A = 1 - Q``."""

    Q: np.ndarray
    A: np.ndarray
    atom_labels: np.ndarray
    sample_labels: np.ndarray

    @property
    def shape(self):
        return self.Q.shape


def build_block_mask(atom_labels, sample_labels) -> BlockMask:
    atom_labels = np.asarray(atom_labels, dtype=np.int64)
    sample_labels = np.asarray(sample_labels, dtype=np.int64)
    if atom_labels.size == 0 or sample_labels.size == 0:
        raise DataError("atom and sample label sequences must be non-empty")
    if atom_labels.min() < 0 or sample_labels.min() < 0:
        raise DataError("class labels must be non-negative")
    Q = (atom_labels[:, None] == sample_labels[None, :]).astype(float)
    A = 1.0 - Q
    for a in (Q, A, atom_labels, sample_labels):
        a.flags.writeable = False
    return BlockMask(Q, A, atom_labels, sample_labels)


def off_block(S: np.ndarray, mask: BlockMask) -> np.ndarray:
    """Hadamard product ``A * S``: the codes of atoms outside the sample's class."""
    S = np.asarray(S, dtype=float)
    if S.shape != mask.A.shape:
        raise DataError(
            f"dimension mismatch: codes {S.shape} vs mask {mask.A.shape}")
    return mask.A * S


def assign_atom_labels(sample_labels, n_atoms: int, num_classes: int) -> np.ndarray:
    """Split ``n_atoms`` across classes in proportion to the class sample counts.

    Each class gets ``floor(n_atoms * n_c / N)`` atoms; leftover atoms go one
    each to the lowest-numbered classes. Returns the atom labels sorted by
    class. When ``n_atoms == N`` this reproduces the class counts exactly.
    """
    sample_labels = np.asarray(sample_labels, dtype=np.int64)
    counts = np.bincount(sample_labels, minlength=num_classes)
    N = counts.sum()
    if n_atoms < 1 or N == 0:
        raise DataError("need at least one atom and one sample")
    per_class = (n_atoms * counts) // N
    remainder = n_atoms - per_class.sum()
    per_class[:remainder] += 1
    if np.any(per_class[counts > 0] == 0):
        raise DataError(
            f"{n_atoms} atoms is too few to give every class an atom")
    return np.repeat(np.arange(num_classes), per_class)
