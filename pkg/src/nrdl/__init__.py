"""Non-negative representation based discriminative dictionary learning.

Joint training of a dictionary and a linear classifier by ADMM with
non-negative codes, plus non-negative coding based classification.
"""

from nrdl.exceptions import DataError, NRDLError, NumericalError
from nrdl.data import (
    Dataset,
    add_salt_pepper,
    build_label_matrix,
    load_dataset,
    make_rng,
    normalize_columns,
    split_per_class,
)
from nrdl.graph import laplacian, pairwise_similarity
from nrdl.masks import BlockMask, assign_atom_labels, build_block_mask, off_block
from nrdl.coders import NnlsParams, NnlsSolver, RidgeSolver, solve_nnls, solve_ridge
from nrdl.trainer import (
    ConvergenceTrace,
    HyperParams,
    TrainedModel,
    TrainerState,
    init_state,
    train,
)
from nrdl.classifier import Prediction, classify, evaluate

__version__ = "0.1.0"

__all__ = [
    "BlockMask",
    "ConvergenceTrace",
    "DataError",
    "Dataset",
    "HyperParams",
    "NRDLError",
    "NnlsParams",
    "NnlsSolver",
    "NumericalError",
    "Prediction",
    "RidgeSolver",
    "TrainedModel",
    "TrainerState",
    "add_salt_pepper",
    "assign_atom_labels",
    "build_block_mask",
    "build_label_matrix",
    "classify",
    "evaluate",
    "init_state",
    "laplacian",
    "load_dataset",
    "make_rng",
    "normalize_columns",
    "off_block",
    "pairwise_similarity",
    "solve_nnls",
    "solve_ridge",
    "split_per_class",
    "train",
]
