"""Input checks shared by the estimator wrappers."""
from __future__ import annotations

import numpy as np

from .errors import InvalidRankError, MalformedInputError
from .nielsen import enumerate_S


def check_rank(rank) -> int:
    if not isinstance(rank, (int, np.integer)) or isinstance(rank, bool):
        raise InvalidRankError(f"rank must be an integer, got {rank!r}")
    if rank < 3:
        raise InvalidRankError("the walk needs rank at least 3")
    return int(rank)


def check_positive(name: str, value) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise MalformedInputError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_index_matrix(X, rank: int, admissible: bool = True) -> np.ndarray:
    """A 2D integer array of state indices, one trajectory per row."""
    from .walk import chain_tables

    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise MalformedInputError(f"expected a nonempty 2D array of state indices, got shape {X.shape}")
    if not np.issubdtype(X.dtype, np.integer):
        raise MalformedInputError("state indices must be integers")
    size = len(enumerate_S(rank))
    if X.min() < 0 or X.max() >= size:
        raise MalformedInputError(f"state indices must lie in [0, {size})")
    if admissible and X.shape[1] > 1:
        _, adm = chain_tables(rank)
        if not adm[X[:, :-1], X[:, 1:]].all():
            raise MalformedInputError("some row is not an admissible sequence")
    return X.astype(np.int64, copy=False)
