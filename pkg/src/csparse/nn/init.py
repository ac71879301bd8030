"""Weight initializers."""

from __future__ import annotations

import numpy as np


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def orthonormal_init(rows: int, cols: int, seed) -> np.ndarray:
    """Random (semi-)orthonormal matrix, deterministic per seed.

    For rows >= cols the columns are orthonormal (M.T @ M = I), otherwise
    the rows are.  A square output is fully orthonormal.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"orthonormal_init needs positive dims, got {rows}x{cols}")
    rng = as_rng(seed)
    a = rng.standard_normal((rows, cols))
    u, _, vt = np.linalg.svd(a, full_matrices=False)
    return u @ vt


def uniform_init(shape, rng: np.random.Generator, bound: float = 0.1) -> np.ndarray:
    """Uniform initialization in [-bound, +bound]; the non-lexical default."""
    return rng.uniform(-bound, bound, size=shape)


def xavier_init(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    bound = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols))
