"""Shared estimator plumbing and input validation helpers.

All trainable models in this package follow the scikit-learn estimator
contract: hyperparameters are plain ``__init__`` attributes (so
``get_params``/``set_params``/``clone`` work), ``fit`` returns ``self``,
and learned state lives in trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .conllu import Sentence
from .errors import DataError

__all__ = ["BaseEstimator", "NotFittedError", "check_fitted", "check_sentences", "new_rng"]


def check_fitted(estimator, attribute: str) -> None:
    if getattr(estimator, attribute, None) is None:
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted; call fit() or load()"
        )


def check_sentences(X, require_nonempty: bool = True) -> list[Sentence]:
    """Validate that X is a list of Sentence objects with sane indices."""
    if isinstance(X, Sentence):
        X = [X]
    sentences = list(X)
    for sent in sentences:
        if not isinstance(sent, Sentence):
            raise DataError(f"expected Sentence, got {type(sent).__name__}")
        sent.check_indices()
        if require_nonempty and len(sent) == 0:
            raise DataError("empty sentence")
    return sentences


def new_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
