"""Bagged forests of CART trees, majority-vote prediction, and OOB error.

Each tree gets its own bootstrap bag and its own child random stream, so a
forest is reproducible from (data, config, stream) alone and any single tree
can be re-derived in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DegenerateEstimateError, InvalidInputError
from .rng import RngStream
from .tree import DecisionTree, bootstrap_sample, default_mtry, fit_tree


@dataclass
class Forest:
    trees: list
    n_features: int
    mtry: int
    max_depth: int = None

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def fit_forest(
    data: Dataset,
    n_trees: int,
    mtry: int = None,
    max_depth: int = None,
    rng: RngStream = None,
) -> Forest:
    """Fit `n_trees` bagged trees; stream children ("bag", i) and ("tree", i)."""
    if n_trees < 1:
        raise InvalidInputError("a forest needs at least one tree")
    if rng is None:
        rng = RngStream(0)
    if mtry is None:
        mtry = default_mtry(data.n_features)
    trees = []
    for i in range(n_trees):
        bag, _ = bootstrap_sample(data.n_obs, rng.child("bag", i))
        trees.append(fit_tree(data, bag, mtry, max_depth, rng.child("tree", i)))
    return Forest(trees, data.n_features, mtry, max_depth)


def predict_forest(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Majority vote over trees; exact ties go to class 0."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise InvalidInputError(
            f"expected {forest.n_features} feature columns, got shape {X.shape}"
        )
    votes1 = np.zeros(X.shape[0], dtype=np.int64)
    for tree in forest.trees:
        votes1 += tree.predict(X)
    return (2 * votes1 > forest.n_trees).astype(np.int64)


def mmce(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Mean misclassification error."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise InvalidInputError("labels and predictions must be equal-length and non-empty")
    return float(np.mean(y_true != y_pred))


def forest_oob_error(forest: Forest, data: Dataset) -> float:
    """OOB misclassification rate of the forest on its training data.

    Each row is judged by the majority vote of trees that did not bag it;
    rows receiving no OOB vote are excluded from the rate.
    """
    n = data.n_obs
    votes1 = np.zeros(n, dtype=np.int64)
    nvotes = np.zeros(n, dtype=np.int64)
    for tree in forest.trees:
        if tree.oob.size == 0:
            continue
        pred = tree.predict(data.features, rows=tree.oob)
        votes1[tree.oob] += pred
        nvotes[tree.oob] += 1
    voted = nvotes > 0
    if not voted.any():
        raise DegenerateEstimateError("no observation received an out-of-bag vote")
    pred = (2 * votes1[voted] > nvotes[voted]).astype(np.int64)
    return float(np.mean(pred != data.labels[voted]))
