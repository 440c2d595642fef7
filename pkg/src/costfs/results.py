"""Selection results and the final refit model shared by every method.

A selection method returns which features to buy; the predictive model is
always a forest refit from scratch on exactly those columns. An empty
selection falls back to a majority-class constant so downstream evaluation
always has a model to score.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .costs import FeatureSet
from .data import Dataset
from .forest import Forest, fit_forest, forest_oob_error, predict_forest
from .rng import RngStream
from .tree import default_mtry


@dataclass
class SelectionResult:
    """Outcome of one feature-selection run: the purchased feature set."""

    method: str
    xi: float
    features: FeatureSet
    score_table: object = None  # filter methods attach their FeatureScoreTable
    trajectory: object = None  # greedy methods attach their step records
    ensemble: object = None  # sts attaches the selected-tree ensemble
    fit_counts: dict = field(default_factory=dict)

    @property
    def n_selected(self) -> int:
        return len(self.features)


@dataclass
class RefitModel:
    """Final predictor: a forest on the selected columns, or a constant.

    `predict` accepts full-width matrices and slices out the selected
    columns itself, so callers never re-index.
    """

    features: tuple
    n_features_full: int
    forest: Forest = None
    constant_class: int = None
    oob_error: float = None

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.forest is None:
            return np.full(X.shape[0], self.constant_class, dtype=np.int64)
        cols = np.ascontiguousarray(X[:, list(self.features)])
        return predict_forest(self.forest, cols)


def refit_final(
    data: Dataset,
    selected: FeatureSet,
    num_trees: int = 1000,
    mtry: int = None,
    rng: RngStream = None,
) -> RefitModel:
    """Fit the full-strength forest on the selected columns.

    Defaults follow the study protocol: unlimited depth, mtry = floor(sqrt
    of the number of selected features). With nothing selected, the model
    predicts the training majority class and its OOB error is the minority
    class frequency.
    """
    if rng is None:
        rng = RngStream(0)
    idx = selected.sorted_indices
    if not idx:
        ones = int(data.labels.sum())
        majority = 1 if 2 * ones > data.n_obs else 0
        err = float(np.mean(data.labels != majority))
        return RefitModel((), data.n_features, constant_class=majority, oob_error=err)
    sub = data.subset_columns(idx)
    if mtry is None:
        mtry = default_mtry(len(idx))
    forest = fit_forest(sub, num_trees, mtry=mtry, rng=rng)
    return RefitModel(
        idx, data.n_features, forest=forest, oob_error=forest_oob_error(forest, sub)
    )
