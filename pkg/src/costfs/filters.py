"""Filter-style selection: score features one at a time, weight by cost,
fill the budget top-down.

Two scores are offered. The AUC score is a univariate separation measure,
J = 2*|AUC - 0.5|, so both perfectly positive and perfectly negative
discrimination map to 1 and a useless column maps to 0. The permutation
importance score asks a fitted forest how much its out-of-bag error grows
when one feature's column is shuffled. Either way each feature ends up with
a score, the benefit-cost ratio score/cost^xi ranks them (higher is better),
and the ranking is walked top-down, adding every feature that still fits the
budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from .costs import Budget, CostVector, FeatureSet, fits_budget
from .data import Dataset
from .errors import InvalidInputError
from .forest import Forest, fit_forest, forest_oob_error
from .rng import RngStream
from .tree import default_mtry


def auc_score(column, labels) -> float:
    """Separation score J = 2*|AUC - 0.5| of one feature column.

    AUC is the Mann-Whitney concordance probability that a random class-1
    value ranks above a random class-0 value, with tied pairs credited 0.5.
    """
    column = np.asarray(column, dtype=np.float64)
    labels = np.asarray(labels)
    n1 = int(np.sum(labels == 1))
    n0 = int(np.sum(labels == 0))
    if n1 == 0 or n0 == 0:
        raise InvalidInputError("AUC needs both classes present")
    ranks = rankdata(column)
    rank_sum_1 = float(np.sum(ranks[labels == 1]))
    auc = (rank_sum_1 - n1 * (n1 + 1) / 2) / (n1 * n0)
    return 2.0 * abs(auc - 0.5)


def permutation_importance(
    forest: Forest, data: Dataset, repeats: int = 5, rng: RngStream = None
) -> np.ndarray:
    """Mean OOB-error increase per feature when its column is permuted.

    For each feature and repeat, the whole column is shuffled and the forest's
    OOB error recomputed; the importance is the mean increase over repeats,
    clamped at 0. Only trees that actually split on the feature are
    re-predicted; a feature used by no tree scores exactly 0.
    """
    if rng is None:
        rng = RngStream(0)
    n = data.n_obs
    base_votes1 = np.zeros(n, dtype=np.int64)
    nvotes = np.zeros(n, dtype=np.int64)
    cached = []
    for tree in forest.trees:
        pred = tree.predict(data.features, rows=tree.oob)
        cached.append(pred)
        base_votes1[tree.oob] += pred
        nvotes[tree.oob] += 1
    voted = nvotes > 0
    if not voted.any():
        raise InvalidInputError("no out-of-bag votes; cannot score importances")
    y_voted = data.labels[voted]
    nv_voted = nvotes[voted]

    def error_from(votes1):
        maj = (2 * votes1[voted] > nv_voted).astype(np.int64)
        return float(np.mean(maj != y_voted))

    base_error = error_from(base_votes1)
    users = [
        [t for t, tree in enumerate(forest.trees) if j in tree.used_features]
        for j in range(data.n_features)
    ]
    out = np.zeros(data.n_features)
    for j in range(data.n_features):
        if not users[j]:
            continue  # permutation cannot move any prediction
        diffs = np.empty(repeats)
        for k in range(repeats):
            perm = rng.child("perm", j, k).generator().permutation(data.features[:, j])
            votes1 = base_votes1.copy()
            for t in users[j]:
                tree = forest.trees[t]
                votes1[tree.oob] -= cached[t]
                votes1[tree.oob] += tree.predict(
                    data.features, rows=tree.oob, swap_col=j, swap_vals=perm
                )
            diffs[k] = error_from(votes1) - base_error
        out[j] = max(0.0, float(np.mean(diffs)))
    return out


def bcr_filter(raw_score: float, cost: float, xi: float) -> float:
    """Score per unit cost, score/cost^xi; the maximum is best."""
    if cost <= 0:
        raise InvalidInputError("feature cost must be positive")
    return raw_score / cost**xi


@dataclass
class FeatureScoreTable:
    """Per-feature raw scores, costs, BCR values, and the selection flags."""

    raw_score: np.ndarray
    cost: np.ndarray
    bcr: np.ndarray
    xi: float
    selected: np.ndarray = None

    def to_frame(self) -> pd.DataFrame:
        sel = self.selected if self.selected is not None else np.zeros(len(self.raw_score), bool)
        return pd.DataFrame(
            {
                "feature": np.arange(len(self.raw_score)),
                "raw_score": self.raw_score,
                "cost": self.cost,
                "bcr": self.bcr,
                "selected": sel.astype(int),
            }
        )

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)


def score_features(
    data: Dataset,
    kind: str,
    rng: RngStream = None,
    pfi_trees: int = 1000,
    pfi_repeats: int = 5,
    pfi_mtry: int = None,
) -> np.ndarray:
    """Raw per-feature scores for one filter kind ('auc' or 'pfi')."""
    if kind == "auc":
        return np.array(
            [auc_score(data.features[:, j], data.labels) for j in range(data.n_features)]
        )
    if kind == "pfi":
        if rng is None:
            rng = RngStream(0)
        mtry = pfi_mtry or default_mtry(data.n_features)
        forest = fit_forest(data, pfi_trees, mtry=mtry, rng=rng.child("forest"))
        return permutation_importance(forest, data, pfi_repeats, rng.child("perm"))
    raise InvalidInputError(f"unknown filter kind {kind!r}")


def topdown_fill(
    scores: FeatureScoreTable,
    costs: CostVector,
    budget: Budget,
    stop_at_first_misfit: bool = False,
) -> FeatureSet:
    """Walk the BCR ranking from the top, buying every feature that fits.

    Features too expensive for the remaining budget are skipped and the walk
    continues (`stop_at_first_misfit=True` switches to halting instead).
    Ranking ties are broken by lower cost, then lower feature index.
    """
    p = len(scores.bcr)
    order = np.lexsort((np.arange(p), scores.cost, -np.asarray(scores.bcr)))
    current = FeatureSet.empty()
    chosen = np.zeros(p, dtype=bool)
    for j in order:
        if fits_budget([j], current, costs, budget):
            current = current.union([j], costs)
            chosen[j] = True
        elif stop_at_first_misfit:
            break
    scores.selected = chosen
    return current


@dataclass
class FilterConfig:
    pfi_trees: int = 1000
    pfi_repeats: int = 5
    pfi_mtry: int = None
    stop_at_first_misfit: bool = False


def filter_select(
    data: Dataset,
    costs: CostVector,
    budget: Budget,
    xi: float,
    kind: str,
    rng: RngStream = None,
    config: FilterConfig = None,
    raw_scores: np.ndarray = None,
):
    """Score, weight by cost, fill the budget; returns a SelectionResult.

    `raw_scores` may be supplied to reuse scores across xi values (they do
    not depend on xi).
    """
    from .results import SelectionResult

    config = config or FilterConfig()
    if raw_scores is None:
        raw_scores = score_features(
            data, kind, rng, config.pfi_trees, config.pfi_repeats, config.pfi_mtry
        )
    raw_scores = np.asarray(raw_scores, dtype=np.float64)
    bcr = np.array([bcr_filter(raw_scores[j], costs[j], xi) for j in range(len(costs))])
    table = FeatureScoreTable(raw_scores, costs.values.copy(), bcr, xi)
    selected = topdown_fill(table, costs, budget, config.stop_at_first_misfit)
    return SelectionResult(kind, xi, selected, score_table=table)
