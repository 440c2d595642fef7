"""Shallow tree selection: buy features by greedily picking cheap, useful
depth-limited trees.

The method builds a depth-stratified pool of candidate trees (depth-1 stumps,
one per feature, plus bagged forests at each depth up to a level chosen from
the budget), then repeatedly adds the candidate with the best benefit-cost
ratio: the change in the ensemble's out-of-bag error divided by the marginal
feature cost raised to the power xi (lower is better, costs are paid once).
After every addition, candidates whose features are all already paid for are
dropped from the pool. The selection's output is the implicit feature set,
which a full-depth forest is refit on afterwards; the tree ensemble itself is
never used as the final predictor.

Ensemble OOB scoring is deliberately harsh: each tree votes only on its own
out-of-bag rows, rows that receive no vote count as errors, and the
denominator is always the full row count. An empty ensemble scores 0.5 by
convention, so the first pick is judged against coin-flipping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from numba import njit

from .costs import Budget, CostVector, FeatureSet, feature_set_cost, marginal_cost
from .data import Dataset
from .errors import InvalidInputError
from .rng import RngStream
from .tree import DecisionTree, bootstrap_sample, default_mtry, fit_tree


def bcr_improvement(new_mmce: float, base_mmce: float, delta_cost: float, xi: float) -> float:
    """Error change per unit of marginal cost; the minimum is best."""
    if delta_cost <= 0:
        raise InvalidInputError("benefit-cost ratio needs positive marginal cost")
    return (new_mmce - base_mmce) / delta_cost**xi


@dataclass
class CandidateTree:
    """One pool entry: a fitted depth-limited tree plus cached OOB predictions."""

    tree_id: int
    tree: DecisionTree
    level: int
    features: frozenset
    oob_pred: np.ndarray = None

    def predictions(self, data: Dataset) -> np.ndarray:
        if self.oob_pred is None:
            self.oob_pred = self.tree.predict(data.features, rows=self.tree.oob)
        return self.oob_pred

    def cost_of(self, costs: CostVector) -> float:
        return feature_set_cost(self.features, costs)


@dataclass
class BaseEnsemble:
    """The candidate pool, stratified by depth level."""

    candidates: list
    depth_levels: set
    n_obs: int
    n_features: int

    def __len__(self) -> int:
        return len(self.candidates)


@dataclass
class ResultEnsemble:
    """Trees selected so far, their union of features, and OOB vote tallies."""

    trees: list
    implicit_features: FeatureSet
    votes1: np.ndarray
    nvotes: np.ndarray

    @staticmethod
    def empty(n_obs: int) -> "ResultEnsemble":
        return ResultEnsemble(
            [], FeatureSet.empty(), np.zeros(n_obs, np.int64), np.zeros(n_obs, np.int64)
        )

    def with_tree(self, cand: CandidateTree, data: Dataset, costs: CostVector) -> "ResultEnsemble":
        votes1 = self.votes1.copy()
        nvotes = self.nvotes.copy()
        rows = cand.tree.oob
        votes1[rows] += cand.predictions(data)
        nvotes[rows] += 1
        return ResultEnsemble(
            self.trees + [cand],
            self.implicit_features.union(cand.features, costs),
            votes1,
            nvotes,
        )


def ensemble_oob_mmce(ensemble: ResultEnsemble, data: Dataset) -> float:
    """OOB error of the result ensemble under the no-vote-is-error rule.

    Majority vote per row over the trees for which the row is out-of-bag
    (exact ties to class 0); rows nobody voted on are errors; denominator is
    the full n_obs. The empty ensemble is defined as 0.5.
    """
    if not ensemble.trees:
        return 0.5
    n = data.n_obs
    voted = ensemble.nvotes > 0
    maj = (2 * ensemble.votes1[voted] > ensemble.nvotes[voted]).astype(np.int64)
    errors = int(np.sum(maj != data.labels[voted])) + int(n - voted.sum())
    return errors / n


def bcr_sts(
    cand, ensemble: ResultEnsemble, xi: float, data: Dataset, costs: CostVector
) -> float:
    """Benefit-cost ratio of adding one candidate tree to the result ensemble."""
    if isinstance(cand, DecisionTree):
        cand = CandidateTree(-1, cand, cand.max_depth or 0, frozenset(cand.used_features))
    marg = marginal_cost(cand.features, ensemble.implicit_features, costs)
    if marg <= 0:
        raise InvalidInputError("cost-free candidate: removal, not scoring, handles it")
    base = ensemble_oob_mmce(ensemble, data)
    new = ensemble_oob_mmce(ensemble.with_tree(cand, data, costs), data)
    return bcr_improvement(new, base, marg, xi)


@dataclass
class StsStep:
    iteration: int
    tree_id: int
    bcr: float
    oob_mmce: float
    cum_cost: float
    removed_ids: tuple


@dataclass
class StsTrajectory:
    steps: list = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "iteration": s.iteration,
                    "tree_id": s.tree_id,
                    "bcr": s.bcr,
                    "oob_mmce": s.oob_mmce,
                    "cum_cost": s.cum_cost,
                    "removed_ids": ";".join(str(i) for i in s.removed_ids),
                }
                for s in self.steps
            ],
            columns=["iteration", "tree_id", "bcr", "oob_mmce", "cum_cost", "removed_ids"],
        )

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)


@dataclass
class StsConfig:
    trees_per_level: int = 500
    max_level: int = None  # None: deepest level whose cheapest possible tree fits
    max_level_cap: int = 5
    mtry: int = None


def default_max_level(costs: CostVector, budget: Budget, cap: int = 5) -> int:
    """Largest depth d whose cheapest conceivable tree (the 2^d - 1 lowest
    feature costs) still fits the budget; at least 1, at most `cap`."""
    cum = np.cumsum(np.sort(costs.values))
    best = 1
    for d in range(1, cap + 1):
        k = min(2**d - 1, len(cum))
        if cum[k - 1] <= budget.c_max:
            best = d
        else:
            break
    return best


def build_base_ensemble(
    data: Dataset,
    max_level: int,
    trees_per_level: int,
    mtry: int = None,
    rng: RngStream = None,
) -> BaseEnsemble:
    """Fit the candidate pool: one bagged stump per feature at depth 1, then
    `trees_per_level` bagged random trees at each depth 2..max_level."""
    if max_level < 1:
        raise InvalidInputError("max_level must be at least 1")
    if trees_per_level < 1:
        raise InvalidInputError("trees_per_level must be at least 1")
    if rng is None:
        rng = RngStream(0)
    if mtry is None:
        mtry = default_mtry(data.n_features)
    cands = []
    for j in range(data.n_features):
        bag, _ = bootstrap_sample(data.n_obs, rng.child("stump", j, "bag"))
        tree = fit_tree(
            data, bag, mtry=1, max_depth=1, rng=rng.child("stump", j, "grow"),
            feature_pool=[j],
        )
        cands.append(_make_candidate(len(cands), tree, 1, data))
    for d in range(2, max_level + 1):
        for i in range(trees_per_level):
            bag, _ = bootstrap_sample(data.n_obs, rng.child("level", d, i, "bag"))
            tree = fit_tree(data, bag, mtry=mtry, max_depth=d, rng=rng.child("level", d, i, "grow"))
            cands.append(_make_candidate(len(cands), tree, d, data))
    return BaseEnsemble(cands, set(range(1, max_level + 1)), data.n_obs, data.n_features)


def _make_candidate(tree_id, tree, level, data):
    cand = CandidateTree(tree_id, tree, level, frozenset(tree.used_features))
    cand.predictions(data)
    return cand


@njit(cache=True)
def _vote_deltas(offsets, rows_flat, preds_flat, active, votes1, nvotes, labels):  # pragma: no cover
    """Per-candidate change in the ensemble error count if that candidate's
    OOB votes were added to the current tallies."""
    m = offsets.shape[0] - 1
    out = np.zeros(m, dtype=np.int64)
    for c in range(m):
        if not active[c]:
            continue
        d = 0
        for k in range(offsets[c], offsets[c + 1]):
            r = rows_flat[k]
            v1 = votes1[r]
            nv = nvotes[r]
            if nv == 0:
                old = 1
            else:
                maj = 1 if 2 * v1 > nv else 0
                old = 1 if maj != labels[r] else 0
            v1n = v1 + preds_flat[k]
            majn = 1 if 2 * v1n > nv + 1 else 0
            new = 1 if majn != labels[r] else 0
            d += new - old
        out[c] = d
    return out


def _flat_votes(cands, data):
    offsets = np.zeros(len(cands) + 1, dtype=np.int64)
    for i, c in enumerate(cands):
        offsets[i + 1] = offsets[i] + c.tree.oob.size
    rows_flat = np.empty(offsets[-1], dtype=np.int64)
    preds_flat = np.empty(offsets[-1], dtype=np.int64)
    for i, c in enumerate(cands):
        rows_flat[offsets[i] : offsets[i + 1]] = c.tree.oob
        preds_flat[offsets[i] : offsets[i + 1]] = c.predictions(data)
    return offsets, rows_flat, preds_flat


def sts_select(
    data: Dataset,
    costs: CostVector,
    budget: Budget,
    xi: float,
    config: StsConfig = None,
    rng: RngStream = None,
    base: BaseEnsemble = None,
):
    """Run the full greedy selection; returns (SelectionResult, StsTrajectory).

    A prebuilt `base` pool may be passed in (tuning reuses one pool across
    xi values); otherwise the pool is built from `config` and `rng`.
    """
    from .results import SelectionResult

    config = config or StsConfig()
    if rng is None:
        rng = RngStream(0)
    if base is None:
        level = config.max_level or default_max_level(costs, budget, config.max_level_cap)
        base = build_base_ensemble(
            data, level, config.trees_per_level, config.mtry, rng.child("base")
        )

    n = data.n_obs
    labels = data.labels
    cands = base.candidates
    m = len(cands)
    offsets, rows_flat, preds_flat = _flat_votes(cands, data)
    active = np.ones(m, dtype=np.bool_)
    votes1 = np.zeros(n, dtype=np.int64)
    nvotes = np.zeros(n, dtype=np.int64)
    tally_err = n  # with no votes anywhere, every row counts as an error
    implicit = FeatureSet.empty()
    selected = []
    traj = StsTrajectory()

    iteration = 0
    while active.any():
        iteration += 1
        base_mmce = 0.5 if not selected else tally_err / n
        margs = {}
        feasible = []
        for c in np.flatnonzero(active):
            marg = marginal_cost(cands[c].features, implicit, costs)
            margs[c] = marg
            if marg > 0.0 and implicit.total_cost + marg <= budget.c_max:
                feasible.append(c)
        if not feasible:
            break
        deltas = _vote_deltas(offsets, rows_flat, preds_flat, active, votes1, nvotes, labels)
        best_key = None
        best_c = -1
        for c in feasible:
            bcr = bcr_improvement((tally_err + deltas[c]) / n, base_mmce, margs[c], xi)
            key = (bcr, margs[c], cands[c].tree_id)
            if best_key is None or key < best_key:
                best_key = key
                best_c = c
        chosen = cands[best_c]
        s, e = offsets[best_c], offsets[best_c + 1]
        votes1[rows_flat[s:e]] += preds_flat[s:e]
        nvotes[rows_flat[s:e]] += 1
        tally_err += int(deltas[best_c])
        implicit = implicit.union(chosen.features, costs)
        selected.append(chosen)
        active[best_c] = False
        removed = []
        for c in np.flatnonzero(active):
            if marginal_cost(cands[c].features, implicit, costs) == 0.0:
                active[c] = False
                removed.append(cands[c].tree_id)
        traj.steps.append(
            StsStep(iteration, chosen.tree_id, best_key[0], tally_err / n,
                    implicit.total_cost, tuple(removed))
        )

    ensemble = ResultEnsemble(selected, implicit, votes1, nvotes)
    result = SelectionResult(
        "sts", xi, implicit, trajectory=traj, ensemble=ensemble,
        fit_counts={"base_trees": m},
    )
    return result, traj
