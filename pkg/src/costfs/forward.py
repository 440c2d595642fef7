"""Greedy forward selection with forest refits at every candidate step.

At each iteration the method tries every not-yet-selected feature that still
fits the budget, fits a forest on the current set plus that feature, and
scores the candidate by the change in OOB error divided by its marginal
cost^xi (minimum best, baseline for the empty set is 0.5). The winner's OOB
error becomes the next iteration's baseline, so each candidate costs exactly
one forest fit and an iteration over p features costs p fits. There is no
early stopping: selection continues while any feature fits the budget, even
when no candidate improves the error.

This is by far the most expensive method here; xi is fixed to 0 or 1 and
never grid-tuned, since tuning would multiply an already heavy schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .costs import Budget, CostVector, FeatureSet, marginal_cost
from .data import Dataset
from .errors import InvalidInputError
from .forest import fit_forest, forest_oob_error
from .rng import RngStream
from .sts import bcr_improvement


@dataclass
class FsState:
    """Where the forward search currently stands."""

    current_set: FeatureSet
    current_oob_mmce: float
    iteration: int


@dataclass
class FsStep:
    iteration: int
    feature: int
    bcr: float
    oob_mmce: float
    cum_cost: float


@dataclass
class FsTrajectory:
    steps: list = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "iteration": s.iteration,
                    "feature": s.feature,
                    "bcr": s.bcr,
                    "oob_mmce": s.oob_mmce,
                    "cum_cost": s.cum_cost,
                }
                for s in self.steps
            ],
            columns=["iteration", "feature", "bcr", "oob_mmce", "cum_cost"],
        )

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)


@dataclass
class FsConfig:
    n_trees: int = 500  # per-candidate forest size
    mtry: int = None  # default: sqrt of the candidate subset width


def _candidate_fit(data, subset, config, rng):
    sub = data.subset_columns(subset)
    forest = fit_forest(sub, config.n_trees, mtry=config.mtry, rng=rng)
    return forest_oob_error(forest, sub)


def bcr_fs(
    candidate: int,
    state: FsState,
    xi: float,
    data: Dataset,
    costs: CostVector,
    rng: RngStream = None,
    config: FsConfig = None,
) -> float:
    """Score one candidate feature by refitting a forest on set + candidate."""
    if candidate in state.current_set.indices:
        raise InvalidInputError(f"feature {candidate} is already selected")
    config = config or FsConfig()
    if rng is None:
        rng = RngStream(0)
    dc = marginal_cost([candidate], state.current_set, costs)
    new_err = _candidate_fit(
        data, state.current_set.indices | {candidate}, config, rng
    )
    return bcr_improvement(new_err, state.current_oob_mmce, dc, xi)


def fs_select(
    data: Dataset,
    costs: CostVector,
    budget: Budget,
    xi: float,
    rng: RngStream = None,
    config: FsConfig = None,
):
    """Run the forward search to budget exhaustion; returns a SelectionResult."""
    from .results import SelectionResult

    if xi not in (0, 1):
        raise InvalidInputError("forward selection supports only xi = 0 or 1")
    config = config or FsConfig()
    if rng is None:
        rng = RngStream(0)

    current = FeatureSet.empty()
    base_mmce = 0.5
    traj = FsTrajectory()
    candidate_fits = 0
    iteration = 0
    while True:
        iteration += 1
        best_key = None
        best = None  # (feature, oob error of its forest)
        for j in range(data.n_features):
            if j in current.indices:
                continue
            dc = marginal_cost([j], current, costs)
            if current.total_cost + dc > budget.c_max:
                continue
            err = _candidate_fit(
                data, current.indices | {j}, config, rng.child("iter", iteration, "cand", j)
            )
            candidate_fits += 1
            bcr = bcr_improvement(err, base_mmce, dc, xi)
            key = (bcr, dc, j)
            if best_key is None or key < best_key:
                best_key = key
                best = (j, err)
        if best is None:
            break
        j, err = best
        current = current.union([j], costs)
        base_mmce = err  # winner's fit doubles as the next baseline
        traj.steps.append(FsStep(iteration, j, best_key[0], err, current.total_cost))

    return SelectionResult(
        "fs", float(xi), current, trajectory=traj,
        fit_counts={"candidate": candidate_fits, "baseline": 0},
    )
