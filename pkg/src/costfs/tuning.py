"""Choosing the cost exponent xi: fixed strategies and grid tuning.

Three strategies are compared throughout: cost-agnostic (xi = 0, ignore
costs), the simple benefit-cost ratio (xi = 1), and grid tuning, which runs
the selection method at every grid value, refits the final forest for each
resulting feature set, and keeps the xi whose refit forest has the lowest
OOB error (ties go to the smallest xi).

All grid points are evaluated against the same random stream. That makes the
xi = 0 grid entry bit-identical to a standalone cost-agnostic run, lets
identical feature sets share one refit, and guarantees the tuned choice's
OOB error is never above the fixed strategies' (when 0 and 1 are in the
grid).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .costs import Budget, CostVector
from .data import Dataset
from .errors import InvalidInputError
from .filters import FilterConfig, filter_select, score_features
from .forward import FsConfig, fs_select
from .results import RefitModel, SelectionResult, refit_final
from .rng import RngStream
from .sts import StsConfig, build_base_ensemble, default_max_level, sts_select

DEFAULT_GRID = np.arange(0.0, 2.01, 0.25)

FILTER_METHODS = ("auc", "pfi")
TUNABLE_METHODS = ("auc", "pfi", "sts")
ALL_METHODS = ("auc", "pfi", "sts", "fs")


@dataclass
class XiStrategy:
    """How xi is chosen: a fixed value or a tuning grid."""

    kind: str  # cost_agnostic | simple_bcr | grid_tuned
    grid: np.ndarray = None

    def __post_init__(self):
        if self.kind not in ("cost_agnostic", "simple_bcr", "grid_tuned"):
            raise InvalidInputError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "grid_tuned":
            self.grid = DEFAULT_GRID.copy() if self.grid is None else np.asarray(
                self.grid, dtype=np.float64
            )
            if self.grid.size == 0 or (self.grid < 0).any():
                raise InvalidInputError("tuning grid must be non-empty and non-negative")
            if 0.0 not in self.grid or 1.0 not in self.grid:
                raise InvalidInputError("tuning grid must contain 0 and 1")

    def xi_values(self):
        if self.kind == "cost_agnostic":
            return np.array([0.0])
        if self.kind == "simple_bcr":
            return np.array([1.0])
        return np.unique(self.grid)


@dataclass
class MethodConfig:
    """Shared knobs for one study: method internals plus the refit forest."""

    sts: StsConfig = field(default_factory=StsConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    fs: FsConfig = field(default_factory=FsConfig)
    refit_trees: int = 1000
    refit_mtry: int = None


@dataclass
class TuningRecord:
    """One grid entry: what was selected at this xi and how its refit scored."""

    method: str
    xi: float
    selection: SelectionResult
    refit: RefitModel
    oob_error: float
    test_mmce: float = None


def records_to_frame(records) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "method": r.method,
                "xi": r.xi,
                "n_selected": r.selection.n_selected,
                "cost": r.selection.features.total_cost,
                "oob_error": r.oob_error,
            }
            for r in records
        ],
        columns=["method", "xi", "n_selected", "cost", "oob_error"],
    )


def _method_precompute(method, data, costs, budget, rng, config):
    """The xi-independent part of a method run, shared across grid points."""
    if method in FILTER_METHODS:
        return score_features(
            data, method, rng,
            config.filter.pfi_trees, config.filter.pfi_repeats, config.filter.pfi_mtry,
        )
    if method == "sts":
        level = config.sts.max_level or default_max_level(
            costs, budget, config.sts.max_level_cap
        )
        return build_base_ensemble(
            data, level, config.sts.trees_per_level, config.sts.mtry, rng.child("base")
        )
    return None


def _select_at(method, xi, data, costs, budget, rng, config, precomp):
    if method in FILTER_METHODS:
        return filter_select(
            data, costs, budget, xi, method, rng,
            config=config.filter, raw_scores=precomp,
        )
    if method == "sts":
        result, _ = sts_select(
            data, costs, budget, xi, config=config.sts, rng=rng, base=precomp
        )
        return result
    if method == "fs":
        return fs_select(data, costs, budget, xi, rng, config=config.fs)
    raise InvalidInputError(f"unknown method {method!r}")


def evaluate_xi(
    method: str,
    xi: float,
    data: Dataset,
    costs: CostVector,
    budget: Budget,
    rng: RngStream = None,
    config: MethodConfig = None,
) -> TuningRecord:
    """Run one method at one xi and refit the final forest on its selection."""
    if method not in ALL_METHODS:
        raise InvalidInputError(f"unknown method {method!r}")
    config = config or MethodConfig()
    if rng is None:
        rng = RngStream(0)
    precomp = _method_precompute(method, data, costs, budget, rng.child("select"), config)
    selection = _select_at(method, xi, data, costs, budget, rng.child("select"), config, precomp)
    refit = refit_final(
        data, selection.features, config.refit_trees, config.refit_mtry, rng.child("refit")
    )
    return TuningRecord(method, float(xi), selection, refit, refit.oob_error)


def evaluate_grid(
    method, data, costs, budget, xis, rng=None, config=None
) -> list:
    """Evaluate several xi values, sharing the precompute and the refits.

    Identical feature sets reuse one refit model; this cannot change any
    result because every grid point sees the same random stream anyway.
    """
    config = config or MethodConfig()
    if rng is None:
        rng = RngStream(0)
    precomp = _method_precompute(method, data, costs, budget, rng.child("select"), config)
    refit_cache = {}
    records = []
    for xi in np.asarray(xis, dtype=np.float64):
        selection = _select_at(
            method, float(xi), data, costs, budget, rng.child("select"), config, precomp
        )
        key = selection.features.sorted_indices
        if key not in refit_cache:
            refit_cache[key] = refit_final(
                data, selection.features, config.refit_trees, config.refit_mtry,
                rng.child("refit"),
            )
        refit = refit_cache[key]
        records.append(TuningRecord(method, float(xi), selection, refit, refit.oob_error))
    return records


def grid_tune(
    method: str,
    data: Dataset,
    costs: CostVector,
    budget: Budget,
    grid=None,
    rng: RngStream = None,
    config: MethodConfig = None,
):
    """Pick the grid xi whose refit forest has the lowest OOB error.

    Returns (best_xi, SelectionResult); ties resolve to the smallest xi.
    """
    best, _ = grid_tune_records(method, data, costs, budget, grid, rng, config)
    return best.xi, best.selection


def grid_tune_records(method, data, costs, budget, grid=None, rng=None, config=None):
    """grid_tune, but returning (best record, all records) for reuse."""
    if method not in TUNABLE_METHODS:
        raise InvalidInputError(f"method {method!r} cannot be grid-tuned")
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.size == 0 or (grid < 0).any():
        raise InvalidInputError("tuning grid must be non-empty and non-negative")
    xis = np.unique(grid)  # ascending, so argmin ties resolve to smallest xi
    records = evaluate_grid(method, data, costs, budget, xis, rng, config)
    errors = np.array([r.oob_error for r in records])
    return records[int(np.argmin(errors))], records
