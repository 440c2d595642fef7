"""Study orchestration: run selection methods over simulated or real data,
collect per-run results, and summarize them with Monte Carlo error bars.

A result table has one row per (setting, budget, method, strategy, run).
Strategy rows for one method share work: grid tuning evaluates every grid
value once, and the xi = 0 and xi = 1 rows are read off the same grid
rather than recomputed. Failed runs are recorded with an error marker so
the run accounting stays honest.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import norm, rankdata

from .costs import Budget, CostVector
from .data import Dataset
from .errors import InvalidInputError
from .forest import mmce
from .rng import RngStream
from .simdata import StudyPlan
from .tuning import (
    DEFAULT_GRID,
    MethodConfig,
    TuningRecord,
    evaluate_grid,
)

RESULT_COLUMNS = [
    "setting", "budget", "method", "strategy", "run", "xi",
    "n_selected", "cost", "oob_error", "test_mmce", "seconds", "error",
]

STRATEGIES = ("cost_agnostic", "simple_bcr", "grid_tuned")
_FIXED_XI = {"cost_agnostic": 0.0, "simple_bcr": 1.0}


@dataclass
class MonteCarloSummary:
    mean_mmce: float
    mc_se: float
    ci_low: float
    ci_high: float
    alpha: float
    n_sim: int
    q: float


def normal_quantile(prob: float) -> float:
    """Standard normal inverse CDF."""
    return float(norm.ppf(prob))


def monte_carlo_summary(mmces, alpha: float = 0.05) -> MonteCarloSummary:
    """Mean, Monte Carlo standard error, and two-sided normal CI.

    SE uses the unbiased sample variance over n runs divided by n; the CI is
    mean plus/minus the 1 - alpha/2 normal quantile times SE.
    """
    x = np.asarray(mmces, dtype=np.float64)
    if x.size < 2:
        raise InvalidInputError("need at least 2 values for a Monte Carlo summary")
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must be in (0, 1), got {alpha}")
    mean = float(np.mean(x))
    se = float(np.sqrt(np.var(x, ddof=1) / x.size))
    q = normal_quantile(1.0 - alpha / 2.0)
    return MonteCarloSummary(mean, se, mean - q * se, mean + q * se, alpha, x.size, q)


def rank_methods(results: pd.DataFrame, by: str = "method") -> pd.DataFrame:
    """Mean rank of each `by` group across all (setting, budget) cells.

    Within a cell, groups are ranked by mean test MMCE (rank 1 best, ties
    averaged). Every cell must contain every group.
    """
    ok = results[np.isfinite(results["test_mmce"])]
    units = sorted(ok[by].unique())
    ranks = {u: [] for u in units}
    for _, cell in ok.groupby(["setting", "budget"]):
        means = cell.groupby(by)["test_mmce"].mean()
        if sorted(means.index) != units:
            missing = set(units) - set(means.index)
            raise InvalidInputError(f"cell is missing entries for {sorted(missing)}")
        cell_ranks = rankdata(means.to_numpy())
        for u, r in zip(means.index, cell_ranks):
            ranks[u].append(r)
    return pd.DataFrame(
        {by: units, "mean_rank": [float(np.mean(ranks[u])) for u in units]}
    )


def _materialize_rows(
    setting_label, budget, method, strategies, run_1based, records, best,
    test_data, seconds,
):
    """Turn grid records into result rows for the requested strategies."""
    rows = []
    for strat in strategies:
        if strat in _FIXED_XI:
            wanted = _FIXED_XI[strat]
            rec = next((r for r in records if r.xi == wanted), None)
            if rec is None:
                continue  # fs runs a two-point grid; nothing else is missing
        elif strat == "grid_tuned":
            if best is None:
                continue  # method cannot tune (fs)
            rec = best
        else:
            raise InvalidInputError(f"unknown strategy {strat!r}")
        if rec.test_mmce is None:
            rec.test_mmce = mmce(test_data.labels, rec.refit.predict(test_data.features))
        rows.append(
            {
                "setting": setting_label,
                "budget": float(budget),
                "method": method,
                "strategy": strat,
                "run": run_1based,
                "xi": rec.xi,
                "n_selected": rec.selection.n_selected,
                "cost": rec.selection.features.total_cost,
                "oob_error": rec.oob_error,
                "test_mmce": rec.test_mmce,
                "seconds": seconds,
                "error": "",
            }
        )
    return rows


def _error_rows(setting_label, budget, method, strategies, run_1based, message):
    return [
        {
            "setting": setting_label, "budget": float(budget), "method": method,
            "strategy": strat, "run": run_1based, "xi": np.nan,
            "n_selected": 0, "cost": np.nan, "oob_error": np.nan,
            "test_mmce": np.nan, "seconds": 0.0, "error": message,
        }
        for strat in strategies
    ]


def _run_cell(
    setting_label, train, test, costs, budget, methods, strategies, rng,
    run_1based, config, grid, record_timings,
):
    """All rows for one (training set, budget) combination."""
    rows = []
    budget_obj = Budget(float(budget))
    for method in methods:
        m_rng = rng.child("method", method)
        t0 = time.perf_counter()
        try:
            tune = method != "fs" and "grid_tuned" in strategies
            if tune:
                xis = np.unique(np.asarray(grid, dtype=np.float64))
            else:
                xis = np.unique(
                    [_FIXED_XI[s] for s in strategies if s in _FIXED_XI]
                )
            records = evaluate_grid(
                method, train, costs, budget_obj, xis, m_rng, config
            )
            best = None
            if tune:
                errors = np.array([r.oob_error for r in records])
                best = records[int(np.argmin(errors))]
            seconds = time.perf_counter() - t0 if record_timings else 0.0
            rows.extend(
                _materialize_rows(
                    setting_label, budget, method, strategies, run_1based,
                    records, best, test, seconds,
                )
            )
        except Exception as exc:  # record, never drop silently
            rows.extend(
                _error_rows(setting_label, budget, method, strategies, run_1based, str(exc))
            )
    return rows


def run_artificial_study(
    plan: StudyPlan,
    methods=("auc", "pfi", "sts"),
    strategies=STRATEGIES,
    grid=None,
    config: MethodConfig = None,
    record_timings: bool = False,
) -> pd.DataFrame:
    """Run the full per-setting study described by `plan`.

    For each training set and budget, every method runs under the requested
    strategies; grid-tuned methods also yield their xi = 0 and xi = 1 rows
    from the same grid at no extra cost. fs never grid-tunes and only
    contributes fixed-strategy rows. Each row's test MMCE comes from the
    plan's one shared test set.
    """
    config = config or MethodConfig()
    grid = DEFAULT_GRID if grid is None else grid
    test = plan.test_set()
    rows = []
    for i in range(plan.setting.n_sim):
        train = plan.train_set(i)
        for bi, budget in enumerate(plan.setting.budgets):
            rng = plan.root.child("run", i, "budget", bi)
            rows.extend(
                _run_cell(
                    plan.setting.label, train, test, plan.costs, budget,
                    methods, strategies, rng, i + 1, config, grid, record_timings,
                )
            )
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def realworld_costs(n_features: int, cost_seed: int) -> CostVector:
    """The uniform [0.1, 1] cost draw used when a dataset has no given costs."""
    g = RngStream(int(cost_seed)).child("rw_costs").generator()
    return CostVector(g.uniform(0.1, 1.0, size=n_features))


def split_plan(n_obs: int, n_sim: int, rng: RngStream):
    """Seeded 2/3 train, 1/3 test row splits."""
    out = []
    n_train = (2 * n_obs) // 3
    for i in range(n_sim):
        perm = rng.child("split", i).generator().permutation(n_obs)
        out.append((np.sort(perm[:n_train]), np.sort(perm[n_train:])))
    return out


def run_realworld_study(
    data: Dataset,
    costs: CostVector,
    budgets,
    methods=("auc", "pfi", "sts"),
    strategies=STRATEGIES,
    n_sim: int = 10,
    master_seed: int = 0,
    grid=None,
    config: MethodConfig = None,
    setting_label: str = "realworld",
    record_timings: bool = False,
) -> pd.DataFrame:
    """Repeated 2/3-1/3 split study on a fixed dataset and cost vector."""
    config = config or MethodConfig()
    grid = DEFAULT_GRID if grid is None else grid
    root = RngStream(int(master_seed))
    splits = split_plan(data.n_obs, n_sim, root.child("splits"))
    rows = []
    for i, (train_idx, test_idx) in enumerate(splits):
        train = data.subset_rows(train_idx)
        test = data.subset_rows(test_idx)
        for bi, budget in enumerate(budgets):
            rng = root.child("run", i, "budget", bi)
            rows.extend(
                _run_cell(
                    setting_label, train, test, costs, budget, methods,
                    strategies, rng, i + 1, config, grid, record_timings,
                )
            )
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def summarize(results: pd.DataFrame, alpha: float = 0.05) -> pd.DataFrame:
    """Per-(setting, budget, method, strategy) Monte Carlo summary table.

    `overlaps_best` flags groups whose CI overlaps the CI of the group with
    the lowest mean in the same (setting, budget) cell; non-overlap is the
    study's informal significance convention.
    """
    failed = results["error"].astype(str) != ""
    ok = results[~failed & np.isfinite(results["test_mmce"])]
    rows = []
    for (setting, budget, method, strat), grp in ok.groupby(
        ["setting", "budget", "method", "strategy"], sort=True
    ):
        x = grp["test_mmce"].to_numpy()
        n_failed = int(
            (failed & (results["setting"] == setting) & (results["budget"] == budget)
             & (results["method"] == method) & (results["strategy"] == strat)).sum()
        )
        if x.size >= 2:
            s = monte_carlo_summary(x, alpha)
            mean, se, lo, hi = s.mean_mmce, s.mc_se, s.ci_low, s.ci_high
        else:
            mean, se, lo, hi = float(np.mean(x)), np.nan, np.nan, np.nan
        rows.append(
            {
                "setting": setting, "budget": budget, "method": method,
                "strategy": strat, "n_sim": int(x.size), "n_failed": n_failed,
                "mean_mmce": mean, "mc_se": se, "ci_low": lo, "ci_high": hi,
            }
        )
    table = pd.DataFrame(rows)
    if table.empty:
        table["overlaps_best"] = pd.Series(dtype=bool)
        return table
    flags = np.zeros(len(table), dtype=bool)
    for _, idx in table.groupby(["setting", "budget"]).groups.items():
        cell = table.loc[idx]
        best = cell["mean_mmce"].idxmin()
        lo_b, hi_b = table.loc[best, "ci_low"], table.loc[best, "ci_high"]
        for i in idx:
            lo_i, hi_i = table.loc[i, "ci_low"], table.loc[i, "ci_high"]
            flags[table.index.get_loc(i)] = bool(
                i == best or (hi_i >= lo_b and lo_i <= hi_b)
            )
    table["overlaps_best"] = flags
    return table


def results_to_csv(results: pd.DataFrame, path):
    """Deterministic CSV dump: fixed float format, no index."""
    results.to_csv(path, index=False, float_format="%.6f")


def summary_to_csv(summary: pd.DataFrame, path):
    summary.to_csv(path, index=False, float_format="%.6f")
