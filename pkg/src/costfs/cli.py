"""Command-line front end.

Four subcommands: `select` runs one feature selection on CSV inputs and
writes a JSON report; `simulate` runs an artificial-setting study to a
result CSV; `realworld` does the same for a user-supplied dataset with
repeated 2/3-1/3 splits; `summarize` turns a result CSV into a Monte Carlo
summary CSV. Exit codes: 0 success, 2 invalid input, 3 numeric failure.

Size knobs (--n-obs, --p, --num-trees, ...) default to the full study
protocol; pass smaller values for quick runs on a laptop.
"""

from __future__ import annotations

import argparse
import json
import sys

from .costs import Budget, load_costs_csv
from .data import load_dataset_csv
from .errors import InvalidInputError, NumericError
from .filters import FilterConfig
from .forward import FsConfig
from .harness import (
    realworld_costs,
    results_to_csv,
    run_artificial_study,
    run_realworld_study,
    summarize,
    summary_to_csv,
)
from .rng import RngStream
from .simdata import make_setting
from .sts import StsConfig
from .tuning import (
    ALL_METHODS,
    DEFAULT_GRID,
    MethodConfig,
    evaluate_xi,
    grid_tune_records,
)


def _parse_floats(text):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise InvalidInputError(f"cannot parse number list {text!r}")


def _method_config(args) -> MethodConfig:
    return MethodConfig(
        sts=StsConfig(trees_per_level=args.sts_trees_per_level),
        filter=FilterConfig(pfi_trees=args.pfi_trees, pfi_repeats=args.pfi_repeats),
        fs=FsConfig(n_trees=args.fs_trees),
        refit_trees=args.num_trees,
    )


def _add_size_flags(sub):
    sub.add_argument("--num-trees", type=int, default=1000,
                     help="trees in each final refit forest")
    sub.add_argument("--sts-trees-per-level", type=int, default=500)
    sub.add_argument("--pfi-trees", type=int, default=1000)
    sub.add_argument("--pfi-repeats", type=int, default=5)
    sub.add_argument("--fs-trees", type=int, default=500)


def _add_study_flags(sub):
    _add_size_flags(sub)
    sub.add_argument("--methods", default="auc,pfi,sts",
                     help="comma list from auc,pfi,sts,fs")
    sub.add_argument("--strategies", default="cost_agnostic,simple_bcr,grid_tuned")
    sub.add_argument("--grid", default=None,
                     help="xi grid as a comma list (default 0..2 step 0.25)")
    sub.add_argument("--timings", action="store_true",
                     help="record wall times (breaks byte-reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="costfs", description="Cost-constrained feature selection for random forests"
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_sel = subs.add_parser("select", help="run one selection on CSV data")
    p_sel.add_argument("--data", required=True)
    p_sel.add_argument("--costs", required=True)
    p_sel.add_argument("--budget", type=float, required=True)
    p_sel.add_argument("--method", required=True, choices=list(ALL_METHODS))
    p_sel.add_argument("--xi", required=True, choices=["0", "1", "tune"])
    p_sel.add_argument("--seed", type=int, default=0)
    p_sel.add_argument("--out", required=True)
    _add_size_flags(p_sel)

    p_sim = subs.add_parser("simulate", help="artificial-setting study")
    p_sim.add_argument("--setting", required=True, choices=["A", "B", "C", "D"])
    p_sim.add_argument("--nsim", type=int, default=100)
    p_sim.add_argument("--budgets", default="1,2,5,10,30")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--n-obs", type=int, default=500)
    p_sim.add_argument("--p", type=int, default=200)
    p_sim.add_argument("--p-rel", type=int, default=100)
    p_sim.add_argument("--blocks", type=int, default=20)
    p_sim.add_argument("--n-test", type=int, default=5000)
    _add_study_flags(p_sim)

    p_rw = subs.add_parser("realworld", help="split study on a CSV dataset")
    p_rw.add_argument("--data", required=True)
    p_rw.add_argument("--costs", default=None, help="cost CSV (overrides --cost-seed)")
    p_rw.add_argument("--cost-seed", type=int, default=0)
    p_rw.add_argument("--budgets", required=True)
    p_rw.add_argument("--nsim", type=int, default=10)
    p_rw.add_argument("--seed", type=int, default=0)
    p_rw.add_argument("--out", required=True)
    p_rw.add_argument("--label", default=None, help="setting tag in the output")
    _add_study_flags(p_rw)

    p_sum = subs.add_parser("summarize", help="Monte Carlo summary of a result CSV")
    p_sum.add_argument("--in", dest="infile", required=True)
    p_sum.add_argument("--alpha", type=float, default=0.05)
    p_sum.add_argument("--out", required=True)
    return parser


def cmd_select(args) -> int:
    data = load_dataset_csv(args.data)
    costs = load_costs_csv(args.costs, n_features=data.n_features)
    budget = Budget(args.budget)
    config = _method_config(args)
    rng = RngStream(args.seed)
    if args.xi == "tune":
        if args.method == "fs":
            raise InvalidInputError("fs cannot be tuned; use --xi 0 or 1")
        best, _ = grid_tune_records(args.method, data, costs, budget, None, rng, config)
        record = best
    else:
        record = evaluate_xi(
            args.method, float(args.xi), data, costs, budget, rng, config
        )
    idx = record.selection.features.sorted_indices
    report = {
        "method": args.method,
        "xi": record.xi,
        "xi_mode": args.xi,
        "budget": args.budget,
        "seed": args.seed,
        "n_selected": len(idx),
        "selected_indices": list(idx),
        "selected_features": [data.feature_names[j] for j in idx],
        "cost": record.selection.features.total_cost,
        "oob_error": record.oob_error,
    }
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_simulate(args) -> int:
    plan = make_setting(
        args.setting, args.seed,
        budgets=_parse_floats(args.budgets), n_obs=args.n_obs, p=args.p,
        p_rel=args.p_rel, blocks=args.blocks, n_sim=args.nsim, n_test=args.n_test,
    )
    results = run_artificial_study(
        plan,
        methods=tuple(args.methods.split(",")),
        strategies=tuple(args.strategies.split(",")),
        grid=_parse_floats(args.grid) if args.grid else DEFAULT_GRID,
        config=_method_config(args),
        record_timings=args.timings,
    )
    results_to_csv(results, args.out)
    return 0


def cmd_realworld(args) -> int:
    data = load_dataset_csv(args.data)
    if args.costs:
        costs = load_costs_csv(args.costs, n_features=data.n_features)
        label = args.label or "realworld"
    else:
        costs = realworld_costs(data.n_features, args.cost_seed)
        label = args.label or f"realworld_cs{args.cost_seed}"
    results = run_realworld_study(
        data, costs, _parse_floats(args.budgets),
        methods=tuple(args.methods.split(",")),
        strategies=tuple(args.strategies.split(",")),
        n_sim=args.nsim,
        master_seed=args.seed,
        grid=_parse_floats(args.grid) if args.grid else DEFAULT_GRID,
        config=_method_config(args),
        setting_label=label,
        record_timings=args.timings,
    )
    results_to_csv(results, args.out)
    return 0


def cmd_summarize(args) -> int:
    import pandas as pd

    try:
        results = pd.read_csv(args.infile)
    except Exception as exc:
        raise InvalidInputError(f"cannot parse {args.infile}: {exc}") from exc
    missing = {"setting", "budget", "method", "strategy", "test_mmce"} - set(results.columns)
    if missing:
        raise InvalidInputError(f"{args.infile}: missing columns {sorted(missing)}")
    if "error" not in results.columns:
        results["error"] = ""
    results["error"] = results["error"].fillna("")
    summary_to_csv(summarize(results, args.alpha), args.out)
    return 0


_COMMANDS = {
    "select": cmd_select,
    "simulate": cmd_simulate,
    "realworld": cmd_realworld,
    "summarize": cmd_summarize,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
