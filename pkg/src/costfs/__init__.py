"""Cost-constrained feature selection for random forest classification.

Every feature carries an acquisition cost and the total cost of the selected
set must stay within a budget. The package provides shallow tree selection
(greedy picking of depth-limited trees by benefit-cost ratio), AUC and
permutation-importance filters with top-down budget fill, forest-refitting
forward selection, xi-strategy tuning, an artificial data generator, and a
Monte Carlo benchmark harness with a CLI.
"""

from .costs import (
    Budget,
    CostVector,
    FeatureSet,
    feature_set_cost,
    fits_budget,
    load_costs_csv,
    marginal_cost,
    save_costs_csv,
)
from .data import Dataset, coerce_labels, load_dataset_csv, save_dataset_csv
from .errors import DegenerateEstimateError, InvalidInputError, NumericError
from .filters import (
    FeatureScoreTable,
    FilterConfig,
    auc_score,
    bcr_filter,
    filter_select,
    permutation_importance,
    score_features,
    topdown_fill,
)
from .forest import Forest, fit_forest, forest_oob_error, mmce, predict_forest
from .forward import FsConfig, FsState, FsTrajectory, bcr_fs, fs_select
from .harness import (
    MonteCarloSummary,
    monte_carlo_summary,
    rank_methods,
    realworld_costs,
    results_to_csv,
    run_artificial_study,
    run_realworld_study,
    split_plan,
    summarize,
    summary_to_csv,
)
from .results import RefitModel, SelectionResult, refit_final
from .rng import RngStream
from .simdata import (
    BlockCovariance,
    EffectVector,
    SimSetting,
    StudyPlan,
    gen_block_sigma,
    gen_costs,
    gen_dataset,
    gen_effects,
    make_setting,
)
from .sts import (
    BaseEnsemble,
    CandidateTree,
    ResultEnsemble,
    StsConfig,
    StsTrajectory,
    bcr_improvement,
    bcr_sts,
    build_base_ensemble,
    default_max_level,
    ensemble_oob_mmce,
    sts_select,
)
from .tree import DecisionTree, bootstrap_sample, default_mtry, fit_tree
from .tuning import (
    DEFAULT_GRID,
    MethodConfig,
    TuningRecord,
    XiStrategy,
    evaluate_grid,
    evaluate_xi,
    grid_tune,
    grid_tune_records,
)

__version__ = "0.1.0"
