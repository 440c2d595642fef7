import numpy as np
import pytest

from costfs.costs import Budget, CostVector, FeatureSet, feature_set_cost, marginal_cost
from costfs.data import Dataset
from costfs.errors import InvalidInputError
from costfs.rng import RngStream
from costfs.sts import (
    BaseEnsemble,
    CandidateTree,
    ResultEnsemble,
    StsConfig,
    bcr_improvement,
    bcr_sts,
    build_base_ensemble,
    default_max_level,
    ensemble_oob_mmce,
    sts_select,
)
from costfs.tree import DecisionTree

from .conftest import make_dataset


# --- hand-built trees with fully controlled votes -----------------------------

def stump(j, n, bag=(0,), klass_left=0, klass_right=1):
    """Single split on column j at 0.5; predicts the column's 0/1 value."""
    oob = np.setdiff1d(np.arange(n), np.asarray(bag))
    return DecisionTree(
        feature=np.array([j, -1, -1], dtype=np.int64),
        threshold=np.array([0.5, 0.0, 0.0]),
        left=np.array([1, -1, -1], dtype=np.int64),
        right=np.array([2, -1, -1], dtype=np.int64),
        klass=np.array([0, klass_left, klass_right], dtype=np.int64),
        bag=np.asarray(bag, dtype=np.int64),
        oob=oob,
        max_depth=1,
    )


def deep_tree(j_root, j_leaf, n, bag=(0,)):
    """Depth-2 tree that nominally splits j_root but always falls through to
    a stump on j_leaf, so its vote is driven by column j_leaf alone while
    used_features is {j_root, j_leaf}."""
    oob = np.setdiff1d(np.arange(n), np.asarray(bag))
    return DecisionTree(
        feature=np.array([j_root, -1, j_leaf, -1, -1], dtype=np.int64),
        threshold=np.array([-100.0, 0.0, 0.5, 0.0, 0.0]),
        left=np.array([1, -1, 3, -1, -1], dtype=np.int64),
        right=np.array([2, -1, 4, -1, -1], dtype=np.int64),
        klass=np.array([0, 0, 0, 0, 1], dtype=np.int64),
        bag=np.asarray(bag, dtype=np.int64),
        oob=oob,
        max_depth=2,
    )


def vote_column(n, wrong_rows):
    """Column equal to the label (1) except on wrong_rows; row 0 is in-bag."""
    col = np.ones(n)
    col[list(wrong_rows)] = 0.0
    return col


@pytest.fixture
def six_candidates():
    """Six-candidate pool arranged so the greedy picks D, then F, then B.

    Twenty rows; label 1 everywhere except row 0, which is every tree's only
    bagged row. Each candidate's vote is driven by its own column, listing
    the rows it gets wrong. Costs make A cost-free once D is in, E cost-free
    once F is in, and C unaffordable at the end.
    """
    n = 20
    y = np.ones(n, dtype=np.int64)
    y[0] = 0
    cols = np.column_stack(
        [
            vote_column(n, range(13, 19)),  # col 0 drives A = {x0}
            vote_column(n, [19]),           # col 1 drives D = {x0, x1}
            vote_column(n, range(15, 19)),  # col 2 drives B = {x2}
            vote_column(n, [17, 18]),       # col 3 drives E = {x1, x3}
            vote_column(n, [18, 19]),       # col 4 drives F = {x3, x4}
            vote_column(n, range(13, 19)),  # col 5 drives C = {x5}
        ]
    )
    data = Dataset(cols, y)
    costs = CostVector(np.array([0.5, 0.5, 0.9, 0.5, 0.5, 1.2]))
    cands = [
        CandidateTree(0, stump(0, n), 1, frozenset({0})),             # A
        CandidateTree(1, stump(2, n), 1, frozenset({2})),             # B
        CandidateTree(2, stump(5, n), 1, frozenset({5})),             # C
        CandidateTree(3, deep_tree(0, 1, n), 2, frozenset({0, 1})),   # D
        CandidateTree(4, deep_tree(1, 3, n), 2, frozenset({1, 3})),   # E
        CandidateTree(5, deep_tree(3, 4, n), 2, frozenset({3, 4})),   # F
    ]
    base = BaseEnsemble(cands, {1, 2}, n, 6)
    return data, costs, base


# --- ensemble OOB scoring -----------------------------------------------------

def test_empty_ensemble_is_half():
    data = make_dataset(0, n=10, p=2)
    assert ensemble_oob_mmce(ResultEnsemble.empty(10), data) == 0.5


def test_single_tree_unvoted_rows_count_as_errors():
    # 10 rows, one tree with oob = {3, 7}, both predicted correctly:
    # 8 unvoted rows are errors -> 8/10
    n = 10
    y = np.zeros(n, dtype=np.int64)
    y[3] = y[7] = 1
    X = np.zeros((n, 1))
    X[[3, 7], 0] = 1.0
    data = Dataset(X, y)
    tree = stump(0, n, bag=np.setdiff1d(np.arange(n), [3, 7]))
    cand = CandidateTree(0, tree, 1, frozenset({0}))
    ens = ResultEnsemble.empty(n).with_tree(cand, data, CostVector(np.ones(1)))
    assert ensemble_oob_mmce(ens, data) == pytest.approx(0.8, abs=1e-15)


def test_two_correct_votes_beat_one_wrong():
    # three trees all oob on row 1: votes (1, 1, 0) against label 1 -> no error
    n = 4
    y = np.array([0, 1, 0, 0], dtype=np.int64)
    X = np.zeros((n, 3))
    costs = CostVector(np.ones(3))
    X[1, 0] = 1.0
    X[1, 1] = 1.0
    X[1, 2] = 0.0  # third tree votes 0 on row 1
    bag = [0, 2, 3]
    cands = [CandidateTree(i, stump(i, n, bag=bag), 1, frozenset({i})) for i in range(3)]
    ens = ResultEnsemble.empty(n)
    for c in cands:
        ens = ens.with_tree(c, Dataset(X, y), costs)
    # row 1 voted correctly; rows 0, 2, 3 unvoted -> 3 errors
    assert ensemble_oob_mmce(ens, Dataset(X, y)) == pytest.approx(3 / 4, abs=1e-15)


def brute_force_oob_mmce(trees_with_preds, labels, n):
    """Third route: explicit per-row vote count over (oob_rows, preds) pairs."""
    errors = 0
    for r in range(n):
        v1 = nv = 0
        for rows, preds in trees_with_preds:
            hits = np.flatnonzero(rows == r)
            if hits.size:
                nv += 1
                v1 += int(preds[hits[0]])
        if nv == 0:
            errors += 1
        elif (1 if 2 * v1 > nv else 0) != labels[r]:
            errors += 1
    return errors / n


@pytest.mark.parametrize("seed", range(12))
def test_oob_mmce_matches_brute_force(seed):
    g = RngStream(seed).child("fix").generator()
    n = int(g.integers(5, 31))
    y = g.integers(0, 2, n).astype(np.int64)
    X = g.normal(size=(n, 2))
    data = Dataset(X, y)
    costs = CostVector(np.ones(2))
    k = int(g.integers(1, 11))
    ens = ResultEnsemble.empty(n)
    pairs = []
    for i in range(k):
        bag = g.integers(0, n, n)
        tree = stump(0, n, bag=bag)
        cand = CandidateTree(i, tree, 1, frozenset({0}))
        # randomize the vote by shuffling a fake prediction column
        cand.oob_pred = g.integers(0, 2, tree.oob.size).astype(np.int64)
        pairs.append((tree.oob, cand.oob_pred))
        ens = ens.with_tree(cand, data, costs)
    assert ensemble_oob_mmce(ens, data) == pytest.approx(
        brute_force_oob_mmce(pairs, y, n), abs=0
    )


# --- BCR ----------------------------------------------------------------------

def test_bcr_improvement_worked_values():
    assert bcr_improvement(0.3, 0.5, 2.0, 1.0) == pytest.approx(-0.1, abs=1e-12)
    assert bcr_improvement(0.3, 0.5, 2.0, 0.0) == pytest.approx(-0.2, abs=1e-12)
    assert bcr_improvement(0.55, 0.5, 1.0, 1.0) == pytest.approx(0.05, abs=1e-12)


def test_bcr_improvement_rejects_free_candidates():
    with pytest.raises(InvalidInputError):
        bcr_improvement(0.3, 0.5, 0.0, 1.0)


def test_bcr_sts_end_to_end(six_candidates):
    data, costs, base = six_candidates
    empty = ResultEnsemble.empty(data.n_obs)
    d = base.candidates[3]
    # D wrong on 1 of its 19 oob rows, row 0 unvoted: (2/20 - 0.5) / 1.0
    assert bcr_sts(d, empty, 1.0, data, costs) == pytest.approx(-0.4, abs=1e-12)
    assert bcr_sts(d, empty, 0.0, data, costs) == pytest.approx(-0.4, abs=1e-12)
    with_d = empty.with_tree(d, data, costs)
    with pytest.raises(InvalidInputError):
        bcr_sts(base.candidates[0], with_d, 1.0, data, costs)  # A is now cost-free


# --- base ensemble ------------------------------------------------------------

def test_base_counts_level_one():
    data = make_dataset(1, n=50, p=6)
    base = build_base_ensemble(data, 1, 7, rng=RngStream(1))
    assert len(base) == 6  # one stump per feature, no depth-1 forest
    assert all(c.level == 1 for c in base.candidates)
    for j, c in enumerate(base.candidates):
        assert c.features <= {j}


def test_base_counts_two_levels():
    data = make_dataset(2, n=50, p=6)
    base = build_base_ensemble(data, 2, 3, rng=RngStream(2))
    assert len(base) == 6 + 3
    assert base.depth_levels == {1, 2}


def test_base_structural_bound():
    data = make_dataset(3, n=80, p=10, noise=1.5)
    base = build_base_ensemble(data, 3, 20, rng=RngStream(3))
    for c in base.candidates:
        assert c.tree.depth() <= c.level
        assert len(c.features) <= 2**c.level - 1


def test_base_validation():
    data = make_dataset(4, n=30, p=3)
    with pytest.raises(InvalidInputError):
        build_base_ensemble(data, 0, 5)
    with pytest.raises(InvalidInputError):
        build_base_ensemble(data, 2, 0)


def test_default_max_level():
    costs = CostVector(np.array([0.5, 0.25, 1.0, 0.125, 0.375]))
    assert default_max_level(costs, Budget(0.1)) == 1  # nothing fits, floor is 1
    assert default_max_level(costs, Budget(0.75)) == 2  # 0.125+0.25+0.375 fits
    assert default_max_level(costs, Budget(2.0)) == 2  # all five cost 2.25
    assert default_max_level(costs, Budget(2.25)) == 5
    assert default_max_level(costs, Budget(2.25), cap=3) == 3


# --- the greedy loop ----------------------------------------------------------

def test_schematic_selection_order(six_candidates):
    data, costs, base = six_candidates
    result, traj = sts_select(data, costs, Budget(3.0), 1.0, base=base)
    assert [s.tree_id for s in traj.steps] == [3, 5, 1]  # D, F, B
    assert [s.removed_ids for s in traj.steps] == [(0,), (4,), ()]
    assert result.features.indices == frozenset({0, 1, 2, 3, 4})
    assert [s.bcr for s in traj.steps] == pytest.approx([-0.4, 0.05, 0.0], abs=1e-12)
    assert [s.cum_cost for s in traj.steps] == pytest.approx([1.0, 2.0, 2.9], abs=1e-12)
    assert [s.oob_mmce for s in traj.steps] == pytest.approx([0.1, 0.15, 0.15], abs=1e-15)


def test_budget_below_everything_selects_nothing(six_candidates):
    data, costs, base = six_candidates
    result, traj = sts_select(data, costs, Budget(0.3), 1.0, base=base)
    assert result.features.indices == frozenset()
    assert traj.steps == []


def test_replay_matches_public_bcr(six_candidates):
    # every recorded step must be reproducible through the public scoring API
    data, costs, base = six_candidates
    result, traj = sts_select(data, costs, Budget(3.0), 1.0, base=base)
    by_id = {c.tree_id: c for c in base.candidates}
    ens = ResultEnsemble.empty(data.n_obs)
    for step in traj.steps:
        cand = by_id[step.tree_id]
        assert bcr_sts(cand, ens, 1.0, data, costs) == step.bcr
        ens = ens.with_tree(cand, data, costs)
        assert ensemble_oob_mmce(ens, data) == step.oob_mmce
        assert ens.implicit_features.total_cost == step.cum_cost
    assert ens.implicit_features.indices == result.features.indices


def _random_instance(seed, n=40, p=6):
    g = RngStream(seed).child("inst").generator()
    data = make_dataset(seed % 97, n=n, p=p, noise=1.0)
    costs = CostVector(g.uniform(0.1, 1.0, p))
    budget = Budget(float(g.uniform(0.3, 3.0)))
    xi = float(g.choice([0.0, 0.5, 1.0, 2.0]))
    return data, costs, budget, xi


@pytest.mark.parametrize("seed", range(20))
def test_selection_invariants(seed):
    data, costs, budget, xi = _random_instance(seed)
    cfg = StsConfig(trees_per_level=12, max_level=2)
    result, traj = sts_select(data, costs, budget, xi, cfg, RngStream(seed).child("s"))
    # budget safety and monotone coverage along the whole trajectory
    prev_cost = 0.0
    seen = set()
    for step in traj.steps:
        assert step.cum_cost <= budget.c_max + 1e-12
        assert step.cum_cost >= prev_cost
        prev_cost = step.cum_cost
    for cand in result.ensemble.trees:
        assert not cand.features <= seen or not cand.features  # each pick adds something
        seen |= cand.features
    assert seen == set(result.features.indices)
    assert feature_set_cost(seen, costs) <= budget.c_max + 1e-12
    assert result.features.total_cost == feature_set_cost(seen, costs)


@pytest.mark.parametrize("seed", range(6))
def test_cost_free_hygiene(seed):
    # after the run, no candidate the loop left active can be cost-free
    data, costs, budget, xi = _random_instance(seed, n=50, p=5)
    cfg = StsConfig(trees_per_level=10, max_level=2)
    result, traj = sts_select(data, costs, budget, xi, cfg, RngStream(seed).child("h"))
    base = build_base_ensemble(
        data, 2, 10, rng=RngStream(seed).child("h").child("base")
    )
    picked = {s.tree_id for s in traj.steps}
    removed = {i for s in traj.steps for i in s.removed_ids}
    for cand in base.candidates:
        if cand.tree_id in picked or cand.tree_id in removed:
            continue
        if traj.steps:  # survivors must carry fresh cost
            assert marginal_cost(cand.features, result.features, costs) > 0


def test_xi_zero_ignores_cost_rescaling(six_candidates):
    # with xi = 0 the argmin over a fixed candidate pool ignores cost scale
    data, costs, base = six_candidates
    scaled = CostVector(costs.values * 0.35)
    empty = ResultEnsemble.empty(data.n_obs)
    orig = [bcr_sts(c, empty, 0.0, data, costs) for c in base.candidates]
    resc = [bcr_sts(c, empty, 0.0, data, scaled) for c in base.candidates]
    assert int(np.argmin(orig)) == int(np.argmin(resc))
    assert orig == pytest.approx(resc, abs=1e-12)


def test_select_deterministic():
    data = make_dataset(31, n=60, p=5)
    costs = CostVector(RngStream(31).child("c").generator().uniform(0.1, 1, 5))
    cfg = StsConfig(trees_per_level=15, max_level=2)
    a, _ = sts_select(data, costs, Budget(1.5), 1.0, cfg, RngStream(31).child("r"))
    b, _ = sts_select(data, costs, Budget(1.5), 1.0, cfg, RngStream(31).child("r"))
    assert a.features.indices == b.features.indices
    assert a.features.total_cost == b.features.total_cost


def test_trajectory_csv(tmp_path, six_candidates):
    data, costs, base = six_candidates
    _, traj = sts_select(data, costs, Budget(3.0), 1.0, base=base)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    text = path.read_text().splitlines()
    assert text[0] == "iteration,tree_id,bcr,oob_mmce,cum_cost,removed_ids"
    assert len(text) == 4
