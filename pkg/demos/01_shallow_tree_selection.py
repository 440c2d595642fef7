"""
Shallow tree selection, step by step
====================================

Walks one budget-constrained selection run on synthetic correlated data:
draw the problem, pick the tree depth the budget can afford, greedily add
shallow trees by benefit-cost ratio, and refit on the implied features.
"""
import numpy as np

from costfs.costs import Budget
from costfs.results import refit_final
from costfs.rng import RngStream
from costfs.simdata import gen_block_sigma, gen_costs, gen_dataset, gen_effects
from costfs.sts import StsConfig, default_max_level, sts_select

root = RngStream(42)

# A 24-feature problem: 12 informative effects, 4 correlated blocks of 6,
# and per-feature acquisition costs drawn independently of usefulness.
p, p_rel, blocks = 24, 12, 4
effects = gen_effects(p, p_rel, root.child("mu"))
sigma = gen_block_sigma(p, blocks, root.child("sigma"))
train = gen_dataset(effects, sigma, 300, root.child("train"))
test = gen_dataset(effects, sigma, 2000, root.child("test"))
costs = gen_costs("independent", effects, root.child("costs"))

budget = Budget(5.0)
print(f"p={p} features, budget {budget.c_max}, costs in "
      f"[{costs.values.min():.2f}, {costs.values.max():.2f}]")

# The candidate pool depth adapts to the budget: a depth-d tree can touch at
# most 2^d - 1 distinct features, so deeper levels only make sense while the
# cheapest 2^d - 1 features still fit.
d = default_max_level(costs, budget)
print(f"affordable tree depth: {d} (pool has one stump per feature, "
      f"then bagged trees per extra level)")

config = StsConfig(trees_per_level=200, max_level=d)
result, trajectory = sts_select(
    train, costs, budget, xi=1.0, config=config, rng=root.child("sts")
)

# Each step logs the chosen tree, the out-of-bag error of the growing vote
# ensemble, the money spent so far, and any candidates that became free of
# charge (already-paid features) and were dropped from the pool. Early oob
# values look high because rows no selected tree has voted on count as
# errors; they fall as coverage builds.
print("\nselection trajectory:")
print(trajectory.to_frame().to_string(index=False))

sel = result.features
print(f"\nimplicit feature set: {list(sel.sorted_indices)}")
print(f"total cost {sel.total_cost:.3f} <= {budget.c_max}")

# The trees that drove the selection are discarded; a fresh forest on the
# selected columns gives the model actually shipped.
model = refit_final(train, sel, num_trees=500, rng=root.child("refit"))
pred = model.predict(test.features)
mmce = float(np.mean(pred != test.labels))
print(f"refit: oob error {model.oob_error:.4f}, test error {mmce:.4f}")

relevant = set(range(p_rel))
hits = len(relevant & set(sel.sorted_indices))
print(f"{hits}/{result.n_selected} selected features are truly informative")
