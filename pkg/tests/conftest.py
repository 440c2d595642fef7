"""Shared fixtures and independent reference implementations used as oracles.

The reference implementations here are deliberately written in a different
style from the package (pure Python / masked numpy, recursive growth) so that
agreement between the two routes is meaningful.
"""

import numpy as np
import pytest

from costfs.data import Dataset
from costfs.rng import RngStream


def ref_best_split(X, y, rows, features):
    """Exhaustive best Gini split over `features` for the multiset `rows`.

    Returns (feature, threshold) or None. Ties resolve to the lowest feature
    index, then the lowest threshold, matching the library contract.
    """
    rows = np.asarray(rows)
    n = len(rows)
    best = None
    best_metric = -np.inf
    for f in sorted(features):
        vals = X[rows, f]
        uniq = np.unique(vals)
        for a, b in zip(uniq[:-1], uniq[1:]):
            t = 0.5 * (a + b)
            lmask = vals <= t
            n_l = int(lmask.sum())
            n_r = n - n_l
            l1 = int(y[rows[lmask]].sum())
            r1 = int(y[rows[~lmask]].sum())
            l0, r0 = n_l - l1, n_r - r1
            metric = (l1 * l1 + l0 * l0) / n_l + (r1 * r1 + r0 * r0) / n_r
            if metric > best_metric:
                best_metric = metric
                best = (f, t)
    return best


class RefNode:
    __slots__ = ("feature", "threshold", "left", "right", "klass")

    def __init__(self, feature=None, threshold=None, left=None, right=None, klass=0):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.klass = klass


def ref_grow(X, y, rows, features, max_depth, depth=0):
    """Recursive reference CART with mtry = all features (no sampling)."""
    rows = np.asarray(rows)
    n = len(rows)
    n1 = int(y[rows].sum())
    node = RefNode(klass=1 if 2 * n1 > n else 0)
    if n < 2 or n1 in (0, n) or (max_depth is not None and depth >= max_depth):
        return node
    split = ref_best_split(X, y, rows, features)
    if split is None:
        return node
    f, t = split
    lmask = X[rows, f] <= t
    node.feature, node.threshold = f, t
    node.left = ref_grow(X, y, rows[lmask], features, max_depth, depth + 1)
    node.right = ref_grow(X, y, rows[~lmask], features, max_depth, depth + 1)
    return node


def ref_predict_one(node, x):
    while node.feature is not None:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.klass


def trees_equal(tree, ref, node=0):
    """Structural equality between a flat-array tree and a RefNode tree."""
    is_leaf = tree.feature[node] < 0
    if is_leaf != (ref.feature is None):
        return False
    if is_leaf:
        return tree.klass[node] == ref.klass
    if tree.feature[node] != ref.feature:
        return False
    if abs(tree.threshold[node] - ref.threshold) > 1e-12:
        return False
    return trees_equal(tree, ref.left, int(tree.left[node])) and trees_equal(
        tree, ref.right, int(tree.right[node])
    )


def ref_normal_quantile(p):
    """Standard normal inverse CDF via Acklam's rational approximation.

    Independent of scipy; absolute error below about 1.2e-9 on (0, 1).
    """
    a = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
         1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
    b = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
         6.680131188771972e01, -1.328068155288572e01)
    c = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
         -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
    d = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
         3.754408661907416e00)
    p_low = 0.02425
    if p < p_low:
        q = np.sqrt(-2 * np.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1
        )
    if p <= 1 - p_low:
        q = p - 0.5
        r = q * q
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1)
        )
    return -ref_normal_quantile(1 - p)


def make_dataset(seed, n=80, p=5, noise=0.3):
    g = RngStream(seed).child("fixture").generator()
    X = g.normal(size=(n, p))
    score = X[:, 0] - 0.7 * X[:, min(1, p - 1)] + noise * g.normal(size=n)
    y = (score > 0).astype(np.int64)
    if y.min() == y.max():  # ensure both classes present
        y[0] = 1 - y[0]
    return Dataset(X, y)


@pytest.fixture
def small_data():
    return make_dataset(11, n=60, p=4)
