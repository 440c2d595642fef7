"""CART decision trees grown on bootstrap bags.

Trees are binary classifiers grown greedily by Gini impurity, considering a
random subset of `mtry` candidate features at every internal node. Nodes stop
splitting when they are pure, hold fewer than two bagged rows, reach the depth
limit, or when every sampled candidate feature is constant. Split thresholds
sit at the midpoint of adjacent distinct sorted values; ties in impurity are
resolved toward the lowest feature index, then the lowest threshold, so a
fitted tree is a pure function of (data, bag, parameters, stream).

The growth and traversal loops are JIT-compiled with numba. In-kernel feature
subsampling uses numba's own generator seeded from the tree's RngStream, which
keeps results reproducible for a fixed (seed, path).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .data import Dataset
from .errors import InvalidInputError
from .rng import RngStream

# sentinel passed to the kernel for "no depth limit"
_NO_LIMIT = np.iinfo(np.int64).max
_EMPTY_F8 = np.empty(0, dtype=np.float64)


@njit(cache=True)
def _grow_kernel(X, y, bag, pool, mtry, max_depth, seed):  # pragma: no cover
    np.random.seed(seed)
    n_bag = bag.shape[0]
    max_nodes = 2 * n_bag + 1
    feat = np.full(max_nodes, -1, dtype=np.int64)
    thr = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    klass = np.zeros(max_nodes, dtype=np.int64)

    rows = bag.copy()
    scratch = np.empty(n_bag, dtype=np.int64)
    pool_scratch = pool.copy()
    m_eff = min(mtry, pool.shape[0])
    xv = np.empty(n_bag, dtype=np.float64)

    # each stack entry: node id, segment start, segment end, depth
    stack = np.empty((2 * n_bag + 4, 4), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n_bag
    stack[0, 3] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack[top, 0]
        s = stack[top, 1]
        e = stack[top, 2]
        depth = stack[top, 3]
        n_node = e - s

        tot1 = 0
        for i in range(s, e):
            tot1 += y[rows[i]]
        klass[node] = 1 if 2 * tot1 > n_node else 0

        if n_node < 2 or tot1 == 0 or tot1 == n_node or depth >= max_depth:
            continue

        # draw m_eff distinct candidate features (partial Fisher-Yates),
        # then order them ascending so impurity ties fall to the lowest index
        for k in range(m_eff):
            j = k + np.random.randint(0, pool_scratch.shape[0] - k)
            tmp = pool_scratch[k]
            pool_scratch[k] = pool_scratch[j]
            pool_scratch[j] = tmp
        for a in range(1, m_eff):
            v = pool_scratch[a]
            b = a - 1
            while b >= 0 and pool_scratch[b] > v:
                pool_scratch[b + 1] = pool_scratch[b]
                b -= 1
            pool_scratch[b + 1] = v

        # maximizing sum over children of (n1^2 + n0^2)/n is equivalent to
        # minimizing the weighted Gini impurity
        best_metric = -1.0
        best_feat = -1
        best_thr = 0.0
        for k in range(m_eff):
            f = pool_scratch[k]
            for i in range(n_node):
                xv[i] = X[rows[s + i], f]
            order = np.argsort(xv[:n_node])
            c1 = 0
            for i in range(n_node - 1):
                c1 += y[rows[s + order[i]]]
                lo = xv[order[i]]
                hi = xv[order[i + 1]]
                if lo < hi:
                    n_l = i + 1
                    n_r = n_node - n_l
                    l1 = c1
                    l0 = n_l - l1
                    r1 = tot1 - l1
                    r0 = n_r - r1
                    metric = (l1 * l1 + l0 * l0) / n_l + (r1 * r1 + r0 * r0) / n_r
                    if metric > best_metric:
                        best_metric = metric
                        best_feat = f
                        best_thr = 0.5 * (lo + hi)
        if best_feat < 0:
            continue  # every candidate feature constant: leave as leaf

        nl = 0
        for i in range(s, e):
            if X[rows[i], best_feat] <= best_thr:
                scratch[nl] = rows[i]
                nl += 1
        nr = nl
        for i in range(s, e):
            if X[rows[i], best_feat] > best_thr:
                scratch[nr] = rows[i]
                nr += 1
        for i in range(n_node):
            rows[s + i] = scratch[i]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feat[node] = best_feat
        thr[node] = best_thr
        left[node] = lid
        right[node] = rid
        stack[top, 0] = lid
        stack[top, 1] = s
        stack[top, 2] = s + nl
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = rid
        stack[top, 1] = s + nl
        stack[top, 2] = e
        stack[top, 3] = depth + 1
        top += 1

    return (
        feat[:n_nodes],
        thr[:n_nodes],
        left[:n_nodes],
        right[:n_nodes],
        klass[:n_nodes],
    )


@njit(cache=True)
def _predict_kernel(feat, thr, left, right, klass, X, rows, swap_col, swap_vals):  # pragma: no cover
    out = np.empty(rows.shape[0], dtype=np.int64)
    for i in range(rows.shape[0]):
        r = rows[i]
        node = 0
        while feat[node] >= 0:
            f = feat[node]
            if f == swap_col:
                v = swap_vals[r]
            else:
                v = X[r, f]
            if v <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = klass[node]
    return out


@dataclass
class DecisionTree:
    """A fitted tree stored as flat node arrays (feature[i] < 0 marks a leaf)."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    klass: np.ndarray
    bag: np.ndarray
    oob: np.ndarray
    max_depth: int = None
    used_features: tuple = field(init=False)

    def __post_init__(self):
        internal = self.feature[self.feature >= 0]
        self.used_features = tuple(int(j) for j in np.unique(internal))

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray, rows=None, swap_col: int = -1, swap_vals=None) -> np.ndarray:
        """Predicted classes for `rows` of X (all rows when omitted).

        When `swap_col` >= 0, reads of that column are redirected to
        `swap_vals` instead of X, which lets permutation importance evaluate
        a permuted column without copying the matrix.
        """
        X = np.ascontiguousarray(X, dtype=np.float64)
        if rows is None:
            rows = np.arange(X.shape[0], dtype=np.int64)
        else:
            rows = np.asarray(rows, dtype=np.int64)
        vals = _EMPTY_F8 if swap_vals is None else np.asarray(swap_vals, dtype=np.float64)
        return _predict_kernel(
            self.feature, self.threshold, self.left, self.right, self.klass,
            X, rows, swap_col, vals,
        )

    def depth(self) -> int:
        """Longest root-to-leaf path length, by traversal."""
        best = 0
        stack = [(0, 0)]
        while stack:
            node, d = stack.pop()
            if self.feature[node] < 0:
                best = max(best, d)
            else:
                stack.append((int(self.left[node]), d + 1))
                stack.append((int(self.right[node]), d + 1))
        return best


def bootstrap_sample(n: int, rng: RngStream):
    """Draw a bootstrap bag of size n with replacement.

    Returns (bag, oob): the bag keeps draw order and multiplicity; oob is the
    sorted complement of the distinct bagged indices.
    """
    if n < 1:
        raise InvalidInputError("cannot bootstrap an empty index range")
    bag = rng.generator().integers(0, n, size=n).astype(np.int64)
    oob = np.setdiff1d(np.arange(n, dtype=np.int64), bag)
    return bag, oob


def fit_tree(
    data: Dataset,
    bag: np.ndarray,
    mtry: int,
    max_depth: int = None,
    rng: RngStream = None,
    feature_pool=None,
) -> DecisionTree:
    """Grow one CART tree on the bagged rows of `data`.

    `feature_pool` restricts the candidate features available to splits
    (defaults to all columns); `mtry` of them are sampled at each node.
    """
    bag = np.asarray(bag, dtype=np.int64)
    if bag.size == 0:
        raise InvalidInputError("bag must be non-empty")
    p = data.n_features
    if not 1 <= mtry <= p:
        raise InvalidInputError(f"mtry must be in 1..{p}, got {mtry}")
    pool = (
        np.arange(p, dtype=np.int64)
        if feature_pool is None
        else np.asarray(sorted(feature_pool), dtype=np.int64)
    )
    depth_arg = _NO_LIMIT if max_depth is None else int(max_depth)
    if depth_arg < 1:
        raise InvalidInputError("max_depth must be >= 1 (or None for unlimited)")
    seed = rng.state_int() if rng is not None else 0
    feat, thr, left, right, klass = _grow_kernel(
        data.features, data.labels, bag, pool, int(mtry), depth_arg, seed
    )
    oob = np.setdiff1d(np.arange(data.n_obs, dtype=np.int64), bag)
    return DecisionTree(feat, thr, left, right, klass, bag, oob, max_depth)


def default_mtry(p: int) -> int:
    """Random-forest default: floor(sqrt(p)), at least 1."""
    return max(1, int(np.sqrt(p)))
