"""Feature acquisition costs, pay-once semantics, and budget arithmetic.

A feature is paid for once: the cost of a set of features is the sum over
its *distinct* members, so reusing an already selected feature is free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import InvalidInputError

COST_COLUMN = "cost"


@dataclass
class CostVector:
    """Per-feature acquisition costs; entries must be strictly positive."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size == 0:
            raise InvalidInputError("costs must be a non-empty 1-d vector")
        if not (self.values > 0).all():
            raise InvalidInputError("feature costs must be strictly positive")

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, j) -> float:
        return float(self.values[j])


@dataclass(frozen=True)
class Budget:
    """Global limit on the total cost of distinct selected features."""

    c_max: float

    def __post_init__(self):
        if not self.c_max > 0:
            raise InvalidInputError(f"budget must be positive, got {self.c_max}")


@dataclass(frozen=True)
class FeatureSet:
    """An immutable set of feature indices with its pre-computed total cost."""

    indices: frozenset
    total_cost: float

    @staticmethod
    def empty() -> "FeatureSet":
        return FeatureSet(frozenset(), 0.0)

    @staticmethod
    def from_indices(indices, costs: CostVector) -> "FeatureSet":
        idx = frozenset(int(j) for j in indices)
        return FeatureSet(idx, feature_set_cost(idx, costs))

    def union(self, indices, costs: CostVector) -> "FeatureSet":
        return FeatureSet.from_indices(self.indices | set(int(j) for j in indices), costs)

    @property
    def sorted_indices(self) -> tuple:
        return tuple(sorted(self.indices))

    def __len__(self) -> int:
        return len(self.indices)


def feature_set_cost(indices, costs: CostVector) -> float:
    """Total cost of a set of features, each distinct index counted once.

    Summation always runs in sorted index order so that recomputing a set's
    cost reproduces the identical float.
    """
    idx = sorted(set(int(j) for j in indices))
    if idx and (idx[0] < 0 or idx[-1] >= len(costs)):
        raise InvalidInputError(f"feature index out of range 0..{len(costs) - 1}")
    return float(np.sum(costs.values[idx])) if idx else 0.0


def marginal_cost(candidate, current: FeatureSet, costs: CostVector) -> float:
    """Extra cost of adding `candidate` features on top of `current`."""
    union = current.indices | set(int(j) for j in candidate)
    return feature_set_cost(union, costs) - current.total_cost


def fits_budget(candidate, current: FeatureSet, costs: CostVector, budget: Budget) -> bool:
    """True iff the union of current and candidate still costs at most c_max."""
    return current.total_cost + marginal_cost(candidate, current, costs) <= budget.c_max


def load_costs_csv(path, n_features: int = None) -> CostVector:
    """Read a cost vector from a one-column CSV with header `cost`,
    row order matching the dataset's feature order."""
    try:
        frame = pd.read_csv(path)
    except Exception as exc:
        raise InvalidInputError(f"cannot parse {path}: {exc}") from exc
    if COST_COLUMN not in frame.columns:
        raise InvalidInputError(f"{path}: no '{COST_COLUMN}' column")
    vec = CostVector(frame[COST_COLUMN].to_numpy(dtype=np.float64))
    if n_features is not None and len(vec) != n_features:
        raise InvalidInputError(
            f"{path}: {len(vec)} costs but dataset has {n_features} features"
        )
    return vec


def save_costs_csv(costs: CostVector, path):
    """Write a cost vector to the one-column CSV load_costs_csv reads back."""
    pd.DataFrame({COST_COLUMN: costs.values}).to_csv(path, index=False)
