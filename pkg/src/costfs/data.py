"""Binary-classification dataset container and CSV loading."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import InvalidInputError

LABEL_COLUMN = "label"


@dataclass
class Dataset:
    """An n_obs x p numeric feature matrix with 0/1 labels.

    Invariants checked at construction: at least 2 rows and 1 column, labels
    only 0 or 1, no missing values.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: list = field(default=None)

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise InvalidInputError("features must be a 2-d matrix")
        n, p = self.features.shape
        if n < 2 or p < 1:
            raise InvalidInputError(f"need at least 2 rows and 1 column, got {n}x{p}")
        if self.labels.shape != (n,):
            raise InvalidInputError("labels must be one value per row")
        if not np.isin(self.labels, (0, 1)).all():
            raise InvalidInputError("labels must contain only 0 or 1")
        if not np.isfinite(self.features).all():
            raise InvalidInputError("features contain missing or non-finite values")
        if self.feature_names is None:
            self.feature_names = tuple(f"x{j}" for j in range(p))
        else:
            self.feature_names = tuple(self.feature_names)
            if len(self.feature_names) != p:
                raise InvalidInputError("feature_names length must match column count")

    @property
    def n_obs(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset_rows(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.features[rows], self.labels[rows], list(self.feature_names))

    def subset_columns(self, cols) -> "Dataset":
        # columns come back in ascending original order regardless of input
        cols = sorted(set(int(j) for j in cols))
        return Dataset(
            self.features[:, cols],
            self.labels,
            [self.feature_names[j] for j in cols],
        )


def coerce_labels(raw) -> np.ndarray:
    """Map a label column to {0, 1}.

    Accepts numeric 0/1 directly; any other column with exactly two distinct
    values is mapped with the lexicographically smaller value becoming 0.
    """
    values = np.asarray(raw)
    if np.issubdtype(values.dtype, np.number) and set(np.unique(values)) <= {0, 1}:
        return values.astype(np.int64)
    uniq = sorted(set(str(v) for v in values))
    if len(uniq) != 2:
        raise InvalidInputError(
            f"label column must be binary, found {len(uniq)} distinct values"
        )
    mapping = {uniq[0]: 0, uniq[1]: 1}
    return np.array([mapping[str(v)] for v in values], dtype=np.int64)


def load_dataset_csv(path) -> Dataset:
    """Read a dataset from CSV: numeric feature columns plus one `label` column."""
    try:
        frame = pd.read_csv(path)
    except Exception as exc:
        raise InvalidInputError(f"cannot parse {path}: {exc}") from exc
    if LABEL_COLUMN not in frame.columns:
        raise InvalidInputError(f"{path}: no '{LABEL_COLUMN}' column")
    labels = coerce_labels(frame[LABEL_COLUMN])
    feats = frame.drop(columns=[LABEL_COLUMN])
    bad = [c for c in feats.columns if not np.issubdtype(feats[c].dtype, np.number)]
    if bad:
        raise InvalidInputError(f"{path}: non-numeric feature columns {bad}")
    if feats.isna().any().any():
        col = feats.columns[feats.isna().any()][0]
        row = int(feats[col].isna().idxmax())
        raise InvalidInputError(f"{path}: missing value at row {row}, column '{col}'")
    return Dataset(feats.to_numpy(dtype=np.float64), labels, list(feats.columns))


def save_dataset_csv(data: Dataset, path):
    """Write a dataset to the CSV layout load_dataset_csv reads back."""
    frame = pd.DataFrame(data.features, columns=list(data.feature_names))
    frame.insert(0, LABEL_COLUMN, data.labels)
    frame.to_csv(path, index=False)
