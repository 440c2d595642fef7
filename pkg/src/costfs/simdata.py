"""Artificial benchmark data: class-conditional Gaussians with optional
block-correlated features and optional effect-correlated costs.

A study plan fixes one effect vector mu (the class-1 mean shift), one
block-diagonal covariance, and one cost vector per cost mode, then draws
fresh training sets per run and a single shared test set. The four settings
A-D cross independent vs block-correlated features with independent vs
effect-correlated costs; plans built from the same master seed share their
mu, covariance, cost, and data draws wherever settings coincide, so setting
comparisons are paired.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import CostVector
from .data import Dataset
from .errors import InvalidInputError, NumericError
from .rng import RngStream

SETTING_LABELS = ("A", "B", "C", "D")
# label -> (feature covariance, cost mode)
_SETTING_MODES = {
    "A": ("independent", "independent"),
    "B": ("independent", "correlated"),
    "C": ("correlated", "independent"),
    "D": ("correlated", "correlated"),
}


@dataclass
class EffectVector:
    """Class-1 mean shift: p_rel leading entries in [-1, 1], the rest zero."""

    beta: np.ndarray
    p_rel: int

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=np.float64)
        if np.abs(self.beta[: self.p_rel]).max(initial=0.0) > 1.0:
            raise InvalidInputError("relevant effects must lie in [-1, 1]")
        if self.p_rel < len(self.beta) and np.any(self.beta[self.p_rel :] != 0.0):
            raise InvalidInputError("effects beyond p_rel must be zero")

    @property
    def p(self) -> int:
        return len(self.beta)


@dataclass
class BlockCovariance:
    """Permuted block-diagonal equicorrelation matrix with its Cholesky factor."""

    block_count: int
    block_rhos: np.ndarray
    permutation: np.ndarray
    matrix: np.ndarray
    chol: np.ndarray = None

    def __post_init__(self):
        if self.chol is None:
            # tiny diagonal jitter so rho near 1 stays factorizable
            try:
                self.chol = np.linalg.cholesky(
                    self.matrix + 1e-10 * np.eye(len(self.matrix))
                )
            except np.linalg.LinAlgError as exc:
                raise NumericError(f"covariance factorization failed: {exc}") from exc

    @property
    def p(self) -> int:
        return len(self.matrix)

    @staticmethod
    def identity(p: int) -> "BlockCovariance":
        eye = np.eye(p)
        return BlockCovariance(p, np.zeros(p), np.arange(p), eye, chol=eye)


def gen_effects(p: int, p_rel: int, rng: RngStream) -> EffectVector:
    """Draw p_rel effects from N(0, 0.5) truncated to [-1, 1] by rejection."""
    if p_rel > p:
        raise InvalidInputError("p_rel cannot exceed p")
    g = rng.generator()
    beta = np.zeros(p)
    filled = 0
    while filled < p_rel:
        draw = g.normal(0.0, 0.5, size=p_rel - filled)
        keep = draw[np.abs(draw) <= 1.0]
        beta[filled : filled + keep.size] = keep
        filled += keep.size
    return EffectVector(beta, p_rel)


def gen_block_sigma(p: int, blocks: int, rng: RngStream) -> BlockCovariance:
    """Equicorrelated blocks with rho ~ U[0,1] (clamped below 1), then a
    random joint row/column permutation so effects land in random blocks."""
    if p % blocks != 0:
        raise InvalidInputError(f"blocks ({blocks}) must divide p ({p})")
    size = p // blocks
    g = rng.generator()
    rhos = np.clip(g.uniform(0.0, 1.0, size=blocks), 0.0, 0.999)
    sigma = np.zeros((p, p))
    for b, rho in enumerate(rhos):
        s = b * size
        sigma[s : s + size, s : s + size] = rho
    np.fill_diagonal(sigma, 1.0)
    perm = g.permutation(p)
    return BlockCovariance(blocks, rhos, perm, sigma[np.ix_(perm, perm)])


def gen_dataset(mu, sigma, n: int, rng: RngStream) -> Dataset:
    """Draw n rows: Y ~ Bernoulli(1/2), X | Y=1 ~ N(mu, S), X | Y=0 ~ N(0, S)."""
    beta = mu.beta if isinstance(mu, EffectVector) else np.asarray(mu, dtype=np.float64)
    p = len(beta)
    g = rng.generator()
    labels = (g.random(n) < 0.5).astype(np.int64)
    z = g.standard_normal((n, p))
    X = z if sigma is None else z @ sigma.chol.T
    X = X + np.outer(labels, beta)
    return Dataset(X, labels)


def gen_costs(mode: str, beta: EffectVector, rng: RngStream) -> CostVector:
    """Independent: c_j ~ U[0.1, 1]. Correlated: |beta_j| plus N(0, 0.2)
    noise, clamped into [0.1, 1]."""
    g = rng.generator()
    p = beta.p
    if mode == "independent":
        return CostVector(g.uniform(0.1, 1.0, size=p))
    if mode == "correlated":
        eps = g.normal(0.0, 0.2, size=p)
        return CostVector(np.clip(np.abs(beta.beta) + eps, 0.1, 1.0))
    raise InvalidInputError(f"unknown cost mode {mode!r}")


@dataclass
class SimSetting:
    """One factorial cell plus the study dimensions."""

    label: str
    data_cov: str
    cost_mode: str
    budgets: tuple = (1.0, 2.0, 5.0, 10.0, 30.0)
    n_obs: int = 500
    p: int = 200
    p_rel: int = 100
    blocks: int = 20
    n_sim: int = 100
    n_test: int = 5000

    @staticmethod
    def from_label(label: str, **overrides) -> "SimSetting":
        if label not in _SETTING_MODES:
            raise InvalidInputError(f"setting label must be one of {SETTING_LABELS}")
        data_cov, cost_mode = _SETTING_MODES[label]
        return SimSetting(label, data_cov, cost_mode, **overrides)


@dataclass
class StudyPlan:
    """Frozen shared draws for one setting, ready to emit datasets.

    Streams are named by what they generate and never by the setting label,
    so plans with equal dimensions and master seed share draws exactly where
    the factorial design says they should (mu everywhere, covariance across
    C/D, each cost mode across its two settings, data per covariance mode).
    """

    setting: SimSetting
    effects: EffectVector
    sigma: BlockCovariance  # None for independent features
    costs: CostVector
    root: RngStream

    def _data_tag(self) -> str:
        return "data_indep" if self.sigma is None else "data_corr"

    def train_set(self, run: int) -> Dataset:
        """Training set for 0-based run index."""
        if not 0 <= run < self.setting.n_sim:
            raise InvalidInputError(f"run must be in 0..{self.setting.n_sim - 1}")
        return gen_dataset(
            self.effects, self.sigma, self.setting.n_obs, self.root.child(self._data_tag(), run)
        )

    def test_set(self) -> Dataset:
        return gen_dataset(
            self.effects, self.sigma, self.setting.n_test,
            self.root.child("test_" + self._data_tag()[5:]),
        )


def make_setting(label: str, master_seed: int, **overrides) -> StudyPlan:
    """Build the study plan for one setting from a master seed."""
    setting = SimSetting.from_label(label, **overrides)
    root = RngStream(master_seed)
    effects = gen_effects(setting.p, setting.p_rel, root.child("mu"))
    sigma = (
        gen_block_sigma(setting.p, setting.blocks, root.child("sigma"))
        if setting.data_cov == "correlated"
        else None
    )
    costs = gen_costs(
        setting.cost_mode, effects,
        root.child("costs_indep" if setting.cost_mode == "independent" else "costs_corr"),
    )
    return StudyPlan(setting, effects, sigma, costs, root)
