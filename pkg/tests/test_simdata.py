import numpy as np
import pytest

from costfs.errors import InvalidInputError
from costfs.rng import RngStream
from costfs.simdata import (
    BlockCovariance,
    EffectVector,
    SimSetting,
    gen_block_sigma,
    gen_costs,
    gen_dataset,
    gen_effects,
    make_setting,
)


# --- effect vectors -----------------------------------------------------------

def test_effects_shape_and_support():
    eff = gen_effects(50, 20, RngStream(0).child("mu"))
    assert eff.beta.shape == (50,)
    assert np.all(np.abs(eff.beta[:20]) <= 1.0)
    assert np.all(eff.beta[20:] == 0.0)
    assert np.any(eff.beta[:20] != 0.0)


def test_effects_all_relevant_and_none():
    assert np.all(gen_effects(5, 0, RngStream(1)).beta == 0.0)
    full = gen_effects(5, 5, RngStream(1))
    assert np.all(np.abs(full.beta) <= 1.0)


def test_effects_p_rel_validation():
    with pytest.raises(InvalidInputError):
        gen_effects(3, 4, RngStream(2))
    with pytest.raises(InvalidInputError):
        EffectVector(np.array([2.0, 0.0]), 1)
    with pytest.raises(InvalidInputError):
        EffectVector(np.array([0.5, 0.3]), 1)  # nonzero past p_rel


def test_effects_truncated_normal_spread():
    # sd of N(0, 0.5) truncated to [-1, 1] is about 0.4545
    draws = np.concatenate(
        [gen_effects(2000, 2000, RngStream(3).child("big", k)).beta for k in range(5)]
    )
    assert abs(draws.mean()) < 0.02
    assert 0.42 <= draws.std() <= 0.50
    assert np.abs(draws).max() <= 1.0


def test_effects_deterministic():
    a = gen_effects(30, 10, RngStream(4).child("mu"))
    b = gen_effects(30, 10, RngStream(4).child("mu"))
    assert np.array_equal(a.beta, b.beta)


# --- block covariance ---------------------------------------------------------

def test_block_sigma_structure():
    cov = gen_block_sigma(12, 3, RngStream(5).child("sigma"))
    assert cov.matrix.shape == (12, 12)
    assert np.all(np.diag(cov.matrix) == 1.0)
    assert np.array_equal(cov.matrix, cov.matrix.T)
    # undo the permutation and check equicorrelation within each 4-block
    inv = np.argsort(cov.permutation)
    base = cov.matrix[np.ix_(inv, inv)]
    for b, rho in enumerate(cov.block_rhos):
        block = base[b * 4 : (b + 1) * 4, b * 4 : (b + 1) * 4]
        off = block[~np.eye(4, dtype=bool)]
        assert np.all(off == rho)
    # across blocks everything is zero
    assert base[0, 4] == 0.0 and base[3, 11] == 0.0
    assert np.all((cov.block_rhos >= 0.0) & (cov.block_rhos <= 0.999))


def test_block_sigma_divisibility():
    with pytest.raises(InvalidInputError):
        gen_block_sigma(10, 3, RngStream(6))


def test_block_sigma_cholesky_reconstructs():
    cov = gen_block_sigma(20, 4, RngStream(7).child("sigma"))
    assert np.allclose(cov.chol @ cov.chol.T, cov.matrix, atol=1e-8)
    assert np.all(np.diag(cov.chol) > 0)


def test_identity_covariance():
    cov = BlockCovariance.identity(6)
    assert np.array_equal(cov.matrix, np.eye(6))
    assert np.array_equal(cov.chol, np.eye(6))


# --- dataset draws ------------------------------------------------------------

def test_dataset_shapes_and_classes():
    eff = gen_effects(8, 4, RngStream(8).child("mu"))
    data = gen_dataset(eff, None, 200, RngStream(8).child("d"))
    assert data.features.shape == (200, 8)
    assert set(np.unique(data.labels)) == {0, 1}


def test_dataset_class_mean_shift():
    # with a large n the class-1 mean minus the class-0 mean recovers beta
    beta = np.array([0.8, -0.6, 0.0, 0.4])
    eff = EffectVector(beta, 4)
    data = gen_dataset(eff, None, 100_000, RngStream(9).child("d"))
    ones = data.features[data.labels == 1]
    zeros = data.features[data.labels == 0]
    gap = ones.mean(axis=0) - zeros.mean(axis=0)
    assert np.allclose(gap, beta, atol=0.02)
    assert np.allclose(zeros.mean(axis=0), 0.0, atol=0.02)
    assert abs(data.labels.mean() - 0.5) < 0.01


def test_dataset_block_correlation():
    # empirical within-block correlation tracks the drawn rho
    cov = gen_block_sigma(6, 2, RngStream(10).child("sigma"))
    eff = EffectVector(np.zeros(6), 0)
    data = gen_dataset(eff, cov, 100_000, RngStream(10).child("d"))
    emp = np.corrcoef(data.features.T)
    assert np.allclose(emp, cov.matrix, atol=0.05)


def test_dataset_deterministic():
    eff = gen_effects(5, 2, RngStream(11).child("mu"))
    a = gen_dataset(eff, None, 50, RngStream(11).child("d"))
    b = gen_dataset(eff, None, 50, RngStream(11).child("d"))
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.labels, b.labels)


# --- costs --------------------------------------------------------------------

def test_costs_independent_range():
    eff = gen_effects(500, 200, RngStream(12).child("mu"))
    costs = gen_costs("independent", eff, RngStream(12).child("c"))
    assert len(costs) == 500
    assert np.all((costs.values >= 0.1) & (costs.values <= 1.0))


def test_costs_correlated_tracks_effect_size():
    eff = gen_effects(2000, 2000, RngStream(13).child("mu"))
    costs = gen_costs("correlated", eff, RngStream(13).child("c"))
    assert np.all((costs.values >= 0.1) & (costs.values <= 1.0))
    r = np.corrcoef(np.abs(eff.beta), costs.values)[0, 1]
    assert r > 0.5


def test_costs_unknown_mode():
    eff = gen_effects(5, 2, RngStream(14))
    with pytest.raises(InvalidInputError):
        gen_costs("quadratic", eff, RngStream(14))


def test_costs_deterministic():
    eff = gen_effects(40, 20, RngStream(15).child("mu"))
    a = gen_costs("independent", eff, RngStream(15).child("c"))
    b = gen_costs("independent", eff, RngStream(15).child("c"))
    assert np.array_equal(a.values, b.values)


# --- settings and sharing -----------------------------------------------------

DIMS = dict(n_obs=30, p=12, p_rel=6, blocks=3, n_sim=4, n_test=40)


def test_setting_labels_and_modes():
    a = SimSetting.from_label("A", **DIMS)
    d = SimSetting.from_label("D", **DIMS)
    assert (a.data_cov, a.cost_mode) == ("independent", "independent")
    assert (d.data_cov, d.cost_mode) == ("correlated", "correlated")
    with pytest.raises(InvalidInputError):
        SimSetting.from_label("E")


def test_default_study_dimensions():
    s = SimSetting.from_label("A")
    assert (s.n_obs, s.p, s.p_rel, s.blocks) == (500, 200, 100, 20)
    assert (s.n_sim, s.n_test) == (100, 5000)
    assert s.budgets == (1.0, 2.0, 5.0, 10.0, 30.0)


def test_factorial_sharing_across_settings():
    plans = {lab: make_setting(lab, 77, **DIMS) for lab in "ABCD"}
    # one effect vector for everyone
    for lab in "BCD":
        assert np.array_equal(plans["A"].effects.beta, plans[lab].effects.beta)
    # covariance: A and B have none, C and D share one matrix
    assert plans["A"].sigma is None and plans["B"].sigma is None
    assert np.array_equal(plans["C"].sigma.matrix, plans["D"].sigma.matrix)
    # independent costs shared by A and C, correlated costs by B and D
    assert np.array_equal(plans["A"].costs.values, plans["C"].costs.values)
    assert np.array_equal(plans["B"].costs.values, plans["D"].costs.values)
    assert not np.array_equal(plans["A"].costs.values, plans["B"].costs.values)
    # training draws shared within a covariance mode
    a0, b0 = plans["A"].train_set(0), plans["B"].train_set(0)
    assert np.array_equal(a0.features, b0.features)
    c1, d1 = plans["C"].train_set(1), plans["D"].train_set(1)
    assert np.array_equal(c1.features, d1.features)
    assert not np.array_equal(a0.features, c1.features[: a0.n_obs])
    # and the shared test sets likewise
    assert np.array_equal(plans["A"].test_set().features, plans["B"].test_set().features)
    assert np.array_equal(plans["C"].test_set().features, plans["D"].test_set().features)


def test_runs_differ_and_are_reproducible():
    plan = make_setting("A", 78, **DIMS)
    r0, r1 = plan.train_set(0), plan.train_set(1)
    assert not np.array_equal(r0.features, r1.features)
    again = make_setting("A", 78, **DIMS)
    assert np.array_equal(again.train_set(0).features, r0.features)
    with pytest.raises(InvalidInputError):
        plan.train_set(DIMS["n_sim"])
    with pytest.raises(InvalidInputError):
        plan.train_set(-1)


def test_master_seed_changes_everything():
    p77 = make_setting("A", 77, **DIMS)
    p78 = make_setting("A", 78, **DIMS)
    assert not np.array_equal(p77.effects.beta, p78.effects.beta)
    assert not np.array_equal(p77.costs.values, p78.costs.values)
