# -*- coding: utf-8 -*-

from dataclasses import replace
import numpy as np
import pytest
from modules.exceptions import ArgumentError
from modules.parallel import split_seeds
from modules.selection import select_p
from modules.spatial import orthonormal_basis
from modules.temporal import build_temporal_basis
from modules.simulation import DOMAIN_AREA, in_domain, eval_grid, sample_locations, SimSetup, \
    TruthFunctions, square_with_hole, generate, miae, principal_angle, StudyOptions, run_study
from modules.simulation.study import COLUMNS, SFPC_TEMPORAL, _with_penalties
from modules.sfpc import Penalties, ModelBases, FitConfig, fit

FAST = StudyOptions(degree=2, smoothness=0, J=2, p=1, penalties=Penalties(1.0, 1.0, 1.0),
                    max_iter=5, tol=1e-4)

# Measured distance of the true components from an orthonormal pair
TRUTH_GRAM_TOL = 0.04


def test_evaluation_grid():
    grid = eval_grid()
    assert grid.shape == (1976, 2)
    assert np.all(in_domain(grid))
    assert DOMAIN_AREA == pytest.approx(3.0)


def test_domain_membership():
    inside = in_domain([(0.25, 0.25), (0.5, 1.0), (2.0, 2.0), (1.0, 1.0), (2.1, 0.0)])
    assert inside.tolist() == [True, True, True, False, False]


def test_sample_locations(rng):
    points = sample_locations(rng, 500)
    assert points.shape == (500, 2)
    assert np.all(in_domain(points))


def test_miae():
    truth = np.zeros((4, 10))
    assert miae(truth + 1.0, truth) == pytest.approx(3.0)
    assert miae(np.full(10, -2.0), np.zeros(10), area=1.0) == pytest.approx(2.0)
    with pytest.raises(ArgumentError):
        miae(np.zeros((4, 10)), np.zeros((4, 9)))


def test_principal_angle():
    e = np.eye(6)
    assert principal_angle(e[:, :2], e[:, :2] @ [[1.0, 2.0], [0.5, -1.0]]) == pytest.approx(0.0, abs=1e-6)
    assert principal_angle(e[:, 0], e[:, 1]) == pytest.approx(90.0)
    assert principal_angle(e[:, :2], np.column_stack([e[:, 0], e[:, 2]])) == pytest.approx(90.0)
    with pytest.raises(ArgumentError):
        principal_angle(np.column_stack([e[:, 0], e[:, 0]]), e[:, :2])
    with pytest.raises(ArgumentError):
        principal_angle(e[:, :2], e[:5, :2])


def test_setup_validation():
    assert np.allclose(SimSetup('i').K, [[0.8, 0.8], [0.1, 0.1]])
    assert np.all(SimSetup('ii').K == 0)
    assert SimSetup('iii').correlated and not SimSetup('iii').varying_mean
    low = SimSetup('iv', 0.1)
    assert low.sigma2 == 0.1 and np.allclose(low.sigma2_j, (0.1, 0.01))
    for bad in (dict(setup='v'), dict(variance=0.5), dict(n=2), dict(min_locations=9, max_locations=3)):
        with pytest.raises(ArgumentError):
            SimSetup(**bad)


def test_generate_is_deterministic():
    setup = SimSetup('i', 1.0, n=10, min_locations=5, max_locations=6, seed=3)
    first, second = generate(setup), generate(setup)
    assert np.array_equal(first.panel.values, second.panel.values)
    assert np.array_equal(first.scores, second.scores)
    assert first.panel.n == 10
    assert set(first.panel.counts.tolist()) <= {5, 6}
    assert np.all(in_domain(first.panel.locations))
    assert first.surfaces.shape == (10, 1976)
    assert np.allclose(first.surfaces, first.mean + first.scores @ first.phi.T)
    assert not np.array_equal(generate(setup.replace(seed=4)).panel.values[:5],
                              first.panel.values[:5])


def test_constant_mean_setups():
    data = generate(SimSetup('iv', 0.1, n=5, min_locations=2, max_locations=2))
    assert np.allclose(data.mean, data.mean[0])


def test_study_without_runs():
    result = run_study(runs=0)
    assert list(result.table.columns) == COLUMNS
    assert result.table.empty and result.records.empty


def test_study_rejects_unknown_names():
    with pytest.raises(ArgumentError):
        run_study(runs=0, methods=('PCA',))
    with pytest.raises(ArgumentError):
        run_study(setups=('vii',), runs=0)


def test_small_study_is_reproducible():
    kwargs = dict(setups=('ii',), variances=(1.0,), runs=2, n=12, seed=5, options=FAST)
    first, second = run_study(**kwargs), run_study(**kwargs)
    assert list(first.table.columns) == COLUMNS
    assert first.table.equals(second.table)
    assert set(first.table['method']) == {'sFPC', 'mFPC'}
    assert set(first.table['metric']) == {'PA', 'MIAE_mu', 'MIAE_Z'}
    assert first.failures == []
    assert (first.table['runs_completed'] == 2).all()
    angles = first.records[first.records['metric'] == 'PA']['value']
    assert ((angles >= 0) & (angles <= 90)).all()


@pytest.mark.slow
def test_correlated_setup_recovers_components():
    options = StudyOptions(J=2, p=2, max_iter=100)
    result = run_study(setups=('i',), variances=(0.1,), runs=2, n=100, methods=('sFPC',),
                       options=options)
    angle = result.table.query("metric == 'PA'")['mean'].iloc[0]
    assert angle < 10.0


def test_truth_components_are_nearly_orthonormal():
    # Midpoint rule on a 0.005 mesh of the domain; the rounded amplitudes
    # give a Gram matrix within 0.04 of the identity
    h = 0.005
    axis = np.arange(h / 2.0, 2.0, h)
    x, y = np.meshgrid(axis, axis)
    points = np.column_stack([x.ravel(), y.ravel()])
    phi = TruthFunctions.phi(points[in_domain(points)])
    gram = phi.T @ phi * h * h
    assert np.allclose(gram, np.eye(2), atol=TRUTH_GRAM_TOL)
    assert abs(gram[0, 1]) > 0.01


def test_study_penalties_chosen_per_run():
    data = generate(SimSetup('ii', 1.0, n=12, min_locations=10, max_locations=12, seed=8))
    spatial = orthonormal_basis(square_with_hole(), 2, 0)
    bases = ModelBases(spatial, build_temporal_basis(SFPC_TEMPORAL, data.panel.n))
    cfg = FitConfig(J=2, p=1, penalties=Penalties(1.0, 1.0, 1.0), max_iter=3)

    assert _with_penalties(data.panel, bases, cfg, FAST, 8) is cfg
    options = replace(FAST, select_penalties=True, folds=2, budget=2)
    chosen = _with_penalties(data.panel, bases, cfg, options, 8)
    # A budget of two scores the first two grid points only
    assert tuple(np.round(chosen.penalties.log10(), 8)) in {(-4.0, -4.0, -4.0), (-4.0, -4.0, 0.0)}
    assert chosen.J == cfg.J and chosen.max_iter == cfg.max_iter

    kwargs = dict(setups=('ii',), variances=(1.0,), runs=1, n=12, seed=5, options=options)
    first, second = run_study(**kwargs), run_study(**kwargs)
    assert first.table.equals(second.table)
    assert first.failures == second.failures


@pytest.mark.slow
def test_correlated_setup_beats_the_independent_baseline():
    result = run_study(setups=('i',), variances=(1.0,), runs=10)
    means = result.table.set_index(['method', 'metric'])['mean']
    assert means['sFPC', 'PA'] < means['mFPC', 'PA']
    assert means['sFPC', 'MIAE_Z'] < means['mFPC', 'MIAE_Z']
    assert 3.0 <= means['sFPC', 'PA'] <= 7.5


@pytest.mark.slow
def test_information_criterion_finds_the_ar_order():
    spatial = orthonormal_basis(square_with_hole(), 3, 1)
    options = StudyOptions()
    hits = 0
    for seed in split_seeds(0, 10):
        data = generate(SimSetup('i', 1.0, seed=seed))
        bases = ModelBases(spatial, build_temporal_basis(SFPC_TEMPORAL, data.panel.n))
        models = [fit(data.panel, bases, FitConfig(J=2, p=p, penalties=options.penalties,
                                                   tol=options.tol, max_iter=options.max_iter))
                  for p in (1, 2, 3, 4)]
        hits += select_p(models, 'AIC') == 2
    assert hits >= 8
