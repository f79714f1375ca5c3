# -*- coding: utf-8 -*-

import pickle
from types import SimpleNamespace
import numpy as np
import pytest
from modules.exceptions import ArgumentError
from modules.parallel import TaskRunner
from modules.selection import information_criterion, criterion_table, select_p, \
    variance_proportions, select_J, make_cv_plan, cross_validate, cv_score, CVObjective, \
    DemeanObjective, demean_cv, simplex_search
from modules.sfpc import FitConfig, Penalties
from .conftest import random_panel

TARGET = np.array([0.3, -1.2, 0.5])


def quadratic(x):
    return float(np.sum((np.asarray(x) - TARGET) ** 2))


def constant(x):
    return 1.0


def _fake_model(p, s_hat, n=10):
    params = SimpleNamespace(J=1, p=p, sigma2_j=np.array([1.0]), K=np.zeros((p, 1)))
    moments = SimpleNamespace(S_hat=lambda j, k: s_hat)
    return SimpleNamespace(params=params, moments=moments, n=n)


def test_information_criteria():
    first, second = _fake_model(1, 10.0), _fake_model(2, 8.0)
    assert information_criterion(first, 'AIC') == pytest.approx(12.0)
    assert information_criterion(second, 'aic') == pytest.approx(12.0)
    assert information_criterion(first, 'BIC') == pytest.approx(10.0 + np.log(10.0))
    assert criterion_table([second, first])[0][0] == 1
    # Ties go to the smaller order
    assert select_p([second, first], 'AIC') == 1
    assert select_p([first, _fake_model(2, 5.0)], 'AIC') == 2
    assert select_p([first, _fake_model(2, 8.0)], 'BIC') == 1


def test_selection_errors():
    with pytest.raises(ArgumentError):
        select_p([])
    with pytest.raises(ArgumentError):
        information_criterion(_fake_model(1, 1.0), 'HQ')
    with pytest.raises(ArgumentError):
        select_J(np.ones((5, 2)), tau=0.0)
    with pytest.raises(ArgumentError):
        select_J(np.ones((5, 2)), tau=1.5)


def test_variance_shares_pick_components(rng):
    base = rng.normal(size=(200, 2))
    base = (base - base.mean(axis=0)) / base.std(axis=0, ddof=1)
    scores = base * np.sqrt([3.0, 1.0])
    assert np.allclose(variance_proportions(scores), (0.75, 1.0))
    assert select_J(scores, tau=0.7) == 1
    assert select_J(scores, tau=0.95) == 2

    equal = np.tile([[1.0, -1.0, 1.0, -1.0], [-1.0, 1.0, -1.0, 1.0]], (5, 1))
    assert select_J(equal, tau=0.95) == 4
    assert select_J(SimpleNamespace(moments=SimpleNamespace(alpha=scores)), tau=0.7) == 1


def test_cv_plan_balances_folds(rng):
    panel = random_panel(rng, 6, 7, empty=(3,))
    plan = make_cv_plan(panel, K=3, seed=11)
    assert len(plan.folds) == panel.size
    for t in range(panel.n):
        sizes = np.bincount(plan.folds[panel.rows(t)], minlength=3)
        assert sizes.max() - sizes.min() <= (1 if panel.counts[t] else 0)
    assert np.array_equal(plan.folds, make_cv_plan(panel, K=3, seed=11).folds)
    with pytest.raises(ArgumentError):
        make_cv_plan(panel, K=1)


def test_cross_validation_score(small_problem):
    config = FitConfig(J=1, p=1, penalties=Penalties(0.1, 0.1, 0.1), max_iter=3)
    plan = make_cv_plan(small_problem.panel, K=2, seed=3)
    result = cross_validate(small_problem.panel, small_problem.bases, config, plan=plan)
    assert np.isfinite(result.score) and result.score > 0
    assert len(result.fold_scores) == 2
    assert result.failures == []
    assert cv_score(small_problem.panel, small_problem.bases, config, plan=plan) \
        == pytest.approx(result.score, rel=1e-12)


def test_cv_objective_maps_free_values(small_problem):
    config = FitConfig(J=1, p=1, max_iter=2)
    plan = make_cv_plan(small_problem.panel, K=2, seed=3)
    objective = CVObjective(small_problem.panel, small_problem.bases, config, plan,
                            runner=TaskRunner(1), fixed=(np.nan, 0.5, np.nan))
    assert objective.dim == 2
    assert np.allclose(objective.full([1.0, 2.0]), (1.0, 0.5, 2.0))
    assert objective([400.0, 0.0]) == np.inf

    again = pickle.loads(pickle.dumps(objective))
    assert again.runner is None
    assert np.allclose(again.full([1.0, 2.0]), (1.0, 0.5, 2.0))


def test_demean_cv_predicts_exact_main_effects(small_problem):
    panel, bases = small_problem.panel, small_problem.bases
    theta_mu = bases.spatial.project(lambda x, y: 2.0 - x * y)
    theta_nu = np.array([-0.5, 1.0])
    exact = panel.with_values(panel.B @ theta_mu + panel.per_row(panel.C @ theta_nu))
    plan = make_cv_plan(exact, K=3, seed=1)

    result = demean_cv(exact, bases, Penalties(0.0, 0.0, 0.0), plan)
    assert result.score < 1e-12
    assert len(result.fold_scores) == 3 and result.failures == []
    noisy = demean_cv(panel, bases, Penalties(1.0, 1.0, 1.0), plan)
    assert noisy.score > result.score


def test_demean_objective_maps_free_values(small_problem):
    plan = make_cv_plan(small_problem.panel, K=2, seed=3)
    objective = DemeanObjective(small_problem.panel, small_problem.bases, plan,
                                runner=TaskRunner(1), fixed=(np.nan, -1.0))
    assert objective.dim == 1
    assert np.allclose(objective.full([2.0]), (2.0, -1.0))
    assert objective([400.0]) == np.inf
    expected = demean_cv(small_problem.panel, small_problem.bases, Penalties(1.0, 0.1), plan)
    assert objective([0.0]) == pytest.approx(expected.score, rel=1e-12)

    again = pickle.loads(pickle.dumps(objective))
    assert again.runner is None
    assert again([0.0]) == pytest.approx(expected.score, rel=1e-12)


def test_simplex_finds_quadratic_minimum():
    result = simplex_search(quadratic, budget=1000, tol=1e-5)
    assert result.converged
    assert np.abs(result.lam - TARGET).max() < 1e-3
    assert result.evaluations == len(result.history) <= 1000
    assert np.allclose(result.penalties, 10.0 ** result.lam)


def test_simplex_keeps_start_on_flat_objective():
    start = np.array([0.5, -0.5, 1.0])
    result = simplex_search(constant, start=start, n_grid=0, budget=50)
    assert np.array_equal(result.lam, start)
    assert result.value == 1.0


def test_simplex_respects_budget():
    result = simplex_search(quadratic, start=np.zeros(3), n_grid=0, budget=5, tol=1e-12)
    assert result.evaluations <= 5
    assert not result.converged

    result = simplex_search(quadratic, budget=4)
    assert result.evaluations == 4
    assert not result.converged


def test_simplex_argument_errors():
    with pytest.raises(ArgumentError):
        simplex_search(quadratic, n_grid=0)
    with pytest.raises(ArgumentError):
        simplex_search(quadratic, budget=0)


def test_simplex_grid_through_runner():
    plain = simplex_search(quadratic, budget=40, n_grid=2)
    pooled = simplex_search(quadratic, budget=40, n_grid=2, runner=TaskRunner(1))
    assert np.array_equal(plain.lam, pooled.lam)
    assert plain.evaluations == pooled.evaluations
