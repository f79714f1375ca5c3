# -*- coding: utf-8 -*-

from dataclasses import replace
from types import SimpleNamespace
import numpy as np
import pytest
from scipy.linalg import toeplitz
from scipy.stats import multivariate_normal
from modules.exceptions import ArgumentError, ConditioningError, DataError
from modules.sfpc import Penalties, FitConfig, FittedModel, ObservationPanel, LatentMoments, \
    ar_autocovariance, simulate_ar, neg2_complete_loglik, q_value, sphere_minimize, \
    update_theta_b, update_theta_c, update_sigma2, update_sigma_j, update_theta_column, \
    update_theta_columns, reorthonormalize, update_Theta, \
    update_K, e_step, fit, fitted_values, reconstruct, mean_surface, forecast, \
    save_model, load_model, demean_two_stage, main_effects_at
from modules.sfpc.objective import mean_rows
from .conftest import random_panel, random_params

PENALTIES = Penalties(0.01, 0.01, 0.01)

POINTS = np.array([(0.2, 0.3), (0.5, 0.5), (0.8, 0.1), (0.9, 0.9)])


@pytest.fixture(scope='module')
def fitted(small_problem):
    config = FitConfig(J=2, p=1, penalties=PENALTIES, tol=1e-8, max_iter=40)
    return fit(small_problem.panel, small_problem.bases, config)


def _exact_panel(rng, params, scores):
    panel = random_panel(rng, len(scores), 2)
    values = mean_rows(params, panel) + np.einsum(
        'rj,rj->r', panel.B @ params.Theta, scores[panel.time_index])
    return panel.with_values(values)


def test_complete_loglik_of_white_noise_scores(rng):
    params = random_params(rng, 1, 1, sigma2=1.0).replace(K=np.zeros((1, 1)),
                                                          sigma2_j=np.array([1.0]))
    scores = np.array([[1.0], [-1.0], [2.0]])
    panel = _exact_panel(rng, params, scores)
    assert neg2_complete_loglik(params, panel, scores) == pytest.approx(6.0)


@pytest.mark.parametrize('k', [[0.5], [0.4, 0.3]])
def test_complete_loglik_is_the_exact_ar_density(rng, k):
    p, n = len(k), 8
    params = random_params(rng, 1, p, sigma2=1.0).replace(
        K=np.array(k).reshape(p, 1), sigma2_j=np.array([1.7]))
    scores = rng.normal(size=(n, 1))
    panel = _exact_panel(rng, params, scores)

    cov = 1.7 * toeplitz(ar_autocovariance(k, n - 1))
    expected = -2.0 * multivariate_normal(np.zeros(n), cov).logpdf(scores[:, 0]) \
        - n * np.log(2.0 * np.pi)
    assert neg2_complete_loglik(params, panel, scores) == pytest.approx(expected, rel=1e-9)


def test_sphere_minimize_with_identity():
    m = np.array([3.0, 4.0, 0.0])
    x, history = sphere_minimize(np.eye(3), m, (0.0, 0.0, 1.0))
    assert np.allclose(x, m / 5.0, atol=1e-6)
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_sphere_minimize_is_stationary(rng):
    root = rng.normal(size=(5, 5))
    A = root @ root.T + np.eye(5)
    m = rng.normal(size=5) * 0.3
    x, history = sphere_minimize(A, m, rng.normal(size=5))
    grad = A @ (x - m)
    assert np.linalg.norm(x) == pytest.approx(1.0)
    assert np.linalg.norm(grad - x * (x @ grad)) < 1e-5 * np.linalg.norm(grad)
    assert all(b <= a for a, b in zip(history, history[1:]))


def _q(problem, moments, **changes):
    return q_value(problem.params.replace(**changes), moments, PENALTIES,
                   problem.panel, problem.bases)


def test_block_updates_are_minimizers(small_problem):
    problem = small_problem
    params = problem.params
    moments = e_step(params, problem.panel)
    args = (moments, problem.panel, problem.bases, PENALTIES)
    eps = 1e-4

    theta_c = update_theta_c(params, *args)
    base = _q(problem, moments, theta_c=theta_c)
    for i in range(len(theta_c)):
        for sign in (-1, 1):
            step = theta_c.copy()
            step[i] += sign * eps
            assert _q(problem, moments, theta_c=step) >= base - 1e-9 * abs(base)

    column = update_theta_column(1, params, *args)
    Theta = params.Theta.copy()
    Theta[:, 1] = column
    base = _q(problem, moments, Theta=Theta)
    for i in range(len(column)):
        step = Theta.copy()
        step[i, 1] += eps
        assert _q(problem, moments, Theta=step) >= base - 1e-9 * abs(base)

    sigma2 = update_sigma2(params, moments, problem.panel)
    base = _q(problem, moments, sigma2=sigma2)
    for factor in (0.999, 1.001):
        assert _q(problem, moments, sigma2=sigma2 * factor) >= base


def test_theta_update_rotates_to_orthonormal_columns(small_problem):
    problem = small_problem
    params = problem.params
    moments = e_step(params, problem.panel)
    args = (moments, problem.panel, problem.bases, PENALTIES)

    columns = update_theta_columns(params, *args)
    Theta, sigma2_j, rotated, ties = reorthonormalize(columns, params.sigma2_j, moments)
    assert not ties
    assert np.allclose(Theta.T @ Theta, np.eye(params.J), atol=1e-10)
    assert np.all(np.diff(sigma2_j) <= 0)
    assert np.allclose(Theta @ np.diag(sigma2_j) @ Theta.T,
                       columns @ np.diag(params.sigma2_j) @ columns.T, atol=1e-10)
    # The surfaces carried by the scores are unchanged
    assert np.allclose(rotated.alpha @ Theta.T, moments.alpha @ columns.T, atol=1e-10)


def test_theta_block_never_raises_the_objective(small_problem, rng):
    problem = small_problem
    for _ in range(5):
        noise = 0.3 * rng.normal(size=problem.params.Theta.shape)
        Theta, _ = np.linalg.qr(problem.params.Theta + noise)
        params = problem.params.replace(Theta=Theta, K=np.array([[0.9, -0.5]]))
        moments = e_step(params, problem.panel)
        before = q_value(params, moments, PENALTIES, problem.panel, problem.bases)

        Theta, sigma2_j, rotated, _ = update_Theta(params, moments, problem.panel,
                                                   problem.bases, PENALTIES)
        after = q_value(params.replace(Theta=Theta, sigma2_j=sigma2_j), rotated, PENALTIES,
                        problem.panel, problem.bases)
        assert np.allclose(Theta.T @ Theta, np.eye(params.J), atol=1e-10)
        assert np.all(np.diff(sigma2_j) <= 0)
        assert after <= before + 1e-8 * max(abs(before), 1.0)


def test_theta_block_keeps_theta_when_no_step_helps(small_problem, monkeypatch):
    problem = small_problem
    params = problem.params
    moments = e_step(params, problem.panel)
    # Columns that are far worse than the current Theta in every direction
    monkeypatch.setattr('modules.sfpc.mstep.update_theta_columns',
                        lambda *args: params.Theta + 50.0)
    Theta, sigma2_j, rotated, ties = update_Theta(params, moments, problem.panel, problem.bases,
                                                  PENALTIES, halvings=2)
    assert Theta is params.Theta and sigma2_j is params.sigma2_j
    assert rotated is moments and not ties


def test_theta_b_update_is_a_sphere_minimizer(small_problem, rng):
    problem = small_problem
    moments = e_step(problem.params, problem.panel)
    theta_b = update_theta_b(problem.params, moments, problem.panel, problem.bases, PENALTIES)
    assert np.linalg.norm(theta_b) == pytest.approx(1.0)

    base = _q(problem, moments, theta_b=theta_b)
    for _ in range(10):
        direction = rng.normal(size=len(theta_b))
        direction -= theta_b * (theta_b @ direction)
        trial = theta_b + 1e-3 * direction / np.linalg.norm(direction)
        assert _q(problem, moments, theta_b=trial / np.linalg.norm(trial)) >= base - 1e-7 * abs(base)


def test_sigma_j_from_lag_sums():
    n = 12
    state = np.column_stack([np.ones(n), np.ones(n)])
    moments = LatentMoments(state, np.zeros((n, 2, 2)), 1, 1)
    params = SimpleNamespace(J=1, K=np.zeros((1, 1)))
    assert np.allclose(update_sigma_j(params, moments), [1.0])


def test_sigma_j_update_zeroes_the_objective_gradient(rng):
    bases = SimpleNamespace(gamma=np.eye(4), P=np.eye(2))
    for _ in range(20):
        panel = random_panel(rng, 12, 3)
        params = random_params(rng, 2, 2)
        moments = e_step(params, panel)
        sigma2_j = update_sigma_j(params, moments)
        base = q_value(params.replace(sigma2_j=sigma2_j), moments, PENALTIES, panel, bases)
        for j in range(params.J):
            h = 1e-5 * sigma2_j[j]
            values = []
            for sign in (1.0, -1.0):
                shifted = sigma2_j.copy()
                shifted[j] += sign * h
                values.append(q_value(params.replace(sigma2_j=shifted), moments, PENALTIES,
                                      panel, bases))
            gradient = (values[0] - values[1]) / (2.0 * h)
            # n / s2_j is the size of either term of the derivative
            assert abs(gradient) <= 1e-4 * moments.n / sigma2_j[j]
            assert min(values) >= base


def test_theta_b_update_never_raises_the_objective(small_problem, rng):
    problem = small_problem
    for _ in range(5):
        theta_b = problem.params.theta_b + 0.5 * rng.normal(size=len(problem.params.theta_b))
        params = problem.params.replace(theta_b=theta_b / np.linalg.norm(theta_b))
        moments = e_step(params, problem.panel)
        before = q_value(params, moments, PENALTIES, problem.panel, problem.bases)
        updated = update_theta_b(params, moments, problem.panel, problem.bases, PENALTIES)
        after = q_value(params.replace(theta_b=updated), moments, PENALTIES,
                        problem.panel, problem.bases)
        assert after <= before + 1e-10 * abs(before)


def test_ar_update_recovers_coefficient(rng):
    scores = simulate_ar([0.7], 1.0, 10000, rng)
    state = np.column_stack([scores, np.concatenate([[0.0], scores[:-1]])])
    moments = LatentMoments(state, np.zeros((len(scores), 2, 2)), 1, 1)
    K, factors = update_K(moments)
    assert K[0, 0] == pytest.approx(0.7, abs=0.02)
    assert factors[0] == 1.0
    for shift in (-1e-3, 1e-3):
        assert moments.S_hat(0, K[:, 0] + shift) > moments.S_hat(0, K[:, 0])


def test_ar_update_rejects_singular_lag_sums():
    moments = LatentMoments(np.zeros((10, 2)), np.zeros((10, 2, 2)), 1, 1)
    with pytest.raises(ConditioningError):
        update_K(moments)


def test_white_noise_scores_give_independent_posteriors(rng):
    panel = random_panel(rng, 5, 4)
    params = random_params(rng, 2, 1).replace(K=np.zeros((1, 2)))
    moments = e_step(params, panel)
    residual = panel.values - mean_rows(params, panel)
    loadings = panel.B @ params.Theta
    for t in range(panel.n):
        L, r = loadings[panel.rows(t)], residual[panel.rows(t)]
        precision = L.T @ L / params.sigma2 + np.diag(1.0 / params.sigma2_j)
        expected = np.linalg.solve(precision, L.T @ r / params.sigma2)
        assert np.allclose(moments.alpha[t], expected, atol=1e-9)
        assert np.allclose(moments.sigma[t], np.linalg.inv(precision), atol=1e-9)


def test_fit_keeps_identifiability(fitted):
    params = fitted.params
    assert params.invariant_violations() == []
    assert len(fitted.trace) == fitted.iterations
    assert np.all(np.isfinite(fitted.q_values))
    assert abs(params.K[0, 0]) < 1.0
    assert params.sigma2 < 0.2
    assert np.var(fitted.residuals) < 0.2


def test_fit_blocks_do_not_raise_the_objective(fitted):
    # Only the K update, which drops log|M_j|, may raise q
    for item in fitted.trace:
        previous = item.start_q
        for step in item.steps:
            if step.block != 'K':
                assert step.q <= previous + 1e-8 * max(abs(previous), 1.0), step.block
            previous = step.q
    assert [step.block for step in fitted.trace[-1].steps] == \
        ['theta_b', 'theta_c', 'sigma2', 'Theta', 'sigma_j', 'K']
    assert not [w for w in fitted.warnings if 'raised q' in w]


def test_fit_with_frozen_ar_coefficients(small_problem):
    config = FitConfig(J=2, p=1, penalties=PENALTIES, max_iter=5, freeze_K=True)
    model = fit(small_problem.panel, small_problem.bases, config)
    assert np.all(model.params.K == 0)
    assert all(step.block != 'K' for step in model.trace[-1].steps)


def test_fit_rejects_empty_panel_and_bad_config(small_problem):
    empty = ObservationPanel(np.zeros((0, 2)), np.zeros(0), [0, 0, 0])
    with pytest.raises(DataError):
        fit(empty, small_problem.bases)
    with pytest.raises(ArgumentError):
        FitConfig(J=0)
    with pytest.raises(ArgumentError):
        FitConfig(p=0)


def test_reconstruct_matches_fitted_values(fitted, small_problem):
    panel = small_problem.panel
    values = fitted_values(fitted, panel)
    for t in (1, 17, 40):
        rows = panel.rows(t - 1)
        assert np.allclose(reconstruct(fitted, t, panel.locations[rows]), values[rows])
    with pytest.raises(ArgumentError):
        reconstruct(fitted, 0, POINTS)
    with pytest.raises(ArgumentError):
        reconstruct(fitted, 41, POINTS)


def test_forecast_without_dynamics(small_problem):
    config = FitConfig(J=2, p=1, penalties=PENALTIES, max_iter=3, freeze_K=True)
    model = fit(small_problem.panel, small_problem.bases, config)
    result = forecast(model, 3, POINTS)
    assert result.mean.shape == (3, len(POINTS))
    assert np.allclose(result.score_mean, 0.0)
    assert np.allclose(result.sd[0], result.sd[2])
    for h in range(3):
        assert np.allclose(result.mean[h], mean_surface(model, model.n + h + 1, POINTS))
    with pytest.raises(ArgumentError):
        forecast(model, 0, POINTS)


def test_two_step_ar1_forecast(small_problem):
    problem = small_problem
    n = problem.panel.n
    params = problem.params.replace(Theta=problem.params.Theta[:, :1], K=np.array([[0.5]]),
                                    sigma2=0.1, sigma2_j=np.array([2.0]))
    state = np.zeros((n, 2))
    state[-1] = (2.0, 1.0)
    moments = LatentMoments(state, np.zeros((n, 2, 2)), 1, 1)
    model = FittedModel(params, moments, problem.bases, FitConfig(J=1, p=1), [], True, 1,
                        np.zeros(problem.panel.size))

    result = forecast(model, 2, POINTS)
    assert result.score_mean[:, 0] == pytest.approx((1.0, 0.5))
    assert result.score_cov[:, 0, 0] == pytest.approx((2.0, 2.5))
    loading = problem.bases.spatial.evaluate(POINTS) @ params.Theta[:, 0]
    assert np.allclose(result.sd[1], np.sqrt(2.5 * loading ** 2 + 0.1))
    assert np.allclose(result.mean[1], mean_surface(model, n + 2, POINTS) + 0.5 * loading)


def test_archive_round_trip(fitted, tmp_path):
    path = str(tmp_path / 'model')
    save_model(fitted, path)
    again = load_model(path)
    for name in ('theta_b', 'theta_c', 'Theta', 'K', 'sigma2_j'):
        assert np.array_equal(getattr(again.params, name), getattr(fitted.params, name))
    assert again.params.sigma2 == fitted.params.sigma2
    assert again.converged == fitted.converged
    assert [item.q for item in again.trace] == [item.q for item in fitted.trace]
    assert np.array_equal(forecast(again, 2, POINTS).mean, forecast(fitted, 2, POINTS).mean)
    with pytest.raises(DataError):
        load_model(str(tmp_path / 'missing'))


def test_demean_recovers_additive_effects(small_problem):
    panel, bases = small_problem.panel, small_problem.bases
    theta_mu = bases.spatial.project(lambda x, y: 1.0 + x + y ** 2)
    times = np.arange(1, panel.n + 1) / float(panel.n)
    theta_nu = np.array([-times.mean(), 1.0])
    values = panel.B @ theta_mu + panel.per_row(panel.C @ theta_nu)

    result = demean_two_stage(panel.with_values(values), bases, Penalties(0.0, 0.0, 0.0))
    assert np.allclose(result.fitted, values, atol=1e-8)
    assert np.allclose(result.theta_nu, theta_nu, atol=1e-8)
    assert np.abs(result.panel.values).max() < 1e-8


def test_demean_absorbs_a_constant_shift(small_problem):
    panel, bases = small_problem.panel, small_problem.bases
    penalties = Penalties(1.0, 1.0, 1.0)
    first = demean_two_stage(panel, bases, penalties)
    second = demean_two_stage(panel.with_values(panel.values + 3.0), bases, penalties)
    assert np.allclose(second.panel.values, first.panel.values, atol=1e-8)
    assert np.allclose(second.theta_nu, first.theta_nu, atol=1e-8)


def test_archive_keeps_main_effects_only_for_demeaned_models(fitted, small_problem, tmp_path):
    path = str(tmp_path / 'model')
    effects = demean_two_stage(small_problem.panel, small_problem.bases, Penalties(1.0, 1.0, 1.0))
    demeaned = replace(fitted, main_effects=(effects.theta_mu, effects.theta_nu))
    save_model(demeaned, path)
    again = load_model(path)
    assert np.array_equal(again.main_effects[0], effects.theta_mu)
    assert np.array_equal(again.main_effects[1], effects.theta_nu)
    assert [item.start_q for item in again.trace] == [item.start_q for item in fitted.trace]

    # Rewriting a plain model in place drops the stored effects
    save_model(fitted, path)
    assert load_model(path).main_effects is None
    assert not (tmp_path / 'model' / 'demean_mu.bin').exists()


def test_main_effects_at_points_and_times(small_problem):
    bases = small_problem.bases
    theta_mu = bases.spatial.project(lambda x, y: x - y)
    theta_nu = np.array([0.5, -1.0])
    spatial, temporal = main_effects_at(bases, (theta_mu, theta_nu), POINTS, [1, 2])
    assert np.allclose(spatial, bases.spatial.evaluate(POINTS) @ theta_mu)
    assert np.allclose(temporal, bases.temporal.evaluate(np.array([1.0, 2.0])) @ theta_nu)
    spatial, temporal = main_effects_at(bases, None, POINTS, [1, 2, 3])
    assert np.array_equal(spatial, np.zeros(len(POINTS)))
    assert np.array_equal(temporal, np.zeros(3))
