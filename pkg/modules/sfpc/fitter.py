# -*- coding: utf-8 -*-

"""
sfpc.fitter
~~~~~~~~~~~

Penalized EM for the sFPC model: initialization, the E-step, the ordered
M-step and convergence control.
"""
import numpy as np
from modules.exceptions import ArgumentError, DataError, FitError, SfpcException
from modules.logger import get_logger
from .model import ModelParams, FitConfig, BlockStep, IterationTrace, FittedModel
from .state_space import StateSpaceSpec, kalman_filter, kalman_smoother, extract_moments
from .objective import q_value, residual_rows, mean_rows
from .mstep import BLOCK_TOL, _solve_spd, update_theta_b, update_theta_c, \
    update_sigma2, update_sigma_j, update_Theta, update_K
from . import config

__all__ = ['e_step', 'initialize', 'fit', 'canonicalize', 'sort_components', 'fitted_values']

INIT_RIDGE = config.getfloat('em', 'init_ridge', fallback=1e-6)
INIT_MEAN_SWEEPS = config.getint('em', 'init_mean_sweeps', fallback=10)
SIGMA_FLOOR = config.getfloat('em', 'sigma_floor', fallback=1e-12)
EIGEN_GAP = config.getfloat('identifiability', 'eigen_gap', fallback=1e-10)

# The K update drops log|M_j|, so its q_value may rise
EXEMPT_BLOCKS = ('K',)

# Invariant tolerance for Theta^T Theta = I
ORTHO_TOL = 1e-8

_logger = get_logger(__name__)


def e_step(params, panel, stationary_init=False):
    """
    Smoothed score moments under ``params``.

    :rtype: LatentMoments
    """

    spec = StateSpaceSpec.from_params(params, panel, stationary_init)
    filtered = kalman_filter(spec, panel)
    return extract_moments(kalman_smoother(spec, filtered), spec)


def _floor(value, scale):
    return max(value, SIGMA_FLOOR * max(scale, 1.0))


def _initial_mean(panel, bases, penalties, sigma2):
    # Alternate theta_b / theta_c with no principal components
    n_b = bases.n_b
    weights = np.ones(panel.n)
    A = panel.weighted_gram(weights) + sigma2 * penalties.lambda_mu_s * bases.gamma \
        + INIT_RIDGE * np.eye(n_b)
    theta_b = _solve_spd(A, panel.B.T @ panel.values, 'initial mean')
    norm = np.linalg.norm(theta_b)
    theta_b = theta_b / norm if norm > 0 else np.eye(n_b)[0]

    params = ModelParams(theta_b, np.zeros(bases.n_c), np.zeros((n_b, 1)),
                         np.zeros((1, 1)), sigma2, np.ones(1))
    zero_alpha = _ZeroMoments(panel.n)
    for _ in range(INIT_MEAN_SWEEPS):
        theta_c = update_theta_c(params, zero_alpha, panel, bases, penalties)
        params = params.replace(theta_c=theta_c)
        if not np.any(panel.C @ theta_c):
            break
        params = params.replace(theta_b=update_theta_b(params, zero_alpha, panel, bases, penalties))
    return params.theta_b, params.theta_c


class _ZeroMoments:
    def __init__(self, n):
        self.alpha = np.zeros((n, 1))


def initialize(panel, bases, fit_config):
    """
    Warm start: penalized mean fit, per-time ridge regression of the
    residuals, top-J singular vectors for Theta, score variances for
    sigma2_j and K = 0.

    :rtype: ModelParams
    """

    J, p, penalties = fit_config.J, fit_config.p, fit_config.penalties
    scale = float(np.var(panel.values)) if panel.size > 1 else 1.0
    sigma2 = scale if scale > 0 else 1.0
    theta_b, theta_c = _initial_mean(panel, bases, penalties, sigma2)
    residual = panel.values - (panel.B @ theta_b) * panel.per_row(panel.C @ theta_c)

    n_b = bases.n_b
    ridge = sigma2 * penalties.lambda_pc * bases.gamma + INIT_RIDGE * np.eye(n_b)
    coefs = np.zeros((n_b, panel.n))
    for t in range(panel.n):
        if panel.counts[t]:
            Bt = panel.B_t(t)
            coefs[:, t] = _solve_spd(Bt.T @ Bt + ridge, Bt.T @ residual[panel.rows(t)],
                                     'initial scores')
    left, _, _ = np.linalg.svd(coefs, full_matrices=False)
    if left.shape[1] < J:
        raise ArgumentError('Cannot initialize %d components from %d basis functions'
                            % (J, left.shape[1]))
    Theta = left[:, :J]
    scores = coefs.T @ Theta
    observed = panel.counts > 0
    sigma2_j = np.var(scores[observed], axis=0) if observed.sum() > 1 else np.ones(J)
    order = np.argsort(sigma2_j)[::-1]
    Theta, scores, sigma2_j = Theta[:, order], scores[:, order], sigma2_j[order]
    sigma2_j = np.maximum(sigma2_j, SIGMA_FLOOR * max(scale, 1.0))
    for j in range(1, J):
        if sigma2_j[j] >= sigma2_j[j - 1]:
            sigma2_j[j] = sigma2_j[j - 1] * (1.0 - 1e-3)

    fitted = np.einsum('rj,rj->r', panel.B @ Theta, scores[panel.time_index])
    noise = float(np.mean((residual - fitted) ** 2)) if panel.size else scale
    params = ModelParams(theta_b, theta_c, Theta, np.zeros((p, J)),
                         _floor(noise, scale), sigma2_j)
    _logger.info('Initialized: sigma2=%.4g, sigma2_j=%s' % (params.sigma2, np.round(sigma2_j, 6).tolist()))
    return params


def sort_components(params, moments):
    """
    Order components by decreasing sigma2_j, permuting Theta, K and the
    moments together.

    :return: params, moments and whether two variances tie
    """

    order = np.argsort(params.sigma2_j, kind='stable')[::-1]
    values = params.sigma2_j[order]
    ties = bool(np.any(np.diff(values) >= -EIGEN_GAP * max(abs(values[0]), 1.0)))
    if np.array_equal(order, np.arange(params.J)):
        return params, moments, ties
    permutation = np.eye(params.J)[order]
    params = params.replace(Theta=params.Theta[:, order], K=params.K[:, order], sigma2_j=values)
    return params, moments.transform(permutation), ties


def canonicalize(params, moments):
    """
    Make the largest-magnitude entry of theta_b and of every Theta column
    positive. Flipping theta_b flips theta_c with it.
    """

    theta_b, theta_c = params.theta_b, params.theta_c
    if theta_b[np.argmax(np.abs(theta_b))] < 0:
        theta_b, theta_c = -theta_b, -theta_c
    pivots = params.Theta[np.argmax(np.abs(params.Theta), axis=0), np.arange(params.J)]
    signs = np.where(pivots < 0, -1.0, 1.0)
    params = params.replace(theta_b=theta_b, theta_c=theta_c, Theta=params.Theta * signs)
    if np.any(signs < 0):
        moments = moments.transform(np.diag(signs))
    return params, moments


def _m_step(params, moments, panel, bases, fit_config, warnings):
    penalties = fit_config.penalties
    scale = float(np.var(panel.values)) if panel.size > 1 else 1.0
    steps = []

    def record(block):
        steps.append(BlockStep(block, q_value(params, moments, penalties, panel, bases)))

    params = params.replace(theta_b=update_theta_b(params, moments, panel, bases, penalties))
    record('theta_b')
    params = params.replace(theta_c=update_theta_c(params, moments, panel, bases, penalties))
    record('theta_c')

    sigma2 = update_sigma2(params, moments, panel)
    if sigma2 < SIGMA_FLOOR * max(scale, 1.0):
        warnings.append('noise variance floored at %g (degenerate fit)' % _floor(sigma2, scale))
    params = params.replace(sigma2=_floor(sigma2, scale))
    record('sigma2')

    Theta, sigma2_j, moments, ties = update_Theta(params, moments, panel, bases, penalties)
    if ties:
        warnings.append('principal component variances tie; column order is arbitrary')
    params = params.replace(Theta=Theta, sigma2_j=sigma2_j)
    record('Theta')

    sigma2_j = np.array([_floor(value, scale) for value in update_sigma_j(params, moments)])
    params, moments, ties = sort_components(params.replace(sigma2_j=sigma2_j), moments)
    if ties:
        _logger.warning('Score variances tie after the sigma_j update')
        warnings.append('score variances tie after the sigma_j update')
    record('sigma_j')

    if not fit_config.freeze_K:
        K, factors = update_K(moments)
        if np.any(factors < 1.0):
            warnings.append('AR coefficients shrunk to stay stationary')
        params = params.replace(K=K)
        record('K')

    params, moments = canonicalize(params, moments)
    return params, moments, steps


def _check_steps(iteration, steps, start_q):
    # Messages for blocks other than K that raised q_value
    previous, problems = start_q, []
    for step in steps:
        if step.block not in EXEMPT_BLOCKS and step.q > previous + BLOCK_TOL * max(abs(previous), 1.0):
            problems.append('%s update raised q from %.10g to %.10g' % (step.block, previous, step.q))
            _logger.warning('Iteration %d: %s' % (iteration, problems[-1]))
        previous = step.q
    return problems


def fit(panel, bases, fit_config=None):
    """
    Fit the sFPC model by penalized EM.

    :param ObservationPanel panel: the data; the design is attached if missing
    :param ModelBases bases: spatial and temporal bases
    :param FitConfig fit_config: J, p, penalties, stopping rule, frozen K
    :rtype: FittedModel
    :raises DataError: on an empty panel
    :raises FitError: when q_value or the parameters become non-finite
    """

    fit_config = fit_config or FitConfig()
    if panel.size == 0:
        raise DataError('Cannot fit an empty panel')
    if not panel.has_design:
        panel = panel.with_design(bases.spatial, bases.temporal)

    params = fit_config.init if fit_config.init is not None else initialize(panel, bases, fit_config)
    if fit_config.freeze_K:
        params = params.replace(K=np.zeros_like(params.K))
    penalties = fit_config.penalties
    trace, warnings = [], []
    converged = False
    iteration = 0
    previous_q = None

    try:
        for iteration in range(1, fit_config.max_iter + 1):
            moments = e_step(params, panel, fit_config.stationary_init)
            start_q = q_value(params, moments, penalties, panel, bases)
            params, moments, steps = _m_step(params, moments, panel, bases, fit_config, warnings)
            q = steps[-1].q
            trace.append(IterationTrace(iteration, q, moments.neg2_loglik, steps, start_q))
            if not np.isfinite(q) or not all(np.all(np.isfinite(value)) for value in
                                             (params.theta_b, params.theta_c, params.Theta,
                                              params.K, params.sigma2_j)):
                raise FitError('EM diverged at iteration %d' % iteration, trace=trace)
            warnings.extend(_check_steps(iteration, steps, start_q))
            problems = params.invariant_violations(ORTHO_TOL)
            if problems:
                _logger.warning('Iteration %d: %s' % (iteration, '; '.join(problems)))
            _logger.info('EM iteration %d: q=%.8g, -2loglik=%.8g' % (iteration, q, moments.neg2_loglik))
            if previous_q is not None and abs(previous_q - q) <= fit_config.tol * abs(previous_q):
                converged = True
                break
            previous_q = q
        moments = e_step(params, panel, fit_config.stationary_init)
    except FitError:
        raise
    except SfpcException as e:
        raise FitError('EM failed at iteration %d: %s' % (iteration, e), trace=trace)

    if not converged:
        _logger.warning('EM stopped after %d iterations without converging' % iteration)
    residuals = residual_rows(params, panel) - np.einsum(
        'rj,rj->r', panel.B @ params.Theta, moments.alpha[panel.time_index])
    return FittedModel(params, moments, bases, fit_config, trace, converged, iteration,
                       residuals, sorted(set(warnings)))


def fitted_values(model, panel):
    """Mean surface plus smoothed principal components at each observation."""
    return mean_rows(model.params, panel) + np.einsum(
        'rj,rj->r', panel.B @ model.params.Theta, model.moments.alpha[panel.time_index])

