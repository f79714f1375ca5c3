# -*- coding: utf-8 -*-

"""
sfpc.mstep
~~~~~~~~~~

Block-wise minimizers of the EM objective. Each update holds the other
parameters at their current values.
"""
import numpy as np
from scipy.linalg import cho_factor, cho_solve, qr, eigh, LinAlgError
from modules.exceptions import ConditioningError
from modules.logger import get_logger
from .ar import stabilize
from .objective import residual_rows, q_value
from . import config

__all__ = ['sphere_minimize', 'update_theta_b', 'update_theta_c', 'update_sigma2',
           'update_sigma_j', 'update_theta_column', 'update_theta_columns',
           'reorthonormalize', 'update_Theta', 'update_K']

ARMIJO_BETA = config.getfloat('sphere', 'beta', fallback=0.5)
ARMIJO_GAMMA = config.getfloat('sphere', 'gamma', fallback=1e-4)
SPHERE_TOL = config.getfloat('sphere', 'tol', fallback=1e-8)
SPHERE_MAX_ITER = config.getint('sphere', 'max_iter', fallback=500)
MAX_BACKTRACKS = config.getint('sphere', 'max_backtracks', fallback=60)
MAX_CONDITION = config.getfloat('ar', 'max_condition', fallback=1e12)
EIGEN_GAP = config.getfloat('identifiability', 'eigen_gap', fallback=1e-10)
SIGMA_FLOOR = config.getfloat('em', 'sigma_floor', fallback=1e-12)
THETA_HALVINGS = config.getint('em', 'theta_halvings', fallback=20)

# Block objectives may rise by this much relative to |q|
BLOCK_TOL = 1e-8

_logger = get_logger(__name__)


def _solve_spd(matrix, rhs, what):
    try:
        return cho_solve(cho_factor(matrix), rhs)
    except (LinAlgError, ValueError):
        raise ConditioningError('Normal matrix of the %s update is not positive definite' % what)


def sphere_minimize(A, m, start, beta=ARMIJO_BETA, gamma=ARMIJO_GAMMA, tol=SPHERE_TOL,
                    max_iter=SPHERE_MAX_ITER, max_backtracks=MAX_BACKTRACKS):
    """
    Minimize f(x) = (x - m)^T A (x - m) over the unit sphere by projected
    gradient descent with Armijo backtracking and normalization retraction.

    :param A: symmetric positive definite matrix
    :param m: unconstrained minimizer
    :param start: starting point, normalized on entry
    :return: the minimizer, objective values per iteration
    :rtype: tuple[numpy.ndarray, list]
    """

    def objective(x):
        diff = x - m
        return float(diff @ A @ diff)

    x = np.asarray(start, dtype=float)
    x = x / np.linalg.norm(x)
    value = objective(x)
    history = [value]

    for _ in range(max_iter):
        grad = A @ (x - m)
        eta = -2.0 * (grad - x * (x @ grad))
        eta_sq = eta @ eta
        if eta_sq == 0.0:
            break
        step = 1.0
        for _ in range(max_backtracks):
            trial = x + step * eta
            trial /= np.linalg.norm(trial)
            trial_value = objective(trial)
            if trial_value <= value - gamma * step * eta_sq:
                break
            step *= beta
        else:
            # No admissible step left at machine resolution
            break
        moved = np.linalg.norm(trial - x)
        x, value = trial, trial_value
        history.append(value)
        if moved < tol:
            break
    return x, history


def update_theta_b(params, moments, panel, bases, penalties):
    """
    New theta_b: the sphere-constrained minimizer of (x - m)^T A (x - m)
    with A = sum_t (theta_c^T c_t)^2 B_t^T B_t + s2 lambda_mu_s Gamma. The
    descent starts from the better of the current theta_b and m / |m|.

    :raises ConditioningError: if A is singular
    """

    weights = panel.C @ params.theta_c
    A = panel.weighted_gram(weights ** 2) + params.sigma2 * penalties.lambda_mu_s * bases.gamma
    target = panel.values - np.einsum('rj,rj->r', panel.B @ params.Theta,
                                      moments.alpha[panel.time_index])
    m = _solve_spd(A, panel.B.T @ (panel.per_row(weights) * target), 'theta_b')

    def objective(x):
        return (x - m) @ A @ (x - m)

    start = params.theta_b
    norm = np.linalg.norm(m)
    if norm > 0 and objective(m / norm) < objective(start):
        start = m / norm
    theta_b, _ = sphere_minimize(A, m, start)
    return theta_b


def update_theta_c(params, moments, panel, bases, penalties):
    """
    Closed-form theta_c given theta_b:
    (sum_t |B_t theta_b|^2 c_t c_t^T + s2 lambda_mu_t P)^-1 sum_t c_t (B_t theta_b)^T (z_t - B_t Theta a_t).
    """

    u = panel.B @ params.theta_b
    target = panel.values - np.einsum('rj,rj->r', panel.B @ params.Theta,
                                      moments.alpha[panel.time_index])
    scale = np.bincount(panel.time_index, weights=u * u, minlength=panel.n)
    cross = np.bincount(panel.time_index, weights=u * target, minlength=panel.n)
    A = panel.C.T @ (panel.C * scale[:, None]) + params.sigma2 * penalties.lambda_mu_t * bases.P
    return _solve_spd(A, panel.C.T @ cross, 'theta_c')


def update_sigma2(params, moments, panel):
    """
    Mean expected squared residual over all observations. May return 0 for
    a perfect fit; the caller floors it.
    """

    loadings = panel.B @ params.Theta
    alpha = moments.alpha[panel.time_index]
    residual = residual_rows(params, panel) - np.einsum('rj,rj->r', loadings, alpha)
    total = residual @ residual + np.einsum('rj,rjk,rk->', loadings,
                                            moments.sigma[panel.time_index], loadings)
    value = float(total / panel.size)
    if value <= 0:
        _logger.warning('Noise variance estimate is %r: degenerate fit' % value)
    return max(value, 0.0)


def update_sigma_j(params, moments):
    """S_j(k_j) / n for every component, with the current K."""
    return np.array([moments.S_hat(j, params.K[:, j]) / moments.n for j in range(params.J)])


def update_theta_column(j, params, moments, panel, bases, penalties):
    """
    Closed-form update of column j of Theta with the other columns fixed.
    """

    alpha = moments.alpha
    sigma = moments.sigma
    weights = alpha[:, j] ** 2 + sigma[:, j, j]
    A = panel.weighted_gram(weights) + params.sigma2 * penalties.lambda_pc * bases.gamma

    rows = residual_rows(params, panel) * alpha[panel.time_index, j]
    for other in range(params.J):
        if other == j:
            continue
        coupling = alpha[:, other] * alpha[:, j] + sigma[:, other, j]
        rows -= (panel.B @ params.Theta[:, other]) * coupling[panel.time_index]
    return _solve_spd(A, panel.B.T @ rows, 'Theta column %d' % (j + 1))


def update_theta_columns(params, moments, panel, bases, penalties):
    """Sequential column updates; each sees the columns already updated."""
    Theta = params.Theta.copy()
    for j in range(params.J):
        Theta[:, j] = update_theta_column(j, params.replace(Theta=Theta), moments,
                                          panel, bases, penalties)
    return Theta


def reorthonormalize(Theta, sigma2_j, moments):
    """
    Replace Theta diag(s2_j) Theta^T by its spectral decomposition
    Q D Q^T: Theta <- Q, s2_j <- diag(D) in decreasing order, and the scores
    are mapped by Q^T Theta.

    :return: Theta, sigma2_j, transformed moments, and whether eigenvalues tie
    """

    Q, R = qr(Theta, mode='economic')
    values, vectors = eigh(R @ np.diag(sigma2_j) @ R.T)
    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]
    ties = bool(np.any(np.abs(np.diff(values)) <= EIGEN_GAP * max(abs(values[0]), 1.0)))
    if ties:
        _logger.warning('Principal component variances tie within %g; column order is arbitrary'
                        % EIGEN_GAP)
    rotation = vectors.T @ R
    return Q @ vectors, np.maximum(values, 0.0), moments.transform(rotation), ties


def update_Theta(params, moments, panel, bases, penalties, halvings=THETA_HALVINGS):
    """
    Column updates followed by re-orthonormalization, taken as one block.
    The rotation does not preserve the roughness penalty or the AR term, so
    when the rotated step raises q_value the step from the current Theta
    towards the updated columns is halved; after ``halvings`` halvings the
    current Theta is kept.

    :return: Theta, sigma2_j, the rotated moments and whether variances tie
    """

    start = q_value(params, moments, penalties, panel, bases)
    limit = start + BLOCK_TOL * max(abs(start), 1.0)
    columns = update_theta_columns(params, moments, panel, bases, penalties)
    step = 1.0
    for attempt in range(halvings + 1):
        Theta = params.Theta + step * (columns - params.Theta)
        Theta, sigma2_j, rotated, ties = reorthonormalize(Theta, params.sigma2_j, moments)
        sigma2_j = np.maximum(sigma2_j, SIGMA_FLOOR)
        trial = params.replace(Theta=Theta, sigma2_j=sigma2_j)
        if q_value(trial, rotated, penalties, panel, bases) <= limit:
            if attempt:
                _logger.info('Theta step halved %d time(s) to keep q from rising' % attempt)
            return Theta, sigma2_j, rotated, ties
        step /= 2.0
    _logger.warning('No Theta step lowers q after %d halvings; Theta kept' % halvings)
    return params.Theta, params.sigma2_j, moments, False


def update_K(moments):
    """
    Weighted least squares k_j = D_p^-1 d_j per component, shrunk towards
    zero when the solution is not stationary.

    :return: K (p, J) and the shrink factor applied to each column
    :raises ConditioningError: if some D_p is singular
    """

    J, p = moments.J, moments.p
    K = np.zeros((p, J))
    factors = np.ones(J)
    for j in range(J):
        Dp = moments.D[j, 1:, 1:]
        d = -moments.D[j, 0, 1:]
        condition = np.linalg.cond(Dp)
        if not np.isfinite(condition) or condition > MAX_CONDITION:
            raise ConditioningError('Lag-product matrix of component %d is singular (cond %g)'
                                    % (j + 1, condition))
        k, factor = stabilize(np.linalg.solve(Dp, d))
        if factor < 1.0:
            _logger.warning('AR coefficients of component %d shrunk by %.2f to stay stationary'
                            % (j + 1, factor))
        K[:, j], factors[j] = k, factor
    return K, factors
