# -*- coding: utf-8 -*-

"""
sfpc.objective
~~~~~~~~~~~~~~

Complete-data -2 log likelihood and its conditional expectation (the EM
objective), split into the blocks the M-step minimizes. Additive 2*pi
constants are left out.
"""
import numpy as np
from .ar import ar_precision
from .state_space import lag_product_sums

__all__ = ['neg2_complete_loglik', 'q_value', 'data_term', 'ar_term', 'penalty_term',
           'mean_rows', 'residual_rows']


def mean_rows(params, panel):
    """Mean surface b^T theta_b theta_c^T c_t at every observation."""
    return (panel.B @ params.theta_b) * panel.per_row(panel.C @ params.theta_c)


def residual_rows(params, panel):
    """Observations minus the mean surface."""
    return panel.values - mean_rows(params, panel)


def data_term(params, panel, alpha, sigma=None):
    """
    sum_t n_t log s2 + (|r_t - B_t Theta a_t|^2 + tr(B_t Theta S_t Theta^T B_t^T)) / s2
    """

    loadings = panel.B @ params.Theta
    fitted = np.einsum('rj,rj->r', loadings, alpha[panel.time_index])
    total = np.sum((residual_rows(params, panel) - fitted) ** 2)
    if sigma is not None:
        total += np.einsum('rj,rjk,rk->', loadings, sigma[panel.time_index], loadings)
    return panel.size * np.log(params.sigma2) + total / params.sigma2


def ar_term(params, D, n, logdet=True):
    """
    sum_j n log s2_j - log|M_j| + S_j(k_j) / s2_j, with S_j from the
    lag-product matrices ``D``.
    """

    total = 0.0
    for j in range(params.J):
        k = params.K[:, j]
        vec = np.concatenate([[1.0], k])
        total += n * np.log(params.sigma2_j[j]) + (vec @ D[j] @ vec) / params.sigma2_j[j]
        if logdet:
            total -= ar_precision(k)[1]
    return float(total)


def penalty_term(params, penalties, bases):
    gamma = bases.gamma
    return float(penalties.lambda_mu_s * params.theta_b @ gamma @ params.theta_b
                 + penalties.lambda_mu_t * params.theta_c @ bases.P @ params.theta_c
                 + penalties.lambda_pc * np.trace(params.Theta.T @ gamma @ params.Theta))


def neg2_complete_loglik(params, panel, scores):
    """
    -2 log p(z, alpha) for known scores, with the exact stationary AR(p)
    likelihood of each score series.

    :param ModelParams params: parameters
    :param ObservationPanel panel: panel with its design cached
    :param scores: (n, J) scores
    :raises StationarityError: if a column of K is not stationary
    """

    scores = np.asarray(scores, dtype=float).reshape(panel.n, params.J)
    D = lag_product_sums(scores, None, params.J, params.p)
    return float(data_term(params, panel, scores) + ar_term(params, D, panel.n))


def q_value(params, moments, penalties, panel, bases):
    """
    Expected penalized -2 log likelihood given smoothed moments.

    :param ModelParams params: parameters to evaluate
    :param LatentMoments moments: E-step output
    :param Penalties penalties: smoothing parameters
    :param ObservationPanel panel: panel with its design cached
    :param ModelBases bases: supplies Gamma and P
    """

    return float(data_term(params, panel, moments.alpha, moments.sigma)
                 + ar_term(params, moments.D, moments.n)
                 + penalty_term(params, penalties, bases))
