# -*- coding: utf-8 -*-
"""
Brute-force references for the recursive and closed-form code paths.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss


def score_prior_cov(K, sigma2_j, n):
    """
    Joint covariance of the stacked scores (component major, then time)
    when the pre-sample scores are exactly zero.
    """

    K = np.atleast_2d(K)
    p, J = K.shape
    blocks = []
    for j in range(J):
        A = np.eye(n)
        for lag in range(1, p + 1):
            for t in range(lag, n):
                A[t, t - lag] = -K[lag - 1, j]
        inverse = np.linalg.inv(A)
        blocks.append(sigma2_j[j] * inverse @ inverse.T)
    cov = np.zeros((n * J, n * J))
    for j, block in enumerate(blocks):
        cov[j * n:(j + 1) * n, j * n:(j + 1) * n] = block
    return cov


def dense_posterior(params, panel):
    """
    Posterior of the stacked scores given every observation, and the
    observed-data -2 log density, by dense Gaussian conditioning.

    :return: mean (n, J), joint covariance (n*J, n*J), -2 log p(z)
    """

    n, J = panel.n, params.J
    prior = score_prior_cov(params.K, params.sigma2_j, n)
    loadings = panel.B @ params.Theta
    offsets = (panel.B @ params.theta_b) * (panel.C @ params.theta_c)[panel.time_index]

    # z = offsets + H a + noise, a stacked component major
    H = np.zeros((panel.size, n * J))
    for row, t in enumerate(panel.time_index):
        for j in range(J):
            H[row, j * n + t] = loadings[row, j]
    S = H @ prior @ H.T + params.sigma2 * np.eye(panel.size)
    resid = panel.values - offsets
    gain = prior @ H.T @ np.linalg.inv(S)
    mean = gain @ resid
    cov = prior - gain @ H @ prior
    _, logdet = np.linalg.slogdet(S)
    neg2 = panel.size * np.log(2.0 * np.pi) + logdet + resid @ np.linalg.solve(S, resid)
    return mean.reshape(J, n).T, cov, float(neg2)


def expected_lag_sums(mean, cov, J, p):
    """
    Lag-product matrices from the posterior mean (n, J) and joint covariance,
    written out pair by pair.
    """

    n = len(mean)
    D = np.zeros((J, p + 1, p + 1))
    for j in range(J):
        for i in range(1, p + 2):
            for k in range(1, p + 2):
                lo, hi = min(i, k), max(i, k)
                total = 0.0
                for s in range(n + 2 - i - k):
                    a, b = lo - 1 + s, hi - 1 + s
                    total += mean[a, j] * mean[b, j] + cov[j * n + a, j * n + b]
                D[j, i - 1, k - 1] = -total if (i == 1) != (k == 1) else total
    return D


def gauss_interval(func, lower, upper, panels=200, points=10):
    """Composite Gauss-Legendre integral of a vectorized ``func`` on [lower, upper]."""
    x, w = leggauss(points)
    edges = np.linspace(lower, upper, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        nodes = (b - a) / 2.0 * x + (a + b) / 2.0
        total = total + np.tensordot((b - a) / 2.0 * w, func(nodes), axes=1)
    return total
