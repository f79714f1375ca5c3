# -*- coding: utf-8 -*-

"""
sfpc.forecast
~~~~~~~~~~~~~

Surfaces from a fitted model: reconstructions at observed times, the mean
and principal component surfaces, and h-step forecasts.
"""
from dataclasses import dataclass
import numpy as np
from modules.exceptions import ArgumentError
from .state_space import state_matrices

__all__ = ['ForecastResult', 'reconstruct', 'mean_surface', 'pc_surfaces', 'forecast']


def _design(model, points):
    return model.bases.spatial.evaluate(points)


def mean_surface(model, t, points):
    """
    b(x, y)^T theta_b theta_c^T c(t); ``t`` may lie beyond the fitted range.
    """

    params = model.params
    c_t = model.bases.temporal.evaluate(float(t))
    return (_design(model, points) @ params.theta_b) * float(c_t @ params.theta_c)


def pc_surfaces(model, points):
    """(N, J) matrix of principal component functions at ``points``."""
    return _design(model, points) @ model.params.Theta


def reconstruct(model, t, points):
    """
    Fitted surface at observed time t (1-based): mean surface plus
    b(x, y)^T Theta alpha_t.

    :raises ArgumentError: if t is outside 1..n
    :raises LocationError: if a point is outside the domain
    """

    if not 1 <= int(t) <= model.n:
        raise ArgumentError('Time %r is outside 1..%d' % (t, model.n))
    design = _design(model, points)
    params = model.params
    c_t = model.bases.temporal.evaluate(float(t))
    return (design @ params.theta_b) * float(c_t @ params.theta_c) \
        + design @ params.Theta @ model.moments.alpha[int(t) - 1]


@dataclass
class ForecastResult:
    times: np.ndarray
    mean: np.ndarray            # (h, N)
    sd: np.ndarray              # (h, N)
    score_mean: np.ndarray      # (h, J)
    score_cov: np.ndarray       # (h, J, J)


def forecast(model, horizon, points):
    """
    Forecast surfaces at times n+1..n+horizon from the final smoothed
    state. Predictive variance combines propagated state uncertainty, AR
    innovations and the observation noise.

    :param FittedModel model: a fitted model
    :param int horizon: number of steps ahead, >= 1
    :param points: (N, 2) points inside the domain
    :rtype: ForecastResult
    """

    if horizon < 1:
        raise ArgumentError('Forecast horizon must be >= 1, got %r' % horizon)

    params = model.params
    J, n = params.J, model.n
    transition, innovation = state_matrices(params)

    design = _design(model, points)
    spatial_mean = design @ params.theta_b
    loadings = design @ params.Theta

    state = model.moments.state_mean[-1].copy()
    cov = model.moments.state_cov[-1].copy()
    times = np.arange(n + 1, n + horizon + 1, dtype=float)
    temporal = model.bases.temporal.evaluate(times) @ params.theta_c

    means, sds = np.zeros((horizon, len(design))), np.zeros((horizon, len(design)))
    score_mean, score_cov = np.zeros((horizon, J)), np.zeros((horizon, J, J))
    for h in range(horizon):
        state = transition @ state
        cov = transition @ cov @ transition.T + innovation
        cov = (cov + cov.T) / 2.0
        score_mean[h], score_cov[h] = state[:J], cov[:J, :J]
        means[h] = spatial_mean * temporal[h] + loadings @ state[:J]
        variance = np.einsum('rj,jk,rk->r', loadings, cov[:J, :J], loadings) + params.sigma2
        sds[h] = np.sqrt(np.maximum(variance, 0.0))
    return ForecastResult(times, means, sds, score_mean, score_cov)

