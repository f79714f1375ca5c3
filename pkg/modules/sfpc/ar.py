# -*- coding: utf-8 -*-

"""
sfpc.ar
~~~~~~~

Stationary AR(p) helpers for the latent score series.
"""
import numpy as np
from scipy.linalg import toeplitz, cho_factor, cho_solve, LinAlgError
from scipy.signal import lfilter
from modules.exceptions import StationarityError, ConditioningError
from . import config

__all__ = ['companion', 'is_stationary', 'stabilize', 'ar_autocovariance',
           'ar_precision', 'simulate_ar', 'simulate_scores']

ROOT_MARGIN = config.getfloat('ar', 'root_margin', fallback=1.01)
SHRINK_STEP = config.getfloat('ar', 'shrink_step', fallback=0.01)
BURN_IN = config.getint('ar', 'burn_in', fallback=500)


def companion(k):
    k = np.asarray(k, dtype=float)
    p = len(k)
    matrix = np.zeros((p, p))
    matrix[0] = k
    matrix[1:, :-1] = np.eye(p - 1)
    return matrix


def _spectral_radius(k):
    if not len(k) or not np.any(k):
        return 0.0
    return float(np.abs(np.linalg.eigvals(companion(k))).max())


def is_stationary(k, margin=1.0):
    """
    True when every root of 1 - sum k_i x^i has modulus above ``margin``.
    """

    return _spectral_radius(np.asarray(k, dtype=float)) < 1.0 / margin


def stabilize(k, margin=ROOT_MARGIN, step=SHRINK_STEP):
    """
    Shrink non-stationary coefficients by the largest c < 1 on a grid of
    ``step`` that puts all characteristic roots at modulus >= ``margin``.
    Stationary input is returned unchanged.

    :return: coefficients and the applied factor
    :rtype: tuple[numpy.ndarray, float]
    """

    k = np.asarray(k, dtype=float)
    if is_stationary(k):
        return k.copy(), 1.0
    for i in range(1, int(round(1.0 / step)) + 1):
        factor = max(0.0, 1.0 - i * step)
        if _spectral_radius(factor * k) <= 1.0 / margin:
            return factor * k, factor
    return np.zeros_like(k), 0.0


def ar_autocovariance(k, lags):
    """
    Stationary autocovariances gamma_0..gamma_lags for unit innovation
    variance, from the extended Yule-Walker system.

    :raises StationarityError: if ``k`` is not stationary
    """

    k = np.asarray(k, dtype=float)
    if not is_stationary(k):
        raise StationarityError('AR coefficients %s are not stationary' % k.tolist())
    p = len(k)
    system = np.eye(p + 1)
    for h in range(p + 1):
        for i in range(1, p + 1):
            system[h, abs(h - i)] -= k[i - 1]
    rhs = np.zeros(p + 1)
    rhs[0] = 1.0
    gamma = list(np.linalg.solve(system, rhs))
    for h in range(p + 1, lags + 1):
        gamma.append(sum(k[i - 1] * gamma[h - i] for i in range(1, p + 1)))
    return np.array(gamma[:lags + 1])


def ar_precision(k):
    """
    Precision matrix of p consecutive values of a unit-innovation AR(p).

    :param k: AR coefficients (length p)
    :return: M and log|M|
    :rtype: tuple[numpy.ndarray, float]
    :raises StationarityError: if ``k`` is not stationary
    """

    k = np.asarray(k, dtype=float)
    p = len(k)
    gamma = ar_autocovariance(k, max(p - 1, 0))
    covariance = toeplitz(gamma[:p])
    try:
        factor = cho_factor(covariance)
    except LinAlgError:
        raise ConditioningError('Autocovariance matrix of %s is singular' % k.tolist())
    precision = cho_solve(factor, np.eye(p))
    logdet = -2.0 * np.log(np.diag(factor[0])).sum()
    return (precision + precision.T) / 2.0, float(logdet)


def simulate_ar(k, sigma2, n, rng, burn_in=BURN_IN):
    """
    Simulate a stationary AR(p) path of length n, discarding a burn-in.
    """

    k = np.asarray(k, dtype=float)
    noise = rng.normal(0.0, np.sqrt(sigma2), size=n + burn_in)
    path = lfilter([1.0], np.concatenate([[1.0], -k]), noise)
    return path[burn_in:]


def simulate_scores(K, sigma2_j, n, rng, burn_in=BURN_IN):
    """
    Independent AR score series, one per column of ``K``.

    :return: (n, J) scores
    """

    K = np.atleast_2d(np.asarray(K, dtype=float))
    return np.column_stack([simulate_ar(K[:, j], sigma2_j[j], n, rng, burn_in)
                            for j in range(K.shape[1])])
