# -*- coding: utf-8 -*-

"""
sfpc.demean
~~~~~~~~~~~

Additive main-effects fit W(x, y, t) = mu(x, y) + nu(t) + noise, removed
before the principal component fit.
"""
from dataclasses import dataclass
import numpy as np
from scipy.linalg import solve, LinAlgError
from modules.exceptions import ConditioningError, DataError
from modules.logger import get_logger

__all__ = ['DemeanResult', 'demean_two_stage', 'remove_main_effects', 'main_effect_rows',
           'main_effects_at']

_logger = get_logger(__name__)


@dataclass
class DemeanResult:
    panel: object           # demeaned ObservationPanel
    theta_mu: np.ndarray    # spatial coefficients of mu
    theta_nu: np.ndarray    # temporal coefficients of nu
    fitted: np.ndarray      # mu + nu at every observation


def demean_two_stage(panel, bases, penalties):
    """
    Penalized least squares for mu and nu jointly, with nu pinned to zero
    mean over the observed time points; returns the residual panel.

    :param ObservationPanel panel: raw observations
    :param ModelBases bases: spatial and temporal bases
    :param Penalties penalties: lambda_mu_s smooths mu, lambda_mu_t smooths nu
    :rtype: DemeanResult
    :raises ConditioningError: if the constrained normal system is singular
    """

    if panel.size == 0:
        raise DataError('Cannot demean an empty panel')
    if not panel.has_design:
        panel = panel.with_design(bases.spatial, bases.temporal)

    B = panel.B
    C = panel.C[panel.time_index]
    n_b, n_c = B.shape[1], C.shape[1]
    pin = panel.C[panel.counts > 0].mean(axis=0)

    size = n_b + n_c + 1
    system = np.zeros((size, size))
    system[:n_b, :n_b] = B.T @ B + penalties.lambda_mu_s * bases.gamma
    system[:n_b, n_b:-1] = B.T @ C
    system[n_b:-1, :n_b] = C.T @ B
    system[n_b:-1, n_b:-1] = C.T @ C + penalties.lambda_mu_t * bases.P
    system[n_b:-1, -1] = system[-1, n_b:-1] = pin
    rhs = np.concatenate([B.T @ panel.values, C.T @ panel.values, [0.0]])

    try:
        solution = solve(system, rhs, assume_a='sym')
    except LinAlgError:
        raise ConditioningError('Main-effects system is singular')
    if not np.all(np.isfinite(solution)):
        raise ConditioningError('Main-effects system is singular')

    result = remove_main_effects(panel, solution[:n_b], solution[n_b:-1])
    _logger.info('Removed main effects: residual variance %.4g of %.4g'
                 % (np.var(result.panel.values), np.var(panel.values)))
    return result


def main_effect_rows(panel, theta_mu, theta_nu):
    """mu + nu at every row of a panel with design."""
    return panel.B @ theta_mu + panel.per_row(panel.C @ theta_nu)


def remove_main_effects(panel, theta_mu, theta_nu):
    """
    Subtract known main effects from a panel with design.

    :rtype: DemeanResult
    """

    fitted = main_effect_rows(panel, theta_mu, theta_nu)
    return DemeanResult(panel.with_values(panel.values - fitted), theta_mu, theta_nu, fitted)


def main_effects_at(bases, main_effects, points, times):
    """
    Spatial effect at ``points`` and temporal effect at ``times``; zeros
    when ``main_effects`` is None.
    """

    if main_effects is None:
        return np.zeros(len(points)), np.zeros(len(times))
    theta_mu, theta_nu = main_effects
    return bases.spatial.evaluate(points) @ theta_mu, \
        bases.temporal.evaluate(np.asarray(times, dtype=float)) @ theta_nu
