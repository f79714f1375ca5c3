# -*- coding: utf-8 -*-

"""
simulation.metrics
~~~~~~~~~~~~~~~~~~

Accuracy measures of the simulation study.
"""
import numpy as np
from scipy.linalg import qr, subspace_angles
from modules.exceptions import ArgumentError
from .domain import DOMAIN_AREA

__all__ = ['miae', 'principal_angle']

# Relative size of an R diagonal entry below which a matrix is rank deficient
RANK_TOL = 1e-10


def miae(estimate, truth, area=DOMAIN_AREA):
    """
    Mean over time of the integrated absolute error, each integral taken as
    area / G times the sum over the G grid points.

    :param estimate: (n, G) surfaces, or one (G,) surface
    :param truth: surfaces of the same shape on the same grid
    :rtype: float
    :raises ArgumentError: on a shape mismatch
    """

    estimate = np.atleast_2d(np.asarray(estimate, dtype=float))
    truth = np.atleast_2d(np.asarray(truth, dtype=float))
    if estimate.shape != truth.shape:
        raise ArgumentError('Surfaces on different grids: %s vs %s' % (estimate.shape, truth.shape))
    if not truth.size:
        raise ArgumentError('No surfaces to compare')
    per_time = area / truth.shape[1] * np.abs(estimate - truth).sum(axis=1)
    return float(per_time.mean())


def _check_rank(matrix, what):
    _, R = qr(matrix, mode='economic')
    diag = np.abs(np.diag(R))
    if not len(diag) or diag.min() <= RANK_TOL * max(diag.max(), 1e-300):
        raise ArgumentError('%s is rank deficient' % what)
    return matrix


def principal_angle(estimate, truth):
    """
    Largest principal angle, in degrees, between the column spaces of the
    estimated and true principal component matrices.

    :raises ArgumentError: on mismatched rows or rank-deficient input
    """

    estimate, truth = np.asarray(estimate, dtype=float), np.asarray(truth, dtype=float)
    if len(estimate) != len(truth):
        raise ArgumentError('Row counts differ: %d vs %d' % (len(estimate), len(truth)))
    if estimate.ndim == 1:
        estimate = estimate[:, None]
    if truth.ndim == 1:
        truth = truth[:, None]
    angles = subspace_angles(_check_rank(estimate, 'Estimate'), _check_rank(truth, 'Truth'))
    return float(np.degrees(angles.max()))
