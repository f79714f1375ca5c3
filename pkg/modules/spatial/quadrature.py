# -*- coding: utf-8 -*-

"""
spatial.quadrature
~~~~~~~~~~~~~~~~~~

Collapsed-coordinate Gauss rules on triangles. An ``order``-point rule
per direction integrates polynomials of total degree ``2*order - 2``
exactly.
"""
from functools import lru_cache
import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = ['reference_rule', 'triangle_rule', 'domain_rule']

DEFAULT_ORDER = 10


@lru_cache(maxsize=None)
def reference_rule(order=DEFAULT_ORDER):
    """
    Barycentric nodes and weights on the reference triangle; weights sum
    to 1 so that multiplying by a triangle's area gives its integral.
    """

    x, w = leggauss(order)
    u, wu = (x + 1.0) / 2.0, w / 2.0
    uu, vv = np.meshgrid(u, u, indexing='ij')
    ww = np.outer(wu, wu) * (1.0 - uu)
    xi = uu.ravel()
    eta = (vv * (1.0 - uu)).ravel()
    bary = np.column_stack([1.0 - xi - eta, xi, eta])
    # Reference triangle has area 1/2
    return bary, 2.0 * ww.ravel()


def triangle_rule(corners, order=DEFAULT_ORDER):
    """
    Physical nodes, barycentric nodes and weights on one triangle.

    :param corners: (3, 2) vertex coordinates
    :param int order: Gauss points per direction
    :return: points (q, 2), bary (q, 3), weights (q,)
    """

    corners = np.asarray(corners, dtype=float)
    bary, weights = reference_rule(order)
    e1, e2 = corners[1] - corners[0], corners[2] - corners[0]
    area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    return bary @ corners, bary, weights * area


def domain_rule(triangulation, order=DEFAULT_ORDER):
    """
    Quadrature over a whole triangulation.

    :return: points (N, 2), owning triangle index (N,), weights (N,)
    """

    points, owners, weights = [], [], []
    for index in range(len(triangulation)):
        pts, _, w = triangle_rule(triangulation.corners(index), order)
        points.append(pts)
        owners.append(np.full(len(pts), index))
        weights.append(w)
    return np.vstack(points), np.concatenate(owners), np.concatenate(weights)
