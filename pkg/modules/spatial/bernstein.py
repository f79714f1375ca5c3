# -*- coding: utf-8 -*-

"""
spatial.bernstein
~~~~~~~~~~~~~~~~~

Bernstein polynomials on a triangle: evaluation, closed-form Gram blocks
and derivative operators on coefficient vectors.
"""
from functools import lru_cache
import numpy as np
from scipy.special import factorial
from modules.exceptions import ArgumentError

__all__ = [
    'multi_indices',
    'index_of',
    'bernstein_eval',
    'gram_block',
    'directional_coordinates',
    'derivative_matrix',
    'second_derivative_matrix'
]


@lru_cache(maxsize=None)
def multi_indices(d):
    """
    Degree-d multi-indices (i, j, k), i descending, then j descending.

    :param int d: polynomial degree
    :rtype: tuple[tuple[int, int, int]]
    """

    if d < 0:
        raise ArgumentError('Degree must be non-negative, got %d' % d)
    return tuple((i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1))


@lru_cache(maxsize=None)
def index_of(d):
    return {alpha: pos for pos, alpha in enumerate(multi_indices(d))}


@lru_cache(maxsize=None)
def _multinomials(d):
    idx = np.array(multi_indices(d))
    return factorial(d, exact=False) / factorial(idx, exact=False).prod(axis=1)


def bernstein_eval(d, bary):
    """
    Evaluate all degree-d Bernstein polynomials.

    :param int d: degree
    :param bary: barycentric coordinates (3,) or (N, 3)
    :return: values (m,) or (N, m) in :func:`multi_indices` order
    :raises ArgumentError: if the degree is negative
    """

    idx = np.array(multi_indices(d))
    b = np.asarray(bary, dtype=float)
    single = b.ndim == 1
    b = np.atleast_2d(b)
    powers = (b[:, None, 0] ** idx[None, :, 0]) * \
             (b[:, None, 1] ** idx[None, :, 1]) * \
             (b[:, None, 2] ** idx[None, :, 2])
    values = powers * _multinomials(d)[None, :]
    return values[0] if single else values


@lru_cache(maxsize=None)
def _unit_gram(d):
    # Gram block on a triangle of area 1
    idx = multi_indices(d)
    m = len(idx)
    coef = _multinomials(d)
    coef2 = dict(zip(multi_indices(2 * d), _multinomials(2 * d)))
    scale = 2.0 / ((2 * d + 2) * (2 * d + 1))
    block = np.empty((m, m))
    for a in range(m):
        for b in range(a, m):
            gamma = tuple(x + y for x, y in zip(idx[a], idx[b]))
            block[a, b] = block[b, a] = coef[a] * coef[b] / coef2[gamma] * scale
    return block


def gram_block(d, area):
    """
    Exact L2 inner products of the degree-d Bernstein polynomials on a
    triangle of the given area.
    """

    return area * _unit_gram(d)


def directional_coordinates(corners, direction):
    """
    Directional barycentric coordinates of a vector relative to a triangle;
    they sum to zero.

    :param corners: (3, 2) vertex coordinates
    :param direction: (2,) direction vector
    :rtype: numpy.ndarray
    """

    system = np.vstack([np.asarray(corners, dtype=float).T, np.ones(3)])
    rhs = np.array([direction[0], direction[1], 0.0])
    return np.linalg.solve(system, rhs)


def derivative_matrix(d, a):
    """
    Matrix mapping degree-d coefficients to the degree-(d-1) coefficients
    of the derivative along directional coordinates ``a``.
    """

    if d < 1:
        raise ArgumentError('Cannot differentiate a degree-%d polynomial' % d)
    src = index_of(d)
    rows = multi_indices(d - 1)
    out = np.zeros((len(rows), len(src)))
    for r, beta in enumerate(rows):
        for k in range(3):
            alpha = list(beta)
            alpha[k] += 1
            out[r, src[tuple(alpha)]] += d * a[k]
    return out


def second_derivative_matrix(d, a, b):
    """
    Matrix mapping degree-d coefficients to the degree-(d-2) coefficients
    of the mixed second derivative along ``a`` then ``b``.
    """

    if d < 2:
        raise ArgumentError('Second derivatives need degree >= 2, got %d' % d)
    return derivative_matrix(d - 1, b) @ derivative_matrix(d, a)
