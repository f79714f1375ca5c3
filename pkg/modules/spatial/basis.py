# -*- coding: utf-8 -*-

"""
spatial.basis
~~~~~~~~~~~~~

Orthonormal C^r bivariate spline bases on a triangulation and their
thin-plate energy matrix.
"""
from functools import cached_property
import numpy as np
from scipy.linalg import block_diag, null_space, orth
from modules.exceptions import ArgumentError, ConstructionError, LocationError
from modules.logger import get_logger
from .bernstein import multi_indices, index_of, bernstein_eval, gram_block, \
    directional_coordinates, derivative_matrix, second_derivative_matrix
from .quadrature import triangle_rule, domain_rule

__all__ = [
    'BivariateBasis',
    'gram_matrix_raw',
    'smoothness_constraints',
    'orthonormal_basis',
    'energy_matrix',
    'eval_design',
    'evaluate_piece'
]

MAX_DEGREE = 5

# Closed-form Gram blocks must agree with quadrature to this relative level
GRAM_CHECK_TOL = 1e-10

# A Gram-Schmidt column is dependent when projection leaves less than this
# fraction of its squared G-norm
MGS_DEPENDENCE_TOL = 1e-12

_logger = get_logger(__name__)


def _check_degree(d, r=None):
    if d < 1 or d > MAX_DEGREE:
        raise ArgumentError('Degree must lie in [1, %d], got %d' % (MAX_DEGREE, d))
    if r is not None and not 0 <= r < d:
        raise ArgumentError('Smoothness must satisfy 0 <= r < d, got r=%d, d=%d' % (r, d))


def gram_matrix_raw(triangulation, d, certify=True):
    """
    Block-diagonal Gram matrix of all per-triangle Bernstein polynomials.

    :param Triangulation triangulation: the domain
    :param int d: degree
    :param bool certify: cross-check every block against triangle quadrature
    :return: the (T*m, T*m) Gram matrix
    :raises ConstructionError: if a closed-form block disagrees with quadrature
    """

    blocks = [gram_block(d, area) for area in triangulation.areas]
    if certify:
        for index, block in enumerate(blocks):
            _, bary, weights = triangle_rule(triangulation.corners(index), order=d + 2)
            values = bernstein_eval(d, bary)
            reference = values.T @ (values * weights[:, None])
            if np.abs(reference - block).max() > GRAM_CHECK_TOL * np.abs(block).max():
                raise ConstructionError('Gram block of triangle %d failed the quadrature check'
                                        % index)
    return block_diag(*blocks)


def smoothness_constraints(triangulation, d, r):
    """
    Rank-reduced constraint matrix H whose null space holds the raw
    coefficient vectors of C^r piecewise polynomials.

    For each shared edge with vertices (u, v), triangle t1 = <u, v, c> and
    t2 = <u, v, e>, and each order rho <= r, coefficients of t2 at distance
    rho from the edge equal the degree-rho de Casteljau combination of t1's
    coefficients evaluated at e.

    :return: (rank, T*m) matrix with orthonormal rows; zero rows if nothing to constrain
    :raises ArgumentError: if r >= d
    """

    if not 0 <= r < d:
        raise ArgumentError('Smoothness must satisfy 0 <= r < d, got r=%d, d=%d' % (r, d))

    m = len(multi_indices(d))
    size = len(triangulation) * m
    idx = index_of(d)
    rows = []

    for u, v, t1, t2 in triangulation.shared_edges():
        tri1 = triangulation.triangles[t1].tolist()
        tri2 = triangulation.triangles[t2].tolist()
        c = next(w for w in tri1 if w not in (u, v))
        e = next(w for w in tri2 if w not in (u, v))
        pos1 = {w: k for k, w in enumerate(tri1)}
        pos2 = {w: k for k, w in enumerate(tri2)}

        lam = triangulation.barycentric(t1, triangulation.vertices[e])
        lam = np.array([lam[pos1[u]], lam[pos1[v]], lam[pos1[c]]])

        for rho in range(r + 1):
            weights = bernstein_eval(rho, lam)
            for i in range(d - rho + 1):
                j = d - rho - i
                row = np.zeros(size)
                alpha = [0, 0, 0]
                alpha[pos2[u]], alpha[pos2[v]], alpha[pos2[e]] = i, j, rho
                row[t2 * m + idx[tuple(alpha)]] += 1.0
                for weight, (nu, mu, kappa) in zip(weights, multi_indices(rho)):
                    alpha = [0, 0, 0]
                    alpha[pos1[u]], alpha[pos1[v]], alpha[pos1[c]] = i + nu, j + mu, kappa
                    row[t1 * m + idx[tuple(alpha)]] -= weight
                rows.append(row)

    if not rows:
        return np.zeros((0, size))
    return orth(np.array(rows).T).T


def _gram_schmidt(columns, gram):
    # Modified Gram-Schmidt in the gram inner product, two passes per column
    n = columns.shape[1]
    basis = np.zeros_like(columns)
    images = np.zeros_like(columns)
    for k in range(n):
        vec = columns[:, k].copy()
        before = vec @ gram @ vec
        for _ in range(2):
            for i in range(k):
                vec -= (images[:, i] @ vec) * basis[:, i]
        norm2 = vec @ gram @ vec
        if norm2 <= MGS_DEPENDENCE_TOL * before:
            raise ConstructionError('Null-space column %d is dependent in the Gram metric' % k)
        basis[:, k] = vec / np.sqrt(norm2)
        images[:, k] = gram @ basis[:, k]
    return basis


class BivariateBasis:
    """
    Orthonormal bivariate spline basis b(x, y) on a triangulation.

    ``transform`` maps raw per-triangle Bernstein coefficients (triangle
    index major, then :func:`multi_indices` order) to the basis, so that
    ``b(x, y) = transform.T @ raw(x, y)``.
    """

    def __init__(self, triangulation, degree, smoothness, transform, gram_certified=False):
        self.triangulation = triangulation
        self.degree = int(degree)
        self.smoothness = int(smoothness)
        self.transform = transform
        self.gram_certified = bool(gram_certified)
        self.transform.setflags(write=False)

    def __repr__(self):
        return '{}(d={}, r={}, n_b={}, triangles={})'.format(
            self.__class__.__name__, self.degree, self.smoothness,
            self.n_b, len(self.triangulation))

    @property
    def n_b(self):
        return self.transform.shape[1]

    @property
    def local_size(self):
        return len(multi_indices(self.degree))

    def piece(self, index):
        m = self.local_size
        return self.transform[index * m:(index + 1) * m]

    def evaluate(self, points):
        return eval_design(self, points)

    @cached_property
    def energy(self):
        return energy_matrix(self)

    def project(self, func, order=None):
        """
        L2 projection of ``func(x, y)`` onto the basis.

        :param func: vectorized callable of x and y arrays
        :param int order: quadrature points per direction
        :return: coefficient vector of length n_b
        """

        order = order or self.degree + 6
        points, owners, weights = domain_rule(self.triangulation, order)
        values = np.asarray(func(points[:, 0], points[:, 1]), dtype=float)
        design = _design_rows(self, points, owners)
        return design.T @ (weights * values)


def orthonormal_basis(triangulation, d, r):
    """
    Construct the orthonormal C^r spline basis of degree d.

    :param Triangulation triangulation: the domain
    :param int d: degree, 1..5
    :param int r: smoothness, 0 <= r < d
    :rtype: BivariateBasis
    :raises ConstructionError: if the constrained space is empty
    """

    _check_degree(d, r)
    gram = gram_matrix_raw(triangulation, d, certify=True)
    constraints = smoothness_constraints(triangulation, d, r)

    if constraints.shape[0]:
        kernel = null_space(constraints)
    else:
        kernel = np.eye(gram.shape[0])
    if kernel.shape[1] == 0:
        raise ConstructionError('No spline of degree %d is C^%d on this mesh' % (d, r))

    transform = _gram_schmidt(kernel, gram)
    _logger.info('Built bivariate basis: d=%d, r=%d, %d triangles, n_b=%d (%d constraints)'
                 % (d, r, len(triangulation), transform.shape[1], constraints.shape[0]))
    return BivariateBasis(triangulation, d, r, transform, gram_certified=True)


def energy_matrix(basis):
    """
    Thin-plate energy matrix of a basis, integrated exactly per triangle.

    :param BivariateBasis basis: the basis
    :return: symmetric PSD (n_b, n_b) matrix
    :raises ArgumentError: if the degree is below 2
    """

    d = basis.degree
    if d < 2:
        raise ArgumentError('Thin-plate energy needs degree >= 2, got %d' % d)

    tri = basis.triangulation
    energy = np.zeros((basis.n_b, basis.n_b))
    for index in range(len(tri)):
        corners = tri.corners(index)
        ax = directional_coordinates(corners, (1.0, 0.0))
        ay = directional_coordinates(corners, (0.0, 1.0))
        gram = gram_block(d - 2, tri.areas[index])
        block = np.zeros((basis.local_size, basis.local_size))
        for weight, (a, b) in ((1.0, (ax, ax)), (2.0, (ax, ay)), (1.0, (ay, ay))):
            second = second_derivative_matrix(d, a, b)
            block += weight * second.T @ gram @ second
        piece = basis.piece(index)
        energy += piece.T @ block @ piece
    return (energy + energy.T) / 2.0


def _design_rows(basis, points, owners):
    design = np.zeros((len(points), basis.n_b))
    tri = basis.triangulation
    for index in np.unique(owners):
        mask = owners == index
        bary = tri.barycentric(index, points[mask])
        design[mask] = bernstein_eval(basis.degree, bary) @ basis.piece(index)
    return design


def eval_design(basis, points):
    """
    Design matrix with row i equal to b(x_i, y_i).

    :param BivariateBasis basis: the basis
    :param points: (N, 2) points inside the domain
    :raises LocationError: naming the first point outside the domain
    """

    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.size == 0:
        return np.zeros((0, basis.n_b))
    owners = basis.triangulation.locate_many(points)
    outside = np.flatnonzero(owners < 0)
    if len(outside):
        point = points[outside[0]]
        raise LocationError('(%r, %r) is outside the triangulated domain (%d point(s) rejected)'
                            % (point[0], point[1], len(outside)), point=point)
    return _design_rows(basis, points, owners)


def evaluate_piece(triangulation, d, raw, index, points, direction=None):
    """
    Evaluate the polynomial piece on one triangle, or its derivative along
    ``direction``, at arbitrary points (the piece extends beyond its triangle).

    :param raw: raw coefficient vector over all triangles
    """

    m = len(multi_indices(d))
    coef = np.asarray(raw, dtype=float)[index * m:(index + 1) * m]
    bary = triangulation.barycentric(index, points)
    if direction is None:
        return bernstein_eval(d, bary) @ coef
    a = directional_coordinates(triangulation.corners(index), direction)
    return bernstein_eval(d - 1, bary) @ (derivative_matrix(d, a) @ coef)
