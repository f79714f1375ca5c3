# -*- coding: utf-8 -*-

import numpy as np
import pytest
from modules.exceptions import ArgumentError, ConstructionError, GeometryError, LocationError, \
    ParseError
from modules.spatial import Triangulation, barycentric, read_triangulation, \
    write_triangulation, bernstein_eval, multi_indices, gram_matrix_raw, \
    smoothness_constraints, orthonormal_basis, energy_matrix, eval_design, evaluate_piece
from modules.spatial.basis import _gram_schmidt
from modules.spatial.quadrature import domain_rule, triangle_rule
from modules.simulation import square_with_hole


def test_barycentric_vertices_and_centroid():
    vertices = np.array([(0.0, 0.0), (2.0, 0.0), (0.0, 1.0)])
    assert np.allclose(barycentric((0, 1, 2), vertices, vertices[0]), (1, 0, 0))
    assert np.allclose(barycentric((0, 1, 2), vertices, vertices.mean(axis=0)), (1 / 3.0,) * 3)
    outside = barycentric((0, 1, 2), vertices, (3.0, 3.0))
    assert outside.min() < 0
    assert outside.sum() == pytest.approx(1.0)


def test_barycentric_rejects_degenerate_triangle():
    with pytest.raises(GeometryError):
        barycentric((0, 1, 2), [(0, 0), (1, 1), (2, 2)], (0.5, 0.5))


def test_barycentric_degeneracy_is_relative_to_edge_length():
    # A sliver with an area ratio of 1e-15 to its squared diameter is degenerate
    with pytest.raises(GeometryError):
        barycentric((0, 1, 2), [(0.0, 0.0), (1.0, 0.0), (0.5, 1e-15)], (0.5, 0.0))
    # A tiny but well-shaped triangle is not
    tiny = np.array([(0.0, 0.0), (1e-9, 0.0), (0.0, 1e-9)])
    assert np.allclose(barycentric((0, 1, 2), tiny, tiny.mean(axis=0)), (1 / 3.0,) * 3)


def test_gram_schmidt_dependence_is_relative_to_column_norm():
    gram = np.diag([1.0, 4.0, 9.0])
    small = np.array([[1e-9, 1e-9], [0.0, 1e-9], [0.0, 0.0]])
    basis = _gram_schmidt(small, gram)
    assert np.allclose(basis.T @ gram @ basis, np.eye(2), atol=1e-10)
    dependent = np.array([[1.0, 2.0], [1.0, 2.0 + 1e-9], [0.0, 0.0]])
    with pytest.raises(ConstructionError):
        _gram_schmidt(dependent, gram)


def test_locate_interior_edge_and_hole(square):
    assert square.locate((0.9, 0.1)) == 0
    assert square.locate((0.1, 0.9)) == 1
    # Diagonal midpoint is shared; the lower index wins
    assert square.locate((0.5, 0.5)) == 0
    assert square.locate((1.5, 0.5)) is None

    mesh = square_with_hole(0.5)
    assert mesh.locate((1.0, 1.0)) is None
    assert mesh.locate((0.25, 0.25)) is not None
    assert mesh.area == pytest.approx(3.0)


def test_from_arrays_reorients_and_validates():
    mesh = Triangulation.from_arrays([(0, 0), (1, 0), (0, 1)], [(0, 2, 1)])
    assert mesh.areas[0] > 0

    with pytest.raises(GeometryError):
        Triangulation.from_arrays([(0, 0), (1, 0), (2, 0)], [(0, 1, 2)])
    with pytest.raises(GeometryError):
        Triangulation.from_arrays([(0, 0), (1, 0), (0, 1)], [(0, 0, 1)])
    # Two triangles touching at a vertex only
    with pytest.raises(GeometryError):
        Triangulation.from_arrays([(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)],
                                  [(0, 1, 2), (0, 3, 4)])
    # Three triangles on one edge
    with pytest.raises(GeometryError):
        Triangulation.from_arrays([(0, 0), (1, 0), (0, 1), (0, -1), (1, 1)],
                                  [(0, 1, 2), (0, 1, 3), (0, 1, 4)])


def test_triangulation_file_round_trip(tmp_path, cross):
    path = str(tmp_path / 'mesh.txt')
    write_triangulation(path, cross)
    again = read_triangulation(path)
    assert np.array_equal(again.vertices, cross.vertices)
    assert np.array_equal(again.triangles, cross.triangles)


def test_triangulation_file_errors_name_the_line(tmp_path):
    path = tmp_path / 'bad.txt'
    path.write_text('3 1\n0 0\n1 x\n0 1\n0 1 2\n')
    with pytest.raises(ParseError) as info:
        read_triangulation(str(path))
    assert info.value.line == 3


def test_bernstein_values(rng):
    assert np.allclose(bernstein_eval(2, (1.0, 0.0, 0.0)), [1, 0, 0, 0, 0, 0])
    assert np.allclose(bernstein_eval(1, (0.2, 0.3, 0.5)), (0.2, 0.3, 0.5))
    bary = rng.dirichlet((1, 1, 1), size=50)
    for d in range(6):
        assert np.abs(bernstein_eval(d, bary).sum(axis=1) - 1.0).max() < 1e-14
    assert len(multi_indices(3)) == 10
    with pytest.raises(ArgumentError):
        bernstein_eval(-1, (1.0, 0.0, 0.0))


def test_gram_block_of_unit_right_triangle():
    mesh = Triangulation.from_arrays([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    gram = gram_matrix_raw(mesh, 1)
    assert gram[0, 0] == pytest.approx(mesh.area / 6.0)
    assert gram[0, 1] == pytest.approx(mesh.area / 12.0)


def test_gram_blocks_match_quadrature_and_are_disjoint(square):
    d = 3
    gram = gram_matrix_raw(square, d)
    m = len(multi_indices(d))
    assert np.all(gram[:m, m:] == 0)
    _, bary, weights = triangle_rule(square.corners(1), order=8)
    values = bernstein_eval(d, bary)
    assert np.allclose(gram[m:, m:], values.T @ (values * weights[:, None]), atol=1e-12)


def test_smoothness_constraint_counts(square):
    single = Triangulation.from_arrays([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    assert smoothness_constraints(single, 3, 1).shape == (0, 10)
    assert smoothness_constraints(square, 1, 0).shape[0] == 2
    with pytest.raises(ArgumentError):
        smoothness_constraints(square, 2, 2)


def test_basis_is_orthonormal_under_quadrature(cubic_basis):
    points, _, weights = domain_rule(cubic_basis.triangulation, order=6)
    design = cubic_basis.evaluate(points)
    gram = design.T @ (design * weights[:, None])
    assert np.abs(gram - np.eye(cubic_basis.n_b)).max() < 1e-8
    assert cubic_basis.gram_certified


def test_basis_is_smooth_across_edges(cubic_basis, rng):
    mesh = cubic_basis.triangulation
    t = np.linspace(0.05, 0.95, 50)
    for _ in range(20):
        raw = cubic_basis.transform @ rng.normal(size=cubic_basis.n_b)
        scale = np.abs(raw).max()
        for u, v, t1, t2 in mesh.shared_edges():
            points = mesh.vertices[u] + t[:, None] * (mesh.vertices[v] - mesh.vertices[u])
            left = evaluate_piece(mesh, 3, raw, t1, points)
            right = evaluate_piece(mesh, 3, raw, t2, points)
            assert np.abs(left - right).max() < 1e-8 * scale
            for direction in ((1.0, 0.0), (0.0, 1.0)):
                left = evaluate_piece(mesh, 3, raw, t1, points, direction)
                right = evaluate_piece(mesh, 3, raw, t2, points, direction)
                assert np.abs(left - right).max() < 1e-8 * scale


def test_basis_construction_is_deterministic(cross):
    first = orthonormal_basis(cross, 3, 1)
    second = orthonormal_basis(cross, 3, 1)
    assert np.array_equal(first.transform, second.transform)


def test_basis_degree_bounds(cross):
    with pytest.raises(ArgumentError):
        orthonormal_basis(cross, 6, 1)
    with pytest.raises(ArgumentError):
        orthonormal_basis(cross, 2, 2)


def test_energy_annihilates_affine_functions(cubic_basis):
    gamma = cubic_basis.energy
    for func in (lambda x, y: np.ones_like(x), lambda x, y: 2 * x - y):
        theta = cubic_basis.project(func)
        assert theta @ gamma @ theta < 1e-10 * max(1.0, np.abs(gamma).max())


def test_energy_of_quadratic(cubic_basis):
    theta = cubic_basis.project(lambda x, y: x ** 2)
    area = cubic_basis.triangulation.area
    assert theta @ cubic_basis.energy @ theta == pytest.approx(4.0 * area, rel=1e-8)


def test_energy_is_symmetric_psd(cubic_basis):
    gamma = cubic_basis.energy
    assert np.array_equal(gamma, gamma.T)
    assert np.linalg.eigvalsh(gamma).min() > -1e-10


def test_energy_needs_degree_two(cross):
    with pytest.raises(ArgumentError):
        energy_matrix(orthonormal_basis(cross, 1, 0))


def test_design_rejects_points_outside(cubic_basis):
    rows = cubic_basis.evaluate([(0.3, 0.3), (0.7, 0.2)])
    assert rows.shape == (2, cubic_basis.n_b)
    assert np.all(np.isfinite(rows))
    with pytest.raises(LocationError) as info:
        cubic_basis.evaluate([(0.3, 0.3), (1.5, 0.2)])
    assert np.allclose(info.value.point, (1.5, 0.2))


def test_eval_design_matches_basis_evaluate(quadratic_basis, rng):
    points = rng.uniform(0.05, 0.95, size=(30, 2))
    assert np.array_equal(eval_design(quadratic_basis, points), quadratic_basis.evaluate(points))
    assert eval_design(quadratic_basis, np.zeros((0, 2))).shape == (0, quadratic_basis.n_b)
