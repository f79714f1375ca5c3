# -*- coding: utf-8 -*-

"""
spatial.triangulation
~~~~~~~~~~~~~~~~~~~~~

Triangulated planar domains: validation at load, barycentric coordinates,
point location and the plain-text mesh format.
"""
from collections import defaultdict, deque
import numpy as np
from modules.exceptions import ArgumentError, GeometryError, ParseError
from modules.logger import get_logger

__all__ = ['Triangulation', 'barycentric', 'read_triangulation', 'write_triangulation']

# Barycentric tolerance for containment tests
LOCATE_EPS = 1e-12

# Relative area below which a triangle is degenerate
DEGENERATE_AREA = 1e-12

# Points processed per block in vectorized location
LOCATE_CHUNK = 4096

_logger = get_logger(__name__)


def _signed_areas(corners):
    # corners: (T, 3, 2)
    e1 = corners[:, 1] - corners[:, 0]
    e2 = corners[:, 2] - corners[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def barycentric(tri, vertices, p):
    """
    Barycentric coordinates of one or many points relative to a triangle.

    :param tri: three vertex indices
    :param vertices: (V, 2) vertex array
    :param p: a point (2,) or points (N, 2)
    :return: coordinates (3,) or (N, 3)
    :raises GeometryError: if the triangle area is negligible against its longest edge
    """

    v = np.asarray(vertices, dtype=float)[list(tri)]
    pts = np.asarray(p, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)

    (x1, y1), (x2, y2), (x3, y3) = v
    det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3)
    edge2 = max(np.sum((v - np.roll(v, 1, axis=0)) ** 2, axis=1))
    if abs(det) <= DEGENERATE_AREA * edge2:
        raise GeometryError('Triangle %s is degenerate' % (tuple(tri),))

    dx = pts[:, 0] - x3
    dy = pts[:, 1] - y3
    b1 = ((y2 - y3) * dx + (x3 - x2) * dy) / det
    b2 = ((y3 - y1) * dx + (x1 - x3) * dy) / det
    out = np.column_stack([b1, b2, 1.0 - b1 - b2])
    return out[0] if single else out


class Triangulation:
    """
    Vertices and counter-clockwise triangles of an irregular domain.

    Use :meth:`from_arrays` to build one; it reorients triangles, rejects
    degenerate or non-manifold input and checks connectivity.
    """

    def __init__(self, vertices, triangles, edges):
        self.vertices = vertices
        self.triangles = triangles
        self.edge_adjacency = edges
        self._corners = vertices[triangles]
        self._areas = _signed_areas(self._corners)

    @classmethod
    def from_arrays(cls, vertices, triangles):
        vertices = np.array(vertices, dtype=float, copy=True)
        triangles = np.array(triangles, dtype=np.int64, copy=True)

        if vertices.ndim != 2 or vertices.shape[1] != 2 or not len(vertices):
            raise GeometryError('Vertices must be a non-empty (V, 2) array')
        if triangles.ndim != 2 or triangles.shape[1] != 3 or not len(triangles):
            raise GeometryError('Triangles must be a non-empty (T, 3) array')
        if not np.all(np.isfinite(vertices)):
            raise GeometryError('Vertex coordinates must be finite')
        if triangles.min() < 0 or triangles.max() >= len(vertices):
            raise GeometryError('Triangle vertex index out of range')

        for i, tri in enumerate(triangles):
            if len(set(tri.tolist())) != 3:
                raise GeometryError('Triangle %d repeats a vertex: %s' % (i, tri.tolist()))

        # Orientation and degeneracy
        areas = _signed_areas(vertices[triangles])
        span = vertices.max(axis=0) - vertices.min(axis=0)
        diameter2 = float(span @ span)
        degenerate = np.abs(areas) < DEGENERATE_AREA * diameter2
        if degenerate.any():
            raise GeometryError('Degenerate triangle(s): %s'
                                % np.flatnonzero(degenerate).tolist())
        flip = areas < 0
        if flip.any():
            _logger.info('Reoriented %d clockwise triangle(s)' % flip.sum())
            triangles[flip] = triangles[flip][:, [0, 2, 1]]

        # Edge adjacency
        edges = defaultdict(list)
        for i, (a, b, c) in enumerate(triangles.tolist()):
            for u, v in ((a, b), (b, c), (c, a)):
                edges[(min(u, v), max(u, v))].append(i)
        for edge, owners in edges.items():
            if len(owners) > 2:
                raise GeometryError('Edge %s is shared by %d triangles' % (edge, len(owners)))

        cls._check_connected(len(triangles), edges)
        return cls(vertices, triangles, dict(edges))

    @staticmethod
    def _check_connected(count, edges):
        neighbours = defaultdict(set)
        for owners in edges.values():
            if len(owners) == 2:
                a, b = owners
                neighbours[a].add(b)
                neighbours[b].add(a)
        seen = {0}
        queue = deque([0])
        while queue:
            for nb in neighbours[queue.popleft()]:
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        if len(seen) != count:
            raise GeometryError('Triangulation is not connected (%d of %d triangles reachable)'
                                % (len(seen), count))

    def __len__(self):
        return len(self.triangles)

    def __repr__(self):
        return '{}(vertices={}, triangles={})'.format(
            self.__class__.__name__, len(self.vertices), len(self.triangles))

    @property
    def areas(self):
        return self._areas

    @property
    def area(self):
        return float(self._areas.sum())

    @property
    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def corners(self, index):
        return self._corners[index]

    def shared_edges(self):
        """Shared edges as ``(u, v, t1, t2)`` with ``t1 < t2``, in sorted edge order."""
        return [(u, v) + tuple(sorted(owners))
                for (u, v), owners in sorted(self.edge_adjacency.items())
                if len(owners) == 2]

    def barycentric(self, index, p):
        return barycentric(self.triangles[index], self.vertices, p)

    def locate(self, p):
        """
        Index of the lowest-numbered triangle containing ``p``, or None.
        """

        found = self.locate_many(np.asarray(p, dtype=float).reshape(1, 2))[0]
        return None if found < 0 else int(found)

    def locate_many(self, points):
        """
        Vectorized :meth:`locate`; exterior points map to -1.
        """

        points = np.atleast_2d(np.asarray(points, dtype=float))
        found = np.full(len(points), -1, dtype=np.int64)
        c = self._corners
        x3, y3 = c[:, 2, 0], c[:, 2, 1]
        det = (c[:, 1, 1] - y3) * (c[:, 0, 0] - x3) + (x3 - c[:, 1, 0]) * (c[:, 0, 1] - y3)

        for start in range(0, len(points), LOCATE_CHUNK):
            block = points[start:start + LOCATE_CHUNK]
            dx = block[:, 0, None] - x3[None, :]
            dy = block[:, 1, None] - y3[None, :]
            b1 = ((c[:, 1, 1] - y3) * dx + (x3 - c[:, 1, 0]) * dy) / det
            b2 = ((y3 - c[:, 0, 1]) * dx + (c[:, 0, 0] - x3) * dy) / det
            b3 = 1.0 - b1 - b2
            inside = (b1 >= -LOCATE_EPS) & (b2 >= -LOCATE_EPS) & (b3 >= -LOCATE_EPS)
            hit = inside.any(axis=1)
            found[start:start + LOCATE_CHUNK][hit] = inside[hit].argmax(axis=1)
        return found

    def contains(self, points):
        return self.locate_many(points) >= 0


def read_triangulation(path):
    """
    Read a mesh file: header ``V T``, V lines ``x y``, T lines ``i j k``.

    :param str path: mesh file path
    :rtype: Triangulation
    :raises ParseError: on malformed content, naming the line
    """

    with open(path) as fp:
        lines = [(no, line.split()) for no, line in enumerate(fp, start=1)
                 if line.strip() and not line.lstrip().startswith('#')]
    if not lines:
        raise ParseError('Empty triangulation file', line=1)

    def ints(no, fields, count):
        if len(fields) != count:
            raise ParseError('Expected %d fields, got %d' % (count, len(fields)), line=no)
        try:
            return [int(f) for f in fields]
        except ValueError:
            raise ParseError('Expected integers: %s' % ' '.join(fields), line=no)

    def reals(no, fields):
        if len(fields) != 2:
            raise ParseError('Expected 2 coordinates, got %d' % len(fields), line=no)
        try:
            return [float(f) for f in fields]
        except ValueError:
            raise ParseError('Expected reals: %s' % ' '.join(fields), line=no)

    no, header = lines[0]
    nv, nt = ints(no, header, 2)
    body = lines[1:]
    if len(body) != nv + nt:
        raise ParseError('Expected %d vertex and %d triangle lines, got %d lines'
                         % (nv, nt, len(body)), line=no)
    vertices = [reals(no, fields) for no, fields in body[:nv]]
    triangles = [ints(no, fields, 3) for no, fields in body[nv:]]
    return Triangulation.from_arrays(vertices, triangles)


def write_triangulation(path, triangulation):
    if not isinstance(triangulation, Triangulation):
        raise ArgumentError('Expected a Triangulation, got %r' % type(triangulation))
    with open(path, 'w') as fp:
        fp.write('%d %d\n' % (len(triangulation.vertices), len(triangulation.triangles)))
        for x, y in triangulation.vertices.tolist():
            fp.write('%r %r\n' % (x, y))
        for i, j, k in triangulation.triangles.tolist():
            fp.write('%d %d %d\n' % (i, j, k))
