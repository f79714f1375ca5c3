# -*- coding: utf-8 -*-

"""
simulation.domain
~~~~~~~~~~~~~~~~~

The simulation domain: the square [0, 2]^2 with the open square
(0.5, 1.5)^2 removed, its triangulation and its evaluation grid.
"""
import numpy as np
from modules.exceptions import ArgumentError
from modules.spatial import Triangulation
from . import config

__all__ = ['DOMAIN_AREA', 'square_with_hole', 'in_domain', 'eval_grid', 'sample_locations']

OUTER = (0.0, 2.0)
HOLE = (0.5, 1.5)
DOMAIN_AREA = (OUTER[1] - OUTER[0]) ** 2 - (HOLE[1] - HOLE[0]) ** 2

SPACING = config.getfloat('domain', 'spacing', fallback=0.5)
GRID_POINTS = config.getint('domain', 'grid_points', fallback=51)


def square_with_hole(spacing=SPACING):
    """
    Structured triangulation: square cells of side ``spacing`` split along
    one diagonal, cells inside the hole left out.

    :raises ArgumentError: unless ``spacing`` divides the hole offset 0.5
    :rtype: Triangulation
    """

    steps = HOLE[0] / spacing
    if spacing <= 0 or abs(steps - round(steps)) > 1e-9:
        raise ArgumentError('Mesh spacing %r must divide %g' % (spacing, HOLE[0]))
    cells = int(round((OUTER[1] - OUTER[0]) / spacing))
    axis = np.linspace(OUTER[0], OUTER[1], cells + 1)

    def vid(i, j):
        return j * (cells + 1) + i

    triangles = []
    for j in range(cells):
        for i in range(cells):
            cx, cy = (axis[i] + axis[i + 1]) / 2.0, (axis[j] + axis[j + 1]) / 2.0
            if HOLE[0] < cx < HOLE[1] and HOLE[0] < cy < HOLE[1]:
                continue
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            triangles += [(a, b, c), (a, c, d)]

    xs, ys = np.meshgrid(axis, axis)
    vertices = np.column_stack([xs.ravel(), ys.ravel()])
    triangles = np.array(triangles)
    used = np.unique(triangles)
    remap = np.full(len(vertices), -1)
    remap[used] = np.arange(len(used))
    return Triangulation.from_arrays(vertices[used], remap[triangles])


def in_domain(points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x, y = points[:, 0], points[:, 1]
    outer = (x >= OUTER[0]) & (x <= OUTER[1]) & (y >= OUTER[0]) & (y <= OUTER[1])
    hole = (x > HOLE[0]) & (x < HOLE[1]) & (y > HOLE[0]) & (y < HOLE[1])
    return outer & ~hole


def eval_grid(points=GRID_POINTS):
    """
    Evenly spaced ``points`` x ``points`` grid on the outer square with the
    hole points removed: 1976 points for the default 51.
    """

    axis = np.linspace(OUTER[0], OUTER[1], points)
    xs, ys = np.meshgrid(axis, axis)
    grid = np.column_stack([xs.ravel(), ys.ravel()])
    return grid[in_domain(grid)]


def sample_locations(rng, count):
    """Uniform draws on the domain by rejection from the outer square."""
    out = np.zeros((0, 2))
    while len(out) < count:
        draw = rng.uniform(OUTER[0], OUTER[1], size=(2 * (count - len(out)) + 4, 2))
        out = np.vstack([out, draw[in_domain(draw)]])
    return out[:count]
