# -*- coding: utf-8 -*-

from types import SimpleNamespace
import numpy as np
import pytest
from modules.spatial import Triangulation, orthonormal_basis
from modules.temporal import TemporalSpec, build_temporal_basis
from modules.sfpc import ModelParams, ModelBases, ObservationPanel, simulate_scores

# Unit square cut along its diagonal
SQUARE_VERTICES = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
SQUARE_TRIANGLES = [(0, 1, 2), (0, 2, 3)]

# Unit square cut into four triangles around its centre
CROSS_VERTICES = SQUARE_VERTICES + [(0.5, 0.5)]
CROSS_TRIANGLES = [(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope='session')
def square():
    return Triangulation.from_arrays(SQUARE_VERTICES, SQUARE_TRIANGLES)


@pytest.fixture(scope='session')
def cross():
    return Triangulation.from_arrays(CROSS_VERTICES, CROSS_TRIANGLES)


@pytest.fixture(scope='session')
def cubic_basis(cross):
    return orthonormal_basis(cross, 3, 1)


@pytest.fixture(scope='session')
def quadratic_basis(cross):
    return orthonormal_basis(cross, 2, 0)


def random_panel(rng, n, per_time, n_b=4, n_c=2, empty=()):
    """Panel with random design matrices, for state-space checks."""
    counts = np.array([0 if t in empty else per_time for t in range(n)])
    size = int(counts.sum())
    return ObservationPanel(rng.uniform(0, 1, (size, 2)), rng.normal(size=size), counts,
                            B=rng.normal(size=(size, n_b)), C=rng.normal(size=(n, n_c)))


def random_params(rng, J, p, n_b=4, n_c=2, sigma2=0.5):
    Theta, _ = np.linalg.qr(rng.normal(size=(n_b, J)))
    theta_b = rng.normal(size=n_b)
    K = rng.uniform(-0.4, 0.4, size=(p, J)) / p
    return ModelParams(theta_b / np.linalg.norm(theta_b), rng.normal(size=n_c), Theta, K,
                       sigma2, np.sort(rng.uniform(0.5, 2.0, size=J))[::-1])


@pytest.fixture(scope='session')
def small_problem(quadratic_basis):
    """
    Data drawn from a known two-component AR(1) model on the cross mesh,
    with a linear-in-time mean.
    """

    rng = np.random.default_rng(2024)
    n, per_time = 40, 20
    spatial = quadratic_basis
    temporal = build_temporal_basis(TemporalSpec(poly_degree=1, knots=(), fourier=0), n)
    bases = ModelBases(spatial, temporal)

    theta_b = spatial.project(lambda x, y: 1.0 + x + 0.5 * y)
    theta_b /= np.linalg.norm(theta_b)
    Theta = np.column_stack([spatial.project(lambda x, y: np.sin(np.pi * x)),
                             spatial.project(lambda x, y: np.cos(np.pi * y))])
    Theta, _ = np.linalg.qr(Theta)
    params = ModelParams(theta_b, np.array([2.0, 1.0]), Theta, np.array([[0.6, 0.3]]),
                         0.05, np.array([2.0, 0.5]))

    scores = simulate_scores(params.K, params.sigma2_j, n, rng)
    counts = np.full(n, per_time)
    locations = rng.uniform(0.0, 1.0, size=(n * per_time, 2))
    panel = ObservationPanel(locations, np.zeros(n * per_time), counts)
    panel = panel.with_design(spatial, temporal)
    values = (panel.B @ theta_b) * panel.per_row(panel.C @ params.theta_c) \
        + np.einsum('rj,rj->r', panel.B @ Theta, scores[panel.time_index]) \
        + rng.normal(0.0, np.sqrt(params.sigma2), size=panel.size)
    return SimpleNamespace(panel=panel.with_values(values), bases=bases, params=params,
                           scores=scores)
