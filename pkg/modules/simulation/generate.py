# -*- coding: utf-8 -*-

"""
simulation.generate
~~~~~~~~~~~~~~~~~~~

Draw a data set of one simulation setup together with the noiseless truth
on the evaluation grid.
"""
from dataclasses import dataclass
import numpy as np
from modules.sfpc import ObservationPanel, simulate_scores
from .domain import eval_grid, sample_locations
from .truth import TruthFunctions

__all__ = ['SimulatedData', 'generate']


@dataclass
class SimulatedData:
    setup: object
    panel: ObservationPanel
    grid: np.ndarray
    mean: np.ndarray        # (n, G) true mean surfaces
    surfaces: np.ndarray    # (n, G) true noiseless surfaces
    scores: np.ndarray      # (n, J)
    phi: np.ndarray         # (G, J) true principal components on the grid


def generate(setup, grid=None):
    """
    Simulate ``setup``: AR score series after a burn-in, location counts
    uniform on min_locations..max_locations, locations uniform on the
    domain and Gaussian noise.

    :param SimSetup setup: configuration and seed
    :param grid: evaluation points, :func:`eval_grid` by default
    :rtype: SimulatedData
    """

    rng = np.random.default_rng(setup.seed)
    n = setup.n
    grid = eval_grid() if grid is None else np.asarray(grid, dtype=float)
    truth = TruthFunctions

    counts = rng.integers(setup.min_locations, setup.max_locations + 1, size=n)
    scores = simulate_scores(setup.K, setup.sigma2_j, n, rng)
    temporal = truth.mu2(np.arange(1, n + 1), n, setup.varying_mean)

    locations = sample_locations(rng, int(counts.sum()))
    time_index = np.repeat(np.arange(n), counts)
    values = truth.mu1(locations[:, 0], locations[:, 1]) * temporal[time_index] \
        + np.einsum('rj,rj->r', truth.phi(locations), scores[time_index]) \
        + rng.normal(0.0, np.sqrt(setup.sigma2), size=len(locations))
    panel = ObservationPanel(locations, values, counts)

    phi = truth.phi(grid)
    mean = np.outer(temporal, truth.mu1(grid[:, 0], grid[:, 1]))
    return SimulatedData(setup, panel, grid, mean, mean + scores @ phi.T, scores, phi)
