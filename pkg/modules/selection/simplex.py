# -*- coding: utf-8 -*-

"""
selection.simplex
~~~~~~~~~~~~~~~~~

Two-stage search for the smoothing parameters in log10 space: a coarse
grid, then Nelder-Mead from the best grid point.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import List
import numpy as np
from scipy.optimize import minimize
from modules.exceptions import ArgumentError
from modules.logger import get_logger
from . import config

__all__ = ['SimplexResult', 'simplex_search', 'grid_points']

GRID_LOW = config.getfloat('simplex', 'grid_low', fallback=-4.0)
GRID_HIGH = config.getfloat('simplex', 'grid_high', fallback=4.0)
GRID_POINTS = config.getint('simplex', 'grid_points', fallback=3)
DIAMETER = config.getfloat('simplex', 'diameter', fallback=0.05)
BUDGET = config.getint('simplex', 'budget', fallback=60)
INITIAL_STEP = config.getfloat('simplex', 'initial_step', fallback=2.0)

_logger = get_logger(__name__)


@dataclass
class SimplexResult:
    lam: np.ndarray                 # best log10 lambda
    value: float
    converged: bool
    evaluations: int
    history: List[tuple] = field(default_factory=list)

    @property
    def penalties(self):
        return 10.0 ** self.lam


def grid_points(dim=3, low=GRID_LOW, high=GRID_HIGH, points=GRID_POINTS):
    axis = np.linspace(low, high, points) if points > 1 else np.array([(low + high) / 2.0])
    return [np.array(point) for point in product(axis, repeat=dim)]


class _Tracker:
    """Counts evaluations and keeps the best point seen."""

    def __init__(self, objective):
        self.objective = objective
        self.history = []
        self.best_x = None
        self.best_value = np.inf

    def record(self, x, value):
        value = float(value) if np.isfinite(value) else np.inf
        self.history.append((np.array(x, dtype=float), value))
        if self.best_x is None or value < self.best_value:
            self.best_x, self.best_value = np.array(x, dtype=float), value
        return value

    def __call__(self, x):
        return self.record(x, self.objective(np.asarray(x, dtype=float)))


def simplex_search(objective, start=None, budget=BUDGET, tol=DIAMETER, dim=3,
                   grid_low=GRID_LOW, grid_high=GRID_HIGH, n_grid=GRID_POINTS,
                   step=INITIAL_STEP, runner=None):
    """
    Minimize ``objective`` over log10 smoothing parameters.

    Stage one scores ``start`` (if given) and an ``n_grid``-per-axis grid
    over [grid_low, grid_high], optionally through ``runner``. Stage two is
    Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink 0.5)
    from the best grid point until the simplex diameter drops below
    ``tol`` or the evaluation budget runs out.

    :param objective: callable of a length-``dim`` log10 vector
    :param start: optional starting point, scored before the grid
    :param int budget: total objective evaluations, grid included
    :param float tol: simplex diameter at convergence, log10 units
    :param int n_grid: grid points per axis; 0 skips the grid
    :param TaskRunner runner: optional pool for the grid stage
    :rtype: SimplexResult
    """

    if budget < 1:
        raise ArgumentError('Search budget must be >= 1, got %r' % budget)
    tracker = _Tracker(objective)

    candidates = [] if start is None else [np.asarray(start, dtype=float)]
    if n_grid > 0:
        candidates += grid_points(dim, grid_low, grid_high, n_grid)
    candidates = candidates[:budget]
    if not candidates:
        raise ArgumentError('Nothing to evaluate: give a start point or a grid')
    if runner is None:
        for point in candidates:
            tracker(point)
    else:
        for point, result in zip(candidates, runner.map(objective, candidates, 'grid point')):
            tracker.record(point, np.inf if result.error is not None else result.value)
    _logger.info('Grid stage: best %.6g at %s after %d evaluations'
                 % (tracker.best_value, tracker.best_x.tolist(), len(tracker.history)))

    remaining = budget - len(tracker.history)
    converged = False
    if remaining > 0:
        x0 = tracker.best_x.copy()
        simplex = np.vstack([x0] + [x0 + step * np.eye(dim)[i] for i in range(dim)])
        # fatol=inf leaves the diameter as the only stopping rule
        result = minimize(tracker, x0, method='Nelder-Mead',
                          options={'xatol': tol, 'fatol': np.inf, 'maxfev': remaining,
                                   'initial_simplex': simplex, 'adaptive': False})
        converged = bool(result.status == 0)
        if not converged:
            _logger.warning('Simplex search stopped before converging: %s' % result.message)

    _logger.info('Simplex search: best %.6g at log10 lambda %s (%d evaluations)'
                 % (tracker.best_value, np.round(tracker.best_x, 4).tolist(), len(tracker.history)))
    return SimplexResult(tracker.best_x, tracker.best_value, converged,
                         len(tracker.history), tracker.history)
