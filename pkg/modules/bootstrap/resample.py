# -*- coding: utf-8 -*-

"""
bootstrap.resample
~~~~~~~~~~~~~~~~~~

Semi-parametric bootstrap of the principal component functions: scores
are redrawn from the fitted AR model, noise from the fit residuals of the
same time point, and every replicate is refitted.
"""
from dataclasses import dataclass, field, replace
from typing import List, Optional
import numpy as np
from modules.exceptions import ArgumentError, BootstrapError, SfpcException
from modules.logger import get_logger
from modules.parallel import split_seeds
from modules.sfpc import fit, simulate_scores, canonicalize
from modules.sfpc.objective import mean_rows

__all__ = ['BootstrapConfig', 'BootstrapResult', 'bootstrap_sd', 'bootstrap_replicate']

# Score variances and residuals below this make the fit degenerate
DEGENERATE_TOL = 1e-10

_logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class BootstrapConfig:
    B: int = 100
    seed: int = 0
    grid: Optional[np.ndarray] = None
    seeds: Optional[tuple] = None

    def __post_init__(self):
        if self.B < 2:
            raise ArgumentError('Bootstrap needs B >= 2 replicates, got %r' % self.B)
        if self.grid is None or np.asarray(self.grid).ndim != 2:
            raise ArgumentError('Bootstrap grid must be an (N, 2) point array')
        if self.seeds is not None and len(self.seeds) != self.B:
            raise ArgumentError('Got %d seeds for %d replicates' % (len(self.seeds), self.B))

    def replicate_seeds(self):
        if self.seeds is not None:
            return [int(s) for s in self.seeds]
        return split_seeds(self.seed, self.B)


@dataclass
class BootstrapResult:
    sd: np.ndarray                  # (N, J) SD surface per component
    replicates_completed: int
    failures: List[str] = field(default_factory=list)


def _resample_residuals(residuals, panel, rng):
    out = np.empty_like(residuals)
    for t in range(panel.n):
        rows = panel.rows(t)
        if panel.counts[t]:
            out[rows] = rng.choice(residuals[rows], size=panel.counts[t], replace=True)
    return out


def bootstrap_replicate(task):
    """
    One replicate: simulate, refit with the original configuration and
    return the principal components on the design rows of the grid.

    :param tuple task: model, panel with design, grid design matrix and seed
    :rtype: numpy.ndarray
    """

    model, panel, design, seed = task
    params = model.params
    rng = np.random.default_rng(seed)
    scores = simulate_scores(params.K, params.sigma2_j, panel.n, rng)
    signal = mean_rows(params, panel) + np.einsum(
        'rj,rj->r', panel.B @ params.Theta, scores[panel.time_index])
    values = signal + _resample_residuals(model.residuals, panel, rng)
    replica = fit(panel.with_values(values), model.bases, model.config)
    return design @ replica.params.Theta


def _is_degenerate(model):
    return bool(np.all(model.params.sigma2_j <= DEGENERATE_TOL)
                and np.all(np.abs(model.residuals) <= DEGENERATE_TOL))


def bootstrap_sd(model, panel, boot_config, runner=None):
    """
    Pointwise standard deviation surfaces of the estimated principal
    components over bootstrap replicates. Each replicate component takes
    the sign that makes its grid inner product with the original positive;
    flipping a fitted column leaves the result unchanged.

    :param FittedModel model: the fit, residuals included
    :param ObservationPanel panel: the data the model was fitted on
    :param BootstrapConfig boot_config: replicates, seeds and grid
    :param TaskRunner runner: optional pool running the replicates
    :rtype: BootstrapResult
    :raises BootstrapError: if fewer than two replicates complete
    """

    if len(model.residuals) != panel.size:
        raise ArgumentError('Model residuals cover %d rows, panel has %d'
                            % (len(model.residuals), panel.size))
    grid = np.asarray(boot_config.grid, dtype=float)
    design = model.bases.spatial.evaluate(grid)
    J = model.params.J

    if _is_degenerate(model):
        _logger.warning('Degenerate model: bootstrap SD surfaces are zero')
        return BootstrapResult(np.zeros((len(grid), J)), boot_config.B)

    # Replicates depend on Theta only up to the sign of its columns
    params, moments = canonicalize(model.params, model.moments)
    model = replace(model, params=params, moments=moments)
    if not panel.has_design:
        panel = panel.with_design(model.bases.spatial, model.bases.temporal)
    original = design @ model.params.Theta
    tasks = [(model, panel, design, seed) for seed in boot_config.replicate_seeds()]

    if runner is None:
        outcomes = []
        for index, task in enumerate(tasks):
            _logger.info('Bootstrap replicate %d/%d' % (index + 1, len(tasks)))
            try:
                outcomes.append((bootstrap_replicate(task), None))
            except SfpcException as e:
                outcomes.append((None, str(e)))
    else:
        outcomes = [(result.value, result.error)
                    for result in runner.map(bootstrap_replicate, tasks, 'replicate')]

    replicates, failures = [], []
    for index, (pcs, error) in enumerate(outcomes):
        if error is not None:
            _logger.warning('Bootstrap replicate %d failed: %s' % (index + 1, error))
            failures.append('replicate %d: %s' % (index + 1, error))
            continue
        signs = np.where(np.einsum('gj,gj->j', pcs, original) < 0, -1.0, 1.0)
        replicates.append(pcs * signs)

    if len(replicates) < 2:
        raise BootstrapError('Only %d of %d bootstrap replicates completed'
                             % (len(replicates), boot_config.B))
    sd = np.std(np.stack(replicates), axis=0, ddof=1)
    _logger.info('Bootstrap: %d replicates, max SD per component %s'
                 % (len(replicates), np.round(sd.max(axis=0), 6).tolist()))
    return BootstrapResult(sd, len(replicates), failures)
