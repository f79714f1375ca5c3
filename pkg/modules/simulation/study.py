# -*- coding: utf-8 -*-

"""
simulation.study
~~~~~~~~~~~~~~~~

Comparison harness: sFPC against the mFPC baseline (independent scores,
time-constant mean) over repeated simulated data sets.
"""
from dataclasses import dataclass, field
from typing import List
import numpy as np
import pandas as pd
from modules.exceptions import ArgumentError, SfpcException
from modules.logger import get_logger
from modules.parallel import split_seeds
from modules.spatial import orthonormal_basis
from modules.temporal import TemporalSpec, build_temporal_basis
from modules.sfpc import Penalties, ModelBases, FitConfig, fit
from modules.selection import CVObjective, make_cv_plan, simplex_search
from .domain import square_with_hole
from .generate import generate
from .metrics import miae, principal_angle
from .truth import SimSetup, SETUPS, VARIANCE_LEVELS
from . import config

__all__ = ['StudyOptions', 'StudyResult', 'run_study', 'fit_sfpc', 'fit_mfpc']

METHODS = tuple(config.getlist('study', 'methods', fallback=['sFPC', 'mFPC']))
METRICS = ('PA', 'MIAE_mu', 'MIAE_Z')
COLUMNS = ['setup', 'variance_level', 'method', 'metric', 'mean', 'se', 'runs_completed']

# Trend and seasonal terms of the sFPC mean; the mFPC mean is constant in time
SFPC_TEMPORAL = TemporalSpec(poly_degree=3, knots=(), fourier=5, period=12.0)
CONSTANT_TEMPORAL = TemporalSpec(poly_degree=0, knots=(), fourier=0, period=12.0)

_logger = get_logger(__name__)


@dataclass(frozen=True)
class StudyOptions:
    degree: int = config.getint('study', 'degree', fallback=3)
    smoothness: int = config.getint('study', 'smoothness', fallback=1)
    J: int = config.getint('study', 'J', fallback=2)
    p: int = config.getint('study', 'p', fallback=2)
    penalties: Penalties = field(default_factory=lambda: Penalties(
        config.getfloat('study', 'lambda_mu_s', fallback=1.0),
        config.getfloat('study', 'lambda_mu_t', fallback=1.0),
        config.getfloat('study', 'lambda_pc', fallback=1.0)))
    max_iter: int = config.getint('study', 'max_iter', fallback=200)
    tol: float = config.getfloat('study', 'tol', fallback=1e-6)
    spacing: float = config.getfloat('domain', 'spacing', fallback=0.5)
    select_penalties: bool = config.getboolean('study', 'select_penalties', fallback=False)
    folds: int = config.getint('study', 'folds', fallback=5)
    budget: int = config.getint('study', 'budget', fallback=60)


@dataclass
class StudyResult:
    table: pd.DataFrame
    records: pd.DataFrame
    failures: List[str] = field(default_factory=list)


@dataclass
class _Estimate:
    mean: np.ndarray        # (n, G)
    surfaces: np.ndarray    # (n, G)
    pcs: np.ndarray         # (G, J)


def _on_grid(model, design, extra_mean=None):
    params = model.params
    temporal = model.bases.temporal.evaluate(np.arange(1, model.n + 1, dtype=float))
    mean = np.outer(temporal @ params.theta_c, design @ params.theta_b)
    if extra_mean is not None:
        mean = mean + extra_mean
    pcs = design @ params.Theta
    return _Estimate(mean, mean + model.moments.alpha @ pcs.T, pcs)


def _with_penalties(panel, bases, cfg, options, seed):
    """
    ``cfg`` with its penalties chosen by CV simplex search when the options
    ask for it; folds come from the run seed.
    """

    if not options.select_penalties:
        return cfg
    plan = make_cv_plan(panel, options.folds, seed)
    result = simplex_search(CVObjective(panel, bases, cfg, plan), budget=options.budget)
    _logger.debug('Seed %d: log10 lambda %s (CV %.6g)' % (seed, result.lam.tolist(), result.value))
    return cfg.replace(penalties=Penalties.from_log10(result.lam))


def fit_sfpc(data, spatial, options):
    """sFPC fit of a simulated data set, evaluated on its grid."""
    bases = ModelBases(spatial, build_temporal_basis(SFPC_TEMPORAL, data.panel.n))
    cfg = FitConfig(J=options.J, p=options.p, penalties=options.penalties,
                    tol=options.tol, max_iter=options.max_iter)
    cfg = _with_penalties(data.panel, bases, cfg, options, data.setup.seed)
    model = fit(data.panel, bases, cfg)
    return _on_grid(model, spatial.evaluate(data.grid))


def fit_mfpc(data, spatial, options):
    """
    mFPC baseline: AR coefficients frozen at zero and a mean constant in
    time. When the true mean varies in time it is removed first by the
    two-step fit: a pooled temporal regression gives nu(t), then the data
    are regressed on nu(t) b(x, y).
    """

    panel = data.panel
    n = panel.n
    constant = ModelBases(spatial, build_temporal_basis(CONSTANT_TEMPORAL, n))
    design = spatial.evaluate(data.grid)
    extra_mean = None

    if data.setup.varying_mean:
        temporal = build_temporal_basis(SFPC_TEMPORAL, n)
        C = temporal.evaluate(np.arange(1, n + 1, dtype=float))
        eta = np.linalg.lstsq(C[panel.time_index], panel.values, rcond=None)[0]
        nu = C @ eta
        B = spatial.evaluate(panel.locations)
        X = B * nu[panel.time_index][:, None]
        theta = np.linalg.lstsq(X, panel.values, rcond=None)[0]
        panel = panel.with_values(panel.values - X @ theta)
        extra_mean = np.outer(nu, design @ theta)

    cfg = FitConfig(J=options.J, p=1, penalties=options.penalties, tol=options.tol,
                    max_iter=options.max_iter, freeze_K=True)
    cfg = _with_penalties(panel, constant, cfg, options, data.setup.seed)
    model = fit(panel, constant, cfg)
    return _on_grid(model, design, extra_mean)


FITTERS = {'sFPC': fit_sfpc, 'mFPC': fit_mfpc}


def _run_once(task):
    setup, methods, spatial, options = task
    data = generate(setup)
    out, errors = {}, {}
    for method in methods:
        try:
            estimate = FITTERS[method](data, spatial, options)
        except SfpcException as e:
            _logger.warning('Setup %s, seed %d: %s failed: %s' % (setup.setup, setup.seed, method, e))
            errors[method] = str(e)
            continue
        out[method] = {
            'PA': principal_angle(estimate.pcs, data.phi),
            'MIAE_mu': miae(estimate.mean, data.mean),
            'MIAE_Z': miae(estimate.surfaces, data.surfaces)
        }
    return out, errors


def _summarize(records):
    rows = []
    if records.empty:
        return pd.DataFrame(rows, columns=COLUMNS)
    keys = ['setup', 'variance_level', 'method', 'metric']
    for key, group in records.groupby(keys, sort=False):
        values = group['value'].to_numpy()
        se = values.std(ddof=1) / np.sqrt(len(values)) if len(values) > 1 else np.nan
        rows.append(list(key) + [values.mean(), se, len(values)])
    return pd.DataFrame(rows, columns=COLUMNS)


def run_study(setups=SETUPS, variances=tuple(VARIANCE_LEVELS), runs=10, methods=METHODS,
              seed=0, n=None, options=None, runner=None):
    """
    Repeat generate-and-fit ``runs`` times per (setup, variance) cell.

    Run seeds are ``split_seeds(seed, runs, setup_index, variance_index)``.
    Failed fits are logged, counted in ``failures`` and left out of the
    means and standard errors.

    :param setups: setup ids among i, ii, iii, iv
    :param variances: noise variance levels, 1.0 and/or 0.1
    :param int runs: data sets per cell
    :param methods: sFPC and/or mFPC
    :param int n: time points per data set, the setup default if missing
    :param StudyOptions options: basis and fit settings
    :param TaskRunner runner: optional pool running the data sets
    :rtype: StudyResult
    """

    options = options or StudyOptions()
    methods = tuple(methods)
    unknown = [m for m in methods if m not in FITTERS] + [s for s in setups if s not in SETUPS]
    if unknown:
        raise ArgumentError('Unknown method(s) or setup(s): %s' % ', '.join(unknown))

    tasks, cells = [], []
    spatial = None
    if runs > 0:
        spatial = orthonormal_basis(square_with_hole(options.spacing), options.degree,
                                    options.smoothness)
    for name in setups:
        for v, variance in enumerate(variances):
            for run, run_seed in enumerate(split_seeds(seed, runs, SETUPS.index(name), v)):
                setup = SimSetup(name, float(variance), seed=run_seed)
                if n is not None:
                    setup = setup.replace(n=int(n))
                tasks.append((setup, methods, spatial, options))
                cells.append((name, float(variance), run))

    if runner is None:
        outcomes = []
        for index, task in enumerate(tasks):
            _logger.info('Simulation run %d/%d' % (index + 1, len(tasks)))
            outcomes.append((_run_once(task), None))
    else:
        outcomes = [(result.value, result.error) for result in runner.map(_run_once, tasks, 'run')]

    records, failures = [], []
    for (name, variance, run), (value, error) in zip(cells, outcomes):
        if error is not None:
            failures.append('setup %s, variance %g, run %d: %s' % (name, variance, run + 1, error))
            continue
        metrics, errors = value
        for method, message in errors.items():
            failures.append('setup %s, variance %g, run %d, %s: %s'
                            % (name, variance, run + 1, method, message))
        for method in methods:
            for metric in METRICS:
                if method in metrics:
                    records.append((name, variance, method, metric, run + 1, metrics[method][metric]))

    records = pd.DataFrame(records, columns=['setup', 'variance_level', 'method', 'metric',
                                             'run', 'value'])
    if failures:
        _logger.warning('%d simulation fit(s) failed' % len(failures))
    return StudyResult(_summarize(records), records, failures)
