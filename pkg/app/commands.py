# -*- coding: utf-8 -*-
"""
app.commands
~~~~~~~~~~~~

Subcommands of the command-line application.
"""

import os
from collections import namedtuple
import numpy as np
import pandas as pd
from modules.exceptions import ConfigError, DataError
from modules.logger import get_logger
from modules.parallel import TaskRunner, worker_count
from modules.spatial import read_triangulation
from modules.sfpc import ModelBases, fit, forecast, reconstruct, pc_surfaces, \
    save_model, load_model, demean_two_stage, remove_main_effects, main_effects_at, Penalties
from modules.selection import CVObjective, DemeanObjective, make_cv_plan, simplex_search, \
    criterion_table, select_p, variance_proportions, select_J
from modules.simulation import SETUPS, VARIANCE_LEVELS, StudyOptions, run_study
from modules.bootstrap import BootstrapConfig, bootstrap_sd
from . import app, option
from .data import load_panel, read_records, parse_time
from .models import RunConfig
from .utils import domain_grid, write_grid, write_table, month_of, mae_by_month, \
    mape_by_month, update_method_row, output_path

_logger = get_logger(__name__)

SFPC = app.config.get('SFPC_METHOD')
MFPC = app.config.get('MFPC_METHOD')
MODEL_DIRS = app.config.get('MODEL_DIRS')
PENALTY_NAMES = ('lambda_mu_s', 'lambda_mu_t', 'lambda_pc')

Prepared = namedtuple('Prepared', 'triangulation panel bases demean start_month')


def _run_config(args, require_data=True, **overrides):
    overrides.update(output=args.output, seed=args.seed)
    if args.config:
        run_config = RunConfig.load(args.config, overrides, require_data)
    elif require_data:
        raise ConfigError('--config is required for %s' % args.command)
    else:
        run_config = RunConfig({k: v for k, v in overrides.items() if v is not None})
        run_config.validate(require_data=False)
    os.makedirs(run_config.output, exist_ok=True)
    args.error_dir = run_config.output
    return run_config


def _runner(args):
    workers = worker_count(args.workers)
    return TaskRunner(workers, args.verbose, args.logfile) if workers > 1 else None


def _start_month(labels, run_config):
    kind, ordinal = parse_time(str(labels[0]))
    return ordinal % 12 + 1 if kind == 'month' else run_config.start_month


def _write_selection(run_config, name, names, objective, result):
    rows = []
    for evaluation, (point, value) in enumerate(result.history, start=1):
        rows.append([evaluation] + objective.full(point).tolist() + [value])
    columns = ['evaluation'] + ['log10_%s' % n for n in names] + ['cv_score']
    frame = pd.DataFrame(rows, columns=columns)
    frame['best'] = frame['cv_score'] == result.value
    write_table(output_path(run_config, app.config.get('SELECTION_FILE') % name), frame)


def _demean_penalties(run_config, panel, bases, runner):
    """
    Penalties of the main-effects fit. lambda_mu_s and lambda_mu_t marked
    ``select`` are chosen by CV of the main-effects fit alone, on the fold
    plan the model search uses.
    """

    names = PENALTY_NAMES[:2]
    defaults = run_config.penalties()
    fixed = np.full(2, np.nan)
    for i, name in enumerate(names):
        value = run_config.values[name]
        if value != 'select':
            fixed[i] = np.log10(value) if value > 0 else -np.inf
    if not np.isnan(fixed).any():
        return defaults

    plan = make_cv_plan(panel, run_config.folds, run_config.seed)
    objective = DemeanObjective(panel, bases, plan, runner, fixed)
    result = simplex_search(objective, budget=run_config.budget, dim=objective.dim, runner=runner)
    _write_selection(run_config, 'demean', names, objective, result)
    mu_s, mu_t = (10.0 ** v for v in objective.full(result.lam))
    _logger.info('Main-effects penalties lambda_mu_s=%.4g, lambda_mu_t=%.4g (CV %.6g)'
                 % (mu_s, mu_t, result.value))
    return Penalties(mu_s, mu_t, defaults.lambda_pc)


def _prepare(run_config, runner=None, main_effects=None, demean=None):
    """
    Load the mesh and the data and build the bases. Known ``main_effects``
    are subtracted; otherwise they are fitted and removed when ``demean``
    (the run file's setting by default) is on.
    """

    triangulation = read_triangulation(run_config.triangulation)
    panel, rejects = load_panel(run_config.data, triangulation)
    if len(rejects):
        write_table(output_path(run_config, app.config.get('REJECTS_TABLE')), rejects)
    if panel.size == 0:
        raise DataError('No observations inside the domain')

    bases = ModelBases.build(triangulation, run_config.degree, run_config.smoothness,
                             run_config.temporal_spec(), panel.n)
    panel = panel.with_design(bases.spatial, bases.temporal)
    demean = run_config.demean if demean is None else demean
    result = None
    if main_effects is not None:
        result = remove_main_effects(panel, *main_effects)
    elif demean:
        result = demean_two_stage(panel, bases, _demean_penalties(run_config, panel, bases, runner))
    if result is not None:
        panel = result.panel
    return Prepared(triangulation, panel, bases, result, _start_month(panel.labels, run_config))


def _load(run_config, method):
    path = os.path.join(run_config.output, MODEL_DIRS[method])
    if not os.path.isdir(path):
        raise ConfigError('No %s model in %s; run fit first' % (method, run_config.output))
    return load_model(path)


def _first_label(run_config):
    path = os.path.join(run_config.output, app.config.get('TIME_LABELS'))
    if not os.path.isfile(path):
        return 'index', 1
    return parse_time(str(pd.read_csv(path, dtype=str)['label'].iloc[0]))


def _select_penalties(run_config, prepared, seed, runner, search_all=False):
    """
    Cross-validated simplex search over the penalties marked ``select`` (all
    three with ``search_all``); the evaluations go to a selection report.
    """

    fixed = np.full(3, np.nan)
    if not search_all:
        for i, name in enumerate(PENALTY_NAMES):
            value = run_config.values[name]
            if value != 'select':
                fixed[i] = np.log10(value) if value > 0 else -np.inf
    plan = make_cv_plan(prepared.panel, run_config.folds, seed)
    objective = CVObjective(prepared.panel, prepared.bases, run_config.fit_config(), plan,
                            runner, fixed)
    result = simplex_search(objective, budget=run_config.budget, dim=objective.dim, runner=runner)

    _write_selection(run_config, 'lambda', PENALTY_NAMES, objective, result)
    penalties = run_config.penalties(objective.full(result.lam))
    _logger.info('Selected penalties %s (CV %.6g, converged=%s)'
                 % (penalties.as_dict(), result.value, result.converged))
    return penalties


@app.command('fit', option('--freeze-K', dest='freeze_K', action='store_true',
                           help='hold the AR coefficients at zero (mFPC baseline)'))
def fit_command(args):
    """
    Fit the model to the data of the run file and write the model archive
    and the per-month residual MAE row.
    """

    run_config = _run_config(args, freeze_K=True if args.freeze_K else None)
    runner = _runner(args)
    prepared = _prepare(run_config, runner)
    penalties = run_config.penalties()
    if run_config.selecting_penalties:
        penalties = _select_penalties(run_config, prepared, run_config.seed, runner)

    model = fit(prepared.panel, prepared.bases, run_config.fit_config(penalties))
    if prepared.demean is not None:
        model.main_effects = (prepared.demean.theta_mu, prepared.demean.theta_nu)
    method = MFPC if run_config.freeze_K else SFPC
    save_model(model, output_path(run_config, MODEL_DIRS[method]))
    labels = pd.DataFrame({'t': np.arange(1, prepared.panel.n + 1), 'label': prepared.panel.labels})
    write_table(output_path(run_config, app.config.get('TIME_LABELS')), labels)

    mae = mae_by_month(model.residuals, prepared.panel, prepared.start_month)
    update_method_row(output_path(run_config, app.config.get('MAE_TABLE')), method, mae)
    for warning in model.warnings:
        _logger.warning('%s fit: %s' % (method, warning))
    _logger.info('%s fit: %d iterations, converged=%s' % (method, model.iterations, model.converged))


@app.command('cv-select')
def cv_select_command(args):
    """
    Select the penalties by cross validation and, when configured, the AR
    order by information criteria and J by the share of score variance.
    """

    run_config = _run_config(args)
    runner = _runner(args)
    prepared = _prepare(run_config, runner)
    penalties = _select_penalties(run_config, prepared, run_config.seed, runner,
                                  search_all=not run_config.selecting_penalties)

    if run_config.p_candidates:
        models = [fit(prepared.panel, prepared.bases, run_config.fit_config(penalties, p=p))
                  for p in run_config.p_candidates]
        chosen = select_p(models, run_config.criterion)
        frame = pd.DataFrame({
            'p': [p for p, _ in criterion_table(models, 'AIC')],
            'AIC': [v for _, v in criterion_table(models, 'AIC')],
            'BIC': [v for _, v in criterion_table(models, 'BIC')]
        })
        frame['selected'] = frame['p'] == chosen
        write_table(output_path(run_config, app.config.get('SELECTION_FILE') % 'p'), frame)

    if run_config.J_max:
        model = fit(prepared.panel, prepared.bases,
                    run_config.fit_config(penalties, J=run_config.J_max))
        chosen = select_J(model, run_config.tau)
        shares = variance_proportions(model)
        frame = pd.DataFrame({'J': np.arange(1, len(shares) + 1), 'cumulative_share': shares})
        frame['selected'] = frame['J'] == chosen
        write_table(output_path(run_config, app.config.get('SELECTION_FILE') % 'J'), frame)


@app.command('simulate',
             option('--setup', nargs='+', choices=SETUPS, default=list(SETUPS)),
             option('--variance', nargs='+', type=float, choices=sorted(VARIANCE_LEVELS),
                    default=sorted(VARIANCE_LEVELS, reverse=True)),
             option('--runs', type=int, default=10),
             option('--n', type=int, help='time points per data set'),
             option('--methods', nargs='+', choices=(SFPC, MFPC), default=[SFPC, MFPC]),
             option('--select-penalties', dest='select_penalties', action='store_true',
                    help='choose the penalties of every fit by CV'))
def simulate_command(args):
    """Run the simulation study and write its summary and per-run tables."""
    run_config = _run_config(args, require_data=False)
    if args.runs < 0:
        raise ConfigError('--runs must be >= 0')
    options = None
    if args.select_penalties:
        options = StudyOptions(select_penalties=True, folds=run_config.folds,
                               budget=run_config.budget)
    result = run_study(args.setup, args.variance, args.runs, args.methods,
                       seed=run_config.seed, n=args.n, options=options, runner=_runner(args))
    write_table(output_path(run_config, app.config.get('SIMULATION_TABLE')), result.table)
    write_table(output_path(run_config, app.config.get('SIMULATION_RUNS')), result.records)
    for failure in result.failures:
        _logger.warning('Simulation failure: %s' % failure)


@app.command('forecast',
             option('--horizon', type=int, default=12),
             option('--truth', help='CSV of observed values at the forecast times'),
             option('--method', choices=(SFPC, MFPC), default=SFPC))
def forecast_command(args):
    """
    Forecast surfaces on the grid for the next ``horizon`` time points and,
    given the truth, the per-month mean absolute prediction errors.
    """

    run_config = _run_config(args, require_data=False)
    model = _load(run_config, args.method)
    triangulation = model.bases.spatial.triangulation
    grid = domain_grid(triangulation, run_config.spacing)
    result = forecast(model, args.horizon, grid)
    spatial, temporal = main_effects_at(model.bases, model.main_effects, grid, result.times)
    for h in range(args.horizon):
        write_grid(output_path(run_config, app.config.get('FORECAST_FILE') % (h + 1)), grid,
                   mean=result.mean[h] + spatial + temporal[h], sd=result.sd[h])

    if args.truth:
        records, kind = read_records(args.truth)
        first_kind, first = _first_label(run_config)
        if kind != first_kind:
            raise DataError('Truth times (%s) do not match the fitted times (%s)' % (kind, first_kind))
        times = np.array([r.t - first + 1 for r in records])
        points = np.array([(r.x, r.y) for r in records]).reshape(-1, 2)
        keep = (times > model.n) & (times <= model.n + args.horizon) & triangulation.contains(points)
        if not keep.any():
            raise DataError('No truth rows inside the domain and the forecast horizon')
        if not keep.all():
            _logger.warning('Ignoring %d truth row(s) outside the domain or horizon' % (~keep).sum())
        times, points = times[keep], points[keep]
        truth = np.array([r.value for r in records])[keep]
        at_points = forecast(model, args.horizon, points)
        spatial, temporal = main_effects_at(model.bases, model.main_effects, points, at_points.times)
        steps = times - model.n - 1
        predicted = at_points.mean[steps, np.arange(len(points))] + spatial + temporal[steps]
        start = (first % 12 + 1) if kind == 'month' else run_config.start_month
        mape = mape_by_month(predicted, truth, times, start)
        update_method_row(output_path(run_config, app.config.get('MAPE_TABLE')), args.method, mape)


@app.command('bootstrap',
             option('--replicates', type=int, default=100, help='bootstrap replicates B'))
def bootstrap_command(args):
    """Bootstrap SD surfaces of the principal components of the sFPC fit."""
    run_config = _run_config(args)
    runner = _runner(args)
    model = _load(run_config, SFPC)
    prepared = _prepare(run_config, main_effects=model.main_effects, demean=False)
    grid = domain_grid(prepared.triangulation, run_config.spacing)
    result = bootstrap_sd(model, prepared.panel,
                          BootstrapConfig(args.replicates, run_config.seed, grid), runner)
    columns = {'sd_pc%d' % (j + 1): result.sd[:, j] for j in range(result.sd.shape[1])}
    write_grid(output_path(run_config, app.config.get('BOOTSTRAP_FILE')), grid, **columns)
    for failure in result.failures:
        _logger.warning('Bootstrap failure: %s' % failure)


@app.command('export-grid',
             option('--times', help='comma-separated time indices, all by default'),
             option('--method', choices=(SFPC, MFPC), default=SFPC))
def export_grid_command(args):
    """Write fitted surfaces and principal component functions on the grid."""
    run_config = _run_config(args, require_data=False)
    model = _load(run_config, args.method)
    grid = domain_grid(model.bases.spatial.triangulation, run_config.spacing)
    if args.times:
        try:
            times = [int(t) for t in args.times.split(',') if t.strip()]
        except ValueError:
            raise ConfigError('--times must list integers, got "%s"' % args.times)
    else:
        times = list(range(1, model.n + 1))

    spatial, temporal = main_effects_at(model.bases, model.main_effects, grid, times)
    for i, t in enumerate(times):
        write_grid(output_path(run_config, app.config.get('SURFACE_FILE') % t), grid,
                   value=reconstruct(model, t, grid) + spatial + temporal[i])
    pcs = pc_surfaces(model, grid)
    for j in range(pcs.shape[1]):
        write_grid(output_path(run_config, app.config.get('PC_FILE') % (j + 1)), grid,
                   value=pcs[:, j])
