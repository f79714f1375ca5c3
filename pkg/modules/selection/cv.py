# -*- coding: utf-8 -*-

"""
selection.cv
~~~~~~~~~~~~

K-fold leave-location-out cross validation. Each time point's locations
are split into near-equal folds; a fold is predicted from a model fitted
on everything else.
"""
from dataclasses import dataclass, field
from typing import List
import numpy as np
from modules.exceptions import ArgumentError, DataError, SfpcException
from modules.logger import get_logger
from modules.sfpc import Penalties, fit, fitted_values, demean_two_stage, main_effect_rows
from . import config

__all__ = ['CVPlan', 'CVResult', 'CVObjective', 'DemeanObjective', 'make_cv_plan',
           'cross_validate', 'cv_score', 'demean_cv']

FOLDS = config.getint('cv', 'folds', fallback=5)
SEED = config.getint('cv', 'seed', fallback=0)

_logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class CVPlan:
    folds: np.ndarray       # fold id of every panel row
    K: int
    seed: int

    def held_out(self, fold):
        return self.folds == fold


@dataclass
class CVResult:
    score: float
    fold_scores: List[float] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)


def make_cv_plan(panel, K=FOLDS, seed=SEED):
    """
    Randomly permute the rows of each time point and deal them to folds
    0..K-1 in turn, so per-time fold sizes differ by at most one.

    :rtype: CVPlan
    """

    if K < 2:
        raise ArgumentError('Cross validation needs at least 2 folds, got %r' % K)
    rng = np.random.default_rng(seed)
    folds = np.zeros(panel.size, dtype=np.int64)
    for t in range(panel.n):
        count = int(panel.counts[t])
        if count:
            order = rng.permutation(count)
            folds[panel.offsets[t] + order] = np.arange(count) % K
    return CVPlan(folds, int(K), int(seed))


def _fold_error(task):
    panel, bases, fit_config, plan, fold = task
    held = plan.held_out(fold)
    model = fit(panel.subset(~held), bases, fit_config)
    test = panel.subset(held)
    errors = test.values - fitted_values(model, test)
    return float(errors @ errors), int(held.sum())


def _demean_fold_error(task):
    panel, bases, penalties, plan, fold = task
    held = plan.held_out(fold)
    effects = demean_two_stage(panel.subset(~held), bases, penalties)
    test = panel.subset(held)
    errors = test.values - main_effect_rows(test, effects.theta_mu, effects.theta_nu)
    return float(errors @ errors), int(held.sum())


def _score_folds(func, tasks, plan, runner):
    # Pooled squared error over the folds that did not fail
    if runner is None:
        outcomes = []
        for task in tasks:
            try:
                outcomes.append((func(task), None))
            except SfpcException as e:
                outcomes.append((None, str(e)))
    else:
        outcomes = [(result.value, result.error) for result in runner.map(func, tasks, 'fold')]

    total, count, fold_scores, failures = 0.0, 0, [], []
    for fold, (value, error) in enumerate(outcomes):
        if error is not None:
            _logger.warning('CV fold %d/%d failed: %s' % (fold + 1, plan.K, error))
            failures.append('fold %d: %s' % (fold + 1, error))
            continue
        sse, size = value
        total += sse
        count += size
        fold_scores.append(sse / size if size else 0.0)

    score = total / count if count else np.inf
    if failures:
        _logger.warning('CV score averaged over %d of %d folds' % (plan.K - len(failures), plan.K))
    return CVResult(float(score), fold_scores, failures)


def cross_validate(panel, bases, fit_config, penalties=None, plan=None, runner=None):
    """
    Mean squared prediction error over the held-out rows of every fold.
    A fold whose fit fails is logged, recorded and left out.

    :param ObservationPanel panel: the data
    :param ModelBases bases: spatial and temporal bases
    :param FitConfig fit_config: model settings; penalties override its own
    :param Penalties penalties: smoothing parameters to score
    :param CVPlan plan: fold assignment, a default plan is drawn if missing
    :param TaskRunner runner: optional pool running the folds
    :rtype: CVResult
    """

    if panel.size == 0:
        raise DataError('Cannot cross-validate an empty panel')
    if not panel.has_design:
        panel = panel.with_design(bases.spatial, bases.temporal)
    plan = plan or make_cv_plan(panel)
    if len(plan.folds) != panel.size:
        raise ArgumentError('CV plan covers %d rows, panel has %d' % (len(plan.folds), panel.size))
    if penalties is not None:
        fit_config = fit_config.replace(penalties=penalties)

    tasks = [(panel, bases, fit_config, plan, fold) for fold in range(plan.K)]
    result = _score_folds(_fold_error, tasks, plan, runner)
    _logger.info('CV score %.6g at log10 lambda %s'
                 % (result.score, np.round(fit_config.penalties.log10(), 3).tolist()))
    return result


def cv_score(panel, bases, fit_config, penalties=None, plan=None, runner=None):
    """Mean squared held-out prediction error; see :func:`cross_validate`."""
    return cross_validate(panel, bases, fit_config, penalties, plan, runner).score


class CVObjective:
    """
    Picklable map from log10(lambda_mu_s, lambda_mu_t, lambda_pc) to the CV
    score. Invalid or failing points score +inf.

    ``fixed`` holds log10 values for the three penalties with NaN marking
    the free ones; the callable then takes only the free values, in order.
    """

    def __init__(self, panel, bases, fit_config, plan, runner=None, fixed=None):
        if not panel.has_design:
            panel = panel.with_design(bases.spatial, bases.temporal)
        self.panel = panel
        self.bases = bases
        self.fit_config = fit_config
        self.plan = plan
        self.runner = runner
        self.fixed = np.full(3, np.nan) if fixed is None else np.asarray(fixed, dtype=float)

    @property
    def dim(self):
        return int(np.isnan(self.fixed).sum())

    def full(self, free):
        values = self.fixed.copy()
        values[np.isnan(values)] = np.asarray(free, dtype=float)
        return values

    def __getstate__(self):
        state = self.__dict__.copy()
        state['runner'] = None
        return state

    def __call__(self, log_lambdas):
        try:
            penalties = Penalties.from_log10(self.full(log_lambdas))
        except (ArgumentError, OverflowError) as e:
            _logger.warning('Skipping log10 lambda %s: %s' % (list(log_lambdas), e))
            return np.inf
        score = cv_score(self.panel, self.bases, self.fit_config, penalties, self.plan, self.runner)
        return score if np.isfinite(score) else np.inf


def demean_cv(panel, bases, penalties, plan=None, runner=None):
    """
    Leave-location-out CV of the main-effects fit mu(x, y) + nu(t): each
    fold is predicted by the effects fitted to the other folds.

    :param Penalties penalties: lambda_mu_s and lambda_mu_t are used
    :rtype: CVResult
    """

    if panel.size == 0:
        raise DataError('Cannot cross-validate an empty panel')
    if not panel.has_design:
        panel = panel.with_design(bases.spatial, bases.temporal)
    plan = plan or make_cv_plan(panel)
    if len(plan.folds) != panel.size:
        raise ArgumentError('CV plan covers %d rows, panel has %d' % (len(plan.folds), panel.size))
    tasks = [(panel, bases, penalties, plan, fold) for fold in range(plan.K)]
    result = _score_folds(_demean_fold_error, tasks, plan, runner)
    _logger.info('Main-effects CV score %.6g at lambda_mu_s=%.4g, lambda_mu_t=%.4g'
                 % (result.score, penalties.lambda_mu_s, penalties.lambda_mu_t))
    return result


class DemeanObjective(CVObjective):
    """
    Picklable map from log10(lambda_mu_s, lambda_mu_t) to the CV score of
    the main-effects fit. ``fixed`` works as for :class:`CVObjective`,
    with two entries.
    """

    def __init__(self, panel, bases, plan, runner=None, fixed=None):
        super(DemeanObjective, self).__init__(
            panel, bases, None, plan, runner, np.full(2, np.nan) if fixed is None else fixed)

    def __call__(self, log_lambdas):
        try:
            mu_s, mu_t = (10.0 ** float(v) for v in self.full(log_lambdas))
            penalties = Penalties(mu_s, mu_t)
        except (ArgumentError, OverflowError) as e:
            _logger.warning('Skipping log10 lambda %s: %s' % (list(log_lambdas), e))
            return np.inf
        score = demean_cv(self.panel, self.bases, penalties, self.plan, self.runner).score
        return score if np.isfinite(score) else np.inf
