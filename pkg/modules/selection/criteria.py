# -*- coding: utf-8 -*-

"""
selection.criteria
~~~~~~~~~~~~~~~~~~

Information criteria for the AR order p and the proportion-of-variance
rule for the number of components J.
"""
import numpy as np
from modules.exceptions import ArgumentError
from modules.logger import get_logger
from . import config

__all__ = ['information_criterion', 'criterion_table', 'select_p',
           'variance_proportions', 'select_J']

TAU = config.getfloat('selection', 'tau', fallback=0.95)
CRITERION = config.get('selection', 'criterion', fallback='AIC')

CRITERIA = ('AIC', 'BIC')

_logger = get_logger(__name__)


def _check_criterion(criterion):
    criterion = str(criterion).upper()
    if criterion not in CRITERIA:
        raise ArgumentError('Unknown criterion "%s", expected one of %s'
                            % (criterion, ', '.join(CRITERIA)))
    return criterion


def information_criterion(model, criterion=CRITERION):
    """
    sum_j { n log s2_j + S_j(k_j) / s2_j } plus 2p (AIC) or log(n) p (BIC).

    :param FittedModel model: a converged fit
    :param str criterion: AIC or BIC
    :rtype: float
    """

    criterion = _check_criterion(criterion)
    params, moments, n = model.params, model.moments, model.n
    value = 0.0
    for j in range(params.J):
        s2 = params.sigma2_j[j]
        value += n * np.log(s2) + moments.S_hat(j, params.K[:, j]) / s2
    penalty = 2.0 if criterion == 'AIC' else np.log(n)
    return float(value + penalty * params.p)


def criterion_table(models, criterion=CRITERION):
    """
    (p, value) rows ordered by p.

    :rtype: list[tuple[int, float]]
    """

    rows = [(model.params.p, information_criterion(model, criterion)) for model in models]
    return sorted(rows, key=lambda row: row[0])


def select_p(models, criterion=CRITERION):
    """
    AR order with the smallest criterion; ties go to the smaller p.

    :param models: fitted models, one per candidate p
    :rtype: int
    :raises ArgumentError: if ``models`` is empty
    """

    models = list(models)
    if not models:
        raise ArgumentError('No candidate models to select p from')
    table = criterion_table(models, criterion)
    best_p, best_value = table[0]
    for p, value in table[1:]:
        if value < best_value:
            best_p, best_value = p, value
    _logger.info('%s selects p=%d (%s)' % (
        _check_criterion(criterion), best_p,
        ', '.join('p=%d: %.6g' % row for row in table)))
    return best_p


def variance_proportions(model):
    """
    Cumulative shares of the sample variances of the smoothed score series.

    :param model: a FittedModel, or an (n, J) score matrix
    :rtype: numpy.ndarray
    """

    scores = model.moments.alpha if hasattr(model, 'moments') else np.asarray(model, dtype=float)
    variances = np.var(scores, axis=0, ddof=1) if len(scores) > 1 else np.zeros(scores.shape[1])
    total = variances.sum()
    if total <= 0:
        return np.ones(len(variances))
    return np.cumsum(variances) / total


def select_J(model, tau=TAU):
    """Smallest J whose cumulative score-variance share reaches ``tau``."""
    if not 0 < tau <= 1:
        raise ArgumentError('tau must lie in (0, 1], got %r' % tau)
    shares = variance_proportions(model)
    # Guard the last share against rounding below 1
    shares[-1] = 1.0
    J = int(np.argmax(shares >= tau - 1e-12)) + 1
    _logger.info('Variance shares %s select J=%d' % (np.round(shares, 4).tolist(), J))
    return J
