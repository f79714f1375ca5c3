# -*- coding: utf-8 -*-

import os
from configparser import ConfigParser

_MODULE_DIR = os.path.dirname(os.path.abspath(__file__))

# Read selection settings
config = ConfigParser()
config.read(os.path.join(_MODULE_DIR, 'settings.ini'))

from .criteria import information_criterion, criterion_table, select_p, \
    variance_proportions, select_J
from .cv import CVPlan, CVResult, CVObjective, DemeanObjective, make_cv_plan, \
    cross_validate, cv_score, demean_cv
from .simplex import SimplexResult, simplex_search

__all__ = [
    'config',
    'information_criterion',
    'criterion_table',
    'select_p',
    'variance_proportions',
    'select_J',
    'CVPlan',
    'CVResult',
    'CVObjective',
    'DemeanObjective',
    'make_cv_plan',
    'cross_validate',
    'cv_score',
    'demean_cv',
    'SimplexResult',
    'simplex_search'
]
