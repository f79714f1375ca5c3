# -*- coding: utf-8 -*-

import os
from configparser import ConfigParser

_MODULE_DIR = os.path.dirname(os.path.abspath(__file__))

# Read simulation settings
config = ConfigParser(converters={
    'list': lambda s: [i.strip() for i in s.split(',') if i.strip()]
})
config.read(os.path.join(_MODULE_DIR, 'settings.ini'))

from .domain import DOMAIN_AREA, square_with_hole, in_domain, eval_grid, sample_locations
from .truth import TruthFunctions, SimSetup, SETUPS, VARIANCE_LEVELS
from .generate import SimulatedData, generate
from .metrics import miae, principal_angle
from .study import StudyOptions, StudyResult, run_study, fit_sfpc, fit_mfpc

__all__ = [
    'config',
    'DOMAIN_AREA',
    'square_with_hole',
    'in_domain',
    'eval_grid',
    'sample_locations',
    'TruthFunctions',
    'SimSetup',
    'SETUPS',
    'VARIANCE_LEVELS',
    'SimulatedData',
    'generate',
    'miae',
    'principal_angle',
    'StudyOptions',
    'StudyResult',
    'run_study',
    'fit_sfpc',
    'fit_mfpc'
]
