# -*- coding: utf-8 -*-

import os
from configparser import ConfigParser

_MODULE_DIR = os.path.dirname(os.path.abspath(__file__))

# Read numerical settings
config = ConfigParser(converters={
    'list': lambda s: [i.strip() for i in s.split(',') if i.strip()],
    'floats': lambda s: tuple(float(i) for i in s.split(',') if i.strip())
})
config.read(os.path.join(_MODULE_DIR, 'settings.ini'))

from .model import Penalties, ModelParams, ModelBases, FitConfig, BlockStep, \
    IterationTrace, FittedModel
from .panel import ObservationPanel
from .ar import ar_precision, ar_autocovariance, is_stationary, stabilize, simulate_ar, \
    simulate_scores
from .state_space import StateSpaceSpec, LatentMoments, kalman_filter, \
    kalman_smoother, extract_moments, lag_product_sums
from .objective import neg2_complete_loglik, q_value
from .mstep import sphere_minimize, update_theta_b, update_theta_c, update_sigma2, \
    update_sigma_j, update_theta_column, update_theta_columns, reorthonormalize, \
    update_Theta, update_K
from .fitter import e_step, initialize, canonicalize, fit, fitted_values
from .forecast import ForecastResult, reconstruct, mean_surface, pc_surfaces, forecast
from .archive import save_model, load_model, write_matrix, read_matrix
from .demean import DemeanResult, demean_two_stage, remove_main_effects, main_effect_rows, \
    main_effects_at

__all__ = [
    'config',
    'Penalties', 'ModelParams', 'ModelBases', 'FitConfig', 'BlockStep', 'IterationTrace',
    'FittedModel',
    'ObservationPanel',
    'ar_precision', 'ar_autocovariance', 'is_stationary', 'stabilize', 'simulate_ar',
    'simulate_scores',
    'StateSpaceSpec', 'LatentMoments', 'kalman_filter', 'kalman_smoother', 'extract_moments',
    'lag_product_sums',
    'neg2_complete_loglik', 'q_value',
    'sphere_minimize', 'update_theta_b', 'update_theta_c', 'update_sigma2',
    'update_sigma_j', 'update_theta_column', 'update_theta_columns', 'reorthonormalize',
    'update_Theta', 'update_K',
    'e_step', 'initialize', 'canonicalize', 'fit', 'fitted_values',
    'ForecastResult', 'reconstruct', 'mean_surface', 'pc_surfaces', 'forecast',
    'save_model', 'load_model', 'write_matrix', 'read_matrix',
    'DemeanResult', 'demean_two_stage', 'remove_main_effects', 'main_effect_rows',
    'main_effects_at'
]
