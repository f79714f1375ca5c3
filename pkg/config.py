# -*- coding: utf-8 -*-

# Program name shown in usage and log lines
PROG_NAME = 'sfpc'

# Column labels of the per-month tables
MONTH_NAMES = ('Jan', 'Feb', 'Mar', 'Apr', 'May', 'Jun',
               'Jul', 'Aug', 'Sep', 'Oct', 'Nov', 'Dec')

# Method labels of fits with estimated and frozen AR coefficients
SFPC_METHOD = 'sFPC'
MFPC_METHOD = 'mFPC'

# Model archive directories under the output directory
MODEL_DIRS = {SFPC_METHOD: 'model_sfpc', MFPC_METHOD: 'model_mfpc'}

# Time label of every index of the fitted panel
TIME_LABELS = 'time_labels.csv'

# Grid exports, zero-padded by time index, component or horizon
SURFACE_FILE = 'surface_t%04d.csv'
PC_FILE = 'pc_%02d.csv'
FORECAST_FILE = 'forecast_h%02d.csv'

# Tables
MAE_TABLE = 'mae_by_month.csv'
MAPE_TABLE = 'mape_by_month.csv'
REJECTS_TABLE = 'rejected_rows.csv'
BOOTSTRAP_FILE = 'bootstrap_sd.csv'
SIMULATION_TABLE = 'simulation_results.csv'
SIMULATION_RUNS = 'simulation_runs.csv'
SELECTION_FILE = 'selection_%s.csv'

# Structured failure report written next to the outputs
ERROR_REPORT = 'error.json'

# Significant digits of floats in grid and table exports
FLOAT_FORMAT = '%.12g'
