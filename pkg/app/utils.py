# -*- coding: utf-8 -*-
"""
app.utils
~~~~~~~~~

Grids, per-month tables and CSV writers for the commands.
"""

import os
import numpy as np
import pandas as pd
from . import app

__all__ = ['domain_grid', 'write_grid', 'write_table', 'month_of', 'by_month',
           'mae_by_month', 'mape_by_month', 'update_method_row', 'output_path']

MONTH_NAMES = list(app.config.get('MONTH_NAMES'))
FLOAT_FORMAT = app.config.get('FLOAT_FORMAT')


def output_path(run_config, name):
    os.makedirs(run_config.output, exist_ok=True)
    return os.path.join(run_config.output, name)


def domain_grid(triangulation, spacing):
    """
    Regular grid of the given spacing over the bounding box, restricted to
    points inside the triangulation.
    """

    low, high = triangulation.bounds
    xs = np.arange(low[0], high[0] + spacing / 2.0, spacing)
    ys = np.arange(low[1], high[1] + spacing / 2.0, spacing)
    gx, gy = np.meshgrid(xs, ys)
    points = np.column_stack([gx.ravel(), gy.ravel()])
    return points[triangulation.contains(points)]


def write_table(path, frame):
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_grid(path, points, **columns):
    """CSV of ``x,y`` plus one column per keyword, in keyword order."""
    frame = pd.DataFrame({'x': points[:, 0], 'y': points[:, 1]})
    for name, values in columns.items():
        frame[name] = values
    write_table(path, frame)


def month_of(t, start_month):
    """Calendar month (0 = Jan) of 1-based time index ``t``."""
    return (np.asarray(t) + start_month - 2) % 12


def by_month(errors, months):
    """
    Mean of ``errors`` per calendar month; months without data are NaN.

    :rtype: numpy.ndarray
    """

    errors, months = np.asarray(errors, dtype=float), np.asarray(months)
    sums = np.bincount(months, weights=errors, minlength=12)
    counts = np.bincount(months, minlength=12)
    return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


def mae_by_month(residuals, panel, start_month):
    """Mean absolute residual of each calendar month."""
    months = month_of(panel.time_index + 1, start_month)
    return by_month(np.abs(residuals), months)


def mape_by_month(predicted, truth, times, start_month):
    """Mean absolute prediction error of each calendar month."""
    return by_month(np.abs(np.asarray(predicted) - np.asarray(truth)), month_of(times, start_month))


def update_method_row(path, method, values):
    """
    Insert or replace the ``method`` row of a per-month table, keeping the
    other methods' rows in sorted order.
    """

    row = pd.DataFrame([[method] + list(values)], columns=['method'] + MONTH_NAMES)
    if os.path.isfile(path):
        frame = pd.read_csv(path)
        frame = frame[frame['method'] != method]
        row = pd.concat([frame, row], ignore_index=True)
    write_table(path, row.sort_values('method', kind='stable').reset_index(drop=True))
