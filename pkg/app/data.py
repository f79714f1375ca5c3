# -*- coding: utf-8 -*-
"""
app.data
~~~~~~~~

Long-format observation files: ``t,x,y,value[,station]`` with ``t`` an
integer time index or a ``YYYY-MM`` month.
"""

import re
from collections import namedtuple
import numpy as np
import pandas as pd
from pandas.errors import ParserError, EmptyDataError
from modules.exceptions import ParseError
from modules.logger import get_logger
from modules.sfpc import ObservationPanel

__all__ = ['LongRecord', 'parse_time', 'time_label', 'read_records', 'load_panel',
           'write_panel']

LongRecord = namedtuple('LongRecord', 't x y value station line')

HEADER = ['t', 'x', 'y', 'value']
MONTH_PATTERN = re.compile(r'^(\d{4})-(\d{2})$')

_logger = get_logger(__name__)


def parse_time(text):
    """
    ``YYYY-MM`` to a month ordinal (``'month'`` kind), anything else to an
    integer index (``'index'`` kind).

    :return: kind and ordinal
    :raises ValueError: if ``text`` is neither
    """

    text = text.strip()
    match = MONTH_PATTERN.match(text)
    if match:
        year, month = int(match.group(1)), int(match.group(2))
        if not 1 <= month <= 12:
            raise ValueError('month %d out of range' % month)
        return 'month', year * 12 + month - 1
    return 'index', int(text)


def time_label(kind, ordinal):
    if kind == 'month':
        return '%04d-%02d' % (ordinal // 12, ordinal % 12 + 1)
    return str(ordinal)


def read_records(path):
    """
    Parse and check every row of a long-format file.

    :return: records and the time kind shared by all rows
    :rtype: tuple[list[LongRecord], str]
    :raises ParseError: on a bad header, malformed row or mixed time kinds
    """

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except EmptyDataError:
        raise ParseError('Empty data file %s' % path, line=1)
    except ParserError as e:
        raise ParseError('Malformed CSV %s: %s' % (path, e))

    columns = [c.strip() for c in frame.columns]
    if columns[:4] != HEADER or len(columns) > 5 or (len(columns) == 5 and columns[4] != 'station'):
        raise ParseError('Header must be t,x,y,value[,station], got %s' % ','.join(columns), line=1)
    has_station = len(columns) == 5

    records, kinds, seen = [], set(), set()
    for line, row in enumerate(frame.itertuples(index=False, name=None), start=2):
        row = tuple(v if isinstance(v, str) else '' for v in row)
        try:
            kind, ordinal = parse_time(row[0])
            x, y, value = float(row[1]), float(row[2]), float(row[3])
        except ValueError as e:
            raise ParseError('Malformed row %s: %s' % (','.join(row), e), line=line)
        if not np.all(np.isfinite([x, y, value])):
            raise ParseError('Non-finite field in row %s' % ','.join(row), line=line)
        station = row[4].strip() if has_station else None
        key = (station, ordinal, x, y)
        if key in seen:
            raise ParseError('Duplicate observation of station %s at t=%s, (%r, %r)'
                             % (station, row[0], x, y), line=line)
        seen.add(key)
        kinds.add(kind)
        records.append(LongRecord(ordinal, x, y, value, station, line))

    if len(kinds) > 1:
        raise ParseError('Column t mixes integer indices and YYYY-MM months')
    return records, kinds.pop() if kinds else 'index'


def load_panel(path, triangulation):
    """
    Load observations as a panel. Time indices run 1..n from the earliest
    to the latest time seen, so missing times stay as empty time points.
    Rows outside the triangulated domain are dropped and reported.

    :param str path: CSV file
    :param Triangulation triangulation: the domain
    :return: the panel and the rejected rows
    :rtype: tuple[ObservationPanel, pandas.DataFrame]
    :raises ParseError: on malformed input, naming the line
    """

    records, kind = read_records(path)
    if not records:
        raise ParseError('No observations in %s' % path)

    points = np.array([(r.x, r.y) for r in records])
    inside = triangulation.contains(points)
    rejects = pd.DataFrame([(r.line, time_label(kind, r.t), r.x, r.y, 'outside domain')
                            for r, ok in zip(records, inside) if not ok],
                           columns=['line', 't', 'x', 'y', 'reason'])
    if len(rejects):
        _logger.warning('Rejected %d row(s) outside the domain, first at line %d'
                        % (len(rejects), rejects['line'].iloc[0]))

    first = min(r.t for r in records)
    last = max(r.t for r in records)
    kept = sorted((r for r, ok in zip(records, inside) if ok), key=lambda r: r.t)
    counts = np.bincount([r.t - first for r in kept], minlength=last - first + 1)
    labels = np.array([time_label(kind, t) for t in range(first, last + 1)])
    stations = None
    if kept and kept[0].station is not None:
        stations = np.array([r.station for r in kept])

    panel = ObservationPanel([(r.x, r.y) for r in kept], [r.value for r in kept],
                             counts, labels, stations)
    _logger.info('Loaded %d observations at %d time points (%d empty) from %s'
                 % (panel.size, panel.n, int((counts == 0).sum()), path))
    return panel, rejects


def write_panel(path, panel):
    """Write a panel in the long format; floats keep full precision."""
    frame = pd.DataFrame({
        't': panel.labels[panel.time_index],
        'x': [repr(float(v)) for v in panel.locations[:, 0]],
        'y': [repr(float(v)) for v in panel.locations[:, 1]],
        'value': [repr(float(v)) for v in panel.values]
    })
    if panel.stations is not None:
        frame['station'] = panel.stations
    frame.to_csv(path, index=False)
